#include "certeq/lqr_eval.hpp"

#include <cmath>

#include "certeq/random.hpp"

namespace certeq {

namespace {

Mat closed_loop(const LinearSystem& sys, const Mat& K) {
    if (K.rows() != sys.d() || K.cols() != sys.n()) {
        throw DimensionError("gain must be d x n");
    }
    return sys.A + sys.B * K;
}

// Stationary covariance sum_k L^k (sigma_w^2 I) (L')^k.
Mat stationary_covariance(const Mat& L, double sigma_w) {
    return solve_dlyap(L.transpose(),
                       sigma_w * sigma_w * Mat::Identity(L.rows(), L.cols()));
}

}  // namespace

double cost_of_gain(const LinearSystem& sys, const CostParams& cost, const Mat& K,
                    double sigma_w) {
    const Mat L = closed_loop(sys, K);
    const double rho = spectral_radius(L);
    if (rho >= 1.0 - 1e-9) {
        throw StabilityError("cost_of_gain: closed loop is not Schur stable", rho);
    }
    const Mat stage = symmetrize(cost.Q + K.transpose() * cost.R * K);
    const Mat sigma = stationary_covariance(L, sigma_w);
    const double j = (stage * sigma).trace();
    // Dual evaluation through the value matrix of the closed loop.
    const double j_dual = sigma_w * sigma_w * solve_dlyap(L, stage).trace();
    if (std::abs(j - j_dual) > 1e-9 * (1.0 + std::abs(j))) {
        throw ConvergenceError("cost_of_gain: primal and dual evaluations disagree", 0,
                               std::abs(j - j_dual));
    }
    return j;
}

GapReport exact_gap(const LinearSystem& sys, const CostParams& cost,
                    const RiccatiSolution& sol, const Mat& K, double sigma_w) {
    const Mat L = closed_loop(sys, K);
    const double rho = spectral_radius(L);
    if (rho >= 1.0 - 1e-9) {
        throw StabilityError("exact_gap: closed loop is not Schur stable", rho);
    }
    GapReport rep;
    rep.method = GapMethod::exact;
    rep.sigma_K = stationary_covariance(L, sigma_w);
    const Mat dK = K - sol.K;
    const Mat inner = cost.R + sys.B.transpose() * sol.P * sys.B;
    rep.gap = (rep.sigma_K * dK.transpose() * inner * dK).trace();
    rep.J_star = cost_of_gain(sys, cost, sol.K, sigma_w);
    rep.J_hat = rep.J_star + rep.gap;
    // The trace formula must reproduce the direct cost difference.
    const double gap_direct = cost_of_gain(sys, cost, K, sigma_w) - rep.J_star;
    if (std::abs(rep.gap - gap_direct) > 1e-8 * (1.0 + std::abs(rep.gap))) {
        throw ConvergenceError("exact_gap: trace formula and cost difference disagree", 0,
                               std::abs(rep.gap - gap_direct));
    }
    return rep;
}

RolloutSummary simulate_rollout(const LinearSystem& sys, const CostParams& cost,
                                const Mat& K, double sigma_w, long horizon,
                                std::uint64_t seed, long burn_in, bool zero_init) {
    if (horizon < 1) throw DomainError("simulate_rollout: horizon must be >= 1");
    if (burn_in < 0) throw DomainError("simulate_rollout: burn_in must be nonnegative");
    if (K.rows() != sys.d() || K.cols() != sys.n()) {
        throw DimensionError("gain must be d x n");
    }
    GaussianStream rng(seed);
    const Eigen::Index n = sys.n();
    Vec x = zero_init ? Vec(Vec::Zero(n)) : Vec(rng.normal_vector(n));
    RolloutSummary out;
    out.horizon = horizon;
    out.burn_in = burn_in;
    double acc = 0.0;
    for (long t = 0; t < burn_in + horizon; ++t) {
        const Vec u = K * x;
        if (t >= burn_in) {
            acc += x.dot(cost.Q * x) + u.dot(cost.R * u);
        }
        x = sys.A * x + sys.B * u + sigma_w * rng.normal_vector(n);
        const double xn = x.norm();
        out.max_state_norm = std::max(out.max_state_norm, xn);
        if (xn > 1e150) {
            throw DivergenceError("simulate_rollout: state norm exceeded 1e150", t);
        }
    }
    out.final_state_norm = x.norm();
    out.avg_cost = acc / static_cast<double>(horizon);
    return out;
}

}  // namespace certeq
