#include "certeq/lqg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "certeq/random.hpp"

namespace certeq {

namespace {

// Symmetric PSD square root, clamping tiny negative eigenvalues to zero.
Mat psd_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
    Vec vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

void check_oc_dims(const LQGSystem& plant, const ObserverController& oc) {
    const Eigen::Index n = plant.n(), d = plant.d(), p = plant.p();
    if (oc.Ahat.rows() != n || oc.Ahat.cols() != n) throw DimensionError("Ahat must be n x n");
    if (oc.Bhat.rows() != n || oc.Bhat.cols() != d) throw DimensionError("Bhat must be n x d");
    if (oc.Chat.rows() != p || oc.Chat.cols() != n) throw DimensionError("Chat must be p x n");
    if (oc.Khat.rows() != d || oc.Khat.cols() != n) throw DimensionError("Khat must be d x n");
    if (oc.Lhat.rows() != n || oc.Lhat.cols() != p) throw DimensionError("Lhat must be n x p");
}

}  // namespace

LQGOptimal lqg_optimal(const LQGSystem& sys) {
    LQGOptimal out;
    const RiccatiSolution ctrl = solve_dare(LinearSystem(sys.A, sys.B),
                                            CostParams(sys.state_cost(), sys.R));
    out.K_star = ctrl.K;
    out.P_star = ctrl.P;
    auto [lkf, sigma] = kalman_gain(sys);
    out.Lkf_star = lkf;
    out.Sigma_star = sigma;
    out.oc = ObserverController{sys.A, sys.B, sys.C, ctrl.K, -lkf};
    out.J_star = lqg_cost(sys, out.oc);
    return out;
}

LiftedClosedLoop build_lifted(const LQGSystem& plant, const ObserverController& oc) {
    check_oc_dims(plant, oc);
    const Eigen::Index n = plant.n(), p = plant.p();
    LiftedClosedLoop lift;
    lift.Mhat.resize(2 * n, 2 * n);
    lift.Mhat.topLeftCorner(n, n) = plant.A;
    lift.Mhat.topRightCorner(n, n) = plant.B * oc.Khat;
    lift.Mhat.bottomLeftCorner(n, n) = oc.Lhat * plant.C;
    lift.Mhat.bottomRightCorner(n, n) = oc.Ahat + oc.Bhat * oc.Khat - oc.Lhat * oc.Chat;

    lift.S = Mat::Identity(2 * n, 2 * n);
    lift.S.bottomLeftCorner(n, n) = Mat::Identity(n, n);
    Mat S_inv = Mat::Identity(2 * n, 2 * n);
    S_inv.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    lift.Nhat = S_inv * lift.Mhat * lift.S;

    lift.noise_map = Mat::Zero(2 * n, n + p);
    lift.noise_map.topLeftCorner(n, n) = Mat::Identity(n, n);
    lift.noise_map.bottomRightCorner(n, p) = oc.Lhat;
    return lift;
}

double lqg_cost(const LQGSystem& plant, const ObserverController& oc) {
    const LiftedClosedLoop lift = build_lifted(plant, oc);
    const double rho = spectral_radius(lift.Mhat);
    if (rho >= 1.0 - 1e-9) {
        throw StabilityError("lqg_cost: lifted closed loop is not Schur stable", rho);
    }
    const Eigen::Index n = plant.n();
    Mat noise_cov = Mat::Zero(2 * n, 2 * n);
    noise_cov.topLeftCorner(n, n) = plant.W;
    noise_cov.bottomRightCorner(n, n) = oc.Lhat * plant.V * oc.Lhat.transpose();
    const Mat sigma = solve_dlyap(lift.Mhat.transpose(), symmetrize(noise_cov));

    Mat stage = Mat::Zero(2 * n, 2 * n);
    stage.topLeftCorner(n, n) = plant.state_cost();
    stage.bottomRightCorner(n, n) = oc.Khat.transpose() * plant.R * oc.Khat;
    return (stage * sigma).trace() + (plant.Q * plant.V).trace();
}

ObserverController certainty_equivalent_oc(const Mat& Ahat, const Mat& Bhat,
                                           const Mat& Chat, const Mat& Lhat,
                                           const Mat& Q, const Mat& R) {
    const Mat Qc = symmetrize(Chat.transpose() * Q * Chat);
    const RiccatiSolution sol = solve_dare(LinearSystem(Ahat, Bhat), CostParams(Qc, R));
    return ObserverController{Ahat, Bhat, Chat, sol.K, Lhat};
}

BoundReport lqg_gap_bound(const LQGSystem& plant, const SystemConstants& consts,
                          double eps_bar, double gamma, double tau_N) {
    if (eps_bar < 0.0) throw DomainError("lqg_gap_bound: eps_bar must be nonnegative");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("lqg_gap_bound: need 0 < gamma < 1");
    constexpr double kC1 = 1136.0 * 64.0;
    const double noise = std::max(operator_norm(plant.W), operator_norm(plant.V));
    const double trace_term = plant.state_cost().trace() + plant.R.trace();
    const double one_m_g2 = 1.0 - gamma * gamma;

    BoundReport rep;
    rep.bound_value = kC1 * noise * trace_term * std::pow(tau_N, 6.0) /
                      std::pow(one_m_g2, 3.0) * std::pow(consts.gamma_star, 6.0) *
                      eps_bar * eps_bar;
    const double cert_cap = (1.0 - gamma) / (20.0 * consts.gamma_star * tau_N);
    rep.applicability_margin = std::min(cert_cap - eps_bar, 1.0 - eps_bar);
    rep.applicable = rep.applicability_margin >= 0.0;
    rep.components["C1"] = kC1;
    rep.components["eps_bar"] = eps_bar;
    rep.components["tau_N"] = tau_N;
    rep.components["gamma"] = gamma;
    rep.components["gamma_star"] = consts.gamma_star;
    rep.components["cert_cap"] = cert_cap;
    return rep;
}

BoundReport lqg_gap_bound_fast_rate(const LQGSystem& plant, double eps, double gamma) {
    if (eps < 0.0) throw DomainError("lqg_gap_bound_fast_rate: eps must be nonnegative");
    const LinearSystem ctrl_sys(plant.A, plant.B);
    const CostParams ctrl_cost(plant.state_cost(), plant.R);
    const RiccatiSolution sol = solve_dare(ctrl_sys, ctrl_cost);
    auto [lkf, sigma_kf] = kalman_gain(plant);
    const SystemConstants consts = make_constants_lqg(plant, sol, lkf);

    const LQGOptimal opt = lqg_optimal(plant);
    const Mat N_star = build_lifted(plant, opt.oc).Nhat;
    const double tau_N = tau(N_star, gamma, /*allow_boundary=*/true).tau;

    // Riccati perturbation at the effective cost-perturbation size
    // 3 ||C||+ ||Q||+ eps, mapped to a gain gap and fed to the gap bound.
    const double eff_eps = 3.0 * (operator_norm(plant.C) + 1.0) *
                           (operator_norm(plant.Q) + 1.0) * eps;
    const BoundReport ric = dare_bound_fixed_point(ctrl_sys, ctrl_cost, sol, eff_eps,
                                                   default_gamma(sol.L));
    const double eps_bar = 7.0 * std::pow(consts.gamma_star, 3.0) /
                           min_singular_value(ctrl_cost.R) * ric.bound_value;

    BoundReport rep = lqg_gap_bound(plant, consts, eps_bar, gamma, tau_N);
    rep.applicable = rep.applicable && ric.applicable;
    rep.applicability_margin = std::min(rep.applicability_margin, ric.applicability_margin);
    for (const auto& [k, v] : ric.components) rep.components["riccati_" + k] = v;
    rep.components["eff_eps"] = eff_eps;
    rep.components["eps"] = eps;
    return rep;
}

RolloutSummary lqg_simulate_rollout(const LQGSystem& plant, const ObserverController& oc,
                                    long horizon, std::uint64_t seed, long burn_in) {
    if (horizon < 1) throw DomainError("lqg_simulate_rollout: horizon must be >= 1");
    if (burn_in < 0) throw DomainError("lqg_simulate_rollout: burn_in must be nonnegative");
    check_oc_dims(plant, oc);
    const Eigen::Index n = plant.n(), p = plant.p();
    const Mat W_sqrt = psd_sqrt(plant.W);
    const Mat V_sqrt = psd_sqrt(plant.V);
    GaussianStream rng(seed);
    Vec x = rng.normal_vector(n);
    Vec xhat = Vec::Zero(n);
    RolloutSummary out;
    out.horizon = horizon;
    out.burn_in = burn_in;
    double acc = 0.0;
    for (long t = 0; t < burn_in + horizon; ++t) {
        const Vec u = oc.Khat * xhat;
        const Vec v = V_sqrt * rng.normal_vector(p);
        const Vec y = plant.C * x + v;
        if (t >= burn_in) {
            acc += y.dot(plant.Q * y) + u.dot(plant.R * u);
        }
        xhat = oc.Ahat * xhat + oc.Bhat * u + oc.Lhat * (y - oc.Chat * xhat);
        x = plant.A * x + plant.B * u + W_sqrt * rng.normal_vector(n);
        const double xn = x.norm();
        out.max_state_norm = std::max(out.max_state_norm, xn);
        if (xn > 1e150 || xhat.norm() > 1e150) {
            throw DivergenceError("lqg_simulate_rollout: state norm exceeded 1e150", t);
        }
    }
    out.final_state_norm = x.norm();
    out.avg_cost = acc / static_cast<double>(horizon);
    return out;
}

}  // namespace certeq
