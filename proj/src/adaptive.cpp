#include "certeq/adaptive.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "certeq/random.hpp"

namespace certeq {

IdResult least_squares_id(const Mat& states, const Mat& inputs, double ridge_lambda) {
    const Eigen::Index n = states.rows();
    const Eigen::Index d = inputs.rows();
    const Eigen::Index N = inputs.cols();
    if (states.cols() != N + 1) {
        throw DimensionError("least_squares_id: states must have one more column than inputs");
    }
    if (N < n + d) throw DomainError("least_squares_id: need at least n + d samples");
    if (ridge_lambda < 0.0) throw DomainError("least_squares_id: ridge_lambda must be >= 0");

    Mat Z(n + d, N);
    Z.topRows(n) = states.leftCols(N);
    Z.bottomRows(d) = inputs;
    const Mat Y = states.rightCols(N);

    const Mat gram = symmetrize(Z * Z.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
    IdResult out;
    out.cov_min_eig = es.eigenvalues().minCoeff();
    if (ridge_lambda == 0.0 &&
        out.cov_min_eig <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())) {
        throw SingularMatrixError("least_squares_id: regressor Gram matrix is rank deficient");
    }
    const Mat reg = gram + ridge_lambda * Mat::Identity(n + d, n + d);
    // Theta' solves reg * Theta' = Z Y', so Theta = [Ahat, Bhat].
    const Mat theta = solve_linear(reg, Z * Y.transpose()).transpose();
    out.Ahat = theta.leftCols(n);
    out.Bhat = theta.rightCols(d);
    return out;
}

RegretTrace run_adaptive(const LinearSystem& sys, const CostParams& cost,
                         const AdaptiveConfig& config) {
    const Eigen::Index n = sys.n();
    const Eigen::Index d = sys.d();
    if (config.K0.rows() != d || config.K0.cols() != n) {
        throw DimensionError("run_adaptive: K0 must be d x n");
    }
    if (!(config.exploration_exponent > 0.0 && config.exploration_exponent < 1.0)) {
        throw DomainError("run_adaptive: exploration_exponent must lie in (0, 1)");
    }
    if (config.horizon < 1 || config.epoch_base < 1) {
        throw DomainError("run_adaptive: horizon and epoch_base must be >= 1");
    }
    {
        const double rho0 = spectral_radius(sys.A + sys.B * config.K0);
        if (rho0 >= 1.0) throw StabilityError("run_adaptive: K0 does not stabilize", rho0);
    }

    const RiccatiSolution opt = solve_dare(sys, cost);
    RegretTrace trace;
    trace.J_star = cost_of_gain(sys, cost, opt.K, config.sigma_w);
    const SystemConstants consts = make_constants(sys, cost, opt);
    const double gamma_opt = default_gamma(opt.L);

    const long T = config.horizon;
    trace.cum_cost.reserve(T);
    trace.regret.reserve(T);

    GaussianStream rng(config.seed);
    Mat states(n, T + 1);
    Mat inputs(d, T);
    Vec x = rng.normal_vector(n);
    states.col(0) = x;

    Mat K = config.K0;
    Mat Ahat_prev, Bhat_prev;
    bool have_prev_est = false;
    long next_boundary = config.epoch_base;
    long epoch_len = config.epoch_base;
    double cum = 0.0;

    for (long t = 0; t < T; ++t) {
        const double var_eta = config.exploration_scale * config.sigma_w * config.sigma_w *
                               std::pow(static_cast<double>(t + 1),
                                        -config.exploration_exponent);
        const Vec u = K * x + std::sqrt(var_eta) * rng.normal_vector(d);
        inputs.col(t) = u;
        cum += x.dot(cost.Q * x) + u.dot(cost.R * u);
        trace.cum_cost.push_back(cum);
        trace.regret.push_back(cum - static_cast<double>(t + 1) * trace.J_star);
        x = sys.A * x + sys.B * u + config.sigma_w * rng.normal_vector(n);
        states.col(t + 1) = x;
        if (x.norm() > 1e150) {
            trace.failed = true;
            trace.fail_step = t;
            return trace;
        }

        if (t + 1 == next_boundary && t + 1 < T) {
            EpochRecord rec;
            rec.start_step = t + 1;
            try {
                const IdResult id = least_squares_id(states.leftCols(t + 2),
                                                     inputs.leftCols(t + 1),
                                                     config.ridge_lambda);
                rec.cov_min_eig = id.cov_min_eig;
                rec.a_err = operator_norm(id.Ahat - sys.A);
                rec.b_err = operator_norm(id.Bhat - sys.B);

                const RiccatiSolution est_sol =
                    solve_dare(LinearSystem(id.Ahat, id.Bhat), cost);
                const double rho_est = spectral_radius(est_sol.L);
                // Gate: the estimated closed loop must be comfortably stable
                // and its transient bound must tolerate the estimate drift
                // since the last boundary (a sufficient robustness margin).
                bool accept = rho_est < 1.0 - 1e-3;
                if (accept && have_prev_est) {
                    const double drift = operator_norm(id.Ahat - Ahat_prev) +
                                         operator_norm(id.Bhat - Bhat_prev) *
                                             (1.0 + operator_norm(est_sol.K));
                    const double g = 0.5 * (1.0 + rho_est);
                    const double tau_est = tau(est_sol.L, g).tau;
                    accept = tau_est * drift <= 0.5 * (1.0 - g);
                }
                if (accept) {
                    K = est_sol.K;
                    rec.gain_updated = true;
                }
                Ahat_prev = id.Ahat;
                Bhat_prev = id.Bhat;
                have_prev_est = true;
                // Instrumentation only: the certificate evaluated at the truth.
                rec.margin_certified =
                    stability_margin_check(consts, opt,
                                           operator_norm(est_sol.K - opt.K), gamma_opt)
                        .first;
            } catch (const std::exception&) {
                // Identification or synthesis failed; keep the current gain.
            }
            rec.executed_gain_stable = spectral_radius(sys.A + sys.B * K) < 1.0;
            rec.K = K;
            trace.epochs.push_back(rec);
            epoch_len *= 2;
            next_boundary += epoch_len;
        }
    }

    trace.slope_fit = fit_regret_slope(trace, 0.5);
    return trace;
}

SlopeFit fit_regret_slope(const RegretTrace& trace, double window) {
    if (!(window > 0.0 && window <= 1.0)) {
        throw DomainError("fit_regret_slope: window must lie in (0, 1]");
    }
    const long T = static_cast<long>(trace.regret.size());
    if (T < 2) throw DomainError("fit_regret_slope: trace too short");
    const long start = std::max<long>(0, static_cast<long>(
                                             std::floor((1.0 - window) * static_cast<double>(T))));
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    long m = 0;
    bool any_positive = false;
    for (long t = start; t < T; ++t) {
        const double r = trace.regret[t];
        if (r > 0.0) any_positive = true;
        const double lx = std::log(static_cast<double>(t + 1));
        const double ly = std::log(std::max(r, 1e-9));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
        ++m;
    }
    if (!any_positive) {
        throw DomainError("fit_regret_slope: regret is nonpositive throughout the window");
    }
    const double mm = static_cast<double>(m);
    const double vx = sxx - sx * sx / mm;
    const double vy = syy - sy * sy / mm;
    const double cxy = sxy - sx * sy / mm;
    SlopeFit fit;
    fit.slope = cxy / vx;
    fit.intercept = (sy - fit.slope * sx) / mm;
    fit.r2 = vy > 0.0 ? (cxy * cxy) / (vx * vy) : 1.0;
    return fit;
}

}  // namespace certeq
