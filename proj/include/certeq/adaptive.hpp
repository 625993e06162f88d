#pragma once

#include <cstdint>
#include <vector>

#include "certeq/bounds.hpp"
#include "certeq/lqr_eval.hpp"

namespace certeq {

struct AdaptiveConfig {
    long horizon = 100000;
    long epoch_base = 200;          // first epoch length; epochs double
    double exploration_exponent = 0.5;   // sigma_eta,t^2 = scale * sigma_w^2 * t^{-exponent}
    double exploration_scale = 1.0;
    double ridge_lambda = 1e-6;
    std::uint64_t seed = 0;
    double sigma_w = 1.0;
    Mat K0;                         // initial stabilizing gain (required)
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

struct EpochRecord {
    long start_step = 0;
    double a_err = 0.0;             // ||Ahat - A|| at the boundary
    double b_err = 0.0;             // ||Bhat - B||
    double cov_min_eig = 0.0;
    bool gain_updated = false;      // whether the re-synthesized gain was adopted
    bool margin_certified = false;  // stability_margin_check verdict (instrumentation)
    bool executed_gain_stable = true;  // rho(A + B K) < 1 for the gain actually played
    Mat K;                          // gain in force after the boundary
};

struct RegretTrace {
    std::vector<double> cum_cost;  // length T
    std::vector<double> regret;    // cum_cost[t] - (t+1) * J_star
    std::vector<EpochRecord> epochs;
    SlopeFit slope_fit;            // fit over the trailing half by default
    double J_star = 0.0;
    bool failed = false;           // state diverged; trace truncated at fail_step
    long fail_step = -1;
};

// Ridge regression of x_{t+1} on [x_t; u_t] over columns 0..N-1 of inputs
// (states has N+1 columns). Returns (Ahat, Bhat) and the smallest eigenvalue
// of the regressor Gram matrix.
struct IdResult {
    Mat Ahat, Bhat;
    double cov_min_eig = 0.0;
};
IdResult least_squares_id(const Mat& states, const Mat& inputs, double ridge_lambda);

// Epsilon-greedy certainty-equivalent adaptive LQR: play u = K_i x + eta with
// decaying exploration noise, re-identify and re-synthesize the gain at
// doubling epoch boundaries, keep the previous gain when the new design
// fails the stability gate. Deterministic given config.seed.
RegretTrace run_adaptive(const LinearSystem& sys, const CostParams& cost,
                         const AdaptiveConfig& config);

// OLS of log max(regret(t), 1e-9) on log t over the trailing `window`
// fraction of the horizon.
SlopeFit fit_regret_slope(const RegretTrace& trace, double window = 0.5);

}  // namespace certeq
