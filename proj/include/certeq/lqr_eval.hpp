#pragma once

#include "certeq/riccati.hpp"

namespace certeq {

enum class GapMethod { exact, monte_carlo };

struct GapReport {
    double J_star = 0.0;
    double J_hat = 0.0;
    double gap = 0.0;
    Mat sigma_K;  // stationary state covariance under the evaluated gain
    GapMethod method = GapMethod::exact;
};

struct RolloutSummary {
    double avg_cost = 0.0;
    long horizon = 0;
    long burn_in = 0;
    double final_state_norm = 0.0;
    double max_state_norm = 0.0;
};

// Infinite-horizon average cost of u = Kx under noise variance sigma_w^2:
// Tr((Q + K'RK) Sigma(K)) with Sigma(K) the stationary covariance. The dual
// evaluation sigma_w^2 Tr(dlyap(L, Q + K'RK)) is cross-checked internally.
double cost_of_gain(const LinearSystem& sys, const CostParams& cost, const Mat& K,
                    double sigma_w);

// Suboptimality gap of K via the stationary-covariance trace formula
// Tr(Sigma(K) (K - K*)' (R + B'P*B) (K - K*)), cross-checked against the
// direct cost difference to 1e-8 relative.
GapReport exact_gap(const LinearSystem& sys, const CostParams& cost,
                    const RiccatiSolution& sol, const Mat& K, double sigma_w);

// Time-average cost of one simulated trajectory: x0 ~ N(0, I) (or zero when
// zero_init), w_t ~ N(0, sigma_w^2 I); the first burn_in steps are discarded
// and `horizon` further steps are averaged. Deterministic given seed.
RolloutSummary simulate_rollout(const LinearSystem& sys, const CostParams& cost,
                                const Mat& K, double sigma_w, long horizon,
                                std::uint64_t seed, long burn_in = 1000,
                                bool zero_init = false);

}  // namespace certeq
