#pragma once

#include "certeq/bounds.hpp"
#include "certeq/lqr_eval.hpp"

namespace certeq {

// Observer-based controller: u = Khat xhat with the estimate update
//   xhat_{t+1} = Ahat xhat_t + Bhat u_t + Lhat (y_t - Chat xhat_t).
// Lhat multiplies the innovation with a plus sign, so the stable observer
// matrix is Ahat - Lhat Chat (Lhat = -kalman_gain().first at the truth).
struct ObserverController {
    Mat Ahat, Bhat, Chat;
    Mat Khat;  // d x n
    Mat Lhat;  // n x p
};

// Plant state and observer state stacked into one 2n-dimensional system:
//   [x; xhat]_{t+1} = Mhat [x; xhat]_t + noise_map [w_t; v_t].
struct LiftedClosedLoop {
    Mat Mhat;       // [[A, B Khat], [Lhat C, (Ahat + Bhat Khat) - Lhat Chat]]
    Mat Nhat;       // S^{-1} Mhat S with S = [[I, 0], [I, I]]
    Mat noise_map;  // blockdiag(I, Lhat)
    Mat S;
};

struct LQGOptimal {
    Mat K_star;      // LQR gain for (A, B, C'QC, R)
    Mat Lkf_star;    // filter gain from kalman_gain (minus-sign convention)
    Mat P_star;      // control Riccati solution
    Mat Sigma_star;  // filter Riccati solution
    double J_star = 0.0;
    ObserverController oc;  // the optimal interconnection at the truth
};

LQGOptimal lqg_optimal(const LQGSystem& sys);

LiftedClosedLoop build_lifted(const LQGSystem& plant, const ObserverController& oc);

// Exact infinite-horizon average cost of the interconnection, evaluated
// through the stationary covariance of the lifted loop plus the Tr(QV)
// offset from measurement noise entering the output cost.
double lqg_cost(const LQGSystem& plant, const ObserverController& oc);

// Controller synthesized by treating the estimates as the truth:
// Khat = LQR gain for (Ahat, Bhat, Chat' Q Chat, R).
ObserverController certainty_equivalent_oc(const Mat& Ahat, const Mat& Bhat,
                                           const Mat& Chat, const Mat& Lhat,
                                           const Mat& Q, const Mat& R);

// Suboptimality bound of the certainty-equivalent interconnection given the
// combined perturbation size eps_bar:
//   C1 max{sigma_w^2, sigma_v^2} (Tr(C'QC) + Tr(R))
//      (tau_N^6/(1-gamma^2)^3) Gamma^6 eps_bar^2,  C1 = 1136 * 64,
// certified when eps_bar <= (1-gamma)/(20 Gamma tau_N).
BoundReport lqg_gap_bound(const LQGSystem& plant, const SystemConstants& consts,
                          double eps_bar, double gamma, double tau_N);

// End-to-end version in the parameter error eps: eps_bar is expanded as
// 7 Gamma^3 / sigma_min(R) times the fixed-point Riccati bound evaluated at
// a 3 ||C||+ ||Q||+ eps cost perturbation, then fed to lqg_gap_bound.
BoundReport lqg_gap_bound_fast_rate(const LQGSystem& plant, double eps, double gamma);

// Monte-Carlo counterpart of lqg_cost: one simulated trajectory of the
// interconnection with w ~ N(0, W), v ~ N(0, V); the controller sees y_t
// only when forming u_{t+1} (one-step delay). Deterministic given seed.
RolloutSummary lqg_simulate_rollout(const LQGSystem& plant, const ObserverController& oc,
                                    long horizon, std::uint64_t seed,
                                    long burn_in = 1000);

}  // namespace certeq
