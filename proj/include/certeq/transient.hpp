#pragma once

#include <optional>
#include <utility>

#include "certeq/systems.hpp"

namespace certeq {

struct TransientReport {
    double rho = 0.0;         // decay rate used, >= spectral radius
    double tau = 1.0;         // sup_k ||M^k|| rho^{-k}, always >= 1
    long argmax_k = 0;        // k attaining the sup within the truncation
    long truncation_k = 0;    // last power examined
    std::optional<double> hinf;
};

struct ControllabilityReport {
    long ell = 1;
    Mat C_ell;                // [B, AB, ..., A^{ell-1}B]
    double nu = 0.0;          // n-th singular value of C_ell
    bool is_ell_nu_controllable = false;
};

// Smallest tau with ||M^k|| <= tau * rho^k for all k. Requires
// rho > spectral_radius(M) unless allow_boundary, in which case the
// truncation cap governs.
TransientReport tau(const Mat& M, double rho, bool allow_boundary = false);

// Peak resolvent norm max_{|z|=1} ||(zI - L)^{-1}|| for Schur-stable L:
// 4096-point circle sweep plus golden-section refinement.
double hinf_norm(const Mat& L);

// ell-step controllability matrix and its margin nu = sigma_min(C_ell).
// A threshold > 0 sets the is_ell_nu_controllable flag (nu >= threshold).
ControllabilityReport controllability(const LinearSystem& sys, long ell,
                                      double threshold = 0.0);

// Bounds on powers of a perturbed matrix, with tau = tau(M, rho):
//   ||(M + D)^k||       <= tau * (tau*delta + rho)^k
//   ||(M + D)^k - M^k|| <= k * tau^2 * (tau*delta + rho)^{k-1} * delta
// for any ||D|| <= delta. Returns (pow_bound, diff_bound).
std::pair<double, double> power_perturb_bounds(const Mat& M, double rho,
                                               double delta_norm, long k);

// Lower bound on the controllability margin of any eps-perturbation:
//   nu - 3 eps ell^{3/2} tauA^2 beta^{ell-1} (||B|| + 1),
// beta = max{1, tauA*eps + rho}.
double controllability_perturb_bound(const ControllabilityReport& report,
                                     double tauA, double rho, double eps,
                                     double normB);

// Default decay rate for open loops: strictly above the spectral radius.
double default_rho(const Mat& A);

// Default decay rate for stable closed loops: midpoint to 1.
double default_gamma(const Mat& L);

}  // namespace certeq
