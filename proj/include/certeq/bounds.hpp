#pragma once

#include <map>
#include <string>
#include <utility>

#include "certeq/riccati.hpp"
#include "certeq/transient.hpp"

namespace certeq {

// Size constants entering every bound. gamma_star is
// 1 + max{||A||, ||B||, ||P||, ||K||} (plus ||C||, ||Lkf|| for observer
// problems); plus_norms holds the ||.||+1 values by name.
struct SystemConstants {
    double gamma_star = 1.0;
    double S_norm = 0.0;  // ||B R^{-1} B'||
    std::map<std::string, double> plus_norms;
};

SystemConstants make_constants(const LinearSystem& sys, const CostParams& cost,
                               const RiccatiSolution& sol);
SystemConstants make_constants_lqg(const LQGSystem& sys, const RiccatiSolution& sol,
                                   const Mat& Lkf);

struct BoundReport {
    double bound_value = 0.0;
    bool applicable = false;
    double applicability_margin = 0.0;  // smallest precondition slack
    std::map<std::string, double> components;
};

// Riccati perturbation bound from the fixed-point argument:
//   6 eps (tau(L,gamma)^2/(1-gamma^2)) ||A||+^2 ||P||+^2 ||B||+ ||R^{-1}||+,
// applicable when the value is below the contraction thresholds
// min{(1-gamma^2)/(128 tau^2 ||L||^2 ||S||), 1/||S||, 1/2} and
// eps <= min{1, ||B||}. Requires sigma_min(P) >= 1; otherwise the cost is
// rescaled internally (components["rescaled"] = 1) before evaluating.
BoundReport dare_bound_fixed_point(const LinearSystem& sys, const CostParams& cost,
                                   const RiccatiSolution& sol, double eps, double gamma);

// Riccati perturbation bound routed through controllability:
//   32 eps ell^{5/2} tau(A,rho)^3 beta^{2(ell-1)} (1 + 1/nu)
//   (1+||B||)^2 ||P|| max{||Q||,||R||}/min{sigma_min(R), sigma_min(Q)},
// beta = max{1, eps tau(A,rho) + rho}; applicable when the value is <= 1.
BoundReport dare_bound_direct(const LinearSystem& sys, const CostParams& cost,
                              const RiccatiSolution& sol, double eps, double rho,
                              long ell);

// Gain perturbation: ||Khat - K|| <= 7 f_eps Gamma^3 / sigma_min(R),
// valid for Riccati perturbations of size f_eps < 1.
double gain_perturb_bound(const SystemConstants& consts, double f_eps,
                          double sigma_min_R);

// Certifies stability of the perturbed closed loop: when
// 7 Gamma^3 k_gap <= (1-gamma)/(2 tau(L,gamma)) the perturbed loop
// satisfies tau(A + B Khat, (1+gamma)/2) <= tau(L, gamma).
std::pair<bool, double> stability_margin_check(const SystemConstants& consts,
                                               const RiccatiSolution& sol,
                                               double k_gap, double gamma);

// Suboptimality gap from a Riccati perturbation of size f_eps:
//   200 sigma_w^2 d Gamma^9 (tau_L^2/(1-gamma^2)) f_eps^2,
// applicable when the value is <= sigma_w^2.
BoundReport gap_bound_meta(const SystemConstants& consts, double f_eps,
                           double gamma, double tau_L, long d, double sigma_w);

// End-to-end suboptimality gap in the parameter error eps: the meta bound
// evaluated at f_eps = dare_bound_direct(eps), so the leading constant is
// C0 = 200 * 32^2 = 204800 (recorded in the report).
BoundReport gap_bound_fast_rate(const LinearSystem& sys, const CostParams& cost,
                                const RiccatiSolution& sol, double eps, double rho,
                                long ell, double gamma, double sigma_w, long d);

}  // namespace certeq
