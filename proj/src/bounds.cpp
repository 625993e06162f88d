#include "certeq/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace certeq {

namespace {

Mat inverse_of(const Mat& m) { return solve_linear(m, Mat::Identity(m.rows(), m.cols())); }

}  // namespace

SystemConstants make_constants(const LinearSystem& sys, const CostParams& cost,
                               const RiccatiSolution& sol) {
    SystemConstants c;
    const double nA = operator_norm(sys.A);
    const double nB = operator_norm(sys.B);
    const double nP = operator_norm(sol.P);
    const double nK = operator_norm(sol.K);
    c.gamma_star = 1.0 + std::max({nA, nB, nP, nK});
    const Mat Rinv = inverse_of(cost.R);
    c.S_norm = operator_norm(sys.B * Rinv * sys.B.transpose());
    c.plus_norms["A"] = nA + 1.0;
    c.plus_norms["B"] = nB + 1.0;
    c.plus_norms["P"] = nP + 1.0;
    c.plus_norms["Rinv"] = operator_norm(Rinv) + 1.0;
    c.plus_norms["L"] = operator_norm(sol.L) + 1.0;
    return c;
}

SystemConstants make_constants_lqg(const LQGSystem& sys, const RiccatiSolution& sol,
                                   const Mat& Lkf) {
    SystemConstants c = make_constants(LinearSystem(sys.A, sys.B),
                                       CostParams(sys.state_cost(), sys.R), sol);
    const double nC = operator_norm(sys.C);
    const double nL = operator_norm(Lkf);
    c.gamma_star = std::max(c.gamma_star, 1.0 + std::max(nC, nL));
    c.plus_norms["C"] = nC + 1.0;
    c.plus_norms["Lkf"] = nL + 1.0;
    c.plus_norms["Q"] = operator_norm(sys.Q) + 1.0;
    return c;
}

BoundReport dare_bound_fixed_point(const LinearSystem& sys, const CostParams& cost,
                                   const RiccatiSolution& sol, double eps, double gamma) {
    if (eps < 0.0) throw DomainError("dare_bound_fixed_point: eps must be nonnegative");
    const double rho_L = spectral_radius(sol.L);
    if (!(gamma >= rho_L && gamma < 1.0)) {
        throw DomainError("dare_bound_fixed_point: need rho(L) <= gamma < 1");
    }

    BoundReport rep;
    const double p_min = min_singular_value(sol.P);
    const LinearSystem* use_sys = &sys;
    const CostParams* use_cost = &cost;
    const RiccatiSolution* use_sol = &sol;
    CostParams scaled_cost;
    RiccatiSolution scaled_sol;
    rep.components["rescaled"] = 0.0;
    if (p_min < 1.0 && p_min > 0.0) {
        // Dividing (Q, R) by sigma_min(P) divides P by the same factor and
        // leaves K and L unchanged, restoring sigma_min(P) >= 1.
        scaled_cost = CostParams(cost.Q / p_min, cost.R / p_min);
        scaled_sol = solve_dare(sys, scaled_cost);
        use_cost = &scaled_cost;
        use_sol = &scaled_sol;
        rep.components["rescaled"] = 1.0;
    }

    const double tau_L = tau(use_sol->L, gamma, /*allow_boundary=*/true).tau;
    const double nA1 = operator_norm(use_sys->A) + 1.0;
    const double nB = operator_norm(use_sys->B);
    const double nP1 = operator_norm(use_sol->P) + 1.0;
    const double nRinv1 = operator_norm(inverse_of(use_cost->R)) + 1.0;
    const double nL = operator_norm(use_sol->L);
    const double S_norm = operator_norm(use_sys->B * inverse_of(use_cost->R) *
                                        use_sys->B.transpose());
    const double one_m_g2 = 1.0 - gamma * gamma;

    const double nu = 6.0 * eps * (tau_L * tau_L / one_m_g2) * nA1 * nA1 * nP1 * nP1 *
                      (nB + 1.0) * nRinv1;
    const double thresh = std::min({one_m_g2 / (128.0 * tau_L * tau_L * nL * nL * S_norm),
                                    1.0 / S_norm, 0.5});
    const double eps_cap = std::min(1.0, nB);

    rep.bound_value = nu;
    rep.applicability_margin = std::min(thresh - nu, eps_cap - eps);
    rep.applicable = rep.applicability_margin >= 0.0;
    rep.components["tau_L"] = tau_L;
    rep.components["gamma"] = gamma;
    rep.components["threshold"] = thresh;
    rep.components["S_norm"] = S_norm;
    rep.components["eps"] = eps;
    return rep;
}

BoundReport dare_bound_direct(const LinearSystem& sys, const CostParams& cost,
                              const RiccatiSolution& sol, double eps, double rho,
                              long ell) {
    if (eps < 0.0) throw DomainError("dare_bound_direct: eps must be nonnegative");
    const ControllabilityReport ctrl = controllability(sys, ell);
    if (ctrl.nu <= 0.0) {
        throw ControllabilityError("dare_bound_direct: system is not ell-step controllable");
    }
    const double tau_A = tau(sys.A, rho, /*allow_boundary=*/true).tau;
    const double beta = std::max(1.0, eps * tau_A + rho);
    const double nB = operator_norm(sys.B);
    const double nP = operator_norm(sol.P);
    const double nQ = operator_norm(cost.Q);
    const double nR = operator_norm(cost.R);
    const double sQ = min_singular_value(cost.Q);
    const double sR = min_singular_value(cost.R);
    const double cond = std::max(nQ, nR) / std::min(sR, sQ);
    const double ell_d = static_cast<double>(ell);

    BoundReport rep;
    rep.bound_value = 32.0 * eps * std::pow(ell_d, 2.5) * std::pow(tau_A, 3.0) *
                      std::pow(beta, 2.0 * (ell_d - 1.0)) * (1.0 + 1.0 / ctrl.nu) *
                      (1.0 + nB) * (1.0 + nB) * nP * cond;
    rep.applicability_margin = 1.0 - rep.bound_value;
    rep.applicable = rep.applicability_margin >= 0.0;
    rep.components["tau_A"] = tau_A;
    rep.components["rho"] = rho;
    rep.components["beta"] = beta;
    rep.components["ell"] = ell_d;
    rep.components["nu"] = ctrl.nu;
    rep.components["cond"] = cond;
    rep.components["eps"] = eps;
    return rep;
}

double gain_perturb_bound(const SystemConstants& consts, double f_eps,
                          double sigma_min_R) {
    if (f_eps < 0.0 || f_eps >= 1.0) {
        throw DomainError("gain_perturb_bound: f_eps must lie in [0, 1)");
    }
    if (!(sigma_min_R > 0.0)) {
        throw DomainError("gain_perturb_bound: sigma_min_R must be positive");
    }
    return 7.0 * f_eps * std::pow(consts.gamma_star, 3.0) / sigma_min_R;
}

std::pair<bool, double> stability_margin_check(const SystemConstants& consts,
                                               const RiccatiSolution& sol,
                                               double k_gap, double gamma) {
    const double rho_L = spectral_radius(sol.L);
    if (!(gamma > rho_L && gamma < 1.0)) {
        throw DomainError("stability_margin_check: need rho(L) < gamma < 1");
    }
    if (k_gap < 0.0) throw DomainError("stability_margin_check: k_gap must be nonnegative");
    const double tau_L = tau(sol.L, gamma).tau;
    const bool certified =
        7.0 * std::pow(consts.gamma_star, 3.0) * k_gap <= (1.0 - gamma) / (2.0 * tau_L);
    return {certified, tau_L};
}

BoundReport gap_bound_meta(const SystemConstants& consts, double f_eps,
                           double gamma, double tau_L, long d, double sigma_w) {
    if (f_eps < 0.0) throw DomainError("gap_bound_meta: f_eps must be nonnegative");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gap_bound_meta: need 0 < gamma < 1");
    BoundReport rep;
    const double sw2 = sigma_w * sigma_w;
    rep.bound_value = 200.0 * sw2 * static_cast<double>(d) *
                      std::pow(consts.gamma_star, 9.0) *
                      (tau_L * tau_L / (1.0 - gamma * gamma)) * f_eps * f_eps;
    rep.applicability_margin = sw2 - rep.bound_value;
    rep.applicable = rep.applicability_margin >= 0.0;
    rep.components["gamma_star"] = consts.gamma_star;
    rep.components["tau_L"] = tau_L;
    rep.components["gamma"] = gamma;
    rep.components["f_eps"] = f_eps;
    return rep;
}

BoundReport gap_bound_fast_rate(const LinearSystem& sys, const CostParams& cost,
                                const RiccatiSolution& sol, double eps, double rho,
                                long ell, double gamma, double sigma_w, long d) {
    const BoundReport direct = dare_bound_direct(sys, cost, sol, eps, rho, ell);
    const SystemConstants consts = make_constants(sys, cost, sol);
    const double tau_L = tau(sol.L, gamma, /*allow_boundary=*/true).tau;
    BoundReport rep = gap_bound_meta(consts, direct.bound_value, gamma, tau_L, d, sigma_w);
    rep.applicable = rep.applicable && direct.applicable;
    rep.applicability_margin = std::min(rep.applicability_margin, direct.applicability_margin);
    for (const auto& [k, v] : direct.components) rep.components["direct_" + k] = v;
    rep.components["C0"] = 204800.0;  // 200 * 32^2
    return rep;
}

}  // namespace certeq
