#include <doctest.h>

#include <cmath>
#include <vector>

#include "certeq/bounds.hpp"
#include "certeq/random.hpp"

using certeq::BoundReport;
using certeq::CostParams;
using certeq::LinearSystem;
using certeq::Mat;
using certeq::SystemConstants;

namespace {

Mat scalar_mat(double v) {
    Mat m(1, 1);
    m(0, 0) = v;
    return m;
}

Mat scaled_to_radius(certeq::GaussianStream& rng, int n, double radius) {
    const Mat g = rng.normal_matrix(n, n);
    const double r = certeq::spectral_radius(g);
    return r > 0.0 ? Mat(radius / r * g) : Mat(Mat::Zero(n, n));
}

// The weak-channel family: A = 1.01 I, B = diag(1, beta), unit costs.
struct WeakChannel {
    LinearSystem sys;
    CostParams cost;
    certeq::RiccatiSolution sol;

    explicit WeakChannel(double beta)
        : sys(1.01 * Mat::Identity(2, 2),
              [&] {
                  Mat B = Mat::Identity(2, 2);
                  B(1, 1) = beta;
                  return B;
              }()),
          cost(Mat::Identity(2, 2), Mat::Identity(2, 2)),
          sol(certeq::solve_dare(sys, cost)) {}
};

// Ordinary least squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Mat argmin_gain(const Mat& A, const Mat& B, const Mat& P, const Mat& R) {
    return -certeq::solve_linear(R + B.transpose() * P * B, B.transpose() * P * A);
}

}  // namespace

TEST_CASE("perturbation bounds vanish at eps = 0") {
    certeq::GaussianStream rng(83);
    const LinearSystem sys(scaled_to_radius(rng, 3, 0.7),
                           rng.normal_matrix(3, 3) + 2.0 * Mat::Identity(3, 3));
    const CostParams cost(Mat::Identity(3, 3), Mat::Identity(3, 3));
    const auto sol = certeq::solve_dare(sys, cost);
    const double gamma = certeq::default_gamma(sol.L);

    const auto fp = certeq::dare_bound_fixed_point(sys, cost, sol, 0.0, gamma);
    CHECK(fp.bound_value == doctest::Approx(0.0));
    CHECK(fp.applicable);

    const auto direct =
        certeq::dare_bound_direct(sys, cost, sol, 0.0, certeq::default_rho(sys.A), 1);
    CHECK(direct.bound_value == doctest::Approx(0.0));
    CHECK(direct.applicable);

    const SystemConstants consts = certeq::make_constants(sys, cost, sol);
    CHECK(certeq::gain_perturb_bound(consts, 0.0, 1.0) == doctest::Approx(0.0));

    const auto meta = certeq::gap_bound_meta(consts, 0.0, gamma, 1.0, 3, 1.0);
    CHECK(meta.bound_value == doctest::Approx(0.0));
    CHECK(meta.applicable);
}

TEST_CASE("gain and gap bounds evaluate their closed forms") {
    SystemConstants consts;
    consts.gamma_star = 2.0;
    CHECK(certeq::gain_perturb_bound(consts, 0.1, 1.0) == doctest::Approx(5.6).epsilon(1e-12));

    // 200 * 1 * 1 * 2^9 * (1 / (1 - 0.25)) * 1e-4 = 13.6533...
    const auto meta = certeq::gap_bound_meta(consts, 0.01, 0.5, 1.0, 1, 1.0);
    CHECK(meta.bound_value == doctest::Approx(200.0 * 512.0 * (4.0 / 3.0) * 1e-4).epsilon(1e-12));
    CHECK_FALSE(meta.applicable);  // exceeds sigma_w^2 = 1
}

TEST_CASE("bounds reject invalid arguments") {
    SystemConstants consts;
    consts.gamma_star = 2.0;
    CHECK_THROWS_AS(certeq::gain_perturb_bound(consts, 1.0, 1.0), certeq::DomainError);
    CHECK_THROWS_AS(certeq::gain_perturb_bound(consts, 0.1, 0.0), certeq::DomainError);
    CHECK_THROWS_AS(certeq::gap_bound_meta(consts, 0.1, 1.0, 1.0, 1, 1.0),
                    certeq::DomainError);
}

TEST_CASE("direct bound requires a controllable pair") {
    Mat e1 = Mat::Zero(2, 1);
    e1(0, 0) = 1.0;
    const LinearSystem sys(Mat::Identity(2, 2), e1);
    const CostParams cost(Mat::Identity(2, 2), scalar_mat(1.0));
    const WeakChannel ref(0.5);
    CHECK_THROWS_AS(certeq::dare_bound_direct(sys, cost, ref.sol, 0.01, 1.1, 2),
                    certeq::ControllabilityError);
}

TEST_CASE("fixed-point bound rescales when P has small eigenvalues") {
    const LinearSystem sys(scalar_mat(0.5), scalar_mat(1.0));
    const CostParams cost(scalar_mat(0.01), scalar_mat(0.01));
    const auto sol = certeq::solve_dare(sys, cost);
    CHECK(certeq::min_singular_value(sol.P) < 1.0);
    const double gamma = certeq::default_gamma(sol.L);
    const auto rep = certeq::dare_bound_fixed_point(sys, cost, sol, 1e-4, gamma);
    CHECK(rep.components.at("rescaled") == 1.0);

    // Rescaling reproduces the bound of the unit-cost problem.
    const double p_min = certeq::min_singular_value(sol.P);
    const CostParams unit(cost.Q / p_min, cost.R / p_min);
    const auto unit_sol = certeq::solve_dare(sys, unit);
    const auto unit_rep = certeq::dare_bound_fixed_point(sys, unit, unit_sol, 1e-4, gamma);
    CHECK(rep.bound_value == doctest::Approx(unit_rep.bound_value).epsilon(1e-9));
    CHECK(unit_rep.components.at("rescaled") == 0.0);
}

TEST_CASE("bounds are monotone in eps") {
    const WeakChannel wc(0.5);
    const double gamma = certeq::default_gamma(wc.sol.L);
    const double rho = certeq::default_rho(wc.sys.A);
    double prev_fp = -1.0, prev_d = -1.0;
    for (double eps : {1e-6, 1e-5, 1e-4, 1e-3}) {
        const double fp =
            certeq::dare_bound_fixed_point(wc.sys, wc.cost, wc.sol, eps, gamma).bound_value;
        const double d =
            certeq::dare_bound_direct(wc.sys, wc.cost, wc.sol, eps, rho, 1).bound_value;
        CHECK(fp > prev_fp);
        CHECK(d > prev_d);
        prev_fp = fp;
        prev_d = d;
    }
}

TEST_CASE("weak-channel scaling exponents in the asymptotic regime") {
    // On the weak-channel family the fixed-point bound grows like beta^-4
    // and the direct bound like beta^-3 once beta is small enough that
    // ||P|| has entered its beta^-2 regime.
    std::vector<double> log_inv_beta, log_fp, log_direct;
    for (double beta : {0.002, 0.001, 0.0005, 0.00025}) {
        const WeakChannel wc(beta);
        const double gamma = certeq::default_gamma(wc.sol.L);
        const double rho = certeq::default_rho(wc.sys.A);
        const double fp =
            certeq::dare_bound_fixed_point(wc.sys, wc.cost, wc.sol, 1e-9, gamma).bound_value;
        const double d =
            certeq::dare_bound_direct(wc.sys, wc.cost, wc.sol, 1e-9, rho, 1).bound_value;
        log_inv_beta.push_back(std::log(1.0 / beta));
        log_fp.push_back(std::log(fp));
        log_direct.push_back(std::log(d));
    }
    const double slope_fp = ols_slope(log_inv_beta, log_fp);
    const double slope_direct = ols_slope(log_inv_beta, log_direct);
    CHECK(slope_fp == doctest::Approx(4.0).epsilon(0.075));
    CHECK(slope_direct == doctest::Approx(3.0).epsilon(0.1));
    // The ratio gains one power of 1/beta.
    std::vector<double> log_ratio;
    for (std::size_t i = 0; i < log_fp.size(); ++i) log_ratio.push_back(log_fp[i] - log_direct[i]);
    CHECK(ols_slope(log_inv_beta, log_ratio) == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("gain bound dominates sampled gain perturbations") {
    certeq::GaussianStream rng(89);
    for (int i = 0; i < 200; ++i) {
        const int n = 2 + static_cast<int>(2.99 * rng.uniform());
        const int d = 1 + static_cast<int>(1.99 * rng.uniform());
        const Mat A1 = rng.normal_matrix(n, n);
        const Mat B1 = rng.normal_matrix(n, d);
        const Mat g = rng.normal_matrix(n, n);
        const Mat P1 = g * g.transpose() + Mat::Identity(n, n);
        const Mat R = Mat::Identity(d, d);
        const double eps = 1e-3 * rng.uniform();
        auto bump = [&](Eigen::Index r, Eigen::Index c) {
            Mat D = rng.normal_matrix(r, c);
            return Mat(eps * rng.uniform() / certeq::operator_norm(D) * D);
        };
        const Mat A2 = A1 + bump(n, n);
        const Mat B2 = B1 + bump(n, d);
        const Mat DP = bump(n, n);
        const Mat P2 = P1 + certeq::symmetrize(DP + DP.transpose());

        const Mat K1 = argmin_gain(A1, B1, P1, R);
        const Mat K2 = argmin_gain(A2, B2, P2, R);
        const double eff_eps = std::max({certeq::operator_norm(A2 - A1),
                                         certeq::operator_norm(B2 - B1),
                                         certeq::operator_norm(P2 - P1)});
        SystemConstants consts;
        consts.gamma_star = 1.0 + std::max({certeq::operator_norm(A1), certeq::operator_norm(B1),
                                            certeq::operator_norm(P1), certeq::operator_norm(K1)});
        const double bound = certeq::gain_perturb_bound(consts, eff_eps, 1.0);
        CHECK(certeq::operator_norm(K2 - K1) <= bound + 1e-12);
    }
}

TEST_CASE("stability margin certificate examples") {
    const WeakChannel wc(0.5);
    const auto consts = certeq::make_constants(wc.sys, wc.cost, wc.sol);
    const double gamma = certeq::default_gamma(wc.sol.L);
    const auto [cert0, tau0] = certeq::stability_margin_check(consts, wc.sol, 0.0, gamma);
    CHECK(cert0);
    CHECK(tau0 >= 1.0);
    const auto [cert_big, tau_big] = certeq::stability_margin_check(consts, wc.sol, 10.0, gamma);
    CHECK_FALSE(cert_big);
    CHECK(tau_big == doctest::Approx(tau0));
}

TEST_CASE("certified gain perturbations keep the transient envelope") {
    certeq::GaussianStream rng(97);
    int certified_count = 0;
    for (int i = 0; i < 40; ++i) {
        const LinearSystem sys(scaled_to_radius(rng, 3, 0.8),
                               rng.normal_matrix(3, 2) + Mat::Identity(3, 2));
        const CostParams cost(Mat::Identity(3, 3), Mat::Identity(2, 2));
        const auto sol = certeq::solve_dare(sys, cost);
        const auto consts = certeq::make_constants(sys, cost, sol);
        const double gamma = certeq::default_gamma(sol.L);
        Mat DK = rng.normal_matrix(2, 3);
        DK *= 1e-4 * rng.uniform() / certeq::operator_norm(DK);
        const double k_gap = certeq::operator_norm(DK);
        const auto [certified, tau_bound] =
            certeq::stability_margin_check(consts, sol, k_gap, gamma);
        if (!certified) continue;
        ++certified_count;
        const double radius = 0.5 * (1.0 + gamma);
        const Mat Lp = sys.A + sys.B * (sol.K + DK);
        Mat Pk = Mat::Identity(3, 3);
        double rk = 1.0;
        for (int k = 0; k <= 50; ++k) {
            CHECK(certeq::operator_norm(Pk) <= tau_bound * rk * (1.0 + 1e-9));
            Pk = Lp * Pk;
            rk *= radius;
        }
    }
    CHECK(certified_count > 10);
}

TEST_CASE("fast-rate gap bound is the exact composition") {
    const WeakChannel wc(0.5);
    const double gamma = certeq::default_gamma(wc.sol.L);
    const double rho = certeq::default_rho(wc.sys.A);
    const double eps = 1e-5;
    const auto fast = certeq::gap_bound_fast_rate(wc.sys, wc.cost, wc.sol, eps, rho, 1,
                                                  gamma, 1.0, 2);
    const auto direct = certeq::dare_bound_direct(wc.sys, wc.cost, wc.sol, eps, rho, 1);
    const auto consts = certeq::make_constants(wc.sys, wc.cost, wc.sol);
    const double tau_L = certeq::tau(wc.sol.L, gamma, true).tau;
    const auto meta =
        certeq::gap_bound_meta(consts, direct.bound_value, gamma, tau_L, 2, 1.0);
    CHECK(fast.bound_value == doctest::Approx(meta.bound_value).epsilon(1e-12));
    CHECK(fast.components.at("C0") == 204800.0);
    CHECK(fast.components.at("direct_eps") == eps);
    CHECK(fast.applicable == (meta.applicable && direct.applicable));
}
