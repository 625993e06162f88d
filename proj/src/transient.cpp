#include "certeq/transient.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numbers>

namespace certeq {

namespace {

constexpr long kTauPowerCap = 50000;

// ||(e^{i theta} I - L)^{-1}|| = 1 / sigma_min(e^{i theta} I - L).
double resolvent_norm(const Eigen::MatrixXcd& L, double theta) {
    const Eigen::Index n = L.rows();
    const std::complex<double> z = std::polar(1.0, theta);
    Eigen::MatrixXcd m = -L;
    m.diagonal().array() += z;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const double smin = svd.singularValues()(n - 1);
    if (smin <= 0.0) throw StabilityError("resolvent is singular on the unit circle", 1.0);
    return 1.0 / smin;
}

}  // namespace

TransientReport tau(const Mat& M, double rho, bool allow_boundary) {
    check_square(M, "tau input");
    check_finite(M, "tau input");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("tau: rho must be positive and finite");
    const double sr = spectral_radius(M);
    if (rho < sr || (rho == sr && !allow_boundary)) {
        throw DomainError("tau: rho must exceed the spectral radius of M");
    }

    TransientReport rep;
    rep.rho = rho;
    if (rho >= operator_norm(M)) {
        // ||M^k|| <= ||M||^k <= rho^k, so the sup is attained at k = 0.
        rep.tau = 1.0;
        return rep;
    }

    // Power up M / rho; the sup of ||(M/rho)^k|| is tau.
    const Mat Ms = M / rho;
    Mat Pk = Mat::Identity(M.rows(), M.cols());
    double best = 1.0;
    long best_k = 0;
    long k = 0;
    while (k < kTauPowerCap) {
        ++k;
        Pk = Ms * Pk;
        check_finite(Pk, "tau power iterate");
        const double term = operator_norm(Pk);
        if (term > best) {
            best = term;
            best_k = k;
        }
        if (term < 1e-3 * best && k > 2 * best_k) break;
    }
    rep.tau = best;
    rep.argmax_k = best_k;
    rep.truncation_k = k;
    return rep;
}

double hinf_norm(const Mat& L) {
    check_square(L, "hinf input");
    check_finite(L, "hinf input");
    const double sr = spectral_radius(L);
    if (sr >= 1.0) throw StabilityError("hinf_norm: L must be Schur stable", sr);
    const Eigen::MatrixXcd Lc = L.cast<std::complex<double>>();

    constexpr int kSamples = 4096;
    const double two_pi = 2.0 * std::numbers::pi;
    double best = 0.0;
    double best_theta = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double theta = two_pi * i / kSamples;
        const double v = resolvent_norm(Lc, theta);
        if (v > best) {
            best = v;
            best_theta = theta;
        }
    }

    // Golden-section maximization around the best sample.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = best_theta - two_pi / kSamples;
    double b = best_theta + two_pi / kSamples;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = resolvent_norm(Lc, x1);
    double f2 = resolvent_norm(Lc, x2);
    while (b - a > 1e-6) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = resolvent_norm(Lc, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = resolvent_norm(Lc, x1);
        }
    }
    return std::max(best, std::max(f1, f2));
}

ControllabilityReport controllability(const LinearSystem& sys, long ell, double threshold) {
    if (ell < 1) throw DomainError("controllability: ell must be >= 1");
    const Eigen::Index n = sys.n();
    const Eigen::Index d = sys.d();
    ControllabilityReport rep;
    rep.ell = ell;
    rep.C_ell.resize(n, ell * d);
    Mat block = sys.B;
    for (long j = 0; j < ell; ++j) {
        rep.C_ell.middleCols(j * d, d) = block;
        if (j + 1 < ell) block = sys.A * block;
    }
    // nu is the n-th singular value: zero when C_ell has fewer than n columns.
    if (rep.C_ell.cols() < n) {
        rep.nu = 0.0;
    } else {
        Eigen::JacobiSVD<Mat> svd(rep.C_ell);
        rep.nu = svd.singularValues()(n - 1);
    }
    rep.is_ell_nu_controllable = threshold > 0.0 ? rep.nu >= threshold : rep.nu > 0.0;
    return rep;
}

std::pair<double, double> power_perturb_bounds(const Mat& M, double rho,
                                               double delta_norm, long k) {
    if (k < 1) throw DomainError("power_perturb_bounds: k must be >= 1");
    if (delta_norm < 0.0) throw DomainError("power_perturb_bounds: delta must be nonnegative");
    const TransientReport rep = tau(M, rho, /*allow_boundary=*/true);
    const double t = rep.tau;
    const double rate = t * delta_norm + rho;
    const double pow_bound = t * std::pow(rate, static_cast<double>(k));
    const double diff_bound =
        static_cast<double>(k) * t * t * std::pow(rate, static_cast<double>(k - 1)) * delta_norm;
    return {pow_bound, diff_bound};
}

double controllability_perturb_bound(const ControllabilityReport& report,
                                     double tauA, double rho, double eps,
                                     double normB) {
    if (tauA < 0.0 || rho < 0.0 || eps < 0.0 || normB < 0.0) {
        throw DomainError("controllability_perturb_bound: inputs must be nonnegative");
    }
    const double ell = static_cast<double>(report.ell);
    const double beta = std::max(1.0, tauA * eps + rho);
    return report.nu - 3.0 * eps * std::pow(ell, 1.5) * tauA * tauA *
                           std::pow(beta, ell - 1.0) * (normB + 1.0);
}

double default_rho(const Mat& A) { return 1.001 * spectral_radius(A) + 1e-6; }

double default_gamma(const Mat& L) {
    const double sr = spectral_radius(L);
    if (sr >= 1.0) throw StabilityError("default_gamma: L must be Schur stable", sr);
    return 0.5 * (1.0 + sr);
}

}  // namespace certeq
