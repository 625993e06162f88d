#include "certeq/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace certeq {

void check_finite(const Mat& m, const char* what) {
    if (!m.allFinite()) {
        throw DomainError(std::string(what) + " has NaN or Inf entries");
    }
}

void check_square(const Mat& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(what) + " must be square, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

std::vector<std::complex<double>> eigenvalues(const Mat& m) {
    check_square(m, "eigenvalues input");
    check_finite(m, "eigenvalues input");
    if (m.rows() == 0) return {};
    Eigen::EigenSolver<Mat> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("QR eigenvalue iteration did not converge",
                               40 * static_cast<int>(m.rows()), 0.0);
    }
    const auto& vals = solver.eigenvalues();
    std::vector<std::complex<double>> out(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i) out[i] = vals[i];
    return out;
}

double spectral_radius(const Mat& m) {
    double r = 0.0;
    for (const auto& lam : eigenvalues(m)) r = std::max(r, std::abs(lam));
    return r;
}

double operator_norm(const Mat& m) {
    check_finite(m, "operator_norm input");
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

double min_singular_value(const Mat& m) {
    check_finite(m, "min_singular_value input");
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& s = svd.singularValues();
    return s(s.size() - 1);
}

SpectralReport spectral_report(const Mat& m) {
    SpectralReport rep;
    rep.eigenvalues = eigenvalues(m);
    for (const auto& lam : rep.eigenvalues) {
        rep.spectral_radius = std::max(rep.spectral_radius, std::abs(lam));
    }
    rep.operator_norm = operator_norm(m);
    rep.min_singular_value = min_singular_value(m);
    return rep;
}

Mat solve_linear(const Mat& a, const Mat& b) {
    check_square(a, "solve_linear lhs");
    if (b.rows() != a.rows()) {
        throw DimensionError("solve_linear rhs row count mismatch");
    }
    check_finite(a, "solve_linear lhs");
    check_finite(b, "solve_linear rhs");
    Eigen::PartialPivLU<Mat> lu(a);
    const double a_norm = a.cwiseAbs().maxCoeff();
    const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (pivot_min <= 1e-14 * std::max(a_norm, 1e-300)) {
        throw SingularMatrixError("solve_linear: matrix is singular to working precision");
    }
    return lu.solve(b);
}

bool is_psd(const Mat& m, double tol) {
    check_square(m, "is_psd input");
    check_finite(m, "is_psd input");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol * std::max(1.0, m.cwiseAbs().maxCoeff())) {
        throw DimensionError("is_psd: matrix is not symmetric within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<Mat> solver(symmetrize(m), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff() >= -tol;
}

}  // namespace certeq
