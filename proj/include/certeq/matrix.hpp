#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "certeq/errors.hpp"

namespace certeq {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Throws DomainError if any entry is NaN or Inf.
void check_finite(const Mat& m, const char* what = "matrix");

// Throws DimensionError unless m is square.
void check_square(const Mat& m, const char* what = "matrix");

struct SpectralReport {
    double spectral_radius = 0.0;
    double operator_norm = 0.0;
    double min_singular_value = 0.0;
    std::vector<std::complex<double>> eigenvalues;
};

// All n eigenvalues (with multiplicity) of a square real matrix.
std::vector<std::complex<double>> eigenvalues(const Mat& m);

// rho(M) = max |lambda|.
double spectral_radius(const Mat& m);

// Largest singular value.
double operator_norm(const Mat& m);

// Smallest of the min(rows, cols) singular values.
double min_singular_value(const Mat& m);

SpectralReport spectral_report(const Mat& m);

// Solves a X = b with partial pivoting. Throws SingularMatrixError when a
// pivot falls below 1e-14 * ||a||.
Mat solve_linear(const Mat& a, const Mat& b);

// True iff min eigenvalue of the symmetric matrix m is >= -tol.
// Throws DimensionError when m deviates from symmetry by more than tol.
bool is_psd(const Mat& m, double tol = 1e-10);

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

}  // namespace certeq
