#pragma once

#include "certeq/matrix.hpp"

namespace certeq {

// Fully observed plant x_{t+1} = A x_t + B u_t (+ noise).
struct LinearSystem {
    Mat A;  // n x n
    Mat B;  // n x d

    LinearSystem() = default;
    LinearSystem(Mat A_in, Mat B_in) : A(std::move(A_in)), B(std::move(B_in)) {
        check_square(A, "A");
        check_finite(A, "A");
        check_finite(B, "B");
        if (B.rows() != A.rows()) throw DimensionError("B row count must match A");
    }

    Eigen::Index n() const { return A.rows(); }
    Eigen::Index d() const { return B.cols(); }
};

// Quadratic stage cost x'Qx + u'Ru with Q >= 0 and R > 0.
struct CostParams {
    Mat Q;  // n x n
    Mat R;  // d x d
    // sigma_min(R) >= 1 is assumed by the perturbation theory; rescaling is
    // the caller's duty, we only report the flag.
    bool r_scaled_ok = false;

    CostParams() = default;
    CostParams(Mat Q_in, Mat R_in) : Q(std::move(Q_in)), R(std::move(R_in)) {
        if (!is_psd(Q, 1e-10)) throw DomainError("Q must be positive semidefinite");
        if (!is_psd(R, 1e-10)) throw DomainError("R must be positive semidefinite");
        const double r_min = min_singular_value(R);
        if (r_min <= 1e-12 * (1.0 + operator_norm(R))) {
            throw DomainError("R must be positive definite");
        }
        r_scaled_ok = r_min >= 1.0;
    }
};

// Partially observed plant with output cost:
//   x_{t+1} = A x_t + B u_t + w_t,  w ~ N(0, W)
//   y_t     = C x_t + v_t,          v ~ N(0, V)
//   cost    = y'Qy + u'Ru
struct LQGSystem {
    Mat A;  // n x n
    Mat B;  // n x d
    Mat C;  // p x n
    Mat W;  // n x n, PSD
    Mat V;  // p x p, PD
    Mat Q;  // p x p, PSD (output cost)
    Mat R;  // d x d, PD

    LQGSystem() = default;
    LQGSystem(Mat A_in, Mat B_in, Mat C_in, Mat W_in, Mat V_in, Mat Q_in, Mat R_in)
        : A(std::move(A_in)), B(std::move(B_in)), C(std::move(C_in)),
          W(std::move(W_in)), V(std::move(V_in)), Q(std::move(Q_in)), R(std::move(R_in)) {
        check_square(A, "A");
        if (B.rows() != A.rows()) throw DimensionError("B row count must match A");
        if (C.cols() != A.rows()) throw DimensionError("C column count must match A");
        if (W.rows() != A.rows() || W.cols() != A.rows()) throw DimensionError("W must be n x n");
        if (V.rows() != C.rows() || V.cols() != C.rows()) throw DimensionError("V must be p x p");
        if (Q.rows() != C.rows() || Q.cols() != C.rows()) throw DimensionError("Q must be p x p");
        if (R.rows() != B.cols() || R.cols() != B.cols()) throw DimensionError("R must be d x d");
        if (!is_psd(W, 1e-10)) throw DomainError("W must be positive semidefinite");
        if (!is_psd(Q, 1e-10)) throw DomainError("Q must be positive semidefinite");
        // V >= 0 suffices for cost evaluation; filter synthesis additionally
        // requires V > 0 and rejects singular V at the Riccati solve.
        if (!is_psd(V, 1e-10)) throw DomainError("V must be positive semidefinite");
        if (!is_psd(R, 1e-10) || min_singular_value(R) <= 1e-12 * (1.0 + operator_norm(R))) {
            throw DomainError("R must be positive definite");
        }
    }

    Eigen::Index n() const { return A.rows(); }
    Eigen::Index d() const { return B.cols(); }
    Eigen::Index p() const { return C.rows(); }

    // Cost on the state representation: C' Q C.
    Mat state_cost() const { return symmetrize(C.transpose() * Q * C); }
};

}  // namespace certeq
