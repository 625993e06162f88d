#include "certeq/riccati.hpp"

#include <cmath>

namespace certeq {

namespace {

constexpr int kDlyapCap = 200;
constexpr int kDoublingCap = 200;
constexpr long kValueIterCap = 200000;

// One Riccati map application: A'PA - A'PB(R + B'PB)^{-1}B'PA + Q.
Mat riccati_map(const Mat& P, const Mat& A, const Mat& B, const Mat& Q, const Mat& R) {
    const Mat BtP = B.transpose() * P;
    const Mat G = R + BtP * B;                 // R + B'PB
    const Mat H = BtP * A;                     // B'PA
    return symmetrize(A.transpose() * P * A - H.transpose() * solve_linear(G, H) + Q);
}

Mat gain_from(const Mat& P, const Mat& A, const Mat& B, const Mat& R) {
    const Mat BtP = B.transpose() * P;
    return -solve_linear(R + BtP * B, BtP * A);
}

}  // namespace

Mat solve_dlyap(const Mat& L, const Mat& M) {
    check_square(L, "dlyap L");
    check_square(M, "dlyap M");
    if (L.rows() != M.rows()) throw DimensionError("dlyap: L and M size mismatch");
    check_finite(L, "dlyap L");
    check_finite(M, "dlyap M");
    const double rho = spectral_radius(L);
    if (rho >= 1.0 - 1e-9) {
        throw StabilityError("dlyap: L must be Schur stable", rho);
    }
    const double m_norm = std::max(operator_norm(M), 1e-300);
    Mat X = symmetrize(M);
    Mat Lk = L;
    bool converged = false;
    for (int i = 0; i < kDlyapCap; ++i) {
        const Mat term = Lk.transpose() * X * Lk;
        if (operator_norm(term) <= 1e-16 * m_norm) {
            converged = true;
            break;
        }
        X = symmetrize(X + term);
        Lk = Lk * Lk;
    }
    const double res = operator_norm(L.transpose() * X * L - X + M);
    if (!converged || res > 1e-10 * (1.0 + operator_norm(X))) {
        throw ConvergenceError("dlyap did not converge", kDlyapCap, res);
    }
    return X;
}

double riccati_residual(const Mat& P, const LinearSystem& sys, const CostParams& cost) {
    const Mat& A = sys.A;
    const Mat& B = sys.B;
    const Mat BtP = B.transpose() * P;
    const Mat G = cost.R + BtP * B;
    if (min_singular_value(G) <= 1e-14 * std::max(1.0, operator_norm(G))) {
        throw SingularMatrixError("riccati_residual: R + B'PB is singular");
    }
    const Mat H = BtP * A;
    const Mat F = P - A.transpose() * P * A + H.transpose() * solve_linear(G, H) - cost.Q;
    return operator_norm(F);
}

RiccatiSolution solve_dare(const LinearSystem& sys, const CostParams& cost) {
    const Mat& A = sys.A;
    const Mat& B = sys.B;
    const Mat& Q = cost.Q;
    const Mat& R = cost.R;
    if (Q.rows() != sys.n()) throw DimensionError("Q must be n x n");
    if (R.rows() != sys.d()) throw DimensionError("R must be d x d");
    const Eigen::Index n = sys.n();
    const double q_scale = std::max(operator_norm(Q), 1.0);
    const double diverge = 1e12 * q_scale;

    Mat P;
    int iterations = 0;
    bool have_p = false;

    // Structure-preserving doubling on (Ak, Gk, Hk); Hk converges to P.
    {
        Mat Ak = A;
        Mat Gk = B * solve_linear(R, Mat(B.transpose()));
        Gk = symmetrize(Gk);
        Mat Hk = symmetrize(Q);
        try {
            for (int i = 0; i < kDoublingCap; ++i) {
                const Mat W = Mat::Identity(n, n) + Gk * Hk;
                const Mat WiA = solve_linear(W, Ak);    // (I + GH)^{-1} A
                const Mat WiG = solve_linear(W, Gk);    // (I + GH)^{-1} G
                const Mat An = Ak * WiA;
                const Mat Gn = symmetrize(Gk + Ak * WiG * Ak.transpose());
                const Mat Hn = symmetrize(Hk + Ak.transpose() * Hk * WiA);
                check_finite(Hn, "doubling iterate");
                if (operator_norm(Hn) > diverge) {
                    throw StabilizabilityError("DARE iterates diverged: (A, B) not stabilizable");
                }
                const double step = operator_norm(Hn - Hk);
                Ak = An;
                Gk = Gn;
                Hk = Hn;
                ++iterations;
                if (step <= 1e-14 * (1.0 + operator_norm(Hk))) {
                    P = Hk;
                    have_p = true;
                    break;
                }
            }
        } catch (const StabilizabilityError&) {
            throw;
        } catch (const std::exception&) {
            have_p = false;  // fall through to value iteration
        }
    }

    if (!have_p) {
        P = symmetrize(Q);
        for (long i = 0; i < kValueIterCap; ++i) {
            const Mat Pn = riccati_map(P, A, B, Q, R);
            check_finite(Pn, "value iterate");
            if (operator_norm(Pn) > diverge) {
                throw StabilizabilityError("DARE iterates diverged: (A, B) not stabilizable");
            }
            const double step = operator_norm(Pn - P);
            P = Pn;
            ++iterations;
            if (step <= 1e-14 * (1.0 + operator_norm(P))) {
                have_p = true;
                break;
            }
        }
        if (!have_p) {
            throw ConvergenceError("DARE value iteration hit the iteration cap",
                                   static_cast<int>(kValueIterCap),
                                   riccati_residual(P, sys, cost));
        }
    }

    // Closed-loop Lyapunov polish: P solves L'PL - P + (Q + K'RK) = 0.
    Mat K = gain_from(P, A, B, R);
    Mat L = A + B * K;
    double res = riccati_residual(P, sys, cost);
    for (int i = 0; i < 10 && res > 1e-12 * (1.0 + operator_norm(P)); ++i) {
        if (spectral_radius(L) >= 1.0 - 1e-9) break;
        const Mat M = symmetrize(Q + K.transpose() * R * K);
        Mat Pn;
        try {
            Pn = solve_dlyap(L, M);
        } catch (const std::exception&) {
            break;
        }
        const double res_n = riccati_residual(Pn, sys, cost);
        if (!(res_n < res)) break;
        P = Pn;
        K = gain_from(P, A, B, R);
        L = A + B * K;
        res = res_n;
        ++iterations;
    }

    const double rho_L = spectral_radius(L);
    if (rho_L >= 1.0) {
        throw StabilizabilityError("DARE solution is not stabilizing: rho(A + BK) >= 1");
    }
    if (res > 1e-10 * (1.0 + operator_norm(P))) {
        throw ConvergenceError("DARE residual above tolerance", iterations, res);
    }

    RiccatiSolution sol;
    sol.P = symmetrize(P);
    sol.K = K;
    sol.L = L;
    sol.residual = res;
    sol.iterations = iterations;
    return sol;
}

std::pair<Mat, Mat> kalman_gain(const LQGSystem& sys) {
    // Duality: the filter Riccati equation for (A, C, W, V) is the control
    // Riccati equation for (A', C', W, V).
    RiccatiSolution dual;
    try {
        dual = solve_dare(LinearSystem(sys.A.transpose(), sys.C.transpose()),
                          CostParams(sys.W, sys.V));
    } catch (const StabilizabilityError& e) {
        throw DetectabilityError(std::string("kalman_gain: (C, A) not detectable: ") + e.what());
    }
    const Mat Sigma = dual.P;
    // dual.K = -(V + C Sigma C')^{-1} C Sigma A', so its transpose is
    // -A Sigma C'(C Sigma C' + V)^{-1}.
    const Mat Lkf = dual.K.transpose();
    return {Lkf, Sigma};
}

}  // namespace certeq
