#pragma once

#include <utility>

#include "certeq/systems.hpp"

namespace certeq {

struct RiccatiSolution {
    Mat P;            // stabilizing solution, symmetric PSD
    Mat K;            // optimal gain, K = -(R + B'PB)^{-1} B'PA
    Mat L;            // closed loop A + B K
    double residual = 0.0;
    int iterations = 0;
};

// Solves L' X L - X + M = 0 for stable L (rho(L) < 1 - 1e-9), i.e.
// X = sum_k (L')^k M L^k, by squaring: X <- X + L'XL, L <- L^2.
Mat solve_dlyap(const Mat& L, const Mat& M);

// Stabilizing solution of P = A'PA - A'PB(R + B'PB)^{-1}B'PA + Q.
// Structure-preserving doubling, refined by closed-loop Lyapunov polish,
// with plain value iteration as fallback. Divergence of the iterates
// signals an unstabilizable pair.
RiccatiSolution solve_dare(const LinearSystem& sys, const CostParams& cost);

// Operator norm of F(P) = P - A'P(I + B R^{-1} B' P)^{-1} A - Q.
double riccati_residual(const Mat& P, const LinearSystem& sys, const CostParams& cost);

// Steady-state filter gain and error covariance via duality with solve_dare
// on (A', C', W, V). The returned gain carries the minus sign,
// Lkf = -A Sigma C'(C Sigma C' + V)^{-1}, so that A + Lkf C is stable.
std::pair<Mat, Mat> kalman_gain(const LQGSystem& sys);

}  // namespace certeq
