#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "certeq/adaptive.hpp"
#include "certeq/random.hpp"

using certeq::AdaptiveConfig;
using certeq::CostParams;
using certeq::LinearSystem;
using certeq::Mat;

namespace {

// A mildly coupled stable test plant with two actuators.
LinearSystem test_plant() {
    Mat A(3, 3);
    A << 0.6, 0.1, 0.0, 0.0, 0.5, 0.1, 0.1, 0.0, 0.4;
    Mat B(3, 2);
    B << 1.0, 0.0, 0.0, 1.0, 0.3, 0.2;
    return LinearSystem(A, B);
}

// Simulate x_{t+1} = A x + B u + sigma w with white inputs; returns the
// (states, inputs) pair in the layout least_squares_id expects.
std::pair<Mat, Mat> trajectory(const LinearSystem& sys, long N, double sigma,
                               std::uint64_t seed) {
    certeq::GaussianStream rng(seed);
    Mat states(sys.n(), N + 1);
    Mat inputs(sys.d(), N);
    certeq::Vec x = rng.normal_vector(sys.n());
    states.col(0) = x;
    for (long t = 0; t < N; ++t) {
        const certeq::Vec u = rng.normal_vector(sys.d());
        inputs.col(t) = u;
        x = sys.A * x + sys.B * u + sigma * rng.normal_vector(sys.n());
        states.col(t + 1) = x;
    }
    return {states, inputs};
}

}  // namespace

TEST_CASE("least_squares_id recovers the truth from noiseless data") {
    const LinearSystem sys = test_plant();
    const auto [states, inputs] = trajectory(sys, 40, 0.0, 7);
    const auto id = certeq::least_squares_id(states, inputs, 0.0);
    CHECK((id.Ahat - sys.A).norm() < 1e-9);
    CHECK((id.Bhat - sys.B).norm() < 1e-9);
    CHECK(id.cov_min_eig > 0.0);
}

TEST_CASE("least_squares_id input validation") {
    const LinearSystem sys = test_plant();
    const auto [states, inputs] = trajectory(sys, 40, 0.0, 7);
    CHECK_THROWS_AS(certeq::least_squares_id(states.leftCols(40), inputs, 0.0),
                    certeq::DimensionError);
    CHECK_THROWS_AS(certeq::least_squares_id(states.leftCols(4), inputs.leftCols(3), 0.0),
                    certeq::DomainError);
    CHECK_THROWS_AS(certeq::least_squares_id(states, inputs, -1.0), certeq::DomainError);
    // All-zero data is rank deficient without regularization.
    CHECK_THROWS_AS(certeq::least_squares_id(Mat::Zero(3, 11), Mat::Zero(2, 10), 0.0),
                    certeq::SingularMatrixError);
    CHECK_NOTHROW(certeq::least_squares_id(Mat::Zero(3, 11), Mat::Zero(2, 10), 1e-6));
}

TEST_CASE("ridge regularization shrinks the estimate") {
    const LinearSystem sys = test_plant();
    const auto [states, inputs] = trajectory(sys, 200, 0.5, 11);
    double prev = 1e300;
    for (double lambda : {0.0, 1.0, 100.0, 1e4}) {
        const auto id = certeq::least_squares_id(states, inputs, lambda);
        const double norm =
            std::hypot(id.Ahat.norm(), id.Bhat.norm());
        CHECK(norm <= prev * (1.0 + 1e-12));
        prev = norm;
    }
}

TEST_CASE("identification error decays like one over root N") {
    const LinearSystem sys = test_plant();
    std::vector<double> log_n, log_err;
    for (long N : {100L, 1000L, 10000L, 100000L}) {
        double err = 0.0;
        const int reps = 5;
        for (int s = 0; s < reps; ++s) {
            const auto [states, inputs] =
                trajectory(sys, N, 1.0, 100 + static_cast<std::uint64_t>(s));
            const auto id = certeq::least_squares_id(states, inputs, 1e-6);
            err += certeq::operator_norm(id.Ahat - sys.A) +
                   certeq::operator_norm(id.Bhat - sys.B);
        }
        log_n.push_back(std::log(static_cast<double>(N)));
        log_err.push_back(std::log(err / reps));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        sx += log_n[i];
        sy += log_err[i];
        sxx += log_n[i] * log_n[i];
        sxy += log_n[i] * log_err[i];
    }
    const double n = static_cast<double>(log_n.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.3));
}

TEST_CASE("fit_regret_slope recovers synthetic growth exponents") {
    for (double target : {0.5, 2.0 / 3.0}) {
        certeq::RegretTrace trace;
        for (long t = 0; t < 5000; ++t) {
            trace.regret.push_back(std::pow(static_cast<double>(t + 1), target));
            trace.cum_cost.push_back(trace.regret.back());
        }
        const auto fit = certeq::fit_regret_slope(trace, 0.5);
        CHECK(fit.slope == doctest::Approx(target).epsilon(1e-10));
        CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-10));
    }
    certeq::RegretTrace empty;
    CHECK_THROWS_AS(certeq::fit_regret_slope(empty), certeq::DomainError);
}

TEST_CASE("run_adaptive is deterministic in the seed") {
    const LinearSystem sys = test_plant();
    const CostParams cost(Mat::Identity(3, 3), Mat::Identity(2, 2));
    AdaptiveConfig cfg;
    cfg.horizon = 5000;
    cfg.seed = 21;
    cfg.K0 = Mat::Zero(2, 3);
    const auto t1 = certeq::run_adaptive(sys, cost, cfg);
    const auto t2 = certeq::run_adaptive(sys, cost, cfg);
    CHECK(t1.cum_cost == t2.cum_cost);
    CHECK(t1.regret.back() == t2.regret.back());
    REQUIRE(t1.epochs.size() == t2.epochs.size());
    for (std::size_t i = 0; i < t1.epochs.size(); ++i) {
        CHECK(t1.epochs[i].a_err == t2.epochs[i].a_err);
        CHECK((t1.epochs[i].K - t2.epochs[i].K).norm() == 0.0);
    }
    cfg.seed = 22;
    CHECK(certeq::run_adaptive(sys, cost, cfg).regret.back() != t1.regret.back());
}

TEST_CASE("run_adaptive validates its configuration") {
    const LinearSystem sys = test_plant();
    const CostParams cost(Mat::Identity(3, 3), Mat::Identity(2, 2));
    AdaptiveConfig cfg;
    cfg.K0 = Mat::Zero(2, 2);
    CHECK_THROWS_AS(certeq::run_adaptive(sys, cost, cfg), certeq::DimensionError);
    cfg.K0 = Mat::Zero(2, 3);
    cfg.exploration_exponent = 1.5;
    CHECK_THROWS_AS(certeq::run_adaptive(sys, cost, cfg), certeq::DomainError);
    cfg.exploration_exponent = 0.5;
    LinearSystem unstable(2.0 * Mat::Identity(3, 3), sys.B);
    CHECK_THROWS_AS(certeq::run_adaptive(unstable, cost, cfg), certeq::StabilityError);
}

TEST_CASE("a noiseless run from the optimal gain accrues only transient regret") {
    const LinearSystem sys = test_plant();
    const CostParams cost(Mat::Identity(3, 3), Mat::Identity(2, 2));
    const auto opt = certeq::solve_dare(sys, cost);
    AdaptiveConfig cfg;
    cfg.horizon = 4000;
    cfg.sigma_w = 0.0;
    cfg.exploration_scale = 0.0;
    cfg.seed = 33;
    cfg.K0 = opt.K;
    const auto trace = certeq::run_adaptive(sys, cost, cfg);
    CHECK_FALSE(trace.failed);
    CHECK(trace.J_star == doctest::Approx(0.0));
    // The cumulative cost converges: the tail contributes nothing.
    CHECK(trace.regret.back() ==
          doctest::Approx(trace.regret[trace.regret.size() / 2]).epsilon(1e-9));
    for (const auto& e : trace.epochs) CHECK(e.executed_gain_stable);
}

TEST_CASE("adaptive regret grows sublinearly and the gains stay stable") {
    const LinearSystem sys = test_plant();
    const CostParams cost(Mat::Identity(3, 3), Mat::Identity(2, 2));
    AdaptiveConfig cfg;
    cfg.horizon = 30000;
    cfg.seed = 5;
    cfg.K0 = Mat::Zero(2, 3);
    const auto trace = certeq::run_adaptive(sys, cost, cfg);
    CHECK_FALSE(trace.failed);
    CHECK(trace.regret.back() > 0.0);
    CHECK(trace.slope_fit.slope > 0.1);
    CHECK(trace.slope_fit.slope < 0.95);
    CHECK(!trace.epochs.empty());
    bool any_update = false;
    for (const auto& e : trace.epochs) {
        CHECK(e.executed_gain_stable);
        any_update = any_update || e.gain_updated;
    }
    CHECK(any_update);
}

TEST_CASE("estimation error at epoch boundaries trends downward") {
    const LinearSystem sys = test_plant();
    const CostParams cost(Mat::Identity(3, 3), Mat::Identity(2, 2));
    int improved = 0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        AdaptiveConfig cfg;
        cfg.horizon = 30000;
        cfg.seed = 400 + static_cast<std::uint64_t>(s);
        cfg.K0 = Mat::Zero(2, 3);
        const auto trace = certeq::run_adaptive(sys, cost, cfg);
        REQUIRE(trace.epochs.size() >= 2);
        const auto& first = trace.epochs.front();
        const auto& last = trace.epochs.back();
        if (last.a_err + last.b_err < first.a_err + first.b_err) ++improved;
    }
    // Sign test: consistent improvement across seeds.
    CHECK(improved >= 8);
}
