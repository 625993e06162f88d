#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "certeq/adaptive.hpp"
#include "certeq/bounds.hpp"
#include "certeq/io.hpp"
#include "certeq/lqg.hpp"
#include "certeq/lqr_eval.hpp"
#include "certeq/random.hpp"

namespace {

using certeq::Mat;
using nlohmann::json;

int thread_budget() {
    if (const char* env = std::getenv("CERTEQ_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, count) across the thread budget. Work items write
// into pre-sized slots, so output order never depends on scheduling.
void parallel_for(long count, const std::function<void(long)>& fn) {
    const int threads = std::min<long>(thread_budget(), count);
    if (threads <= 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                long i;
                while ((i = next.fetch_add(1)) < count) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Mat matrix_from_json(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw certeq::SchemaError("key \"" + key + "\": expected an array of arrays");
    }
    Mat m(j.size(), j[0].size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != static_cast<std::size_t>(m.cols())) {
            throw certeq::SchemaError("key \"" + key + "\": ragged rows");
        }
        for (std::size_t k = 0; k < j[i].size(); ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

// Random perturbation direction of exact operator norm eps.
Mat perturbation(certeq::GaussianStream& rng, Eigen::Index rows, Eigen::Index cols,
                 double eps) {
    const Mat g = rng.normal_matrix(rows, cols);
    const double norm = certeq::operator_norm(g);
    return norm > 0.0 ? Mat(eps / norm * g) : Mat(Mat::Zero(rows, cols));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

certeq::SlopeFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double m = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::max(y[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double vx = sxx - sx * sx / m;
    const double vy = syy - sy * sy / m;
    const double cxy = sxy - sx * sy / m;
    certeq::SlopeFit fit;
    fit.slope = cxy / vx;
    fit.intercept = (sy - fit.slope * sx) / m;
    fit.r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
    return fit;
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw certeq::SchemaError("empty numeric grid");
    return out;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string components_str(const std::map<std::string, double>& comps) {
    std::string out;
    for (const auto& [k, v] : comps) {
        if (!out.empty()) out += ";";
        out += k + "=" + certeq::format_double(v);
    }
    return out;
}

int cmd_solve(const std::string& path, double gamma_flag) {
    const certeq::SystemFile file = certeq::load_system_file(path);
    const certeq::LinearSystem sys = file.linear_system();
    const certeq::CostParams cost(
        file.Q.value_or(Mat::Identity(sys.n(), sys.n())),
        file.R.value_or(Mat::Identity(sys.d(), sys.d())));
    const certeq::RiccatiSolution sol = certeq::solve_dare(sys, cost);
    const double gamma = gamma_flag > 0.0 ? gamma_flag : certeq::default_gamma(sol.L);

    json out;
    out["P"] = matrix_to_json(sol.P);
    out["K"] = matrix_to_json(sol.K);
    out["L"] = matrix_to_json(sol.L);
    out["residual"] = sol.residual;
    out["iterations"] = sol.iterations;
    out["rho_L"] = certeq::spectral_radius(sol.L);
    out["gamma"] = gamma;
    out["tau_L"] = certeq::tau(sol.L, gamma, true).tau;
    if (file.has_observation()) {
        const certeq::LQGSystem plant = file.lqg_system();
        auto [lkf, sigma] = certeq::kalman_gain(plant);
        out["Lkf"] = matrix_to_json(lkf);
        out["Sigma"] = matrix_to_json(sigma);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_verify(const std::string& sys_path, const std::string& sol_path) {
    const certeq::SystemFile file = certeq::load_system_file(sys_path);
    const certeq::LinearSystem sys = file.linear_system();
    const certeq::CostParams cost(
        file.Q.value_or(Mat::Identity(sys.n(), sys.n())),
        file.R.value_or(Mat::Identity(sys.d(), sys.d())));
    std::ifstream in(sol_path, std::ios::binary);
    if (!in) throw certeq::IoError("cannot open file: " + sol_path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw certeq::IoError(std::string("JSON parse error: ") + e.what());
    }
    if (!j.contains("P")) throw certeq::SchemaError("key \"P\": missing in solution file");
    const Mat P = matrix_from_json(j["P"], "P");
    const double residual = certeq::riccati_residual(certeq::symmetrize(P), sys, cost);
    const double tol = 1e-10 * (1.0 + certeq::operator_norm(P));
    json out;
    out["residual"] = residual;
    out["tolerance"] = tol;
    out["ok"] = residual <= tol;
    std::cout << out.dump(2) << "\n";
    return residual <= tol ? 0 : 2;
}

int cmd_bounds(const std::string& path, double eps, double gamma_flag, double rho_flag,
               long ell, double sigma_w) {
    const certeq::SystemFile file = certeq::load_system_file(path);
    const certeq::LinearSystem sys = file.linear_system();
    const certeq::CostParams cost(
        file.Q.value_or(Mat::Identity(sys.n(), sys.n())),
        file.R.value_or(Mat::Identity(sys.d(), sys.d())));
    const certeq::RiccatiSolution sol = certeq::solve_dare(sys, cost);
    const double gamma = gamma_flag > 0.0 ? gamma_flag : certeq::default_gamma(sol.L);
    const double rho = rho_flag > 0.0 ? rho_flag : certeq::default_rho(sys.A);
    if (ell < 1) ell = sys.n();
    const certeq::SystemConstants consts = certeq::make_constants(sys, cost, sol);
    const double tau_L = certeq::tau(sol.L, gamma, true).tau;

    certeq::CsvWriter csv(std::cout);
    csv.metadata("eps", eps);
    csv.metadata("gamma", gamma);
    csv.metadata("rho", rho);
    csv.metadata("ell", static_cast<double>(ell));
    csv.metadata("sigma_w", sigma_w);
    csv.header({"name", "value", "applicable", "margin", "components"});

    const certeq::BoundReport fp = certeq::dare_bound_fixed_point(sys, cost, sol, eps, gamma);
    csv.row({std::string("dare_fixed_point"), certeq::format_double(fp.bound_value),
             bool_str(fp.applicable), certeq::format_double(fp.applicability_margin),
             components_str(fp.components)});
    const certeq::BoundReport dir = certeq::dare_bound_direct(sys, cost, sol, eps, rho, ell);
    csv.row({std::string("dare_direct"), certeq::format_double(dir.bound_value),
             bool_str(dir.applicable), certeq::format_double(dir.applicability_margin),
             components_str(dir.components)});
    const double f_eps = std::min(fp.bound_value, dir.bound_value);
    if (f_eps < 1.0) {
        const double kb = certeq::gain_perturb_bound(consts, f_eps,
                                                     certeq::min_singular_value(cost.R));
        csv.row({std::string("gain_perturb"), certeq::format_double(kb),
                 bool_str(true), certeq::format_double(1.0 - f_eps),
                 "f_eps=" + certeq::format_double(f_eps)});
    }
    const certeq::BoundReport meta =
        certeq::gap_bound_meta(consts, f_eps, gamma, tau_L, sys.d(), sigma_w);
    csv.row({std::string("gap_meta"), certeq::format_double(meta.bound_value),
             bool_str(meta.applicable), certeq::format_double(meta.applicability_margin),
             components_str(meta.components)});
    const certeq::BoundReport fast =
        certeq::gap_bound_fast_rate(sys, cost, sol, eps, rho, ell, gamma, sigma_w, sys.d());
    csv.row({std::string("gap_fast_rate"), certeq::format_double(fast.bound_value),
             bool_str(fast.applicable), certeq::format_double(fast.applicability_margin),
             components_str(fast.components)});
    return 0;
}

int cmd_gap_sweep(const std::string& path, const std::string& grid_csv, long seeds,
                  double sigma_w, std::uint64_t seed_base) {
    const certeq::SystemFile file = certeq::load_system_file(path);
    const certeq::LinearSystem sys = file.linear_system();
    const certeq::CostParams cost(
        file.Q.value_or(Mat::Identity(sys.n(), sys.n())),
        file.R.value_or(Mat::Identity(sys.d(), sys.d())));
    const certeq::RiccatiSolution sol = certeq::solve_dare(sys, cost);
    const double gamma = certeq::default_gamma(sol.L);
    const double rho = certeq::default_rho(sys.A);
    const long ell = sys.n();
    const certeq::SystemConstants consts = certeq::make_constants(sys, cost, sol);
    const double tau_L = certeq::tau(sol.L, gamma, true).tau;
    const std::vector<double> grid = parse_grid(grid_csv);

    struct Point {
        double eps, gap_median, meta, fast;
    };
    std::vector<Point> points(grid.size());
    parallel_for(static_cast<long>(grid.size()), [&](long gi) {
        const double eps = grid[gi];
        std::vector<double> gaps;
        gaps.reserve(seeds);
        for (long s = 0; s < seeds; ++s) {
            certeq::GaussianStream rng(seed_base, static_cast<std::uint64_t>(gi) * 100000 + s);
            const Mat Ahat = sys.A + perturbation(rng, sys.n(), sys.n(), eps);
            const Mat Bhat = sys.B + perturbation(rng, sys.n(), sys.d(), eps);
            const Mat Khat =
                certeq::solve_dare(certeq::LinearSystem(Ahat, Bhat), cost).K;
            gaps.push_back(certeq::exact_gap(sys, cost, sol, Khat, sigma_w).gap);
        }
        const double f_eps =
            certeq::dare_bound_fixed_point(sys, cost, sol, eps, gamma).bound_value;
        points[gi] = {eps, median(gaps),
                      certeq::gap_bound_meta(consts, f_eps, gamma, tau_L, sys.d(), sigma_w)
                          .bound_value,
                      certeq::gap_bound_fast_rate(sys, cost, sol, eps, rho, ell, gamma,
                                                  sigma_w, sys.d())
                          .bound_value};
    });

    certeq::CsvWriter csv(std::cout);
    csv.metadata("seeds", static_cast<double>(seeds));
    csv.metadata("sigma_w", sigma_w);
    csv.metadata("gamma", gamma);
    csv.metadata("rho", rho);
    csv.metadata("seed_base", static_cast<double>(seed_base));
    csv.header({"row_type", "eps", "gap_exact", "gap_bound_meta", "gap_bound_fast_rate"});
    std::vector<double> xs, ys;
    for (const Point& p : points) {
        csv.row({std::string("data"), certeq::format_double(p.eps),
                 certeq::format_double(p.gap_median), certeq::format_double(p.meta),
                 certeq::format_double(p.fast)});
        xs.push_back(p.eps);
        ys.push_back(p.gap_median);
    }
    const certeq::SlopeFit fit = log_log_fit(xs, ys);
    csv.row({std::string("slope"), "", certeq::format_double(fit.slope), "",
             certeq::format_double(fit.r2)});
    return 0;
}

int cmd_beta_sweep(const std::string& grid_csv, double eps) {
    const std::vector<double> grid = parse_grid(grid_csv);
    struct Point {
        double beta, b93, bdir, ratio;
    };
    std::vector<Point> points(grid.size());
    parallel_for(static_cast<long>(grid.size()), [&](long gi) {
        const double beta = grid[gi];
        Mat A = 1.01 * Mat::Identity(2, 2);
        Mat B = Mat::Identity(2, 2);
        B(1, 1) = beta;
        const certeq::LinearSystem sys(A, B);
        const certeq::CostParams cost(Mat::Identity(2, 2), Mat::Identity(2, 2));
        const certeq::RiccatiSolution sol = certeq::solve_dare(sys, cost);
        const double gamma = certeq::default_gamma(sol.L);
        const double rho = certeq::default_rho(A);
        const double b93 =
            certeq::dare_bound_fixed_point(sys, cost, sol, eps, gamma).bound_value;
        const double bdir =
            certeq::dare_bound_direct(sys, cost, sol, eps, rho, 1).bound_value;
        points[gi] = {beta, b93, bdir, b93 / bdir};
    });

    certeq::CsvWriter csv(std::cout);
    csv.metadata("eps", eps);
    csv.header({"row_type", "beta", "bound93", "boundDirect", "ratio"});
    std::vector<double> inv_beta, b93s, bdirs, ratios;
    for (const Point& p : points) {
        csv.row({std::string("data"), certeq::format_double(p.beta),
                 certeq::format_double(p.b93), certeq::format_double(p.bdir),
                 certeq::format_double(p.ratio)});
        inv_beta.push_back(1.0 / p.beta);
        b93s.push_back(p.b93);
        bdirs.push_back(p.bdir);
        ratios.push_back(p.ratio);
    }
    csv.row({std::string("slope"), "", certeq::format_double(log_log_fit(inv_beta, b93s).slope),
             certeq::format_double(log_log_fit(inv_beta, bdirs).slope),
             certeq::format_double(log_log_fit(inv_beta, ratios).slope)});
    return 0;
}

int cmd_lqg_sweep(const std::string& path, const std::string& grid_csv, long seeds,
                  std::uint64_t seed_base) {
    const certeq::SystemFile file = certeq::load_system_file(path);
    const certeq::LQGSystem plant = file.lqg_system();
    const certeq::LQGOptimal opt = certeq::lqg_optimal(plant);
    const Mat N_star = certeq::build_lifted(plant, opt.oc).Nhat;
    const double gamma = certeq::default_gamma(N_star);
    const double tau_N = certeq::tau(N_star, gamma, true).tau;
    auto [lkf, sigma_kf] = certeq::kalman_gain(plant);
    const certeq::RiccatiSolution ctrl = certeq::solve_dare(
        certeq::LinearSystem(plant.A, plant.B),
        certeq::CostParams(plant.state_cost(), plant.R));
    const certeq::SystemConstants consts = certeq::make_constants_lqg(plant, ctrl, lkf);
    const std::vector<double> grid = parse_grid(grid_csv);

    struct Point {
        double eps, gap_median, bound, fast;
    };
    std::vector<Point> points(grid.size());
    parallel_for(static_cast<long>(grid.size()), [&](long gi) {
        const double eps = grid[gi];
        std::vector<double> gaps;
        for (long s = 0; s < seeds; ++s) {
            certeq::GaussianStream rng(seed_base, static_cast<std::uint64_t>(gi) * 100000 + s);
            const Mat Ahat = plant.A + perturbation(rng, plant.n(), plant.n(), eps);
            const Mat Bhat = plant.B + perturbation(rng, plant.n(), plant.d(), eps);
            const Mat Chat = plant.C + perturbation(rng, plant.p(), plant.n(), eps);
            const Mat Lhat = -opt.Lkf_star + perturbation(rng, plant.n(), plant.p(), eps);
            const certeq::ObserverController oc =
                certeq::certainty_equivalent_oc(Ahat, Bhat, Chat, Lhat, plant.Q, plant.R);
            gaps.push_back(certeq::lqg_cost(plant, oc) - opt.J_star);
        }
        const double eps_bar = 7.0 * std::pow(consts.gamma_star, 3.0) /
                               certeq::min_singular_value(plant.R) * eps;
        points[gi] = {eps, median(gaps),
                      certeq::lqg_gap_bound(plant, consts, eps_bar, gamma, tau_N).bound_value,
                      certeq::lqg_gap_bound_fast_rate(plant, eps, gamma).bound_value};
    });

    certeq::CsvWriter csv(std::cout);
    csv.metadata("seeds", static_cast<double>(seeds));
    csv.metadata("gamma", gamma);
    csv.metadata("tau_N", tau_N);
    csv.metadata("seed_base", static_cast<double>(seed_base));
    csv.header({"row_type", "eps", "gap_exact", "lqg_gap_bound", "lqg_gap_bound_fast_rate"});
    std::vector<double> xs, ys;
    for (const Point& p : points) {
        csv.row({std::string("data"), certeq::format_double(p.eps),
                 certeq::format_double(p.gap_median), certeq::format_double(p.bound),
                 certeq::format_double(p.fast)});
        xs.push_back(p.eps);
        ys.push_back(p.gap_median);
    }
    const certeq::SlopeFit fit = log_log_fit(xs, ys);
    csv.row({std::string("slope"), "", certeq::format_double(fit.slope), "",
             certeq::format_double(fit.r2)});
    return 0;
}

int cmd_regret(const std::string& path, long T, long seeds, double exponent,
               long epoch_base, double scale, std::uint64_t seed_base) {
    const certeq::SystemFile file = certeq::load_system_file(path);
    const certeq::LinearSystem sys = file.linear_system();
    const certeq::CostParams cost(
        file.Q.value_or(Mat::Identity(sys.n(), sys.n())),
        file.R.value_or(Mat::Identity(sys.d(), sys.d())));
    const certeq::RiccatiSolution opt = certeq::solve_dare(sys, cost);

    std::vector<certeq::RegretTrace> traces(seeds);
    parallel_for(seeds, [&](long s) {
        certeq::AdaptiveConfig cfg;
        cfg.horizon = T;
        cfg.epoch_base = epoch_base;
        cfg.exploration_exponent = exponent;
        cfg.exploration_scale = scale;
        cfg.seed = seed_base + static_cast<std::uint64_t>(s);
        cfg.sigma_w = file.sigma_w;
        cfg.K0 = opt.K;
        traces[s] = certeq::run_adaptive(sys, cost, cfg);
    });

    certeq::CsvWriter csv(std::cout);
    csv.metadata("T", static_cast<double>(T));
    csv.metadata("seeds", static_cast<double>(seeds));
    csv.metadata("exponent", exponent);
    csv.metadata("epoch_base", static_cast<double>(epoch_base));
    csv.metadata("exploration_scale", scale);
    csv.metadata("seed_base", static_cast<double>(seed_base));
    csv.metadata("J_star", traces.empty() ? 0.0 : traces[0].J_star);
    csv.header({"row_type", "seed", "t", "regret"});

    const long stride = std::max<long>(1, T / 1000);
    long failures = 0;
    for (long s = 0; s < seeds; ++s) {
        const certeq::RegretTrace& tr = traces[s];
        if (tr.failed) {
            ++failures;
            csv.row({std::string("failed"), std::to_string(s), std::to_string(tr.fail_step),
                     ""});
            continue;
        }
        for (long t = stride - 1; t < T; t += stride) {
            csv.row({std::string("data"), std::to_string(s), std::to_string(t + 1),
                     certeq::format_double(tr.regret[t])});
        }
        csv.row({std::string("seed_slope"), std::to_string(s), std::to_string(T),
                 certeq::format_double(tr.slope_fit.slope)});
    }

    // Pooled fit: median regret across surviving seeds at sampled times over
    // the trailing half of the horizon.
    std::vector<double> xs, ys;
    for (long t = std::max(stride - 1, T / 2); t < T; t += stride) {
        std::vector<double> vals;
        for (const certeq::RegretTrace& tr : traces) {
            if (!tr.failed) vals.push_back(tr.regret[t]);
        }
        if (!vals.empty()) {
            const double med = median(vals);
            if (med > 0.0) {
                xs.push_back(static_cast<double>(t + 1));
                ys.push_back(med);
            }
        }
    }
    const certeq::SlopeFit fit = log_log_fit(xs, ys);
    csv.row({std::string("pooled_slope"), std::to_string(seeds - failures),
             std::to_string(T), certeq::format_double(fit.slope)});
    csv.row({std::string("failure_rate"), std::to_string(failures), std::to_string(seeds),
             certeq::format_double(static_cast<double>(failures) /
                                   static_cast<double>(seeds))});
    return 0;
}

int error_json(const std::string& kind, const std::string& message, int code) {
    json out;
    out["error"]["kind"] = kind;
    out["error"]["message"] = message;
    std::cout << out.dump(2) << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certainty-equivalent LQR/LQG analysis toolkit"};
    app.require_subcommand(1);

    std::string sys_path, sol_path, grid;
    double eps = 0.01, gamma = -1.0, rho = -1.0, sigma_w = 1.0;
    double exponent = 0.5, scale = 1.0;
    long ell = -1, seeds = 20, T = 100000, epoch_base = 200;
    std::uint64_t seed_base = 0;

    auto* solve = app.add_subcommand("solve", "solve the Riccati equation for a system file");
    solve->add_option("system", sys_path, "system JSON file")->required();
    solve->add_option("--gamma", gamma, "decay rate for the transient constant");

    auto* verify = app.add_subcommand("verify", "check a solve output against its system");
    verify->add_option("system", sys_path, "system JSON file")->required();
    verify->add_option("solution", sol_path, "solve output JSON file")->required();

    auto* bounds = app.add_subcommand("bounds", "evaluate every perturbation bound");
    bounds->add_option("system", sys_path)->required();
    bounds->add_option("--eps", eps, "parameter error size");
    bounds->add_option("--gamma", gamma);
    bounds->add_option("--rho", rho);
    bounds->add_option("--ell", ell, "controllability horizon");
    bounds->add_option("--sigma-w", sigma_w);

    auto* gap = app.add_subcommand("gap-sweep", "suboptimality gap vs parameter error");
    gap->add_option("system", sys_path)->required();
    gap->add_option("--eps-grid", grid, "comma-separated eps values")->required();
    gap->add_option("--seeds", seeds, "perturbation draws per grid point");
    gap->add_option("--sigma-w", sigma_w);
    gap->add_option("--seed-base", seed_base);

    auto* beta = app.add_subcommand("beta-sweep", "bound separation on the two-state example");
    beta->add_option("--beta-grid", grid, "comma-separated beta values")->required();
    beta->add_option("--eps", eps);

    auto* lqg = app.add_subcommand("lqg-sweep", "LQG gap vs parameter error");
    lqg->add_option("system", sys_path)->required();
    lqg->add_option("--eps-grid", grid)->required();
    lqg->add_option("--seeds", seeds);
    lqg->add_option("--seed-base", seed_base);

    auto* regret = app.add_subcommand("regret", "epsilon-greedy adaptive LQR regret");
    regret->add_option("system", sys_path)->required();
    regret->add_option("--T", T, "horizon");
    regret->add_option("--seeds", seeds);
    regret->add_option("--exponent", exponent, "exploration decay exponent");
    regret->add_option("--epoch-base", epoch_base);
    regret->add_option("--scale", scale, "exploration scale");
    regret->add_option("--seed-base", seed_base);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) return cmd_solve(sys_path, gamma);
        if (verify->parsed()) return cmd_verify(sys_path, sol_path);
        if (bounds->parsed()) return cmd_bounds(sys_path, eps, gamma, rho, ell, sigma_w);
        if (gap->parsed()) return cmd_gap_sweep(sys_path, grid, seeds, sigma_w, seed_base);
        if (beta->parsed()) return cmd_beta_sweep(grid, eps);
        if (lqg->parsed()) return cmd_lqg_sweep(sys_path, grid, seeds, seed_base);
        if (regret->parsed())
            return cmd_regret(sys_path, T, seeds, exponent, epoch_base, scale, seed_base);
    } catch (const certeq::IoError& e) {
        return error_json("io", e.what(), 1);
    } catch (const certeq::SchemaError& e) {
        return error_json("schema", e.what(), 1);
    } catch (const certeq::StabilizabilityError& e) {
        return error_json("stabilizability", e.what(), 2);
    } catch (const certeq::DetectabilityError& e) {
        return error_json("detectability", e.what(), 2);
    } catch (const certeq::ControllabilityError& e) {
        return error_json("controllability", e.what(), 2);
    } catch (const certeq::StabilityError& e) {
        return error_json("stability", e.what(), 2);
    } catch (const certeq::ConvergenceError& e) {
        return error_json("convergence", e.what(), 2);
    } catch (const certeq::SingularMatrixError& e) {
        return error_json("singular", e.what(), 2);
    } catch (const certeq::DivergenceError& e) {
        return error_json("divergence", e.what(), 2);
    } catch (const certeq::DimensionError& e) {
        return error_json("dimension", e.what(), 1);
    } catch (const certeq::DomainError& e) {
        return error_json("domain", e.what(), 1);
    } catch (const std::exception& e) {
        return error_json("internal", e.what(), 2);
    }
    return 0;
}
