// Command-line front end. Subcommands: press, solve, robust, worst-case,
// compare, check, benchmarks, simulate. JSON on stdout by default (12
// significant digits); --csv switches tabular outputs; --out writes to a
// file. Exit codes: 0 success, 2 validation error, 3 numerical
// nonconvergence.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rcoase/benchmarks.hpp"
#include "rcoase/coase.hpp"
#include "rcoase/jsonout.hpp"
#include "rcoase/nature.hpp"
#include "rcoase/parallel.hpp"
#include "rcoase/pressed.hpp"
#include "rcoase/robust.hpp"
#include "rcoase/sim.hpp"

namespace {

using rcoase::json;

struct CommonOpts {
    std::string out_path;
    int jobs = 0;
    double tol_root = 1e-11;
    double tol_int = 1e-10;
    int grid_n = 513;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--out", c.out_path, "write output to a file instead of stdout");
    cmd->add_option("--jobs", c.jobs, "worker pool size (default: logical cores)");
    cmd->add_option("--tol-root", c.tol_root, "root-finding tolerance");
    cmd->add_option("--tol-int", c.tol_int, "quadrature absolute tolerance");
    cmd->add_option("--grid-n", c.grid_n, "policy tabulation grid size");
}

rcoase::Tolerances tolerances(const CommonOpts& c) {
    if (!(c.tol_root > 0.0) || !(c.tol_int > 0.0))
        throw rcoase::validation_error("tolerances must be positive");
    if (c.grid_n < 65) throw rcoase::validation_error("--grid-n must be at least 65");
    rcoase::Tolerances t;
    t.root_tol = c.tol_root;
    t.integral_tol = c.tol_int;
    t.grid_n = c.grid_n;
    return t;
}

void emit(const CommonOpts& c, const std::string& text) {
    if (c.out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(c.out_path);
    if (!f) throw rcoase::validation_error("cannot open output file: " + c.out_path);
    f << text;
    if (text.empty() || text.back() != '\n') f << '\n';
}

void emit_json(const CommonOpts& c, const json& j) {
    std::ostringstream os;
    rcoase::write_json(os, j);
    emit(c, os.str());
}

int parse_horizon(const std::string& s) {
    if (s == "inf" || s == "infinite" || s == "-1") return rcoase::kInfiniteHorizon;
    try {
        const int h = std::stoi(s);
        if (h >= 1) return h;
    } catch (...) {
    }
    throw rcoase::validation_error("horizon must be a positive integer or \"inf\"");
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw rcoase::validation_error("expected a comma-separated number list");
    return out;
}

// "a:b:s" inclusive grid
std::vector<double> parse_grid_spec(const std::string& s) {
    double a, b, st;
    char c1, c2;
    std::istringstream is(s);
    if (!(is >> a >> c1 >> b >> c2 >> st) || c1 != ':' || c2 != ':' || st <= 0.0)
        throw rcoase::validation_error("grid must be start:stop:step with positive step");
    std::vector<double> out;
    for (double x = a; x <= b + 1e-12; x += st) out.push_back(x);
    return out;
}

json maybe_file_json(const std::string& spec) {
    std::string text = spec;
    if (!spec.empty() && spec[0] == '@') {
        std::ifstream f(spec.substr(1));
        if (!f) throw rcoase::validation_error("cannot read file: " + spec.substr(1));
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw rcoase::validation_error(std::string("malformed JSON: ") + e.what());
    }
}

json eq_to_json(const rcoase::KnownValuesEquilibrium& eq) {
    json j;
    j["prices"] = eq.prices;
    j["cutoffs"] = eq.cutoffs;
    j["profit"] = eq.profit;
    j["surplus"] = eq.surplus;
    if (eq.clearing_time)
        j["clearing_time"] = *eq.clearing_time;
    else
        j["clearing_time"] = nullptr;
    if (eq.multiple_optima) j["multiple_optima"] = true;
    if (eq.lipschitz_warning) j["lipschitz_warning"] = true;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust-coase: worst-case durable-goods pricing toolkit"};
    app.require_subcommand(1);

    // ---- press ----
    CommonOpts press_c;
    std::string press_dist;
    double press_eval = rcoase::kNaN;
    auto* press_cmd = app.add_subcommand("press", "pressed transform of a distribution");
    press_cmd->add_option("--dist", press_dist, "distribution spec (JSON)")->required();
    press_cmd->add_option("--eval", press_eval, "evaluate the pressed cdf at this point");
    add_common(press_cmd, press_c);

    // ---- solve ----
    CommonOpts solve_c;
    std::string solve_dist, solve_horizon = "2";
    double solve_delta = 0.5;
    bool solve_pressed = false;
    auto* solve_cmd = app.add_subcommand("solve", "known-values backward induction");
    solve_cmd->add_option("--dist", solve_dist, "distribution spec (JSON)")->required();
    solve_cmd->add_option("--delta", solve_delta, "discount factor in (0,1)")->required();
    solve_cmd->add_option("--horizon", solve_horizon, "number of periods or \"inf\"");
    solve_cmd->add_flag("--pressed", solve_pressed, "press the distribution before solving");
    add_common(solve_cmd, solve_c);

    // ---- robust ----
    CommonOpts robust_c;
    std::string robust_dist, robust_horizon = "2";
    double robust_delta = 0.5;
    bool robust_csv = false;
    auto* robust_cmd = app.add_subcommand("robust", "sequentially worst-case equilibrium");
    robust_cmd->add_option("--dist", robust_dist, "distribution spec (JSON)")->required();
    robust_cmd->add_option("--delta", robust_delta, "discount factor in (0,1)")->required();
    robust_cmd->add_option("--horizon", robust_horizon, "number of periods or \"inf\"");
    robust_cmd->add_flag("--csv", robust_csv, "emit a per-period CSV table");
    add_common(robust_cmd, robust_c);

    // ---- worst-case ----
    CommonOpts wc_c;
    std::string wc_dist, wc_prices;
    double wc_delta = 0.5;
    int wc_coarse = 64, wc_refine = 2;
    auto* wc_cmd = app.add_subcommand("worst-case",
                                      "minimize profit over obedient threshold processes");
    wc_cmd->add_option("--dist", wc_dist, "distribution spec (JSON)")->required();
    wc_cmd->add_option("--delta", wc_delta, "discount factor in (0,1)")->required();
    wc_cmd->add_option("--prices", wc_prices, "declining price path, comma separated")->required();
    wc_cmd->add_option("--grid", wc_coarse, "coarse grid points per threshold");
    wc_cmd->add_option("--refine", wc_refine, "refinement passes");
    add_common(wc_cmd, wc_c);

    // ---- compare ----
    CommonOpts cmp_c;
    std::string cmp_dist, cmp_grid = "0.05:0.95:0.05";
    int cmp_horizon = 2;
    auto* cmp_cmd = app.add_subcommand(
        "compare", "baseline vs committed-nature profit series over a delta grid (CSV)");
    cmp_cmd->add_option("--dist", cmp_dist, "distribution spec (JSON)")->required();
    cmp_cmd->add_option("--delta-grid", cmp_grid, "start:stop:step");
    cmp_cmd->add_option("--horizon", cmp_horizon, "baseline horizon");
    add_common(cmp_cmd, cmp_c);

    // ---- check ----
    CommonOpts chk_c;
    std::string chk_dist;
    bool chk_prm = false, chk_lip = false, chk_reg = false, chk_lip_override = false;
    double chk_alpha = 1.0;
    auto* chk_cmd = app.add_subcommand("check", "distribution regularity checks");
    chk_cmd->add_option("--dist", chk_dist, "distribution spec (JSON)")->required();
    chk_cmd->add_flag("--prm", chk_prm, "pressed-ratio monotonicity");
    chk_cmd->add_flag("--lipschitz", chk_lip, "quantile Lipschitz bound");
    chk_cmd->add_flag("--force", chk_lip_override, "run the Lipschitz check outside the gap case");
    chk_cmd->add_flag("--regularity", chk_reg, "power-envelope bounds (no-gap)");
    chk_cmd->add_option("--alpha", chk_alpha, "envelope exponent for --regularity");
    add_common(chk_cmd, chk_c);

    // ---- benchmarks ----
    auto* bench = app.add_subcommand("benchmarks", "alternative benchmark solvers");
    bench->require_subcommand(1);

    CommonOpts bn_c;
    double bn_delta = 0.5;
    auto* bn_cmd = bench->add_subcommand("naive", "naive fully-worst-case seller on U[0,2]");
    bn_cmd->add_option("--delta", bn_delta, "discount factor in (0,1)")->required();
    add_common(bn_cmd, bn_c);

    CommonOpts bd_c;
    double bd_q = 0.5, bd_delta = 0.75;
    std::string bd_dist;
    auto* bd_cmd = bench->add_subcommand("discrete", "sophisticated two-period binary solver");
    bd_cmd->add_option("--q", bd_q, "prior probability of the high value");
    bd_cmd->add_option("--delta", bd_delta, "discount factor in [0,1)")->required();
    bd_cmd->add_option("--dist", bd_dist, "binary discrete distribution spec (alternative to --q)");
    add_common(bd_cmd, bd_c);

    CommonOpts bc_c;
    std::string bc_dist, bc_horizon = "2";
    double bc_delta = 0.5, bc_vstar = 0.5;
    auto* bc_cmd = bench->add_subcommand("constant-price", "never-clearing constant-price check");
    bc_cmd->add_option("--dist", bc_dist, "distribution spec (JSON)")->required();
    bc_cmd->add_option("--delta", bc_delta, "discount factor in (0,1)")->required();
    bc_cmd->add_option("--vstar", bc_vstar, "target continuation value")->required();
    bc_cmd->add_option("--horizon", bc_horizon, "horizon for the reversion profit");
    add_common(bc_cmd, bc_c);

    CommonOpts bg_c;
    std::string bg_dist, bg_partition;
    double bg_delta = 0.5, bg_alpha = 1.0;
    int bg_proxy = 25;
    auto* bg_cmd = bench->add_subcommand("nogap", "no-gap feasibility certificate");
    bg_cmd->add_option("--dist", bg_dist, "distribution spec (JSON)")->required();
    bg_cmd->add_option("--delta", bg_delta, "discount factor in (0,1)")->required();
    bg_cmd->add_option("--alpha", bg_alpha, "power-envelope exponent");
    bg_cmd->add_option("--partition", bg_partition, "cells as \"a,b;b,c\" (default: full support)");
    bg_cmd->add_option("--proxy-horizon", bg_proxy, "horizon for the punishment-profit proxy");
    add_common(bg_cmd, bg_c);

    // ---- simulate ----
    CommonOpts sim_c;
    std::string sim_profile = "{\"kind\":\"robust\"}", sim_dist, sim_horizon = "2";
    double sim_delta = 0.5;
    std::int64_t sim_paths = 10000;
    std::uint64_t sim_seed = 1;
    bool sim_audit = false, sim_csv = false;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo episodes and deviation audits");
    sim_cmd->add_option("--profile", sim_profile, "profile spec (JSON, or @file)");
    sim_cmd->add_option("--dist", sim_dist, "distribution spec (JSON)")->required();
    sim_cmd->add_option("--delta", sim_delta, "discount factor in (0,1)")->required();
    sim_cmd->add_option("--horizon", sim_horizon, "number of periods or \"inf\"");
    sim_cmd->add_option("--paths", sim_paths, "number of simulated paths");
    sim_cmd->add_option("--seed", sim_seed, "RNG seed");
    sim_cmd->add_flag("--audit", sim_audit, "run the three deviation audits");
    sim_cmd->add_flag("--csv", sim_csv, "emit the sale-time histogram as CSV");
    add_common(sim_cmd, sim_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        using namespace rcoase;

        if (*press_cmd) {
            const auto d = parse_distribution(press_dist);
            const auto P = press(d);
            json j;
            j["base"] = d.to_json();
            j["support"] = {P.w_lo(), P.w_hi()};
            j["base_mean"] = d.mean();
            if (!std::isnan(press_eval)) {
                j["eval"] = press_eval;
                j["g_cdf"] = P.G_cdf(press_eval);
                if (press_eval > P.w_lo() && press_eval <= P.w_hi())
                    j["threshold"] = P.L_inv(press_eval);
            }
            emit_json(press_c, j);
            return 0;
        }

        if (*solve_cmd) {
            auto d = parse_distribution(solve_dist);
            if (solve_pressed) d = press(d).as_distribution();
            GameConfig cfg{d, solve_delta, parse_horizon(solve_horizon), tolerances(solve_c)};
            const auto eq = solve_known_values_any(cfg);
            json j = eq_to_json(eq);
            j["pressed_input"] = solve_pressed;
            emit_json(solve_c, j);
            return 0;
        }

        if (*robust_cmd) {
            const auto d = parse_distribution(robust_dist);
            GameConfig cfg{d, robust_delta, parse_horizon(robust_horizon), tolerances(robust_c)};
            const auto eq = solve_robust(cfg);
            if (robust_csv) {
                std::ostringstream os;
                os << "t,price,cutoff,threshold,residual\n";
                for (std::size_t t = 0; t < eq.pressed_eq.prices.size(); ++t)
                    os << (t + 1) << ',' << format_double(eq.pressed_eq.prices[t]) << ','
                       << format_double(eq.pressed_eq.cutoffs[t]) << ','
                       << format_double(eq.process.thresholds[t]) << ','
                       << format_double(eq.process.residuals[t]) << '\n';
                emit(robust_c, os.str());
                return 0;
            }
            json j = eq_to_json(eq.pressed_eq);
            j["thresholds"] = eq.process.thresholds;
            j["residuals"] = eq.process.residuals;
            j["profit"] = eq.profit;
            j["surplus"] = eq.surplus;  // buyer surplus in the threshold model
            j["pressed_surplus"] = eq.pressed_eq.surplus;
            emit_json(robust_c, j);
            return 0;
        }

        if (*wc_cmd) {
            const auto d = parse_distribution(wc_dist);
            WorstCaseOptions opts;
            opts.coarse = wc_coarse;
            opts.refinements = wc_refine;
            const auto res = worst_case_partitional(d, parse_list(wc_prices), wc_delta, opts);
            json j;
            j["thresholds"] = res.thresholds;
            j["min_profit"] = res.min_profit;
            j["residuals"] = res.residuals;
            j["feasible"] = res.feasible;
            j["note"] = res.note;
            emit_json(wc_c, j);
            return 0;
        }

        if (*cmp_cmd) {
            const auto d = parse_distribution(cmp_dist);
            const auto grid = parse_grid_spec(cmp_grid);
            std::vector<double> base(grid.size()), commit(grid.size());
            parallel_for(grid.size(), [&](std::size_t i) {
                GameConfig cfg{d, grid[i], cmp_horizon, tolerances(cmp_c)};
                base[i] = solve_robust(cfg).profit;
                commit[i] = nature_commitment_profit(d, grid[i]).profit;
            }, cmp_c.jobs);
            std::ostringstream os;
            os << "delta,baseline_profit,commitment_profit\n";
            for (std::size_t i = 0; i < grid.size(); ++i)
                os << format_double(grid[i]) << ',' << format_double(base[i]) << ','
                   << format_double(commit[i]) << '\n';
            emit(cmp_c, os.str());
            return 0;
        }

        if (*chk_cmd) {
            const auto d = parse_distribution(chk_dist);
            if (!chk_prm && !chk_lip && !chk_reg)
                throw validation_error("check: pick at least one of --prm, --lipschitz, --regularity");
            json j;
            if (chk_prm) {
                const auto rep = check_prm(d);
                json p = {{"holds", rep.holds}, {"violation_count", rep.violations.size()}};
                if (!rep.violations.empty()) {
                    p["violation_range"] = {rep.violations.front(), rep.violations.back()};
                    if (rep.violations.size() <= 32) p["violations"] = rep.violations;
                }
                j["prm"] = p;
            }
            if (chk_lip) {
                const auto rep = check_lipschitz(d, chk_lip_override);
                j["lipschitz"] = {{"holds", rep.holds}, {"L_const", rep.L_const}};
            }
            if (chk_reg) {
                const auto rep = check_ad_regularity(d, chk_alpha);
                j["regularity"] = {{"alpha", chk_alpha},
                                   {"M", rep.M},
                                   {"L", rep.L},
                                   {"holds", rep.holds}};
            }
            emit_json(chk_c, j);
            return 0;
        }

        if (*bn_cmd) {
            const auto r = naive_maxmin_uniform(bn_delta);
            json j;
            j["v_star"] = r.v_star;
            j["p1"] = r.p1;
            j["profit"] = r.profit;
            j["anticipated"] = r.anticipated;
            j["sells"] = r.sells;
            j["binds"] = r.binds;
            if (r.never_sell_interpretation) j["never_sell_interpretation"] = true;
            emit_json(bn_c, j);
            return 0;
        }

        if (*bd_cmd) {
            double q = bd_q;
            if (!bd_dist.empty()) {
                const auto d = parse_distribution(bd_dist);
                if (!d.is_discrete() || d.atoms().size() != 2 || d.atoms()[0].first != 0.0 ||
                    d.atoms()[1].first != 1.0)
                    throw validation_error("benchmarks discrete: --dist must be binary on {0,1}");
                q = d.atoms()[1].second;
            }
            const auto r = sophisticated_discrete_two_period(q, bd_delta);
            json j;
            j["p1"] = r.p1;
            j["w"] = r.w;
            j["p2"] = r.p2;
            j["profit"] = r.profit;
            j["corner"] = r.corner;
            emit_json(bd_c, j);
            return 0;
        }

        if (*bc_cmd) {
            const auto d = parse_distribution(bc_dist);
            GameConfig cfg{d, bc_delta, parse_horizon(bc_horizon), tolerances(bc_c)};
            const double minimax = solve_robust(cfg).profit;
            const auto r = constant_price_equilibrium(d, bc_delta, bc_vstar, minimax);
            json j;
            j["rho"] = r.rho;
            j["valid"] = r.valid;
            j["minimax_profit"] = minimax;
            if (!r.valid) j["violated"] = r.violated;
            emit_json(bc_c, j);
            return 0;
        }

        if (*bg_cmd) {
            const auto d = parse_distribution(bg_dist);
            std::vector<PartitionCell> cells;
            if (bg_partition.empty()) {
                cells.push_back({d.lo(), d.hi()});
            } else {
                std::stringstream ss(bg_partition);
                std::string tok;
                while (std::getline(ss, tok, ';')) {
                    const auto ab = parse_list(tok);
                    if (ab.size() != 2) throw validation_error("partition cells need two bounds");
                    cells.push_back({ab[0], ab[1]});
                }
            }
            const auto r = no_gap_folk_support(d, bg_delta, cells, bg_alpha, bg_proxy);
            json j;
            j["pi_low"] = r.pi_low;
            j["pi_high"] = r.pi_high;
            j["feasible"] = r.feasible;
            if (!r.reason.empty()) j["reason"] = r.reason;
            emit_json(bg_c, j);
            return 0;
        }

        if (*sim_cmd) {
            const auto d = parse_distribution(sim_dist);
            GameConfig cfg{d, sim_delta, parse_horizon(sim_horizon), tolerances(sim_c)};
            const auto prof = make_profile(cfg, maybe_file_json(sim_profile));
            auto rep = simulate(prof, cfg, sim_paths, sim_seed, sim_c.jobs);
            if (sim_audit) {
                const auto pgrid = linspace(d.lo(), d.hi(), 256);
                rep.max_seller_deviation_gain = audit_seller(prof, cfg, pgrid, sim_c.jobs);
                rep.max_nature_deviation_drop = audit_nature(prof, cfg, pgrid, sim_c.jobs);
                rep.max_buyer_violation = audit_buyer(prof, cfg);
            }
            if (sim_csv) {
                std::ostringstream os;
                os << "t,sales\n";
                for (std::size_t t = 0; t < rep.sale_time_hist.size(); ++t)
                    if (rep.sale_time_hist[t] > 0) os << (t + 1) << ',' << rep.sale_time_hist[t] << '\n';
                os << "no_sale," << rep.no_sale << '\n';
                emit(sim_c, os.str());
                return 0;
            }
            json j;
            j["n_paths"] = rep.n_paths;
            j["seed"] = rep.seed;
            j["profile"] = prof.to_json();
            j["profit_mean"] = rep.profit_mean;
            j["profit_ci95"] = rep.profit_ci;
            j["surplus_mean"] = rep.surplus_mean;
            j["surplus_ci95"] = rep.surplus_ci;
            json hist = json::array();
            for (std::size_t t = 0; t < rep.sale_time_hist.size(); ++t)
                if (rep.sale_time_hist[t] > 0) hist.push_back({t + 1, rep.sale_time_hist[t]});
            j["sale_time_histogram"] = hist;
            j["no_sale"] = rep.no_sale;
            if (rep.max_seller_deviation_gain) {
                j["max_seller_deviation_gain"] = *rep.max_seller_deviation_gain;
                j["max_nature_deviation_drop"] = *rep.max_nature_deviation_drop;
                j["max_buyer_violation"] = *rep.max_buyer_violation;
                j["audit_note"] = "nature deviations restricted to partitional thresholds";
            }
            emit_json(sim_c, j);
            return 0;
        }

        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const rcoase::validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const rcoase::convergence_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
