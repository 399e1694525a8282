#include "hjdebt/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "hjdebt/config.hpp"
#include "hjdebt/errors.hpp"
#include "hjdebt/io.hpp"
#include "hjdebt/serialize.hpp"

namespace hjdebt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
    RunConfig cfg;
    std::string hash;
    fs::path out;
    int jobs = 1;
    std::ostream& log;
};

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Config: return kExitConfig;
        case ErrorKind::HypothesisViolated:
        case ErrorKind::RegimeViolated: return kExitHypothesis;
        default: return kExitNumerical;
    }
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorKind::Config, "cannot write '" + p.string() + "'");
    return f;
}

void write_json(const fs::path& p, const json& j) {
    auto f = open_out(p);
    f << j.dump(2) << '\n';
}

json stamped(const Context& ctx, json body) {
    body["version"] = kVersion;
    body["config_hash"] = ctx.hash;
    return body;
}

void stamp_csv(std::ostream& os, const Context& ctx) {
    CsvWriter csv(os);
    csv.comment("version", kVersion);
    csv.comment("config_hash", ctx.hash);
}

std::string fmt(double v) { return format_double(v); }

// ---- solve ----------------------------------------------------------------

void write_samples(const Context& ctx, const EquilibriumSolution& sol) {
    auto f = open_out(ctx.out / "samples.csv");
    stamp_csv(f, ctx);
    CsvWriter csv(f);
    csv.header({"x", "V", "p", "u", "v", "W", "arc"});
    const double lo = sol.domain_lo();
    const double xs = sol.x_bankrupt();
    const int n = ctx.cfg.output.samples;
    for (int i = sol.complete() ? 0 : 1; i < n; ++i) {
        const double x = i + 1 == n ? xs : lo + (xs - lo) * i / (n - 1);
        const EquilibriumPoint e = sol.eval(x);
        const Controls c = sol.feedback(x);
        csv.row({x, e.value, e.price, c.u, c.v, sol.strategy().cost(x),
                 static_cast<double>(sol.arc_index(x))});
    }
}

std::string summary_text(const Context& ctx, const EquilibriumSolution& sol) {
    const auto& m = ctx.cfg.model;
    const auto& cs = sol.strategy();
    const double xs = m.x_bankrupt;
    const double w = cs.cost(xs);
    const double th = m.salvage_at_threshold();
    const double pc = cs.price(xs);
    std::ostringstream s;
    s << "version: " << kVersion << '\n';
    s << "config_hash: " << ctx.hash << '\n';
    s << "x_star: " << fmt(xs) << '\n';
    s << "bankruptcy_cost B: " << fmt(m.bankruptcy_cost) << '\n';
    s << "salvage theta(x_star): " << fmt(th) << " (" << m.salvage.name() << ")\n";
    s << "hypothesis W(x*) > B: " << (w > m.bankruptcy_cost ? "holds" : "fails")
      << " (W(x*)=" << fmt(w) << ")\n";
    s << "hypothesis theta(x*) <= p_c(x*): " << (th <= pc ? "holds" : "fails")
      << " (p_c(x*)=" << fmt(pc) << ")\n";
    s << "flat threshold: " << fmt(cs.flat_threshold()) << '\n';
    s << "devaluation threshold: " << fmt(cs.devaluation_threshold()) << '\n';
    s << "semi-equilibrium point x1: " << fmt(sol.semi_equilibrium_point()) << '\n';
    s << "touch points N0=" << sol.touch_points().size() << ":";
    for (double x : sol.touch_points()) s << ' ' << fmt(x);
    s << '\n';
    s << "complete: " << (sol.complete() ? "yes" : "no (covers (x1, x*] only)") << '\n';
    for (std::size_t k = 0; k < sol.arcs().size(); ++k) {
        const auto& a = sol.arcs()[k];
        s << "arc " << k << ": [" << fmt(a.x_left) << ", " << fmt(a.terminal.x)
          << "] stop=" << to_string(a.stop) << " steps=" << a.sol.steps.size() << '\n';
    }
    for (const auto& r : sol.restarts()) {
        s << "restart at " << fmt(r.x0) << ": limit left end " << fmt(r.left) << " after "
          << r.eps.size() << " levels\n";
    }
    return s.str();
}

EquilibriumSolution build(const Context& ctx) {
    return EquilibriumSolution::build(ctx.cfg.model, ctx.cfg.costs.make(), ctx.cfg.build);
}

int run_solve(const Context& ctx) {
    const EquilibriumSolution sol = build(ctx);
    json j;
    to_json(j["config"], ctx.cfg);
    j["solution_hash"] = ctx.cfg.solution_hash();
    j["semi_equilibrium_point"] = sol.semi_equilibrium_point();
    j["solution"] = solution_to_json(sol);
    write_json(ctx.out / "solution.json", stamped(ctx, j));
    write_samples(ctx, sol);
    {
        auto f = open_out(ctx.out / "barrier.csv");
        stamp_csv(f, ctx);
        ConstantStrategyCurve(sol.strategy(), sol.x_bankrupt()).write_csv(f);
    }
    const std::string summary = summary_text(ctx, sol);
    auto f = open_out(ctx.out / "summary.txt");
    f << summary;
    ctx.log << summary;
    return kExitOk;
}

// ---- simulate -------------------------------------------------------------

EquilibriumSolution load_or_build(const Context& ctx, const std::string& solution_path) {
    if (solution_path.empty()) return build(ctx);
    std::ifstream in(solution_path);
    if (!in) throw Error(ErrorKind::Config, "cannot open solution file '" + solution_path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("solution file: ") + e.what());
    }
    if (j.value("solution_hash", std::string()) != ctx.cfg.solution_hash()) {
        throw Error(ErrorKind::Config, "solution file was produced by a different config");
    }
    return solution_from_json(j.at("solution"), ctx.cfg.model, ctx.cfg.costs.make());
}

std::vector<double> initial_points(const RunConfig& cfg) {
    if (!cfg.simulate.x0.empty()) return cfg.simulate.x0;
    std::vector<double> xs;
    const int n = cfg.simulate.grid_points;
    for (int i = 0; i < n; ++i) xs.push_back(cfg.model.x_bankrupt * i / (n - 1));
    return xs;
}

int run_simulate(const Context& ctx, const std::string& solution_path) {
    const EquilibriumSolution sol = load_or_build(ctx, solution_path);
    if (!sol.complete()) {
        throw Error(ErrorKind::RestartStalled,
                    "simulate needs a solution on all of [0, x*]; this one covers (x1, x*] only");
    }
    const auto x0s = initial_points(ctx.cfg);
    VerifyOptions vo;
    vo.probes = ctx.cfg.simulate.probes;
    vo.switches = ctx.cfg.simulate.switches;
    vo.seed = ctx.cfg.simulate.seed;
    vo.jobs = ctx.jobs;
    const VerifyReport rep = verify_equilibrium(sol, x0s, vo);

    SimOptions so;
    so.steady_levels = sol.touch_points();
    const Policy pol = equilibrium_policy(sol);
    for (std::size_t i = 0; i < x0s.size(); ++i) {
        std::ostringstream name;
        name << "trajectory_" << std::setw(3) << std::setfill('0') << i << ".csv";
        auto f = open_out(ctx.out / name.str());
        stamp_csv(f, ctx);
        CsvWriter(f).comment("x0", fmt(x0s[i]));
        write_trajectory_csv(f, simulate(sol.hamiltonian(), pol, x0s[i], so));
    }

    const double tol = ctx.cfg.simulate.residual_tol;
    std::ostringstream s;
    s << "version: " << kVersion << '\n' << "config_hash: " << ctx.hash << '\n';
    for (const auto& p : rep.points) {
        s << "x0=" << fmt(p.x0) << ": ";
        if (p.end == EndReason::Bankrupt) {
            s << "bankruptcy at T_b=" << fmt(p.bankruptcy_time);
        } else if (p.end == EndReason::Steady && p.steady_index >= 0) {
            s << "steady state at x_" << p.steady_index + 1 << "="
              << fmt(sol.touch_points()[static_cast<std::size_t>(p.steady_index)]);
        } else if (p.end == EndReason::Steady) {
            s << "steady state at 0";
        } else {
            s << to_string(p.end);
        }
        s << " residual_i=" << fmt(p.res_value) << " residual_ii=" << fmt(p.res_price) << '\n';
    }
    s << "max residual_i: " << fmt(rep.max_res_value) << '\n';
    s << "max residual_ii: " << fmt(rep.max_res_price) << '\n';
    s << "probes: " << rep.probes.size() << ", worst J - V: " << fmt(rep.worst_probe_gap) << '\n';
    const bool pass = rep.max_res_value <= tol && rep.max_res_price <= tol;
    s << "residual threshold " << fmt(tol) << ": " << (pass ? "pass" : "FAIL") << '\n';

    json j = verify_report_to_json(rep);
    j["residual_tol"] = tol;
    j["pass"] = pass;
    write_json(ctx.out / "verification.json", stamped(ctx, j));
    auto f = open_out(ctx.out / "report.txt");
    f << s.str();
    ctx.log << s.str();
    if (!pass) {
        throw Error(ErrorKind::VerificationFailed, "verification residual above " + fmt(tol));
    }
    return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

json sweep_checks(const SweepResult& r) {
    json checks = json::array();
    std::map<double, std::vector<const SweepPoint*>> by_probe;
    for (const auto& p : r.points) by_probe[p.x].push_back(&p);
    for (const auto& [x, pts] : by_probe) {
        bool decreasing = pts.size() >= 2;
        bool liminf_ok = true, e1_ok = true, e2_ok = true, zero = true;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const SweepPoint& p = *pts[i];
            if (i > 0) decreasing = decreasing && p.value < pts[i - 1]->value;
            if (std::isfinite(p.bound_liminf)) liminf_ok = liminf_ok && p.value >= p.bound_liminf - 1e-3;
            e1_ok = e1_ok && p.value <= p.bound_e1;
            if (std::isfinite(p.bound_e2)) e2_ok = e2_ok && p.value <= p.bound_e2;
            zero = zero && p.u == 0.0 && p.v == 0.0;
        }
        json c = {{"x", x}, {"levels", pts.size()}, {"controls_zero", zero}};
        if (r.regime == Regime::Bounded) {
            c["liminf_bound_holds"] = liminf_ok && x >= r.thr.bounded_level;
            c["above_M"] = x >= r.thr.bounded_level;
        } else {
            c["decreasing"] = decreasing;
            c["e1_holds"] = e1_ok;
            c["e2_holds"] = e2_ok;
        }
        checks.push_back(c);
    }
    return checks;
}

int run_sweep(const Context& ctx) {
    SweepOptions so;
    so.grid = ctx.cfg.sweep.grid();
    so.probes = ctx.cfg.sweep.probes;
    so.build = ctx.cfg.build;
    so.jobs = ctx.jobs;
    if (so.grid.empty()) {
        ctx.log << "warning: sweep grid is empty, nothing to do\n";
        return kExitOk;
    }
    const SweepResult r = sweep(ctx.cfg.model, ctx.cfg.costs.make(), so);
    {
        auto f = open_out(ctx.out / "sweep.csv");
        stamp_csv(f, ctx);
        write_sweep_csv(f, r);
    }
    json j = sweep_to_json(r);
    j["checks"] = sweep_checks(r);
    write_json(ctx.out / "sweep.json", stamped(ctx, j));
    ctx.log << "regime: " << to_string(r.regime) << '\n';
    for (const auto& l : r.levels) {
        ctx.log << "x_star=" << fmt(l.x_bankrupt) << (l.built ? " built" : " failed")
                << (l.note.empty() ? "" : " (" + l.note + ")") << '\n';
    }
    return kExitOk;
}

// ---- validate-costs -------------------------------------------------------

int run_validate(const Context& ctx) {
    const CostModel c = ctx.cfg.costs.make();
    const ValidationReport rep = validate(c);
    const json j = {{"family", c.family()},
         {"l0", ctx.cfg.costs.l0},
         {"c1", ctx.cfg.costs.c1},
         {"delta0", ctx.cfg.costs.delta0},
         {"ok", rep.ok},
         {"violations", rep.violations}};
    write_json(ctx.out / "cost_validation.json", stamped(ctx, j));
    ctx.log << (rep.ok ? "costs valid\n" : "costs invalid\n");
    for (const auto& v : rep.violations) ctx.log << "  " << v << '\n';
    if (!rep.ok) throw Error(ErrorKind::HypothesisViolated, "cost assumptions violated");
    return kExitOk;
}

void write_error(const fs::path& out, const std::string& kind, const std::string& msg, int code) {
    std::error_code ec;
    fs::create_directories(out, ec);
    std::ofstream f(out / "error.json", std::ios::binary);
    if (!f) return;
    const json j = {{"error", kind}, {"message", msg}, {"exit_code", code}, {"version", kVersion}};
    f << j.dump(2) << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Equilibrium debt management solver", "hjdebt"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", solution_path;
    std::vector<double> x0;
    int jobs = 1;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    };
    auto* solve = app.add_subcommand("solve", "build the equilibrium and write curves");
    auto* simulate_cmd = app.add_subcommand("simulate", "verify the equilibrium by simulation");
    auto* sweep_cmd = app.add_subcommand("sweep", "large-threshold asymptotics over an x* grid");
    auto* validate_cmd = app.add_subcommand("validate-costs", "check the cost assumptions");
    for (auto* s : {solve, simulate_cmd, sweep_cmd, validate_cmd}) common(s);
    simulate_cmd->add_option("--x0", x0, "initial debt ratios, comma separated")->delimiter(',');
    simulate_cmd->add_option("--solution", solution_path, "solution.json from a prior solve");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    const fs::path out_path(out_dir);
    try {
        RunConfig cfg = load_config(config_path);
        if (!x0.empty()) {
            cfg.simulate.x0 = x0;
            cfg.check();
        }
        std::error_code ec;
        fs::create_directories(out_path, ec);
        if (ec) throw Error(ErrorKind::Config, "cannot create output directory '" + out_dir + "'");
        fs::remove(out_path / "error.json", ec);
        Context ctx{cfg, cfg.hash(), out_path, jobs, out};
        if (*solve) return run_solve(ctx);
        if (*simulate_cmd) return run_simulate(ctx, solution_path);
        if (*sweep_cmd) return run_sweep(ctx);
        return run_validate(ctx);
    } catch (const Error& e) {
        const int code = exit_code(e.kind());
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        write_error(out_path, to_string(e.kind()), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        write_error(out_path, "Internal", e.what(), kExitNumerical);
        return kExitNumerical;
    }
}

}  // namespace hjdebt
