#include "hjdebt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hjdebt/errors.hpp"
#include "hjdebt/io.hpp"

namespace hjdebt {

using nlohmann::json;

CostModel CostSpec::make() const {
    if (family != "reference") {
        throw Error(ErrorKind::Config, "costs.family: unknown family '" + family + "'");
    }
    return CostModel::reference(l0, c1, delta0);
}

std::vector<double> SweepSpec::grid() const {
    if (!x_star.empty()) return x_star;
    if (lo > 0.0 && hi >= lo) return geometric_grid(lo, hi, factor);
    return {};
}

namespace {

// Walks one JSON object, remembering which keys were read.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("", "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    void number(const std::string& key, double& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number()) fail(key, "expected a number");
        out = v.get<double>();
    }
    void integer(const std::string& key, int& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) fail(key, "expected an integer");
        out = v.get<int>();
    }
    void unsigned_integer(const std::string& key, unsigned long long& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number_unsigned()) fail(key, "expected a non-negative integer");
        out = v.get<unsigned long long>();
    }
    void boolean(const std::string& key, bool& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_boolean()) fail(key, "expected true or false");
        out = v.get<bool>();
    }
    void string(const std::string& key, std::string& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_string()) fail(key, "expected a string");
        out = v.get<std::string>();
    }
    void numbers(const std::string& key, std::vector<double>& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_array()) fail(key, "expected an array of numbers");
        out.clear();
        for (const auto& e : v) {
            if (!e.is_number()) fail(key, "expected an array of numbers");
            out.push_back(e.get<double>());
        }
    }
    std::optional<Section> child(const std::string& key) {
        if (!take(key)) return std::nullopt;
        return Section(j_.at(key), join(key));
    }

    /// Rejects keys nobody asked for.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) fail(it.key(), "unknown key");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw Error(ErrorKind::Config, "config key '" + join(key) + "': " + what);
    }

private:
    bool take(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }
    std::string join(const std::string& key) const {
        if (path_.empty()) return key;
        return key.empty() ? path_ : path_ + "." + key;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_salvage(Section& s, SalvageFunction& f) {
    std::string family = f.name();
    s.string("family", family);
    if (family == "constant") {
        f = SalvageFunction::constant(f.kind == SalvageFunction::Kind::Constant ? f.value : 0.5);
        s.number("value", f.value);
    } else if (family == "inverse") {
        f = SalvageFunction::inverse(1.0);
        s.number("R", f.R);
    } else if (family == "power") {
        f = SalvageFunction::power(1.0, 0.5);
        s.number("scale", f.scale);
        s.number("exponent", f.exponent);
    } else {
        s.fail("family", "unknown salvage family '" + family + "'");
    }
    s.finish();
}

json salvage_json(const SalvageFunction& f) {
    json j;
    j["family"] = f.name();
    switch (f.kind) {
        case SalvageFunction::Kind::Constant: j["value"] = f.value; break;
        case SalvageFunction::Kind::Inverse: j["R"] = f.R; break;
        case SalvageFunction::Kind::Power:
            j["scale"] = f.scale;
            j["exponent"] = f.exponent;
            break;
    }
    return j;
}

}  // namespace

void to_json(json& j, const RunConfig& c) {
    const auto& m = c.model;
    j = json::object();
    j["model"] = {{"discount", m.discount},
                  {"repayment", m.repayment},
                  {"growth", m.growth},
                  {"x_star", m.x_bankrupt},
                  {"bankruptcy_cost", m.bankruptcy_cost}};
    j["salvage"] = salvage_json(m.salvage);
    j["costs"] = {{"family", c.costs.family},
                  {"l0", c.costs.l0},
                  {"c1", c.costs.c1},
                  {"delta0", c.costs.delta0}};
    const auto& s = c.build.solver;
    j["solver"] = {{"rtol", s.rtol},         {"atol", s.atol},
                   {"h_min", s.h_min},       {"x_tiny", s.x_tiny},
                   {"tol_lim", s.tol_lim},   {"max_levels", s.max_levels},
                   {"top_arc_only", c.build.top_arc_only}};
    const auto& sim = c.simulate;
    j["simulate"] = {{"x0", sim.x0},
                     {"grid_points", sim.grid_points},
                     {"probes", sim.probes},
                     {"switches", sim.switches},
                     {"seed", sim.seed},
                     {"residual_tol", sim.residual_tol}};
    const auto& sw = c.sweep;
    j["sweep"] = {{"x_star", sw.x_star},
                  {"lo", sw.lo},
                  {"hi", sw.hi},
                  {"factor", sw.factor},
                  {"probes", sw.probes}};
    j["output"] = {{"samples", c.output.samples}};
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    Section root(j, "");
    if (auto s = root.child("model")) {
        s->number("discount", c.model.discount);
        s->number("repayment", c.model.repayment);
        s->number("growth", c.model.growth);
        s->number("x_star", c.model.x_bankrupt);
        s->number("bankruptcy_cost", c.model.bankruptcy_cost);
        s->finish();
    }
    if (auto s = root.child("salvage")) read_salvage(*s, c.model.salvage);
    if (auto s = root.child("costs")) {
        s->string("family", c.costs.family);
        s->number("l0", c.costs.l0);
        s->number("c1", c.costs.c1);
        s->number("delta0", c.costs.delta0);
        s->finish();
    }
    if (auto s = root.child("solver")) {
        auto& o = c.build.solver;
        s->number("rtol", o.rtol);
        s->number("atol", o.atol);
        s->number("h_min", o.h_min);
        s->number("x_tiny", o.x_tiny);
        s->number("tol_lim", o.tol_lim);
        s->integer("max_levels", o.max_levels);
        s->boolean("top_arc_only", c.build.top_arc_only);
        s->finish();
    }
    if (auto s = root.child("simulate")) {
        auto& o = c.simulate;
        s->numbers("x0", o.x0);
        s->integer("grid_points", o.grid_points);
        s->integer("probes", o.probes);
        s->integer("switches", o.switches);
        s->unsigned_integer("seed", o.seed);
        s->number("residual_tol", o.residual_tol);
        s->finish();
    }
    if (auto s = root.child("sweep")) {
        auto& o = c.sweep;
        s->numbers("x_star", o.x_star);
        s->number("lo", o.lo);
        s->number("hi", o.hi);
        s->number("factor", o.factor);
        s->numbers("probes", o.probes);
        s->finish();
    }
    if (auto s = root.child("output")) {
        s->integer("samples", c.output.samples);
        s->finish();
    }
    root.finish();
    c.check();
    return c;
}

void RunConfig::check() const {
    auto bad = [](const std::string& key, const std::string& what) {
        throw Error(ErrorKind::Config, "config key '" + key + "': " + what);
    };
    const auto& m = model;
    if (!(m.discount > m.growth)) bad("model.discount", "need discount > growth");
    if (!(m.growth >= 0.0)) bad("model.growth", "must be >= 0");
    if (!(m.repayment >= 0.0)) bad("model.repayment", "must be >= 0");
    if (!(m.x_bankrupt > 0.0)) bad("model.x_star", "must be > 0");
    if (!(m.bankruptcy_cost > 0.0)) bad("model.bankruptcy_cost", "must be > 0");
    const double th = m.salvage_at_threshold();
    if (!(th >= 0.0 && th <= 1.0)) bad("salvage", "theta(x_star) must lie in [0,1]");
    if (!(costs.l0 > 0.0)) bad("costs.l0", "must be > 0");
    if (!(costs.c1 > 0.0)) bad("costs.c1", "must be > 0");
    if (!(costs.delta0 > 0.0)) bad("costs.delta0", "must be > 0");
    if (costs.family != "reference") bad("costs.family", "unknown family '" + costs.family + "'");
    const auto& s = build.solver;
    for (auto [k, v] : {std::pair{"rtol", s.rtol}, {"atol", s.atol}, {"h_min", s.h_min},
                        {"x_tiny", s.x_tiny}, {"tol_lim", s.tol_lim}}) {
        if (!(v > 0.0)) bad(std::string("solver.") + k, "tolerance must be > 0");
    }
    if (s.max_levels < 1) bad("solver.max_levels", "must be >= 1");
    const auto& sim = simulate;
    if (sim.grid_points < 2 && sim.x0.empty()) bad("simulate.grid_points", "must be >= 2");
    if (sim.probes < 0) bad("simulate.probes", "must be >= 0");
    if (sim.switches < 0) bad("simulate.switches", "must be >= 0");
    if (!(sim.residual_tol > 0.0)) bad("simulate.residual_tol", "must be > 0");
    for (double x : sim.x0) {
        if (!(x >= 0.0 && x <= m.x_bankrupt)) bad("simulate.x0", "entries must lie in [0, x_star]");
    }
    if (!(sweep.factor > 1.0)) bad("sweep.factor", "must be > 1");
    if (output.samples < 2) bad("output.samples", "must be >= 2");
}

std::string RunConfig::hash() const {
    json j;
    to_json(j, *this);
    return fnv1a_hex(j.dump());
}

std::string RunConfig::solution_hash() const {
    json j;
    to_json(j, *this);
    const json key = {{"model", j["model"]}, {"salvage", j["salvage"]}, {"costs", j["costs"]},
                      {"solver", j["solver"]}};
    return fnv1a_hex(key.dump());
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorKind::Config, "config parse error at line " + std::to_string(line) +
                                           ", column " + std::to_string(col) + ": " + e.what());
    }
    return config_from_json(j);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    json ja, jb;
    to_json(ja, a);
    to_json(jb, b);
    return ja == jb;
}

}  // namespace hjdebt
