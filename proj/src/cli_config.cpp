#include "hessmfg/cli_config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hessmfg/io.hpp"
#include "hessmfg/operators.hpp"

namespace hessmfg {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

double parse_double(const std::string& key, const std::string& v) {
    if (v.empty()) throw ConfigError("key '" + key + "': empty numeric value");
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || errno == ERANGE)
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a number");
    return x;
}

long long parse_ll(const std::string& key, const std::string& v) {
    if (v.empty()) throw ConfigError("key '" + key + "': empty integer value");
    errno = 0;
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || errno == ERANGE)
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as an integer");
    return x;
}

}  // namespace

RunConfig RunConfig::parse_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (!valid_key(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": bad key '" + key +
                              "'");
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
            val = val.substr(1, val.size() - 2);
        else if (!val.empty() && (val.front() == '"' || val.back() == '"'))
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": unbalanced quotes in value");
        if (cfg.kv_.count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
        cfg.kv_[key] = val;
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

void RunConfig::restrict_keys(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : kv_)
        if (!allowed.count(k)) throw ConfigError("unknown config key '" + k + "'");
}

bool RunConfig::has(const std::string& key) const { return kv_.count(key) != 0; }

void RunConfig::set(const std::string& key, const std::string& value) { kv_[key] = value; }

std::string RunConfig::require_string(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required config key '" + key + "'");
    return it->second;
}

std::string RunConfig::get_string(const std::string& key, const std::string& def) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

double RunConfig::require_double(const std::string& key) const {
    return parse_double(key, require_string(key));
}

double RunConfig::get_double(const std::string& key, double def) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? def : parse_double(key, it->second);
}

int RunConfig::get_int(const std::string& key, int def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    const long long x = parse_ll(key, it->second);
    if (x < -2147483648LL || x > 2147483647LL)
        throw ConfigError("key '" + key + "': integer out of range");
    return static_cast<int>(x);
}

int RunConfig::require_int(const std::string& key) const {
    require_string(key);
    return get_int(key, 0);
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    const std::string& v = it->second;
    if (v.empty()) throw ConfigError("key '" + key + "': empty integer value");
    errno = 0;
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || errno == ERANGE || v[0] == '-')
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as an unsigned integer");
    return static_cast<std::uint64_t>(x);
}

bool RunConfig::get_bool(const std::string& key, bool def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a boolean");
}

std::vector<int> RunConfig::get_int_list(const std::string& key) const {
    const auto it = kv_.find(key);
    std::vector<int> out;
    if (it == kv_.end()) return out;
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) throw ConfigError("key '" + key + "': empty list entry");
        out.push_back(static_cast<int>(parse_ll(key, t)));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

const std::set<std::string>& allowed_keys(const std::string& command) {
    static const std::set<std::string> solver_keys = {
        "grad_tol", "max_iters", "memory", "initial_step",
        "armijo_c", "shrink",    "max_backtracks"};
    auto with = [](std::set<std::string> base, const std::set<std::string>& extra) {
        base.insert(extra.begin(), extra.end());
        return base;
    };
    static const std::set<std::string> solve_keys = with(
        solver_keys, {"op", "p", "d", "n", "kind", "box_lo", "box_hi", "bc", "bc_a", "bc_b",
                      "bc_c", "bc_file", "tol_hj", "tol_fp", "seed"});
    static const std::set<std::string> verify_keys = {
        "op", "p", "d", "kind", "solution", "pair", "tol_hj", "tol_fp", "seed"};
    static const std::set<std::string> envelope_keys = with(
        solver_keys, {"op", "p", "d", "kind", "z_min", "z_max", "samples", "n", "box_lo",
                      "box_hi", "bc", "bc_a", "bc_b", "bc_c", "bc_file", "laminate_z_bar",
                      "laminate_cells", "seed"});
    static const std::set<std::string> explicit_keys = {"p", "n", "A", "B", "C", "D", "seed"};
    static const std::set<std::string> probe_keys = with(
        solver_keys, {"op", "p", "d", "kind", "sizes", "box_lo", "box_hi", "bc", "bc_a",
                      "bc_b", "bc_c", "bc_file", "fraction", "seed"});

    if (command == "solve") return solve_keys;
    if (command == "verify") return verify_keys;
    if (command == "envelope") return envelope_keys;
    if (command == "explicit") return explicit_keys;
    if (command == "probe") return probe_keys;
    throw ConfigError("unknown command '" + command + "'");
}

Grid grid_from_config(const RunConfig& cfg, int default_n) {
    const int d = cfg.get_int("d", 1);
    if (d != 1 && d != 2) throw ConfigError("key 'd': must be 1 or 2");
    int n = default_n;
    if (cfg.has("n"))
        n = cfg.require_int("n");
    else if (default_n == 0)
        throw ConfigError("missing required config key 'n'");
    if (n < 5) throw ConfigError("key 'n': need at least 5 nodes per axis");
    const double def_lo = d == 1 ? 0.0 : -1.0;
    const double def_hi = 1.0;
    const double lo = cfg.get_double("box_lo", def_lo);
    const double hi = cfg.get_double("box_hi", def_hi);
    if (!(lo < hi)) throw ConfigError("keys 'box_lo'/'box_hi': empty box");
    return d == 1 ? Grid::line(n, lo, hi) : Grid::square(n, lo, hi);
}

EnergySpec energy_from_config(const RunConfig& cfg) {
    const std::string name = cfg.require_string("op");
    const int d = cfg.get_int("d", 1);
    const int p = cfg.get_int("p", 2);
    const std::string kind = cfg.get_string("kind", "power");

    EnergySpec spec;
    try {
        spec.op = make_operator(name, d, p);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("key 'op': ") + e.what());
    }
    spec.p = p;
    if (kind == "power") {
        spec.kind = EnergyKind::power;
        if (p < 2) throw ConfigError("key 'p': power energies need p >= 2");
    } else if (kind == "exponential") {
        spec.kind = EnergyKind::exponential;
    } else {
        throw ConfigError("key 'kind': must be 'power' or 'exponential'");
    }
    return spec;
}

std::vector<double> boundary_from_config(const RunConfig& cfg, const Grid& grid) {
    const std::string bc = cfg.get_string("bc", "affine");
    if (bc == "affine")
        return make_affine_data(grid, cfg.get_double("bc_a", 0.0), cfg.get_double("bc_b", 0.0),
                                cfg.get_double("bc_c", 0.0));
    if (bc == "quadratic") return make_quadratic_data(grid, cfg.get_double("bc_c", 1.0));
    if (bc == "table") {
        const std::string path = cfg.require_string("bc_file");
        const auto rows = read_csv(path, {"g"});
        if (rows.size() != grid.size())
            throw FileFormatError("boundary table '" + path + "': " +
                                  std::to_string(rows.size()) + " rows, expected " +
                                  std::to_string(grid.size()));
        std::vector<double> g(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) g[k] = rows[k][0];
        return g;
    }
    throw ConfigError("key 'bc': must be 'affine', 'quadratic', or 'table'");
}

SolveOptions solve_options_from_config(const RunConfig& cfg, bool record_history) {
    SolveOptions opts;
    opts.max_iters = cfg.get_int("max_iters", opts.max_iters);
    opts.grad_tol = cfg.get_double("grad_tol", opts.grad_tol);
    opts.initial_step = cfg.get_double("initial_step", opts.initial_step);
    opts.armijo_c = cfg.get_double("armijo_c", opts.armijo_c);
    opts.shrink = cfg.get_double("shrink", opts.shrink);
    opts.memory = cfg.get_int("memory", opts.memory);
    opts.max_backtracks = cfg.get_int("max_backtracks", opts.max_backtracks);
    opts.record_history = record_history;
    if (opts.max_iters < 1) throw ConfigError("key 'max_iters': must be >= 1");
    if (!(opts.grad_tol > 0.0)) throw ConfigError("key 'grad_tol': must be > 0");
    if (!(opts.initial_step > 0.0)) throw ConfigError("key 'initial_step': must be > 0");
    if (!(opts.armijo_c > 0.0 && opts.armijo_c < 1.0))
        throw ConfigError("key 'armijo_c': must lie in (0, 1)");
    if (!(opts.shrink > 0.0 && opts.shrink < 1.0))
        throw ConfigError("key 'shrink': must lie in (0, 1)");
    if (opts.memory < 1) throw ConfigError("key 'memory': must be >= 1");
    if (opts.max_backtracks < 1) throw ConfigError("key 'max_backtracks': must be >= 1");
    return opts;
}

}  // namespace hessmfg
