#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessmfg/energy.hpp"
#include "hessmfg/grid.hpp"
#include "hessmfg/solve.hpp"

namespace hessmfg {

// Bad configuration (syntax, unknown/missing keys, out-of-range values).
// Mapped to exit code 64 by the command-line tool; malformed data files
// (FileFormatError) map to 65 instead.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat key=value configuration. Lines: `key = value`, blank lines and
// comments starting with '#' or ';'. Values may be double-quoted (no escape
// processing). Duplicate keys are rejected; every command rejects keys
// outside its whitelist before any computation starts.
class RunConfig {
public:
    RunConfig() = default;

    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_text(const std::string& text);

    void restrict_keys(const std::set<std::string>& allowed) const;
    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);  // CLI flag folding

    std::string require_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& def) const;
    double require_double(const std::string& key) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    int require_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
    bool get_bool(const std::string& key, bool def) const;
    // Comma-separated integers; empty vector when the key is absent.
    std::vector<int> get_int_list(const std::string& key) const;

private:
    std::map<std::string, std::string> kv_;
};

// Whitelisted keys per subcommand ("solve", "verify", "envelope", "explicit",
// "probe"). Throws ConfigError for an unknown command.
const std::set<std::string>& allowed_keys(const std::string& command);

// Builders from validated keys to module inputs. All throw ConfigError on
// bad values. grid_from_config: `default_n` = 0 makes the `n` key required.
Grid grid_from_config(const RunConfig& cfg, int default_n);
EnergySpec energy_from_config(const RunConfig& cfg);
std::vector<double> boundary_from_config(const RunConfig& cfg, const Grid& grid);
SolveOptions solve_options_from_config(const RunConfig& cfg, bool record_history);

}  // namespace hessmfg
