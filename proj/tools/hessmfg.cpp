// hessmfg: solve / verify / envelope / explicit / probe driver.
//
// Exit codes: 0 success, 2 non-convergence or compute failure, 3 converged
// but verification failed, 64 configuration error, 65 malformed data file.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hessmfg/cli_config.hpp"
#include "hessmfg/energy.hpp"
#include "hessmfg/envelope.hpp"
#include "hessmfg/explicit1d.hpp"
#include "hessmfg/grid.hpp"
#include "hessmfg/io.hpp"
#include "hessmfg/mfg.hpp"
#include "hessmfg/operators.hpp"
#include "hessmfg/parallel.hpp"
#include "hessmfg/probe.hpp"
#include "hessmfg/solve.hpp"

namespace {

using namespace hessmfg;

struct Flags {
    std::string config;
    std::string out = ".";
    bool trace = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;  // 0 = unset
};

std::string out_path(const Flags& flags, const std::string& name) {
    namespace fs = std::filesystem;
    fs::create_directories(flags.out);
    return (fs::path(flags.out) / name).string();
}

std::string jbool(bool b) { return b ? "true" : "false"; }

void write_trace(const Flags& flags, const SolveResult& res) {
    if (!flags.trace) return;
    std::vector<std::vector<double>> rows;
    const std::size_t n = res.history_energy.size();
    for (std::size_t k = 0; k < n; ++k)
        rows.push_back({static_cast<double>(k), res.history_energy[k], res.history_grad[k],
                        res.history_step[k]});
    write_csv(out_path(flags, "solve_trace.csv"), {}, {"iter", "energy", "grad_sup", "step"},
              rows);
}

void write_pair_csv(const std::string& path, const MFGPair& pair) {
    const Grid& grid = pair.u.grid;
    const auto free = grid.free_nodes();
    std::vector<std::string> header =
        grid.d == 1 ? std::vector<std::string>{"x", "u", "m"}
                    : std::vector<std::string>{"x", "y", "u", "m"};
    std::vector<std::vector<double>> rows;
    rows.reserve(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) {
        const std::size_t f = free[k];
        if (grid.d == 1)
            rows.push_back({grid.x(f), pair.u.values[f], pair.m[k]});
        else
            rows.push_back({grid.x(f), grid.y(f), pair.u.values[f], pair.m[k]});
    }
    write_csv(path, {}, header, rows);
}

int cmd_solve(const RunConfig& cfg, const Flags& flags) {
    const Grid grid = grid_from_config(cfg, 0);
    const EnergySpec spec = energy_from_config(cfg);
    const std::vector<double> g = boundary_from_config(cfg, grid);
    const SolveOptions opts = solve_options_from_config(cfg, flags.trace);
    const double tol_hj = cfg.get_double("tol_hj", 1e-6);
    const double tol_fp = cfg.get_double("tol_fp", 1e-3);
    const std::uint64_t seed = cfg.get_u64("seed", 2024);

    const SolveResult res = solve(spec, g, grid, opts);
    write_trace(flags, res);
    save_solution(out_path(flags, "solution.json"), res.u);
    if (!res.converged) {
        std::cerr << "solve diagnostics: " << res.message << "\n";
        std::cout << "solve: not converged after " << res.iterations
                  << " iterations (grad=" << fmt17(res.grad_sup) << ")\n";
        return 2;
    }

    const MFGPair pair = assemble_density(res.u, spec);
    write_pair_csv(out_path(flags, "pair.csv"), pair);
    const VerificationReport report = verify_weak_solution(pair, spec.op, tol_hj, tol_fp, seed);
    write_text_file(out_path(flags, "verification.json"), report.to_json() + "\n");

    std::cout << "solve: converged iters=" << res.iterations << " energy=" << fmt17(res.energy)
              << " grad=" << fmt17(res.grad_sup)
              << " verification=" << (report.pass ? "PASS" : "FAIL") << "\n";
    return report.pass ? 0 : 3;
}

int cmd_verify(const RunConfig& cfg, const Flags& flags) {
    const GridFunction u = load_solution(cfg.require_string("solution"));
    if (cfg.has("d") && cfg.get_int("d", 1) != u.grid.d)
        throw ConfigError("key 'd' does not match the loaded solution");

    const auto free = u.grid.free_nodes();
    const std::vector<std::string> header =
        u.grid.d == 1 ? std::vector<std::string>{"x", "u", "m"}
                      : std::vector<std::string>{"x", "y", "u", "m"};
    const std::string pair_path = cfg.require_string("pair");
    const auto rows = read_csv(pair_path, header);
    if (rows.size() != free.size())
        throw FileFormatError("pair file '" + pair_path + "': " + std::to_string(rows.size()) +
                              " rows, expected " + std::to_string(free.size()));
    MFGPair pair;
    pair.u = u;
    pair.m.resize(rows.size());
    const std::size_t mcol = u.grid.d == 1 ? 2 : 3;
    for (std::size_t k = 0; k < rows.size(); ++k) pair.m[k] = rows[k][mcol];

    RunConfig with_d = cfg;
    with_d.set("d", std::to_string(u.grid.d));
    const EnergySpec spec = energy_from_config(with_d);
    pair.kind = spec.kind;
    pair.p = spec.p;

    const double tol_hj = cfg.get_double("tol_hj", 1e-6);
    const double tol_fp = cfg.get_double("tol_fp", 1e-3);
    const std::uint64_t seed = cfg.get_u64("seed", 2024);
    const VerificationReport report = verify_weak_solution(pair, spec.op, tol_hj, tol_fp, seed);
    write_text_file(out_path(flags, "verification.json"), report.to_json() + "\n");

    std::cout << "verify: hj=" << fmt17(report.hj_residual_sup)
              << " fp=" << fmt17(report.fp_residual_max) << " m_min=" << fmt17(report.m_min)
              << " result=" << (report.pass ? "PASS" : "FAIL") << "\n";
    return report.pass ? 0 : 3;
}

int cmd_envelope(const RunConfig& cfg, const Flags& flags) {
    if (cfg.get_int("d", 1) != 1) throw ConfigError("envelope: operator must be 1D (d=1)");
    const EnergySpec base = energy_from_config(cfg);
    const OperatorSpec& op = base.op;
    if (!cfg.has("z_min") || !cfg.has("z_max"))
        throw ConfigError("envelope: keys 'z_min' and 'z_max' are required");
    const double z_min = cfg.require_double("z_min");
    const double z_max = cfg.require_double("z_max");
    if (!(z_min < z_max)) throw ConfigError("envelope: need z_min < z_max");
    const int samples = cfg.get_int("samples", 4097);
    if (samples < 8) throw ConfigError("key 'samples': need at least 8");

    const EnvelopeTable table = convex_envelope_1d(op, z_min, z_max, samples);
    {
        std::vector<std::vector<double>> rows;
        rows.reserve(table.z.size());
        for (std::size_t k = 0; k < table.z.size(); ++k)
            rows.push_back({table.z[k], table.f[k], table.gamma[k],
                            static_cast<double>(table.contact[k])});
        write_csv(out_path(flags, "envelope.csv"), {}, {"z", "F", "Gamma", "contact"}, rows);
    }
    const CheckReport coer = envelope_coercivity_check(table, op.lambda, 1e-9);
    std::size_t contacts = 0;
    for (char c : table.contact) contacts += (c != 0);
    const bool identity = contacts == table.contact.size();

    // Relaxed minimization with the hull as integrand.
    const EnergySpec relaxed = relaxed_energy_spec(op, base.p, z_min, z_max, samples);
    const Grid grid = grid_from_config(cfg, 101);
    const std::vector<double> g = boundary_from_config(cfg, grid);
    const SolveOptions opts = solve_options_from_config(cfg, flags.trace);
    const SolveResult res = solve(relaxed, g, grid, opts);
    write_trace(flags, res);
    const long extensions = relaxed.op.range_extensions ? relaxed.op.range_extensions->load() : 0;

    std::ostringstream lam;
    std::string gap_list;
    lam << "null";
    if (cfg.has("laminate_z_bar")) {
        const double z_bar = cfg.require_double("laminate_z_bar");
        std::vector<int> cells = cfg.get_int_list("laminate_cells");
        if (cells.empty()) cells = {4, 8, 16, 32, 64};
        std::vector<std::vector<double>> rows;
        std::ostringstream jrows;
        double z1 = 0.0, z2 = 0.0, theta = 0.0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const LaminateResult r = build_minimizing_sequence(
                op, base.p, z_bar, cells[i], z_min, z_max, std::max(samples, 8193));
            z1 = r.z1;
            z2 = r.z2;
            theta = r.theta;
            rows.push_back({static_cast<double>(r.cells), static_cast<double>(r.grid_nodes),
                            r.energy, r.reference, r.gap});
            if (i) jrows << ", ";
            jrows << "{\"cells\": " << r.cells << ", \"grid_nodes\": " << r.grid_nodes
                  << ", \"energy\": " << fmt17(r.energy)
                  << ", \"reference\": " << fmt17(r.reference)
                  << ", \"gap\": " << fmt17(r.gap) << "}";
            if (!gap_list.empty()) gap_list += ",";
            gap_list += fmt17(r.gap);
        }
        write_csv(out_path(flags, "laminate.csv"), {},
                  {"cells", "grid_nodes", "energy", "reference", "gap"}, rows);
        lam.str("");
        lam << "{\"z_bar\": " << fmt17(z_bar) << ", \"z1\": " << fmt17(z1)
            << ", \"z2\": " << fmt17(z2) << ", \"theta\": " << fmt17(theta) << ", \"rows\": ["
            << jrows.str() << "]}";
    }

    std::ostringstream js;
    js << "{\n";
    js << "  \"operator\": \"" << op.name << "\",\n";
    js << "  \"z_min\": " << fmt17(z_min) << ",\n";
    js << "  \"z_max\": " << fmt17(z_max) << ",\n";
    js << "  \"samples\": " << samples << ",\n";
    js << "  \"hull_vertices\": " << table.hull.size() << ",\n";
    js << "  \"contact_count\": " << contacts << ",\n";
    js << "  \"identity_envelope\": " << jbool(identity) << ",\n";
    js << "  \"coercivity\": {\"pass\": " << jbool(coer.pass)
       << ", \"worst_violation\": " << fmt17(coer.worst_violation)
       << ", \"tol\": " << fmt17(coer.tol) << "},\n";
    js << "  \"relaxed_solve\": {\"converged\": " << jbool(res.converged)
       << ", \"iterations\": " << res.iterations << ", \"energy\": " << fmt17(res.energy)
       << ", \"grad_sup\": " << fmt17(res.grad_sup) << "},\n";
    js << "  \"range_extensions\": " << extensions << ",\n";
    js << "  \"laminate\": " << lam.str() << "\n";
    js << "}\n";
    write_text_file(out_path(flags, "relaxation.json"), js.str());

    if (!res.converged) {
        std::cerr << "envelope diagnostics: relaxed solve: " << res.message << "\n";
        std::cout << "envelope: relaxed solve not converged after " << res.iterations
                  << " iterations\n";
        return 2;
    }
    std::cout << "envelope: vertices=" << table.hull.size() << " contacts=" << contacts
              << (identity ? " identity_envelope" : "")
              << " coercivity=" << (coer.pass ? "PASS" : "FAIL")
              << " relaxed_energy=" << fmt17(res.energy) << " extensions=" << extensions
              << (gap_list.empty() ? "" : " gaps=" + gap_list) << "\n";
    return 0;
}

int cmd_explicit(const RunConfig& cfg, const Flags& flags) {
    ExplicitParams params;
    params.p = cfg.get_int("p", 2);
    params.A = cfg.get_double("A", 0.0);
    params.B = cfg.get_double("B", 0.0);
    params.C = cfg.get_double("C", 0.0);
    params.D = cfg.get_double("D", 0.0);
    if (params.p < 2) throw ConfigError("key 'p': must be >= 2");
    if (!params_admissible(params))
        throw ConfigError("explicit: parameters are inadmissible for p=" +
                          std::to_string(params.p) +
                          " (odd p needs B <= 0 and a positive density)");
    const int n = cfg.get_int("n", 401);
    if (n < 5) throw ConfigError("key 'n': need at least 5 nodes");

    const Grid grid = Grid::line(n);  // the family lives on (0,1)
    const GridFunction u = explicit_solution(params, grid);
    MFGPair pair;
    pair.u = u;
    pair.m = explicit_density(params, grid);
    pair.kind = EnergyKind::power;
    pair.p = params.p;

    std::vector<std::string> comments;
    if (params.p != 2)
        comments.push_back(
            "# density convention: m = (1 + u_xx^p)^((p-1)/p); the exponent 1/p variant "
            "disagrees for p != 2 and does not null the coupling residual");
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = grid.coord(i);
        rows.push_back({x, explicit_u(params, x), explicit_m(params, x)});
    }
    write_csv(out_path(flags, "explicit.csv"), comments, {"x", "u", "m"}, rows);
    save_solution(out_path(flags, "solution.json"), u);
    write_pair_csv(out_path(flags, "pair.csv"), pair);

    std::cout << "explicit: p=" << params.p << " energy=" << fmt17(explicit_energy(params))
              << " affine_reference=1 rows=" << n << "\n";
    return 0;
}

int cmd_probe(const RunConfig& cfg, const Flags& flags) {
    StudyConfig sc;
    sc.d = cfg.get_int("d", 2);
    sc.sizes = cfg.get_int_list("sizes");
    if (sc.sizes.size() < 3) throw ConfigError("key 'sizes': need at least 3 grid sizes");
    sc.spec = energy_from_config(cfg);
    sc.fraction = cfg.get_double("fraction", 0.5);
    sc.solve_options = solve_options_from_config(cfg, false);
    const RunConfig cfg_copy = cfg;
    sc.boundary = [cfg_copy](const Grid& g) { return boundary_from_config(cfg_copy, g); };

    const RefinementStudy study = refinement_study(sc);

    std::ostringstream csv;
    csv << "h,quantity,value,ratio\n";
    for (const auto& [name, vals] : study.quantity) {
        const auto& ratios = study.ratio.at(name);
        for (std::size_t k = 0; k < vals.size(); ++k) {
            csv << fmt17(study.h[k]) << "," << name << "," << fmt17(vals[k]) << ",";
            if (k > 0) csv << fmt17(ratios[k - 1]);
            csv << "\n";
        }
    }
    write_text_file(out_path(flags, "study.csv"), csv.str());

    std::ostringstream js;
    js << "{\n";
    js << "  \"q_exponent\": " << fmt17(study.q_exponent) << ",\n";
    js << "  \"r_exponent\": " << fmt17(study.r_exponent) << ",\n";
    js << "  \"h\": [";
    for (std::size_t k = 0; k < study.h.size(); ++k)
        js << (k ? ", " : "") << fmt17(study.h[k]);
    js << "],\n  \"quantities\": {\n";
    bool first = true;
    for (const auto& [name, vals] : study.quantity) {
        if (!first) js << ",\n";
        first = false;
        js << "    \"" << name << "\": {\"values\": [";
        for (std::size_t k = 0; k < vals.size(); ++k) js << (k ? ", " : "") << fmt17(vals[k]);
        js << "], \"ratios\": [";
        const auto& ratios = study.ratio.at(name);
        for (std::size_t k = 0; k < ratios.size(); ++k)
            js << (k ? ", " : "") << fmt17(ratios[k]);
        js << "], \"slope\": " << fmt17(study.slope.at(name)) << "}";
    }
    js << "\n  }\n}\n";
    write_text_file(out_path(flags, "study.json"), js.str());

    std::ostringstream hr;
    const auto& hrat = study.ratio.at("hess_lq_interior");
    for (std::size_t k = 0; k < hrat.size(); ++k) hr << (k ? "," : "") << fmt17(hrat[k]);
    std::cout << "probe: levels=" << study.h.size() << " q=" << fmt17(study.q_exponent)
              << " r=" << fmt17(study.r_exponent) << " hess_ratios=" << hr.str() << "\n";
    return 0;
}

int dispatch(const std::string& command, const Flags& flags) {
    RunConfig cfg = RunConfig::parse_file(flags.config);
    if (flags.seed_set) cfg.set("seed", std::to_string(flags.seed));
    cfg.restrict_keys(allowed_keys(command));

    if (command == "solve") return cmd_solve(cfg, flags);
    if (command == "verify") return cmd_verify(cfg, flags);
    if (command == "envelope") return cmd_envelope(cfg, flags);
    if (command == "explicit") return cmd_explicit(cfg, flags);
    if (command == "probe") return cmd_probe(cfg, flags);
    throw ConfigError("unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hessian-dependent energy minimization, coupled-pair verification, convex "
                 "envelopes, and refinement probes"};
    app.require_subcommand(1);

    Flags flags;
    const char* names[5] = {"solve", "verify", "envelope", "explicit", "probe"};
    const char* descs[5] = {"minimize an energy, assemble the density, verify the pair",
                            "re-verify a persisted solution/density pair",
                            "build a convex envelope, run the relaxed problem",
                            "emit the closed-form 1D family",
                            "run a refinement study"};
    for (int k = 0; k < 5; ++k) {
        CLI::App* sub = app.add_subcommand(names[k], descs[k]);
        sub->add_option("--config", flags.config, "key=value configuration file")->required();
        sub->add_option("--out", flags.out, "output directory (default: current)");
        sub->add_flag("--trace", flags.trace, "write per-iteration solver history");
        sub->add_option("--seed", flags.seed, "verification family seed");
        sub->add_option("--threads", flags.threads, "worker thread count");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    CLI::App* sub = app.get_subcommands().front();
    flags.seed_set = sub->count("--seed") > 0;
    int threads = flags.threads;
    if (sub->count("--threads") == 0) {
        threads = 0;
        if (const char* env = std::getenv("HESSMFG_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && *end == '\0' && v > 0) threads = static_cast<int>(v);
        }
    }
    if (threads > 0) set_threads(threads);

    try {
        return dispatch(sub->get_name(), flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 64;
    } catch (const FileFormatError& e) {
        std::cerr << "file error: " << e.what() << "\n";
        return 65;
    } catch (const OperatorDomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 64;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
