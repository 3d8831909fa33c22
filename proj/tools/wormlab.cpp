// wormlab: experiment orchestration for the random-graph, density and
// modulus machinery. Subcommands: gen, density, intersect, modulus, probe,
// hoeffding. Every run writes a run_manifest.json listing output digests.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wormlab/densitylab.hpp"
#include "wormlab/modulus.hpp"
#include "wormlab/parallel.hpp"
#include "wormlab/serialize.hpp"
#include "wormlab/svg.hpp"
#include "wormlab/wormgraphs.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wormlab;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitIo = 4;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct RunContext {
    fs::path out_dir;
    json config;
    json constants = json::object();
    std::vector<std::pair<std::string, std::string>> outputs;  // (name, digest)
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void write_file(const std::string& name, const std::string& bytes) {
        const fs::path path = out_dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + path.string());
        out << bytes;
        out.close();
        if (!out) throw IoError("write failed: " + path.string());
        outputs.emplace_back(name, fnv1a64(bytes));
    }

    void emit_manifest(const std::string& command) {
        const auto wall =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        json files = json::array();
        for (const auto& [name, digest] : outputs) {
            files.push_back({{"path", name}, {"fnv1a64", digest}});
        }
        const json manifest = {{"command", command},
                               {"version", kVersion},
                               {"config", config},
                               {"constants", constants},
                               {"wall_ms", wall.count()},
                               {"outputs", files}};
        const fs::path path = out_dir / "run_manifest.json";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + path.string());
        out << manifest.dump(2) << "\n";
    }
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    return j;
}

void reject_unknown_keys(const json& config, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : config.items()) {
        (void)value;
        if (!allowed.count(key)) throw ValidationError("unknown config key: " + key);
    }
}

template <typename T>
T config_get(const json& config, const std::string& key, T fallback) {
    if (!config.contains(key)) return fallback;
    try {
        return config.at(key).get<T>();
    } catch (const std::exception&) {
        throw ValidationError("config key has wrong type: " + key);
    }
}

geometry::SquareUnion parse_e_spec(const json& spec) {
    geometry::SquareUnion e;
    if (!spec.is_array()) throw ValidationError("E must be a list of {x, y, side} squares");
    for (const auto& sq : spec) {
        if (!sq.is_object() || !sq.contains("x") || !sq.contains("y") || !sq.contains("side")) {
            throw ValidationError("E entries must be {x, y, side} objects");
        }
        for (const auto& [key, value] : sq.items()) {
            (void)value;
            if (key != "x" && key != "y" && key != "side") {
                throw ValidationError("unknown key in E entry: " + key);
            }
        }
        const double side = sq.at("side").get<double>();
        if (!(side > 0.0)) throw ValidationError("E square side must be positive");
        e.squares.push_back({{sq.at("x").get<double>(), sq.at("y").get<double>()}, side});
    }
    return e;
}

// ---------------------------------------------------------------- gen

int cmd_gen(RunContext& ctx) {
    reject_unknown_keys(ctx.config, {"seed", "depth", "count", "threads", "out_dir"});
    const auto seed = config_get<std::uint64_t>(ctx.config, "seed", 1);
    const int depth = config_get<int>(ctx.config, "depth", 12);
    const int count = config_get<int>(ctx.config, "count", 1);
    if (depth < 0 || depth > 24) throw ValidationError("depth must be in [0, 24]");
    if (count < 1 || count > 10000) throw ValidationError("count must be in [1, 10000]");
    ctx.config["seed"] = seed;
    ctx.config["depth"] = depth;
    ctx.config["count"] = count;

    for (int i = 0; i < count; ++i) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
        const auto w = graphs::sample_omega(depth, s);
        ctx.write_file("omega_" + std::to_string(s) + ".json",
                       serialize::omega_to_json(w).dump(2) + "\n");
        ctx.write_file("generation_" + std::to_string(s) + "_k" + std::to_string(depth) + ".svg",
                       svg::generation_svg(w.gens.back()));
    }
    return kExitOk;
}

// ------------------------------------------------------------- density

int cmd_density(RunContext& ctx) {
    reject_unknown_keys(ctx.config,
                        {"epsilon", "kappa", "K", "delta", "trials", "seed", "E", "threads", "out_dir"});
    const double epsilon = config_get<double>(ctx.config, "epsilon", 0.000244140625);  // 2^-12
    const double kappa = config_get<double>(ctx.config, "kappa", 1.0 / 12.0);
    const auto params = density::make_params(epsilon, kappa);
    const int K = config_get<int>(ctx.config, "K", params.k_eps + 3);
    const double delta = config_get<double>(ctx.config, "delta", 0.5);
    const int trials = config_get<int>(ctx.config, "trials", 200);
    const auto seed = config_get<std::uint64_t>(ctx.config, "seed", 1);
    const int threads = config_get<int>(ctx.config, "threads", default_threads());
    if (!ctx.config.contains("E")) throw ValidationError("density requires an E-spec");
    const auto e = parse_e_spec(ctx.config.at("E"));
    if (K < 0 || K > 24) throw ValidationError("K must be in [0, 24]");
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if (!(delta > 0.0) || delta > 1.0) throw ValidationError("delta must be in (0, 1]");
    if (!(e.area() <= epsilon * (1.0 + 1e-12))) throw ValidationError("E-spec area exceeds epsilon");

    const auto rep = density::density_tail_experiment(e, params, K, delta, trials, seed, threads);
    ctx.constants["c_net"] = rep.details.at("net_c_measured");
    ctx.write_file("density_report.json", serialize::tail_report_to_json(rep).dump(2) + "\n");
    ctx.write_file("density_report.csv", serialize::tail_report_to_csv(rep));
    return kExitOk;
}

// ------------------------------------------------------------ intersect

int cmd_intersect(RunContext& ctx) {
    reject_unknown_keys(ctx.config,
                        {"epsilon", "kappa", "K", "delta", "trials", "seed", "E", "threads", "out_dir"});
    const double epsilon = config_get<double>(ctx.config, "epsilon", 0.000244140625);
    const double kappa = config_get<double>(ctx.config, "kappa", 1.0 / 12.0);
    const auto params = density::make_params(epsilon, kappa);
    const int K = config_get<int>(ctx.config, "K", params.k_eps + 3);
    const double delta = config_get<double>(ctx.config, "delta", 0.5);
    const int trials = config_get<int>(ctx.config, "trials", 200);
    const auto seed = config_get<std::uint64_t>(ctx.config, "seed", 1);
    const int threads = config_get<int>(ctx.config, "threads", default_threads());
    if (!ctx.config.contains("E")) throw ValidationError("intersect requires an E-spec");
    const auto e = parse_e_spec(ctx.config.at("E"));
    if (K < 0 || K > 24) throw ValidationError("K must be in [0, 24]");
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if (!(delta > 0.0) || delta > 1.0) throw ValidationError("delta must be in (0, 1]");
    if (!(e.area() < epsilon)) throw ValidationError("E-spec area must be < epsilon");

    const auto rep = density::intersection_tail_experiment(e, params, K, delta, trials, seed, threads);
    ctx.constants["c_net"] = rep.details.at("net_c_measured");
    ctx.write_file("intersect_report.json", serialize::tail_report_to_json(rep).dump(2) + "\n");
    ctx.write_file("intersect_report.csv", serialize::tail_report_to_csv(rep));
    return kExitOk;
}

// -------------------------------------------------------------- modulus

int cmd_modulus(RunContext& ctx) {
    reject_unknown_keys(ctx.config, {"instance", "grids", "tol", "threads", "out_dir"});
    if (!ctx.config.contains("instance")) throw ValidationError("modulus requires an instance file");
    const std::string instance_path = ctx.config.at("instance").get<std::string>();
    std::ifstream in(instance_path);
    if (!in) throw IoError("cannot read instance: " + instance_path);
    json jinst;
    try {
        in >> jinst;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("instance parse error: ") + e.what());
    }
    modulus::CurveFamily fam;
    modulus::Grid grid;
    double p = 2.0, tol = 1e-3;
    try {
        serialize::modulus_instance_from_json(jinst, fam, grid, p, tol);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("bad instance: ") + e.what());
    }
    tol = config_get<double>(ctx.config, "tol", tol);
    if (fam.curves.empty()) throw ValidationError("instance has an empty curve list");
    if (grid.n < 2 || grid.n > 4096) throw ValidationError("grid must be in [2, 4096]");
    if (!(p > 1.0)) throw ValidationError("p must be > 1");
    if (!(tol > 0.0)) throw ValidationError("tol must be > 0");

    const auto res = modulus::solve_modulus(fam, grid, p, tol);
    json jres = serialize::modulus_result_to_json(res, p);
    if (ctx.config.contains("grids")) {
        // refinement trend over additional resolutions
        json trend = json::array();
        trend.push_back({{"grid", grid.n}, {"value", res.value}, {"dual_bound", res.dual_bound}});
        for (const auto& jn : ctx.config.at("grids")) {
            const int n2 = jn.get<int>();
            if (n2 < 2 || n2 > 4096) throw ValidationError("grids entries must be in [2, 4096]");
            if (n2 == grid.n) continue;
            const auto r2 = modulus::solve_modulus(fam, modulus::Grid{n2}, p, tol);
            trend.push_back({{"grid", n2}, {"value", r2.value}, {"dual_bound", r2.dual_bound}});
        }
        jres["trend"] = trend;
    }
    ctx.write_file("modulus_result.json", jres.dump(2) + "\n");
    ctx.write_file("modulus_trace.csv", serialize::modulus_trace_to_csv(res));
    ctx.write_file("modulus_density.svg", svg::density_heatmap_svg(res.density, &fam));
    if (!res.converged) {
        std::cerr << "modulus: not converged; best primal " << res.value << ", dual "
                  << res.dual_bound << "\n";
        return kExitNonConvergence;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- probe

int cmd_probe(RunContext& ctx) {
    reject_unknown_keys(ctx.config,
                        {"p", "graph_count", "depth", "grid", "seed", "iso_mode", "tol", "threads", "out_dir"});
    const double p = config_get<double>(ctx.config, "p", 4.0);
    const int graph_count = config_get<int>(ctx.config, "graph_count", 64);
    const int depth = config_get<int>(ctx.config, "depth", 6);
    const int grid_n = config_get<int>(ctx.config, "grid", 256);
    const auto seed = config_get<std::uint64_t>(ctx.config, "seed", 1);
    const std::string iso_str = config_get<std::string>(ctx.config, "iso_mode", "identity");
    const double tol = config_get<double>(ctx.config, "tol", 1e-3);
    if (!(p > 1.0)) throw ValidationError("p must be > 1");
    if (graph_count < 1 || graph_count > 4096) throw ValidationError("graph_count must be in [1, 4096]");
    if (depth < 0 || depth > 24) throw ValidationError("depth must be in [0, 24]");
    if (grid_n < 2 || grid_n > 2048) throw ValidationError("grid must be in [2, 2048]");
    modulus::IsoMode mode;
    if (iso_str == "identity") {
        mode = modulus::IsoMode::identity;
    } else if (iso_str == "random") {
        mode = modulus::IsoMode::random;
    } else if (iso_str == "net") {
        mode = modulus::IsoMode::net;
    } else {
        throw ValidationError("iso_mode must be identity|random|net");
    }

    const auto rep =
        modulus::moser_probe(p, graph_count, depth, modulus::Grid{grid_n}, seed, mode, tol);
    json jrep = {{"schema", "wormlab.probe-report/1"},
                 {"details", rep.details},
                 {"refinement_change", rep.refinement_change},
                 {"cell_width_corrected_at_N", rep.normalized_coarse},
                 {"cell_width_corrected_at_2N", rep.normalized_fine},
                 {"outside_theorem_range", rep.outside_theorem_range},
                 {"coarse", serialize::modulus_result_to_json(rep.coarse, p)},
                 {"fine_value", rep.fine.value},
                 {"fine_dual_bound", rep.fine.dual_bound},
                 {"fine_converged", rep.fine.converged}};
    ctx.write_file("probe_report.json", jrep.dump(2) + "\n");
    modulus::CurveFamily fam = modulus::probe_family(graph_count, depth, seed, mode);
    ctx.write_file("probe_density.svg", svg::density_heatmap_svg(rep.coarse.density, &fam));
    if (!rep.coarse.converged || !rep.fine.converged) {
        std::cerr << "probe: solver did not converge\n";
        return kExitNonConvergence;
    }
    return kExitOk;
}

// ------------------------------------------------------------ hoeffding

int cmd_hoeffding(RunContext& ctx) {
    reject_unknown_keys(ctx.config, {"n", "t_values", "width", "threads", "out_dir"});
    const int n = config_get<int>(ctx.config, "n", 100);
    const double width = config_get<double>(ctx.config, "width", 1.0);
    std::vector<double> ts = config_get<std::vector<double>>(ctx.config, "t_values",
                                                             {0.05, 0.1, 0.2, 0.5});
    if (n < 1) throw ValidationError("n must be >= 1");
    if (!(width >= 0.0)) throw ValidationError("width must be >= 0");
    for (double t : ts) {
        if (!(t > 0.0)) throw ValidationError("t_values must be positive");
    }

    const std::vector<std::pair<double, double>> ranges(static_cast<std::size_t>(n), {0.0, width});
    std::string csv = "n,width,t,bound\n";
    json rows = json::array();
    for (double t : ts) {
        const double b = density::hoeffding_bound(t, ranges);
        csv += std::to_string(n) + "," + std::to_string(width) + "," + std::to_string(t) + "," +
               std::to_string(b) + "\n";
        rows.push_back({{"n", n}, {"width", width}, {"t", t}, {"bound", b}});
    }
    ctx.write_file("hoeffding_table.csv", csv);
    ctx.write_file("hoeffding_table.json",
                   json{{"schema", "wormlab.hoeffding-table/1"}, {"rows", rows}}.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random Lipschitz graphs, density experiments and discrete p-modulus"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    app.add_option("--config", config_path, "JSON config file")->capture_default_str();
    app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();

    // flag overrides; flags win over the config file
    std::optional<std::uint64_t> seed;
    std::optional<int> depth, count, trials, grid_n, graph_count, threads, k_max, n_samples;
    std::optional<double> epsilon, kappa, delta, p, tol;
    std::optional<std::string> iso_mode, instance;
    app.add_option("--seed", seed, "base RNG seed");
    app.add_option("--depth", depth, "construction depth K");
    app.add_option("--count", count, "number of samples (gen)");
    app.add_option("--epsilon", epsilon, "target set area bound");
    app.add_option("--kappa", kappa, "exponent offset");
    app.add_option("--delta", delta, "isometry net resolution");
    app.add_option("--trials", trials, "experiment trials");
    app.add_option("--K", k_max, "experiment depth truncation");
    app.add_option("--grid", grid_n, "grid resolution N");
    app.add_option("--p", p, "modulus exponent");
    app.add_option("--tol", tol, "solver tolerance");
    app.add_option("--iso-mode", iso_mode, "identity|random|net");
    app.add_option("--graph-count", graph_count, "probe family size");
    app.add_option("--instance", instance, "modulus instance file");
    app.add_option("--threads", threads, "worker threads");
    app.add_option("--n", n_samples, "hoeffding sample count");

    auto* sub_gen = app.add_subcommand("gen", "sample graphs, write JSON + SVG");
    auto* sub_density = app.add_subcommand("density", "density tail experiment");
    auto* sub_intersect = app.add_subcommand("intersect", "intersection tail experiment");
    auto* sub_modulus = app.add_subcommand("modulus", "solve a modulus instance");
    auto* sub_probe = app.add_subcommand("probe", "Moser-family modulus probe");
    auto* sub_hoeffding = app.add_subcommand("hoeffding", "Hoeffding bound tables");
    for (auto* sub : {sub_gen, sub_density, sub_intersect, sub_modulus, sub_probe, sub_hoeffding}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        RunContext ctx;
        ctx.config = load_config(config_path);
        // flags win
        if (seed) ctx.config["seed"] = *seed;
        if (depth) ctx.config["depth"] = *depth;
        if (count) ctx.config["count"] = *count;
        if (epsilon) ctx.config["epsilon"] = *epsilon;
        if (kappa) ctx.config["kappa"] = *kappa;
        if (delta) ctx.config["delta"] = *delta;
        if (trials) ctx.config["trials"] = *trials;
        if (k_max) ctx.config["K"] = *k_max;
        if (grid_n) ctx.config["grid"] = *grid_n;
        if (p) ctx.config["p"] = *p;
        if (tol) ctx.config["tol"] = *tol;
        if (iso_mode) ctx.config["iso_mode"] = *iso_mode;
        if (graph_count) ctx.config["graph_count"] = *graph_count;
        if (instance) ctx.config["instance"] = *instance;
        if (threads) ctx.config["threads"] = *threads;
        if (n_samples) ctx.config["n"] = *n_samples;
        if (ctx.config.contains("out_dir") && !ctx.config.at("out_dir").is_string()) {
            throw ValidationError("out_dir must be a string");
        }
        if (ctx.config.contains("out_dir")) out_dir = ctx.config.at("out_dir").get<std::string>();
        ctx.config["out_dir"] = out_dir;
        ctx.out_dir = out_dir;
        if (ctx.config.contains("threads")) {
            const int n = config_get<int>(ctx.config, "threads", 0);
            if (n < 1 || n > 1024) throw ValidationError("threads must be in [1, 1024]");
            set_worker_threads(n);
        }
        std::error_code ec;
        fs::create_directories(ctx.out_dir, ec);
        if (ec) throw IoError("cannot create out dir: " + out_dir);

        int rc = kExitOk;
        std::string name;
        if (sub_gen->parsed()) {
            name = "gen";
            rc = cmd_gen(ctx);
        } else if (sub_density->parsed()) {
            name = "density";
            rc = cmd_density(ctx);
        } else if (sub_intersect->parsed()) {
            name = "intersect";
            rc = cmd_intersect(ctx);
        } else if (sub_modulus->parsed()) {
            name = "modulus";
            rc = cmd_modulus(ctx);
        } else if (sub_probe->parsed()) {
            name = "probe";
            rc = cmd_probe(ctx);
        } else if (sub_hoeffding->parsed()) {
            name = "hoeffding";
            rc = cmd_hoeffding(ctx);
        }
        ctx.emit_manifest(name);
        return rc;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
