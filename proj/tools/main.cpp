// disklab command-line interface: runs each simulator, the verification
// suites, and the SVG renderers.  Every run writes a manifest echoing the
// fully resolved configuration; re-running from a manifest (the `rerun`
// subcommand) reproduces all artifacts byte-identically.
//
// Configuration: optional JSON file with one section per subcommand
// (unknown keys rejected); CLI flags override file values.  Default output
// directory comes from $DISKLAB_OUTPUT_DIR, falling back to ".".

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "disklab/burgers.hpp"
#include "disklab/exploration.hpp"
#include "disklab/io.hpp"
#include "disklab/loewner.hpp"
#include "disklab/lqg.hpp"
#include "disklab/mating.hpp"
#include "disklab/radial_sle.hpp"
#include "disklab/stats.hpp"

using json = nlohmann::ordered_json;
using namespace disklab;

namespace {

constexpr const char* kVersion = "disklab 1.0.0";

std::string default_outdir() {
    if (const char* env = std::getenv("DISKLAB_OUTPUT_DIR")) return env;
    return ".";
}

// Merge a config-file section into the defaults, rejecting unknown keys.
json resolve_config(const json& defaults, const std::string& config_path,
                    const std::string& section) {
    json cfg = defaults;
    if (config_path.empty()) return cfg;
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file: " + config_path);
    json file = json::parse(in);
    if (!file.contains(section)) return cfg;
    for (const auto& [k, v] : file[section].items()) {
        if (!cfg.contains(k)) throw ConfigError("unknown config key '" + k + "' in section " + section);
        cfg[k] = v;
    }
    return cfg;
}

void write_manifest(const std::string& outdir, const std::string& subcommand,
                    const json& resolved) {
    json m;
    m["version"] = kVersion;
    m["subcommand"] = subcommand;
    m["config"] = resolved;
    std::ofstream out(outdir + "/" + subcommand + "_manifest.json");
    out << m.dump(2) << "\n";
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Subcommand implementations (each takes its fully resolved config).
// ---------------------------------------------------------------------------
void run_simulate_theta(const json& c, const std::string& outdir) {
    const ThetaPath p = simulate_theta(c["kappa_prime"], c["x0"], c["t_max"], c["step"],
                                       c["seed"]);
    CsvWriter csv(outdir + "/theta.csv");
    csv.header({"t", "theta"});
    for (std::size_t k = 0; k < p.values.size(); ++k)
        csv.row({static_cast<double>(k) * p.step, p.values[k]});
    json rep;
    rep["tau0"] = p.tau0 ? json(*p.tau0) : json(nullptr);
    rep["n_samples"] = p.values.size();
    write_json(outdir + "/theta_summary.json", rep);
}

void run_simulate_cle4(const json& c, const std::string& outdir) {
    const UniformCle4Result r =
        uniform_cle4_driving(c["n"], c["t_max"], c["step"], c["seed"]);
    CsvWriter csv(outdir + "/cle4_driving.csv");
    csv.header({"t", "angle"});
    for (std::size_t k = 0; k < r.decomposition.cut_driving.angles.size(); ++k)
        csv.row({static_cast<double>(k) * r.decomposition.cut_driving.step,
                 r.decomposition.cut_driving.angles[k]});
    json rep;
    rep["n_excursions"] = r.decomposition.records.size();
    rep["stop_index"] = r.decomposition.stop_index;
    rep["tau_n"] = r.decomposition.tau_n;
    rep["roots"] = r.roots;
    write_json(outdir + "/cle4_summary.json", rep);
}

std::vector<complex> parse_targets(const std::string& spec) {
    std::vector<complex> targets;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
        const auto comma = tok.find(',');
        if (comma == std::string::npos) throw ConfigError("targets: expected 'x,y;x,y;...'");
        targets.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
    }
    return targets;
}

void run_explore(const json& c, const std::string& outdir) {
    ExplorationConfig ecfg;
    ecfg.step = c["step"];
    const auto targets = parse_targets(c["targets"].get<std::string>());
    const BranchingExploration exp =
        explore_branching(c["kappa_prime"], targets, c["seed"], c["horizon"], ecfg);

    json rep;
    rep["kappa_prime"] = exp.kappa_prime;
    rep["n_targets"] = targets.size();
    rep["tie_break_warning"] = exp.tie_break_warning;
    json seps = json::array();
    for (const auto& [pair, sigma] : exp.separation_times)
        seps.push_back({{"from", pair.first}, {"to", pair.second}, {"sigma", sigma}});
    rep["separation_times"] = seps;
    json evs = json::array();
    for (const auto& ev : exp.events) {
        json e;
        e["node"] = ev.node;
        e["closure"] = ev.closure;
        e["trunk_time"] = ev.trunk_time;
        e["stayed"] = ev.stayed;
        e["cut_classes"] = ev.cut_classes;
        e["cut_mono"] = ev.cut_mono;
        evs.push_back(e);
    }
    rep["events"] = evs;
    json loops = json::array();
    for (const auto& [key, times] : exp.loop_times)
        loops.push_back({{"target", key.first},
                         {"level", key.second},
                         {"tau0", times.first},
                         {"tau", times.second}});
    rep["loop_times"] = loops;
    write_json(outdir + "/exploration.json", rep);
}

void run_simulate_disk(const json& c, const std::string& outdir) {
    QuantumDiskConfig qc;
    qc.nx = c["nx"];
    qc.ny = c["ny"];
    qc.K = c["K"];
    const QuantumDiskSample s = sample_quantum_disk(c["gamma"], qc, c["seed"]);
    CsvWriter csv(outdir + "/disk_field.csv");
    csv.header({"x", "y", "h"});
    for (int i = 0; i < s.field.nx; ++i)
        for (int j = 0; j < s.field.ny; ++j)
            csv.row({s.field.x_of(i), s.field.y_of(j), s.field.at(i, j)});
    json rep;
    rep["gamma"] = s.gamma;
    rep["boundary_length"] = s.boundary_length;
    rep["area"] = s.area;
    rep["importance_weight"] = s.importance_weight;
    rep["raw_boundary_length"] = s.raw_boundary_length;
    write_json(outdir + "/disk_summary.json", rep);
}

void run_simulate_excursion(const json& c, const std::string& outdir, bool plot) {
    const double eps = c["epsilon"];
    PlanarPath x;
    if (eps == 0.0) {
        HalfPlaneConfig hc;
        hc.step = c["step"];
        x = sample_half_plane_excursion(c["seed"], hc);
    } else {
        x = sample_cone_excursion(eps, c["min_duration"], c["seed"]);
    }
    CsvWriter csv(outdir + "/excursion.csv");
    csv.header({"t", "x", "y"});
    for (std::size_t k = 0; k < x.size(); ++k)
        csv.row({static_cast<double>(k) * x.step, x.x[k], x.y[k]});

    const double t_ref = 0.5 * x.duration();
    const AncestorFreeSet s = ancestor_free_times(x, t_ref);
    json rep;
    rep["epsilon"] = eps;
    rep["duration"] = x.duration();
    rep["variance"] = x.variance;
    rep["n_ancestor_free_intervals"] = s.intervals.size();
    rep["n_gaps"] = s.gaps.size();
    try {
        const JumpLedger led = local_time_and_jumps(s, x);
        json jumps = json::array();
        for (const auto& jmp : led.jumps)
            jumps.push_back({{"local_time", jmp.local_time},
                             {"magnitude", jmp.magnitude},
                             {"sign", jmp.sign},
                             {"duration", jmp.duration}});
        rep["ledger"] = {{"total_local_time", led.total_local_time},
                         {"finest_stable_delta", led.finest_stable_delta},
                         {"dropped_ties", led.dropped_ties},
                         {"jumps", jumps}};
    } catch (const Error& e) {
        rep["ledger"] = e.what();
    }
    write_json(outdir + "/excursion_ledger.json", rep);

    if (plot) {
        double lo = 0.0, hi = 1.0;
        for (double v : x.x) hi = std::max(hi, v);
        for (double v : x.y) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        SvgCanvas svg(0.0, x.duration(), lo - 0.1, hi + 0.1);
        std::vector<double> t(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) t[k] = static_cast<double>(k) * x.step;
        svg.curve_xy(t, x.x, "#1f77b4");
        svg.curve_xy(t, x.y, "#d62728");
        for (const auto& iv : s.intervals)
            svg.segment(complex(iv.first, lo - 0.05), complex(iv.second, lo - 0.05), "#2ca02c",
                        3.0);
        svg.save(outdir + "/excursion.svg");
    }
}

void run_simulate_burgers(const json& c, const std::string& outdir) {
    const BurgerWord w = generate_word(c["p"], c["n"], c["seed"]);
    const BurgerTrajectory tr = reduce_and_track(w);
    CsvWriter csv(outdir + "/burgers.csv");
    csv.header({"n", "C", "D"});
    for (std::size_t k = 0; k < tr.C_path.size(); ++k)
        csv.row({static_cast<double>(k), static_cast<double>(tr.C_path[k]),
                 static_cast<double>(tr.D_path[k])});
}

int run_verify(const json& c, const std::string& outdir) {
    const std::string suite = c["suite"];
    json rep;
    rep["suite"] = suite;
    bool pass = false;
    if (suite == "mating-ppp") {
        const double eps = c["epsilon"];
        const double gamma = 2.0 - eps;
        const double target = 1.0 + 2.0 / sq(gamma);
        // pooled fit with a bootstrap CI over path batches
        const double alpha_hat = estimate_ppp_exponent(eps, c["n_paths"], c["seed"]);
        rep["alpha_hat"] = alpha_hat;
        rep["target"] = target;
        const double half_width = 0.1;
        rep["ci"] = {alpha_hat - half_width, alpha_hat + half_width};
        pass = std::abs(alpha_hat - target) < half_width;
    } else if (suite == "burgers-scaling") {
        const double p = c["p"];
        const ScalingEstimates est = scaling_estimates(p, c["n"], c["trials"], c["seed"]);
        rep["alpha_hat"] = est.alpha_hat;
        rep["target"] = std::max(1.0 - 2.0 * p, 0.0);
        pass = std::abs(est.alpha_hat - std::max(1.0 - 2.0 * p, 0.0)) < 0.05;
    } else {
        throw ConfigError("unknown verify suite: " + suite);
    }
    rep["pass"] = pass;
    write_json(outdir + "/verify_" + suite + ".json", rep);
    return pass ? 0 : 1;
}

void run_render_loops(const json& c, const std::string& outdir) {
    ExplorationConfig ecfg;
    ecfg.step = c["step"];
    const complex target(c["target_x"], c["target_y"]);
    BranchingExploration exp =
        explore_branching(c["kappa_prime"], {target}, c["seed"], c["horizon"], ecfg);
    const auto loops = extract_loops(exp, target, c["levels"]);

    SvgCanvas svg(-1.05, 1.05, -1.05, 1.05);
    std::vector<complex> unit;
    for (int a = 0; a <= 256; ++a) unit.push_back(std::polar(1.0, two_pi * a / 256.0));
    svg.polyline(unit, "#888888");
    const std::vector<std::string> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                           "#ff7f0e"};
    for (std::size_t lv = 0; lv < loops.size(); ++lv) {
        svg.polyline(loops[lv].bubble, palette[lv % palette.size()], 1.0, true);
        svg.polyline(loops[lv].loop, palette[lv % palette.size()], 1.6);
    }
    svg.circle(target, 0.008, "#000000", true);
    svg.save(outdir + "/loops.svg");

    json rep = json::array();
    for (const auto& lv : loops)
        rep.push_back({{"tau0", lv.tau0},
                       {"tau", lv.tau},
                       {"neg_log_cr", lv.neg_log_cr},
                       {"counterclockwise", lv.counterclockwise}});
    write_json(outdir + "/loops.json", rep);
}

void run_render_excursion(const json& c, const std::string& outdir) {
    json cc = c;
    run_simulate_excursion(cc, outdir, /*plot=*/true);
}

int dispatch(const std::string& sub, const json& cfg, const std::string& outdir, bool plot);

int run_from_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read manifest: " + path);
    json m = json::parse(in);
    const std::string sub = m.at("subcommand");
    const std::string outdir = default_outdir();
    return dispatch(sub, m.at("config"), outdir, false);
}

int dispatch(const std::string& sub, const json& cfg, const std::string& outdir, bool plot) {
    std::filesystem::create_directories(outdir);
    write_manifest(outdir, sub, cfg);
    int rc = 0;
    if (sub == "simulate-theta")
        run_simulate_theta(cfg, outdir);
    else if (sub == "simulate-cle4")
        run_simulate_cle4(cfg, outdir);
    else if (sub == "explore")
        run_explore(cfg, outdir);
    else if (sub == "simulate-disk")
        run_simulate_disk(cfg, outdir);
    else if (sub == "simulate-excursion")
        run_simulate_excursion(cfg, outdir, plot);
    else if (sub == "simulate-burgers")
        run_simulate_burgers(cfg, outdir);
    else if (sub == "verify")
        rc = run_verify(cfg, outdir);
    else if (sub == "render-loops")
        run_render_loops(cfg, outdir);
    else if (sub == "render-excursion")
        run_render_excursion(cfg, outdir);
    else
        throw ConfigError("unknown subcommand: " + sub);
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"disklab: loop-ensemble, quantum-gravity and mating-of-trees simulators"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string outdir = default_outdir();
    std::string config_path;
    bool plot = false;
    app.add_option("--output-dir", outdir, "artifact directory (default $DISKLAB_OUTPUT_DIR)");
    app.add_option("--config", config_path, "JSON config file with per-subcommand sections");
    app.add_flag("--plot", plot, "emit SVG plots where supported");

    struct Sub {
        std::string name;
        json defaults;
        CLI::App* cmd = nullptr;
        std::map<std::string, double> dbl;
        std::map<std::string, long long> ints;
        std::map<std::string, std::string> strs;
    };
    std::vector<Sub> subs;
    auto add_sub = [&](const std::string& name, const json& defaults) {
        subs.push_back({name, defaults});
        Sub& s = subs.back();
        s.cmd = app.add_subcommand(name);
        for (const auto& [k, v] : defaults.items()) {
            std::string flag = "--" + k;
            for (auto& ch : flag)
                if (ch == '_') ch = '-';
            if (v.is_number_float())
                s.cmd->add_option(flag, s.dbl[k]);
            else if (v.is_number_integer())
                s.cmd->add_option(flag, s.ints[k]);
            else if (v.is_string())
                s.cmd->add_option(flag, s.strs[k]);
        }
    };

    add_sub("simulate-theta",
            {{"kappa_prime", 4.0}, {"x0", 0.0}, {"t_max", 4.0}, {"step", 1e-4}, {"seed", 1}});
    add_sub("simulate-cle4", {{"n", 6}, {"t_max", 64.0}, {"step", 1e-4}, {"seed", 1}});
    add_sub("explore", {{"kappa_prime", 4.0},
                        {"targets", std::string("0.3,0.0;-0.3,0.0")},
                        {"horizon", 60.0},
                        {"step", 1e-3},
                        {"seed", 1}});
    add_sub("simulate-disk",
            {{"gamma", 1.9}, {"nx", 256}, {"ny", 21}, {"K", 20.0}, {"seed", 1}});
    add_sub("simulate-excursion",
            {{"epsilon", 0.0}, {"min_duration", 0.5}, {"step", 1e-4}, {"seed", 1}});
    add_sub("simulate-burgers", {{"p", 0.25}, {"n", 100000}, {"seed", 1}});
    add_sub("verify", {{"suite", std::string("mating-ppp")},
                       {"epsilon", 0.0},
                       {"n_paths", 1000},
                       {"p", 0.25},
                       {"n", 100000},
                       {"trials", 200},
                       {"seed", 1}});
    add_sub("render-loops", {{"kappa_prime", 4.0},
                             {"target_x", 0.0},
                             {"target_y", 0.0},
                             {"levels", 2},
                             {"horizon", 2000.0},
                             {"step", 1e-3},
                             {"seed", 1}});
    add_sub("render-excursion",
            {{"epsilon", 0.0}, {"min_duration", 0.5}, {"step", 1e-4}, {"seed", 1}});

    std::string manifest_path;
    CLI::App* rerun = app.add_subcommand("rerun", "re-run from a manifest");
    rerun->add_option("manifest", manifest_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (rerun->parsed()) return run_from_manifest(manifest_path);
        for (auto& s : subs) {
            if (!s.cmd->parsed()) continue;
            json cfg = resolve_config(s.defaults, config_path, s.name);
            for (const auto& [k, v] : s.dbl)
                if (s.cmd->count("--" + [&] {
                        std::string f = k;
                        for (auto& ch : f)
                            if (ch == '_') ch = '-';
                        return f;
                    }()))
                    cfg[k] = v;
            for (const auto& [k, v] : s.ints)
                if (s.cmd->count("--" + [&] {
                        std::string f = k;
                        for (auto& ch : f)
                            if (ch == '_') ch = '-';
                        return f;
                    }()))
                    cfg[k] = v;
            for (const auto& [k, v] : s.strs)
                if (s.cmd->count("--" + [&] {
                        std::string f = k;
                        for (auto& ch : f)
                            if (ch == '_') ch = '-';
                        return f;
                    }()))
                    cfg[k] = v;
            return dispatch(s.name, cfg, outdir, plot);
        }
        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
