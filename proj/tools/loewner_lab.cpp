// loewner_lab: command-line front end. Each subcommand takes flags or `run config.json`
// ({"command", "params", "output_dir", "seed"}) and writes result.json, manifest.json and
// its tables/figures to the output directory.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "loewner_lab/io.hpp"
#include "loewner_lab/mc_sle.hpp"
#include "loewner_lab/potential.hpp"
#include "loewner_lab/rational.hpp"
#include "loewner_lab/spectral.hpp"

namespace fs = std::filesystem;
using namespace llab;
using nlohmann::json;
using multichord::LinkPattern;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Ctx {
    std::string command;
    json params;
    fs::path out;
    std::string hash;
    json result = json::object();

    std::vector<double> list(const char* key) const { return params.at(key).get<std::vector<double>>(); }
    double num(const char* key) const { return params.at(key).get<double>(); }
    long integer(const char* key) const { return params.at(key).get<long>(); }
    std::string str(const char* key) const { return params.at(key).get<std::string>(); }
    int threads() const { return static_cast<int>(params.value("threads", 0L)); }
    LinkPattern pattern() const { return LinkPattern::parse(str("pattern")); }

    void write_json(const std::string& name, json j) const {
        j["manifest_sha1"] = hash;
        io::write_file(out / name, j.dump(2) + "\n");
    }
    void write_csv(const std::string& name, const io::CsvTable& t) const {
        io::write_file(out / name, t.str("manifest sha1 " + hash));
    }
    void write_svg(const std::string& name, const std::string& svg) const { io::write_file(out / name, svg); }
    std::string note() const { return command + " manifest sha1 " + hash; }
};

using Handler = std::function<int(Ctx&)>;

struct Command {
    std::string help;
    json defaults;  // every accepted parameter, with its default
    Handler run;
};

const json kX4 = {-3.0, -1.0, 1.0, 3.0};

mc_sle::McConfig mc_config(const Ctx& c) {
    mc_sle::McConfig cfg;
    cfg.seed = c.params.at("seed").get<std::uint64_t>();
    cfg.n_samples = c.integer("samples");
    if (c.params.contains("dt")) cfg.dt = c.num("dt");
    if (c.params.contains("T")) cfg.T = c.num("T");
    if (c.params.contains("R")) cfg.R = c.num("R");
    cfg.threads = c.threads();
    return cfg;
}

int cmd_geodesic(Ctx& c) {
    multichord::GeodesicOptions o;
    o.samples = static_cast<int>(c.integer("samples"));
    o.tol = c.num("tol");
    auto mc = multichord::geodesic_multichord(c.list("x"), c.pattern(), o);
    double defect = multichord::geodesic_defect(mc);
    c.write_json("multichord.json", io::multichord_to_json(mc));
    c.write_svg("multichord.svg", io::svg_multichord(mc, c.note()));
    c.result = {{"pattern", mc.pattern.to_string()}, {"geodesic_defect", defect}};
    std::printf("geodesic defect %.3e\n", defect);
    return 0;
}

int cmd_rational(Ctx& c) {
    auto x = c.list("x");
    auto sols = multichord::rational_solutions(x);
    json arr = json::array();
    for (std::size_t k = 0; k < sols.size(); ++k) {
        auto locus = multichord::real_locus(sols[k], x);
        json e = io::rational_to_json(sols[k]);
        e["pattern"] = locus.pattern.to_string();
        arr.push_back(e);
        c.write_svg("rational_" + std::to_string(k) + ".svg", io::svg_multichord(locus, c.note()));
        std::printf("class %zu: pattern %s\n", k, locus.pattern.to_string().c_str());
    }
    c.write_json("rational.json", {{"x", x}, {"solutions", arr}});
    c.result = {{"classes", sols.size()}};
    return 0;
}

int cmd_energy(Ctx& c) {
    if (c.str("input").empty()) throw InputError("energy needs --input (curve or multichord JSON)");
    json in = io::read_json_file(c.str("input"));
    if (in.contains("chords")) {
        auto mc = io::multichord_from_json(in);
        c.result = {{"multichord_energy", potential::multichord_energy(mc)}};
    } else {
        Curve curve = io::curve_from_json(in);
        if (curve.tip().imag() != 0.0) throw InputError("chord must end on the real line");
        auto e = conformal::chord_energy(curve, conformal::DomainSpec::half_plane(), curve.base(), curve.tip());
        c.write_csv("driver.csv", [&] {
            io::CsvTable t({"t", "w"});
            for (std::size_t i = 0; i < e.driver.size(); ++i) t.add({e.driver.times()[i], e.driver.values()[i]});
            return t;
        }());
        c.result = {{"energy", e.energy}, {"truncated", e.truncated}};
    }
    std::printf("%s\n", c.result.dump().c_str());
    return 0;
}

int cmd_potential(Ctx& c) {
    multichord::Multichord mc = c.str("input").empty() ? multichord::geodesic_multichord(c.list("x"), c.pattern())
                                                       : io::multichord_from_json(io::read_json_file(c.str("input")));
    if (mc.chords.empty()) throw InputError("multichord input has no chords");
    potential::LoopMcOptions o;
    o.n_samples = c.integer("samples");
    o.seed = c.params.at("seed").get<std::uint64_t>();
    o.threads = c.threads();
    auto method = c.str("method") == "mc" ? potential::LoopMethod::monte_carlo : potential::LoopMethod::deterministic;
    if (c.str("method") != "mc" && c.str("method") != "deterministic") throw InputError("method is deterministic or mc");
    auto rep = potential::loewner_potential(mc, method, o);
    json j = rep.to_json();
    j["M"] = potential::minimal_potential(mc.x, mc.pattern);
    j["I"] = potential::multichord_energy(mc);
    c.write_json("potential.json", j);
    c.result = j;
    std::printf("H %.6f  M %.6f  I %.6f\n", rep.H, j["M"].get<double>(), j["I"].get<double>());
    return 0;
}

int cmd_pde_check(Ctx& c) {
    auto x = c.list("x");
    auto a = c.pattern();
    auto hs = c.list("h");
    if (hs.empty()) throw InputError("--h needs at least one value");
    io::CsvTable t({"j", "h_fd", "residual"});
    double worst_final = 0.0;
    for (std::size_t k = 0; k < hs.size(); ++k) {
        for (int j = 1; j <= static_cast<int>(x.size()); ++j) {
            double r = potential::pde_residual(x, a, j, hs[k]);
            t.add({static_cast<double>(j), hs[k], r});
            std::printf("j %d  h %-8g residual % .3e\n", j, hs[k], r);
            if (k + 1 == hs.size()) worst_final = std::max(worst_final, std::abs(r));
        }
    }
    c.write_csv("pde_residuals.csv", t);
    bool ok = worst_final <= c.num("tol");
    c.result = {{"max_abs_residual", worst_final}, {"threshold", c.num("tol")}, {"pass", ok}};
    return ok ? 0 : 2;
}

int cmd_flow(Ctx& c) {
    potential::FlowOptions o;
    if (!c.params.at("t_max").is_null()) o.t_max = c.num("t_max");
    auto x = c.list("x");
    auto r = potential::minimizer_flow(x, c.pattern(), static_cast<int>(c.integer("j")), c.num("dt"), o);
    std::vector<std::string> head{"t", "w"};
    for (std::size_t i = 1; i < x.size(); ++i) head.push_back("v" + std::to_string(i));
    io::CsvTable t(head);
    for (const auto& s : r.states) {
        std::vector<double> row{s.t, s.W};
        row.insert(row.end(), s.V.begin(), s.V.end());
        t.add(row);
    }
    c.write_csv("flow.csv", t);
    c.write_json("trace.json", io::curve_to_json(r.trace));
    c.write_svg("trace.svg", io::svg_curves({r.trace}, c.note()));
    c.result = {{"lifetime_reached", r.lifetime_reached}, {"lifetime", r.lifetime}, {"states", r.states.size()}};
    std::printf("lifetime %s %.6f\n", r.lifetime_reached ? "reached" : "not reached", r.lifetime);
    return 0;
}

spectral::SpectralDomain domain_of(const Ctx& c) {
    return spectral::SpectralDomain::make(spectral::parse_shape(c.str("shape")), c.num("radius"));
}

int cmd_detz(Ctx& c) {
    auto d = domain_of(c);
    auto det = spectral::zeta_determinant(d, c.num("tol"), c.threads());
    io::CsvTable t({"nu", "k", "lambda"});
    for (const auto& m : spectral::dirichlet_modes(d, c.integer("count"), c.threads()))
        t.add({static_cast<double>(m.nu), static_cast<double>(m.k), m.lambda});
    c.write_csv("spectrum.csv", t);
    json j = det.to_json();
    j["a2"] = spectral::heat_trace_coefficients(d).a2;
    c.write_json("determinant.json", j);
    c.result = j;
    std::printf("log det %.6f +- %.1e (%ld eigenvalues)\n", det.logdet, det.uncertainty, det.count);
    return 0;
}

int cmd_pa_check(Ctx& c) {
    auto d = domain_of(c);
    const double s = c.num("s");
    spectral::PaOptions o;
    o.corner_terms = c.params.at("corners").get<bool>();
    double change = spectral::polyakov_alvarez(d, [s](double, double) { return s; }, 0.0, o);
    // eigenvalues scale by exp(-2 s), so log det moves by -2 s zeta(0) = -2 s a2
    double oracle = -2.0 * s * spectral::heat_trace_coefficients(d).a2;
    double diff = std::abs(change - oracle);
    bool ok = diff <= c.num("tol");
    c.result = {{"change", change}, {"oracle", oracle}, {"difference", diff}, {"corner_terms", o.corner_terms}, {"pass", ok}};
    std::printf("anomaly %.10f  scaling %.10f  |diff| %.2e\n", change, oracle, diff);
    return ok ? 0 : 2;
}

int cmd_uv_cutoff(Ctx& c) {
    auto d = domain_of(c);
    io::CsvTable t({"delta", "mass", "expansion", "gap"});
    json rows = json::array();
    for (double delta : c.list("delta")) {
        auto r = spectral::loop_mass_cutoff(d, delta, c.threads());
        t.add({delta, r.mass, r.expansion, r.mass - r.expansion});
        rows.push_back({{"delta", delta}, {"mass", r.mass}, {"expansion", r.expansion}, {"tail", r.tail}});
        std::printf("delta %-8g mass %.6f expansion %.6f gap % .2e\n", delta, r.mass, r.expansion, r.mass - r.expansion);
    }
    c.write_csv("uv_cutoff.csv", t);
    c.result = {{"rows", rows}};
    return 0;
}

int cmd_sle_sample(Ctx& c) {
    auto cfg = mc_config(c);
    cfg.geometric = c.params.at("geometric").get<bool>();
    auto kappas = c.list("kappa");
    if (kappas.size() != 1) throw InputError("sle-sample takes one kappa");
    json curves = json::array();
    std::vector<Curve> drawn;
    for (long i = 0; i < cfg.n_samples; ++i) {
        auto p = mc_sle::sample_sle_path({kappas[0]}, cfg, static_cast<std::uint64_t>(i));
        if (i == 0) {
            io::CsvTable t({"t", "w"});
            double tt = 0.0;
            t.add({0.0, 0.0});
            for (std::size_t k = 0; k < p.maps.size(); ++k) t.add({tt += p.maps[k].dt(), p.driver[k]});
            c.write_csv("driver.csv", t);
        }
        curves.push_back(io::curve_to_json(p.curve));
        drawn.push_back(std::move(p.curve));
    }
    c.write_json("curves.json", {{"kappa", kappas[0]}, {"curves", curves}});
    c.write_svg("curves.svg", io::svg_curves(drawn, c.note()));
    c.result = {{"paths", cfg.n_samples}};
    return 0;
}

int cmd_gibbs(Ctx& c) {
    auto cfg = mc_config(c);
    auto kappas = c.list("kappa");
    if (kappas.size() != 1) throw InputError("gibbs takes one kappa");
    mc_sle::GibbsOptions g;
    g.sweeps = static_cast<int>(c.integer("sweeps"));
    auto x = c.list("x");
    auto a = c.pattern();
    auto mc = mc_sle::gibbs_multichordal(x, a, {kappas[0]}, cfg, g);
    double dist = multichord::multichord_distance(mc, multichord::geodesic_multichord(x, a));
    c.write_json("multichord.json", io::multichord_to_json(mc));
    c.write_svg("multichord.svg", io::svg_multichord(mc, c.note()));
    c.result = {{"distance_to_geodesic", dist}};
    std::printf("distance to the geodesic multichord %.4f\n", dist);
    return 0;
}

int cmd_return_prob(Ctx& c) {
    auto cfg = mc_config(c);
    auto radii = c.list("r");
    io::CsvTable t({"kappa", "n", "p_hat", "stderr", "bound", "r"});
    bool ok = true;
    json rows = json::array();
    for (double k : c.list("kappa")) {
        auto res = mc_sle::return_probabilities({k}, cfg, radii);
        for (std::size_t i = 0; i < res.size(); ++i) {
            const auto& r = res[i];
            t.add({k, static_cast<double>(r.samples), r.p_hat, r.stderr_, r.bound, radii[i]});
            rows.push_back({{"kappa", k}, {"r", radii[i]}, {"p_hat", r.p_hat}, {"stderr", r.stderr_}, {"bound", r.bound},
                            {"vacuous", r.vacuous}, {"pass", r.pass}});
            ok = ok && r.pass;
            std::printf("kappa %-4g r %-4g p_hat %.4f +- %.4f bound %.4f %s\n", k, radii[i], r.p_hat, r.stderr_, r.bound,
                        r.pass ? "ok" : "FAIL");
        }
    }
    c.write_csv("return_prob.csv", t);
    c.result = {{"rows", rows}, {"pass", ok}};
    return ok ? 0 : 2;
}

int cmd_ldp_probe(Ctx& c) {
    auto cfg = mc_config(c);
    mc_sle::LdpEvent ev;
    std::string kind = c.str("event");
    if (kind == "cone") {
        ev.kind = mc_sle::LdpEvent::Kind::exit_cone;
    } else if (kind == "ball") {
        ev.kind = mc_sle::LdpEvent::Kind::hit_ball;
    } else {
        throw InputError("event is cone or ball");
    }
    ev.theta = c.num("theta");
    auto ctr = c.list("center");
    if (ctr.size() != 2) throw InputError("--center takes re,im");
    ev.center = {ctr[0], ctr[1]};
    ev.radius = c.num("radius");
    bool trend = false;
    auto kappas = c.list("kappa");
    auto rows = mc_sle::ldp_decay_probe(ev, kappas, cfg, &trend);
    io::CsvTable t({"kappa", "logp", "klogp", "stderr"});
    json out = json::array();
    for (const auto& r : rows) {
        t.add({r.kappa, r.log_p, r.klogp, r.stderr_});
        out.push_back({{"kappa", r.kappa}, {"p_hat", r.p_hat}, {"klogp", r.klogp}, {"stderr", r.stderr_}, {"hits", r.hits}});
        std::printf("kappa %-5g kappa log p % .4f +- %.4f (%ld hits)\n", r.kappa, r.klogp, r.stderr_, r.hits);
    }
    c.write_csv("ldp.csv", t);
    c.result = {{"rows", out}, {"trend_ok", trend}};
    if (ev.kind == mc_sle::LdpEvent::Kind::exit_cone) c.result["rate"] = mc_sle::cone_rate(ev.theta);
    return 0;
}

int cmd_excursion(Ctx& c) {
    auto a1 = c.list("a1"), a2 = c.list("a2");
    if (a1.size() != 2 || a2.size() != 2) throw InputError("arcs are given as lo,hi");
    conformal::DomainSpec dom = conformal::DomainSpec::half_plane();
    if (!c.str("input").empty()) {
        json in = io::read_json_file(c.str("input"));
        std::vector<Curve> slits;
        for (const auto& s : in.at("slits")) slits.push_back(io::curve_from_json(s));
        cplx anchor(0.0, 1e6);
        if (in.contains("anchor")) anchor = {in["anchor"].at(0).get<double>(), in["anchor"].at(1).get<double>()};
        dom = conformal::DomainSpec::slit_complement(std::move(slits), anchor);
    }
    double e = mc_sle::excursion_measure(dom, {a1[0], a1[1]}, {a2[0], a2[1]}, c.num("tol"));
    c.result = {{"excursion_measure", e}};
    std::printf("excursion measure %.12f\n", e);
    return 0;
}

const std::map<std::string, Command>& commands() {
    static const std::map<std::string, Command> table = {
        {"geodesic", {"geodesic multichord by resampling", {{"x", kX4}, {"pattern", "12|34"}, {"samples", 400}, {"tol", 1e-10}}, cmd_geodesic}},
        {"rational", {"rational functions with critical points x", {{"x", kX4}}, cmd_rational}},
        {"energy", {"Loewner energy of a chord or multichord from JSON", {{"input", ""}}, cmd_energy}},
        {"potential", {"Loewner potential report",
                       {{"x", kX4}, {"pattern", "12|34"}, {"input", ""}, {"method", "deterministic"}, {"samples", 200000},
                        {"seed", 1}, {"threads", 0}},
                       cmd_potential}},
        {"pde-check", {"null-state PDE residuals of the minimal potential",
                       {{"x", kX4}, {"pattern", "12|34"}, {"h", {0.4, 0.2, 0.1}}, {"tol", 1e-2}}, cmd_pde_check}},
        {"flow", {"minimizer Loewner flow", {{"x", kX4}, {"pattern", "12|34"}, {"j", 1}, {"dt", 0.01}, {"t_max", nullptr}}, cmd_flow}},
        {"detz", {"zeta-regularized determinant and spectrum",
                  {{"shape", "disc"}, {"radius", 1.0}, {"count", 200}, {"tol", 1e-3}, {"threads", 0}}, cmd_detz}},
        {"pa-check", {"conformal anomaly against the scaling oracle",
                      {{"shape", "half_disc"}, {"radius", 1.0}, {"s", -std::log(2.0)}, {"corners", true}, {"tol", 1e-6}},
                      cmd_pa_check}},
        {"uv-cutoff", {"loop mass with time cutoff against its expansion",
                       {{"shape", "disc"}, {"radius", 1.0}, {"delta", {0.04, 0.01, 0.0025}}, {"threads", 0}}, cmd_uv_cutoff}},
        {"sle-sample", {"SLE paths",
                        {{"kappa", {2.0}}, {"seed", 1}, {"samples", 1}, {"dt", 1e-3}, {"T", 1.0}, {"geometric", true}},
                        cmd_sle_sample}},
        {"gibbs", {"multichordal SLE by Gibbs resampling",
                   {{"x", kX4}, {"pattern", "12|34"}, {"kappa", {0.5}}, {"seed", 1}, {"samples", 1}, {"sweeps", 3}, {"dt", 1e-3}},
                   cmd_gibbs}},
        {"return-prob", {"SLE return probabilities against the bound",
                         {{"kappa", {1.0, 2.0, 4.0}}, {"r", {0.1, 0.2, 0.3}}, {"R", 1.0}, {"samples", 10000}, {"seed", 1},
                          {"dt", 1e-3}, {"threads", 0}},
                         cmd_return_prob}},
        {"ldp-probe", {"kappa log P for a rare SLE event",
                       {{"kappa", {2.0, 1.0, 0.5}}, {"samples", 2000}, {"seed", 1}, {"event", "cone"}, {"theta", kPi / 3},
                        {"center", {1.0, 1.0}}, {"radius", 0.25}, {"dt", 1e-3}, {"threads", 0}},
                       cmd_ldp_probe}},
        {"excursion", {"Brownian excursion measure between two boundary arcs",
                       {{"a1", {-1.0, 0.0}}, {"a2", {1.0, 2.0}}, {"tol", 1e-10}, {"input", ""}}, cmd_excursion}},
    };
    return table;
}

// flag text -> JSON of the same type as the default
json coerce(const std::string& key, const std::string& text, const json& def) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw InputError("--" + key + ": '" + s + "' is not a number");
        return v;
    };
    if (def.is_array()) {
        json arr = json::array();
        std::stringstream ss(text);
        for (std::string item; std::getline(ss, item, ',');) arr.push_back(number(item));
        return arr;
    }
    if (def.is_boolean()) {
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        throw InputError("--" + key + " takes true or false");
    }
    if (def.is_number_integer() || def.is_number_unsigned()) {
        double v = number(text);
        if (v != std::floor(v) || v < 0) throw InputError("--" + key + " takes a non-negative integer");
        return static_cast<std::uint64_t>(v);
    }
    if (def.is_number() || def.is_null()) return number(text);
    return text;
}

// checks keys and types against the defaults and fills what is missing
json resolve(const std::string& command, const json& given) {
    const json& defs = commands().at(command).defaults;
    if (!given.is_object()) throw InputError("params must be an object");
    json out = defs;
    for (const auto& [k, v] : given.items()) {
        if (!defs.contains(k)) throw InputError(command + ": unknown parameter '" + k + "'");
        const json& d = defs[k];
        bool ok = (d.is_array() && v.is_array()) || (d.is_boolean() && v.is_boolean()) || (d.is_string() && v.is_string()) ||
                  ((d.is_number_integer() || d.is_number_unsigned()) && v.is_number_integer() && v.get<long long>() >= 0) ||
                  (d.is_number_float() && v.is_number()) || (d.is_null() && (v.is_number() || v.is_null()));
        if (!ok) throw InputError(command + ": parameter '" + k + "' has the wrong type");
        out[k] = v;
    }
    return out;
}

int execute(const std::string& command, json params, const fs::path& out) {
    Ctx c;
    c.command = command;
    c.params = resolve(command, params);
    c.out = out;
    // threads never change results, so they stay out of the hash
    json hashed = {{"command", command}, {"params", c.params}, {"version", kVersion}};
    hashed["params"].erase("threads");
    std::string blob = hashed.dump();
    if (c.params.contains("input") && !c.str("input").empty()) blob += io::read_file(c.str("input"));
    c.hash = io::sha1_hex(blob);
    fs::create_directories(out);
    json manifest = hashed;
    manifest["params"] = c.params;
    manifest["sha1"] = c.hash;
    io::write_file(out / "manifest.json", manifest.dump(2) + "\n");
    int status = commands().at(command).run(c);
    c.write_json("result.json", {{"command", command}, {"status", status}, {"result", c.result}});
    return status;
}

int run_config(const fs::path& path, const std::string& out_override) {
    json cfg = io::read_json_file(path);
    if (!cfg.is_object()) throw InputError(path.string() + ": config must be an object");
    for (const auto& [k, v] : cfg.items())
        if (k != "command" && k != "params" && k != "output_dir" && k != "seed")
            throw InputError(path.string() + ": unknown key '" + k + "'");
    if (!cfg.contains("command") || !cfg["command"].is_string()) throw InputError(path.string() + ": missing \"command\"");
    std::string command = cfg["command"];
    if (!commands().count(command)) throw InputError("unknown command '" + command + "'");
    json params = cfg.value("params", json::object());
    if (cfg.contains("seed")) params["seed"] = cfg["seed"];
    std::string out = !out_override.empty() ? out_override : cfg.value("output_dir", std::string("loewner_lab_out"));
    return execute(command, params, out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loewner_lab: multichordal Loewner energies, potentials, determinants and SLE sampling"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help");  // -h is taken by the finite-difference step
    app.set_version_flag("--version", kVersion);

    std::string out_dir = "loewner_lab_out";
    std::string config;
    std::map<std::string, std::map<std::string, std::string>> flags;  // command -> key -> text
    std::map<std::string, CLI::App*> subs;

    auto* run = app.add_subcommand("run", "run a JSON config {command, params, output_dir, seed}");
    run->set_help_flag("--help", "print this help");
    run->add_option("config", config, "config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides output_dir)");

    for (const auto& [name, cmd] : commands()) {
        auto* sub = app.add_subcommand(name, cmd.help);
        sub->set_help_flag("--help", "print this help");
        subs[name] = sub;
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        for (const auto& [key, def] : cmd.defaults.items()) {
            std::string flag = "--" + key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            std::string shown = def.is_array() ? [&] {
                std::string s;
                for (const auto& v : def) s += (s.empty() ? "" : ",") + io::fmt(v.get<double>());
                return s;
            }() : def.is_string() ? def.get<std::string>() : def.dump();
            sub->add_option(flag, flags[name][key], "default " + (shown.empty() ? std::string("none") : shown))
                ->allow_extra_args(false);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            std::string override = run->count("--out") ? out_dir : std::string();
            return run_config(config, override);
        }
        for (const auto& [name, sub] : subs) {
            if (!sub->parsed()) continue;
            json params = json::object();
            const json& defs = commands().at(name).defaults;
            for (const auto& [key, text] : flags[name]) {
                std::string flag = "--" + key;
                std::replace(flag.begin(), flag.end(), '_', '-');
                if (sub->count(flag)) params[key] = coerce(key, text, defs[key]);
            }
            return execute(name, params, out_dir);
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
