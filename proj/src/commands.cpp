#include "commands.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "thlab/thlab.hpp"

namespace thlab::cli {

namespace fs = std::filesystem;

namespace {

using KV = std::vector<std::pair<std::string, std::string>>;

struct Output {
    fs::path dir;
    bool quiet = false;
    std::ostream* out = nullptr;
    std::vector<std::string> files;

    std::string file(const std::string& name) {
        files.push_back(name);
        return (dir / name).string();
    }
    void say(const std::string& line) const {
        if (!quiet) *out << line << '\n';
    }
};

std::string indexed(const std::string& stem, std::size_t i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04zu.csv", stem.c_str(), i);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << text;
}

std::string render_kv(const KV& kv) {
    std::string s;
    for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
    return s;
}

// The manifest lists the run parameters and every file written.
void finish(Output& o, const RunConfig& cfg, KV kv) {
    write_text(o.file("config.ini"), render_config(cfg));
    std::string files;
    for (const auto& f : o.files) files += (files.empty() ? "" : ",") + f;
    kv.emplace_back("files", files + ",manifest.txt");
    write_text((o.dir / "manifest.txt").string(), render_kv(kv));
}

std::string num(double x) { return fmt_num(x); }

std::string short_num(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

void write_pattern(Output& o, const std::string& name, const PatternField& f) {
    CsvWriter w(o.file(name), {"x", "u", "v"});
    for (std::size_t j = 0; j < f.x.size(); ++j) w.row({f.x[j], f.u[j], f.v[j]});
}

void write_orbit(Output& o, const std::string& name, const std::vector<OrbitSample>& s) {
    CsvWriter w(o.file(name), {"xi", "rA", "rB"});
    for (const auto& q : s) w.row({q.xi, q.rA, q.rB});
}

// Deterministic uniform numbers in [-1, 1] from the run seed.
struct Noise {
    std::mt19937_64 gen;
    explicit Noise(unsigned long long seed) : gen(seed) {}
    double operator()() { return 2.0 * double(gen() >> 11) * 0x1.0p-53 - 1.0; }
};

EqKind parse_kind(const std::string& s) {
    if (auto k = eq_kind_from_string(s)) return *k;
    throw UsageError("unknown equilibrium kind '" + s + "' (expected T, ST_A, ST_B or NT)");
}

FrontContext front_context(const RunConfig& cfg, double c0) {
    return FrontContext::with_semi_trivial_omegas(cfg.coefficients(), cfg.model.alpha_u, cfg.model.alpha_v, c0,
                                                  cfg.group_velocity(), cfg.dispersion_velocity());
}

// ---- subcommands ---------------------------------------------------------

void run_coeffs(const RunConfig& cfg, Output& o) {
    const auto g = cfg.coefficients();
    CsvWriter w(o.file("coeffs.csv"), {"name", "re", "im"});
    std::string text = "name,re,im\n";
    for (int j = 1; j <= 12; ++j) {
        const std::string name = "gamma" + std::to_string(j);
        w.cells({name, num(g.re(j)), num(g.im(j))});
        text += name + "," + num(g.re(j)) + "," + num(g.im(j)) + "\n";
    }
    KV kv{{"command", "coeffs"}, {"c_p", num(velocities(cfg.model).c_p)}};
    try {
        const auto rp = rescaled_radii_params(cfg.model.alpha_u, cfg.model.alpha_v, g, cfg.c0, cfg.group_velocity());
        for (const auto& [name, v] : std::vector<std::pair<std::string, double>>{
                 {"c_tilde", rp.c_tilde}, {"gA_tilde", rp.gA_tilde}, {"gB_tilde", rp.gB_tilde}, {"d_tilde", rp.d_tilde}}) {
            w.cells({name, num(v), "0"});
            text += name + "," + num(v) + ",0\n";
        }
        kv.emplace_back("radii_params", "included");
    } catch (const Error& e) {
        // The coefficients stand on their own; the rescaling needs extra sign conditions.
        kv.emplace_back("radii_params", std::string("omitted: ") + e.what());
    }
    if (!o.quiet) *o.out << text;
    finish(o, cfg, kv);
}

void run_simulate_pde(const RunConfig& cfg, Output& o) {
    const Grid1D fine{cfg.n, cfg.pde_length()};
    const Grid1D slow{cfg.amp_n, cfg.model.epsilon * fine.length};
    const auto times = cfg.snapshot_times();
    SimConfig sc = cfg.sim;
    sc.t_end = std::max(sc.t_end, times.back());
    const auto snaps = run_pde(pde_initial_data(cfg, slow, fine), cfg.model, cfg.nl, fine, sc, times);
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        CsvWriter w(o.file(indexed("pde", i)), {"x", "u", "v"});
        for (int j = 0; j < fine.n; ++j) w.row({fine.x(j), snaps[i].u[j], snaps[i].v[j]});
    }
    o.say("simulate-pde: wrote " + std::to_string(snaps.size()) + " snapshots to " + o.dir.string());
    finish(o, cfg,
           {{"command", "simulate-pde"}, {"n", std::to_string(fine.n)}, {"length", num(fine.length)},
            {"dt", num(sc.dt)}, {"epsilon", num(cfg.model.epsilon)}, {"times", render_list(times)}});
}

void run_simulate_amplitude(const RunConfig& cfg, Output& o) {
    const Grid1D slow{cfg.amp_n, cfg.slow_length()};
    const auto times = cfg.snapshot_times();
    SimConfig sc = cfg.sim;
    sc.t_end = std::max(sc.t_end, times.back());
    const auto g = cfg.coefficients();
    const auto ic = amplitude_initial_data(cfg, slow);
    const auto snaps = cfg.amp_full ? run_amplitude_full(ic, cfg.model, slow, g, sc, times)
                                    : run_amplitude_averaged(ic, cfg.model, slow, g, sc, times);
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        CsvWriter w(o.file(indexed("amp", i)), {"x", "reA", "imA", "reB", "imB"});
        for (int j = 0; j < slow.n; ++j)
            w.row({slow.x(j), snaps[i].A[j].real(), snaps[i].A[j].imag(), snaps[i].B[j].real(), snaps[i].B[j].imag()});
    }
    o.say("simulate-amplitude: wrote " + std::to_string(snaps.size()) + " snapshots to " + o.dir.string());
    finish(o, cfg,
           {{"command", "simulate-amplitude"}, {"system", cfg.amp_full ? "full" : "averaged"},
            {"n", std::to_string(slow.n)}, {"length", num(slow.length)}, {"dt", num(sc.dt)},
            {"epsilon", num(cfg.model.epsilon)}, {"times", render_list(times)}});
}

struct PhasePlaneArgs {
    double gA = 0, gB = 0, c = 1;
    bool portrait = false;
    double tol = 1e-6;
    int fan = 32;
};

void run_phase_plane(const RunConfig& cfg, Output& o, const PhasePlaneArgs& a) {
    const auto rp = RadiiParams::from(a.gA, a.gB, a.c);
    {
        CsvWriter w(o.file("equilibria.csv"), {"kind", "rA", "rB", "eig1re", "eig1im", "eig2re", "eig2im", "class"});
        for (const auto& e : find_equilibria(rp))
            w.cells({to_string(e.kind), num(e.position[0]), num(e.position[1]), num(e.eigenvalues[0].real()),
                     num(e.eigenvalues[0].imag()), num(e.eigenvalues[1].real()), num(e.eigenvalues[1].imag()),
                     to_string(e.stability)});
    }
    const auto rep = classify_regime(rp);
    KV kv{{"command", "phase-plane"},
          {"gA_tilde", num(rp.gA_tilde)},
          {"gB_tilde", num(rp.gB_tilde)},
          {"c_tilde", num(rp.c_tilde)},
          {"d_tilde", num(rp.d_tilde)},
          {"d_sign", std::to_string(rep.d_sign)},
          {"c_sign", std::to_string(rep.c_sign)},
          {"NT_exists", rep.NT_exists ? "true" : "false"}};
    if (rep.NT_class) kv.emplace_back("NT_class", to_string(*rep.NT_class));
    if (rep.NT_exists) {
        kv.emplace_back("det", num(rep.det));
        kv.emplace_back("trace", num(rep.trace));
    }
    if (rep.complex_window) {
        kv.emplace_back("complex_window_lo", num(rep.complex_window->first));
        kv.emplace_back("complex_window_hi", num(rep.complex_window->second));
    }
    if (rep.c_star) kv.emplace_back("c_star", num(*rep.c_star));
    std::string predicted;
    for (const auto& p : rep.predicted_orbits)
        predicted += (predicted.empty() ? "" : ";") + to_string(p.source) + "->" + to_string(p.target) +
                     (p.family ? "(family)" : "");
    kv.emplace_back("predicted_orbits", predicted);

    ShootingOptions so;
    so.fan_size = a.fan;
    for (const auto& p : rep.predicted_orbits) {
        const std::string tag = to_string(p.source) + "_" + to_string(p.target);
        try {
            if (p.family) {
                int members = 0;
                for (auto& fs : heteroclinic_fan(rp, p.source, a.tol, so)) {
                    if (fs.outcome.limit != p.target) continue;
                    if (members == 0) write_orbit(o, "orbit_" + tag + ".csv", fs.outcome.samples);
                    ++members;
                }
                kv.emplace_back("orbit." + tag, members ? "found" : "not found");
                kv.emplace_back("orbit." + tag + ".family_members", std::to_string(members));
            } else {
                const auto path = heteroclinic(rp, p.source, p.target, a.tol, so);
                write_orbit(o, "orbit_" + tag + ".csv", path.samples);
                kv.emplace_back("orbit." + tag, "found");
                kv.emplace_back("orbit." + tag + ".endpoint_error", num(path.endpoint_error));
            }
        } catch (const Error& e) {
            kv.emplace_back("orbit." + tag, std::string("failed: ") + e.what());
        }
    }
    if (a.portrait) {
        CsvWriter w(o.file("portrait.csv"), {"traj", "xi", "rA", "rB"});
        const auto trajs = phase_portrait(rp, 12, 1.6, 20.0);
        for (std::size_t i = 0; i < trajs.size(); ++i)
            for (const auto& q : trajs[i]) w.row({double(i), q.xi, q.rA, q.rB});
    }
    write_text(o.file("regime.txt"), render_kv(kv));
    o.say(render_kv(kv));
    finish(o, cfg, {{"command", "phase-plane"}});
}

struct FrontArgs {
    std::optional<double> eps, c0;
    std::string from, to;
    double tol = 1e-3;
};

void run_front(const RunConfig& cfg, Output& o, const FrontArgs& a) {
    const double eps = a.eps.value_or(cfg.model.epsilon);
    const auto ctx = front_context(cfg, a.c0.value_or(cfg.c0));
    const EqKind src = parse_kind(a.from), tgt = parse_kind(a.to);
    const auto res = integrate_persistence(eps, src, tgt, ctx, a.tol);
    {
        CsvWriter w(o.file("front.csv"), {"xi", "Ar", "Ai", "Br", "Bi", "modA", "modB"});
        for (const auto& q : res.path) w.row({q.xi, q.Ar, q.Ai, q.Br, q.Bi, q.modA, q.modB});
    }
    write_orbit(o, "planar.csv", res.planar.samples);
    const std::string line = std::string(res.pass ? "PASS" : "FAIL") + " front " + a.from + "->" + a.to +
                             " eps=" + num(eps) + " endpoint_distance=" + num(res.endpoint_distance) +
                             " tube_radius=" + num(res.tube_radius) + " omega_limit=" + res.omega_limit;
    write_text(o.file("report.txt"), line + "\n");
    o.say(line);
    finish(o, cfg, {{"command", "front"}, {"epsilon", num(eps)}, {"c0", num(ctx.c0)}, {"c_g", num(ctx.cg)},
                    {"c_v", num(ctx.cv)}, {"tol", num(a.tol)}});
}

struct WaveArgs {
    std::string kind;
    double kA = 0, kB = 0;
    std::optional<double> eps;
};

void run_wave(const RunConfig& cfg, Output& o, const WaveArgs& a) {
    const double eps = a.eps.value_or(cfg.model.epsilon);
    WaveKind kind;
    if (a.kind == "trivial") kind = WaveKind::trivial;
    else if (a.kind == "semiA") kind = WaveKind::semiA;
    else if (a.kind == "semiB") kind = WaveKind::semiB;
    else if (a.kind == "nontrivial") kind = WaveKind::nontrivial;
    else throw UsageError("--kind must be trivial, semiA, semiB or nontrivial");
    const WaveSystem sys{cfg.model.alpha_u, cfg.model.alpha_v, cfg.coefficients(), cfg.group_velocity(),
                         cfg.dispersion_velocity()};
    const auto w = space_time_wave(sys, kind, a.kA, a.kB, eps);
    ModelParams p = cfg.model;
    p.epsilon = eps;
    const Grid1D grid{cfg.n, cfg.pde_length()};
    const auto times = cfg.snapshot_times();
    for (std::size_t i = 0; i < times.size(); ++i)
        write_pattern(o, indexed("wave", i), leading_order_field(w, eps, p, times[i], grid));
    o.say("wave " + a.kind + ": r_A=" + num(w.r_A) + " r_B=" + num(w.r_B) + " omega_A=" + num(w.omega_A) +
          " omega_B=" + num(w.omega_B));
    finish(o, cfg,
           {{"command", "wave"}, {"kind", a.kind}, {"r_A", num(w.r_A)}, {"r_B", num(w.r_B)},
            {"omega_A", num(w.omega_A)}, {"omega_B", num(w.omega_B)}, {"k_A_tilde", num(a.kA)},
            {"k_B_tilde", num(a.kB)}, {"n", std::to_string(grid.n)}, {"length", num(grid.length)},
            {"epsilon", num(eps)}, {"times", render_list(times)}});
}

struct FrontFieldArgs {
    std::string orbit;
    std::optional<double> eps, x0, c0;
};

// Accepts the phase-plane schema (xi, rA, rB in rescaled units) or the
// front schema (physical xi, modA, modB).
OrbitPath read_orbit(const std::string& path, const FrontContext& c) {
    const auto t = read_csv(path);
    auto has = [&](const std::string& n) { return std::find(t.header.begin(), t.header.end(), n) != t.header.end(); };
    OrbitPath orbit;
    const auto& xi = t.col("xi");
    if (has("rA") && has("rB")) {
        for (std::size_t i = 0; i < xi.size(); ++i) orbit.samples.push_back({xi[i], t.col("rA")[i], t.col("rB")[i]});
    } else if (has("modA") && has("modB")) {
        const double xs = c.c0 / c.alpha_u;
        for (std::size_t i = 0; i < xi.size(); ++i)
            orbit.samples.push_back({xi[i] / xs, t.col("modA")[i] / c.rA_scale(), t.col("modB")[i] / c.rB_scale()});
    } else {
        throw Error("orbit CSV needs columns xi,rA,rB or xi,...,modA,modB");
    }
    if (orbit.samples.size() < 2) throw GridMismatch("orbit needs at least two samples");
    const auto& a = orbit.samples.front();
    const auto& b = orbit.samples.back();
    orbit.source.position = {a.rA, a.rB};
    orbit.target.position = {b.rA, b.rB};
    return orbit;
}

void run_front_field(const RunConfig& cfg, Output& o, const FrontFieldArgs& a) {
    const double eps = a.eps.value_or(cfg.model.epsilon);
    const auto ctx = front_context(cfg, a.c0.value_or(cfg.c0));
    const auto fp = front_profile(read_orbit(a.orbit, ctx), ctx);
    ModelParams p = cfg.model;
    p.epsilon = eps;
    const Grid1D grid{cfg.n, cfg.pde_length()};
    const double x0 = a.x0.value_or(0.5 * grid.length);
    const auto times = cfg.snapshot_times();
    for (std::size_t i = 0; i < times.size(); ++i)
        write_pattern(o, indexed("field", i), front_field(fp, ctx, eps, p, times[i], grid, x0));
    o.say("front-field: wrote " + std::to_string(times.size()) + " snapshots to " + o.dir.string());
    finish(o, cfg,
           {{"command", "front-field"}, {"orbit", a.orbit}, {"n", std::to_string(grid.n)},
            {"length", num(grid.length)}, {"epsilon", num(eps)}, {"c0", num(ctx.c0)}, {"x0", num(x0)},
            {"times", render_list(times)}});
}

struct TorusArgs {
    std::optional<double> eps, T;
    std::string system = "example";
    std::string ic = "1,0,0,0,0";
    double return_tol = 1e-3;
    int p_max = 200;
};

void run_torus(const RunConfig& cfg, Output& o, const TorusArgs& a) {
    const double eps = a.eps.value_or(cfg.model.epsilon);
    ReducedSystem sys;
    if (a.system == "example") sys = ReducedSystem::example(eps);
    else if (a.system == "custom")
        sys = ReducedSystem::from(cfg.coefficients(), cfg.model.alpha_u, cfg.model.alpha_v, cfg.model.c_d, eps);
    else throw UsageError("--system must be example or custom");
    const auto v = parse_list(a.ic);
    if (v.size() != 5) throw UsageError("--ic needs five numbers: Ar,Ai,Br,Bi,theta");
    const double T = a.T.value_or(2e4 / (eps * eps));
    const auto trace = integrate_torus({{v[0], v[1]}, {v[2], v[3]}, v[4]}, T, sys);
    {
        CsvWriter w(o.file("angles.csv"), {"t", "phi_A", "phi_B", "theta", "modA", "modB", "section"});
        for (const auto& s : trace.samples)
            w.row({s.t, s.phi_A, s.phi_B, s.theta, s.modA, s.modB, s.section ? 1.0 : 0.0});
    }
    const auto c = classify_torus(trace, a.return_tol, a.p_max);
    const std::string line = "verdict=" + to_string(c.verdict) + " rotation=" + num(c.rotation_estimate) +
                             " min_return_distance=" + num(c.min_return_distance) +
                             " best_return=" + std::to_string(c.best_return);
    write_text(o.file("report.txt"), line + "\n");
    o.say(line);
    finish(o, cfg, {{"command", "torus"}, {"system", a.system}, {"epsilon", num(eps)}, {"T", num(T)}});
}

struct ValidateArgs {
    std::string theorem;
    std::string eps_list = "0.1,0.07,0.05";
    unsigned workers = 1;
    bool from_config = false;
};

void run_validate(const RunConfig& cfg, Output& o, const ValidateArgs& a) {
    const auto eps = parse_list(a.eps_list);
    for (double e : eps)
        if (!(e > 0.0)) throw UsageError("--eps-list entries must be positive");
    std::function<double(double)> f;
    double lo, hi;
    if (a.theorem == "approx") {
        auto s = semi_trivial_benchmark();
        if (a.from_config) {
            s.p = cfg.model;
            s.nl = cfg.nl;
            s.n_pde = cfg.n;
            s.periods = cfg.periods;
            s.n_amp = cfg.amp_n;
            s.scheme = cfg.sim.scheme;
            s.well_prepared = cfg.initial.well_prepared;
            s.ic = [cfg](const Grid1D& slow) { return amplitude_initial_data(cfg, slow); };
        }
        f = [s](double e) { return approximation_error(e, s); };
        lo = 1.7;
        hi = 2.3;
    } else if (a.theorem == "averaging") {
        auto s = generic_averaging_benchmark();
        if (a.from_config) {
            s.p = cfg.model;
            s.g = cfg.coefficients();
            s.slow = Grid1D{cfg.amp_n, cfg.amp_length > 0.0 ? cfg.amp_length : s.slow.length};
            s.scheme = cfg.sim.scheme;
            s.ic = [cfg](const Grid1D& slow) { return amplitude_initial_data(cfg, slow); };
        }
        f = [s](double e) { return averaging_error(e, s); };
        lo = 0.7;
        hi = 1.3;
    } else {
        throw UsageError("--theorem must be approx or averaging");
    }
    const auto err = sweep(eps, f, a.workers);
    std::vector<std::pair<double, double>> pairs;
    {
        CsvWriter w(o.file("scaling.csv"), {"eps", "error"});
        for (std::size_t i = 0; i < eps.size(); ++i) {
            w.row({eps[i], err[i]});
            pairs.emplace_back(eps[i], err[i]);
        }
    }
    const auto rep = scaling_fit(pairs);
    const bool pass = rep.slope >= lo && rep.slope <= hi;
    const std::string line = std::string(pass ? "PASS" : "FAIL") + " " + a.theorem + " slope=" + num(rep.slope) +
                             " intercept=" + num(rep.intercept) + " window=[" + short_num(lo) + "," + short_num(hi) + "]";
    write_text(o.file("report.txt"), line + "\n");
    o.say(line);
    finish(o, cfg, {{"command", "validate"}, {"theorem", a.theorem}, {"eps_list", render_list(eps)},
                    {"slope", num(rep.slope)}, {"intercept", num(rep.intercept)}});
}

}  // namespace

AmpFields amplitude_initial_data(const RunConfig& cfg, const Grid1D& slow) {
    const auto& in = cfg.initial;
    AmpFields f{cvec(slow.n), cvec(slow.n)};
    const double L = slow.length, w = in.width;
    for (int j = 0; j < slow.n; ++j) {
        const double X = slow.x(j);
        switch (in.kind) {
            case InitialKind::constant:
                f.A[j] = in.A;
                f.B[j] = in.B;
                break;
            case InitialKind::pulse: {
                const double s = 1.0 / std::cosh((X - 0.5 * L) / w);
                f.A[j] = in.A * s;
                f.B[j] = in.B * s;
                break;
            }
            case InitialKind::box: {
                // A inside [L/4, 3L/4], B outside, joined by two tanh fronts.
                const double s = 0.5 * (std::tanh((X - 0.25 * L) / w) - std::tanh((X - 0.75 * L) / w));
                f.A[j] = in.A * s;
                f.B[j] = in.B * (1.0 - s);
                break;
            }
            case InitialKind::noise:
                break;
        }
    }
    return f;
}

RealFields pde_initial_data(const RunConfig& cfg, const Grid1D& slow, const Grid1D& fine) {
    ModelParams p = cfg.model;
    const auto ic = amplitude_initial_data(cfg, slow);
    const auto corr = correction_amplitudes(cfg.nl, velocities(p).c_p);
    RealFields f = reconstruct_ansatz(ic.A, ic.B, slow, 0.0, p, cfg.initial.well_prepared ? &corr : nullptr, fine);
    if (cfg.initial.noise > 0.0) {
        Noise rnd(cfg.seed);
        for (int j = 0; j < fine.n; ++j) {
            f.u[j] += cfg.initial.noise * rnd();
            f.v[j] += cfg.initial.noise * rnd();
        }
    }
    return f;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical laboratory for 1:1 resonant Turing and Turing-Hopf patterns", "thlab"};
    app.fallthrough();
    app.require_subcommand(1);
    std::string out_dir, config_path;
    bool quiet = false;
    app.add_option("--out", out_dir, "Output directory (overrides run.out)");
    app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
    app.add_flag("--quiet", quiet, "Suppress reports on standard output");

    auto* c_coeffs = app.add_subcommand("coeffs", "Print the amplitude coefficients and rescaled radii parameters");
    auto* c_pde = app.add_subcommand("simulate-pde", "Simulate the coupled Swift-Hohenberg system");
    auto* c_amp = app.add_subcommand("simulate-amplitude", "Simulate the amplitude system");

    PhasePlaneArgs pp;
    auto* c_pp = app.add_subcommand("phase-plane", "Equilibria, regime and heteroclinics of the radii dynamics");
    c_pp->add_option("--gA", pp.gA, "rescaled gamma_A")->required();
    c_pp->add_option("--gB", pp.gB, "rescaled gamma_B")->required();
    c_pp->add_option("--c", pp.c, "rescaled speed ratio c")->required();
    c_pp->add_flag("--portrait", pp.portrait, "Also write a grid of short trajectories");
    c_pp->add_option("--tol", pp.tol, "Endpoint tolerance of the shooting");
    c_pp->add_option("--fan", pp.fan, "Fan size for orbit families");

    FrontArgs fa;
    auto* c_front = app.add_subcommand("front", "Shoot a front in the 8-dimensional fast-slow system");
    c_front->add_option("--eps", fa.eps, "epsilon (default model.epsilon)");
    c_front->add_option("--from", fa.from, "source structure")->required();
    c_front->add_option("--to", fa.to, "target structure")->required();
    c_front->add_option("--tol", fa.tol, "endpoint tolerance in (|A|, |B|)");
    c_front->add_option("--c0", fa.c0, "front speed (default front.c0)");

    WaveArgs wa;
    auto* c_wave = app.add_subcommand("wave", "Leading-order field of a space-time periodic wave");
    c_wave->add_option("--kind", wa.kind, "trivial, semiA, semiB or nontrivial")->required();
    c_wave->add_option("--kA", wa.kA, "slow wave number offset of A");
    c_wave->add_option("--kB", wa.kB, "slow wave number offset of B");
    c_wave->add_option("--eps", wa.eps, "epsilon (default model.epsilon)");

    FrontFieldArgs ff;
    auto* c_ff = app.add_subcommand("front-field", "Leading-order field of a front from an orbit CSV");
    c_ff->add_option("--orbit", ff.orbit, "orbit CSV from phase-plane or front")->required()->check(CLI::ExistingFile);
    c_ff->add_option("--eps", ff.eps, "epsilon (default model.epsilon)");
    c_ff->add_option("--x0", ff.x0, "front position at t = 0 (default mid-box)");
    c_ff->add_option("--c0", ff.c0, "front speed (default front.c0)");

    TorusArgs ta;
    auto* c_torus = app.add_subcommand("torus", "Integrate a reduced system and classify its torus dynamics");
    c_torus->add_option("--eps", ta.eps, "epsilon (default model.epsilon)");
    c_torus->add_option("--system", ta.system, "example or custom");
    c_torus->add_option("--T", ta.T, "horizon (default 2e4/eps^2)");
    c_torus->add_option("--ic", ta.ic, "Ar,Ai,Br,Bi,theta");
    c_torus->add_option("--return-tol", ta.return_tol, "return tolerance of the classifier");
    c_torus->add_option("--p-max", ta.p_max, "largest tested period");

    ValidateArgs va;
    auto* c_val = app.add_subcommand("validate", "Epsilon-scaling check of the approximation or averaging result");
    c_val->add_option("--theorem", va.theorem, "approx or averaging")->required();
    c_val->add_option("--eps-list", va.eps_list, "comma-separated epsilon values");
    c_val->add_option("--workers", va.workers, "concurrent harness runs");
    c_val->add_flag("--from-config", va.from_config, "take model, coefficients and data from --config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        Output o{cfg.out_dir, quiet, &out, {}};
        fs::create_directories(o.dir);

        if (c_coeffs->parsed()) run_coeffs(cfg, o);
        else if (c_pde->parsed()) run_simulate_pde(cfg, o);
        else if (c_amp->parsed()) run_simulate_amplitude(cfg, o);
        else if (c_pp->parsed()) run_phase_plane(cfg, o, pp);
        else if (c_front->parsed()) run_front(cfg, o, fa);
        else if (c_wave->parsed()) run_wave(cfg, o, wa);
        else if (c_ff->parsed()) run_front_field(cfg, o, ff);
        else if (c_torus->parsed()) run_torus(cfg, o, ta);
        else if (c_val->parsed()) run_validate(cfg, o, va);
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace thlab::cli
