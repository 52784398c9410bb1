#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "thlab/csv.hpp"

namespace thlab::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = [] {
        std::map<std::string, std::set<std::string>> m;
        m["model"] = {"c_d", "alpha_u", "alpha_v", "epsilon"};
        m["nonlinearity"] = {"f20", "f11", "f02", "f30", "f21", "f12", "f03",
                             "g20", "g11", "g02", "g30", "g21", "g12", "g03"};
        for (int j = 1; j <= 12; ++j) {
            m["gammas"].insert("g" + std::to_string(j) + "_re");
            m["gammas"].insert("g" + std::to_string(j) + "_im");
        }
        m["grid"] = {"n", "periods", "amp_n", "amp_length"};
        m["sim"] = {"dt", "t_end", "scheme", "dealias", "snapshots", "times", "system"};
        m["initial"] = {"kind", "A_re", "A_im", "B_re", "B_im", "width", "noise", "well_prepared"};
        m["front"] = {"c0", "c_g", "c_v"};
        m["run"] = {"seed", "out"};
        return m;
    }();
    return s;
}

struct NlField {
    const char* key;
    double NonlinearityCoeffs::*ptr;
};

constexpr NlField kNl[] = {
    {"f20", &NonlinearityCoeffs::f20}, {"f11", &NonlinearityCoeffs::f11}, {"f02", &NonlinearityCoeffs::f02},
    {"f30", &NonlinearityCoeffs::f30}, {"f21", &NonlinearityCoeffs::f21}, {"f12", &NonlinearityCoeffs::f12},
    {"f03", &NonlinearityCoeffs::f03}, {"g20", &NonlinearityCoeffs::g20}, {"g11", &NonlinearityCoeffs::g11},
    {"g02", &NonlinearityCoeffs::g02}, {"g30", &NonlinearityCoeffs::g30}, {"g21", &NonlinearityCoeffs::g21},
    {"g12", &NonlinearityCoeffs::g12}, {"g03", &NonlinearityCoeffs::g03},
};

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw UsageError("config key " + key + ": not a number: '" + v + "'");
    }
    if (pos != v.size()) throw UsageError("config key " + key + ": trailing characters in '" + v + "'");
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x)) throw UsageError("config key " + key + ": expected an integer");
    return static_cast<long long>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw UsageError("config key " + key + ": expected true or false");
}

std::string kind_name(InitialKind k) {
    switch (k) {
        case InitialKind::constant: return "constant";
        case InitialKind::pulse: return "pulse";
        case InitialKind::box: return "box";
        case InitialKind::noise: return "noise";
    }
    return "constant";
}

InitialKind kind_from(const std::string& v) {
    for (auto k : {InitialKind::constant, InitialKind::pulse, InitialKind::box, InitialKind::noise})
        if (kind_name(k) == v) return k;
    throw UsageError("config key initial.kind: unknown kind '" + v + "'");
}

RunConfig from_tree(const pt::ptree& tree) {
    for (const auto& [sec, body] : tree) {
        const auto it = schema().find(sec);
        if (it == schema().end()) throw UsageError("unknown config section [" + sec + "]");
        if (!body.data().empty()) throw UsageError("config key outside a section: " + sec);
        for (const auto& [key, _] : body)
            if (!it->second.count(key)) throw UsageError("unknown config key " + sec + "." + key);
    }
    auto get = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return *v;
        return std::nullopt;
    };
    auto num = [&](const std::string& path, double& dst) {
        if (auto v = get(path)) dst = to_double(path, *v);
    };

    RunConfig c;
    num("model.c_d", c.model.c_d);
    num("model.alpha_u", c.model.alpha_u);
    num("model.alpha_v", c.model.alpha_v);
    num("model.epsilon", c.model.epsilon);
    for (const auto& f : kNl) num(std::string("nonlinearity.") + f.key, c.nl.*f.ptr);

    if (tree.get_child_optional("gammas")) {
        AmplitudeCoefficients g;
        for (int j = 1; j <= 12; ++j) {
            double re = 0.0, im = 0.0;
            num("gammas.g" + std::to_string(j) + "_re", re);
            num("gammas.g" + std::to_string(j) + "_im", im);
            g(j) = {re, im};
        }
        c.gammas = g;
    }

    if (auto v = get("grid.n")) c.n = int(to_int("grid.n", *v));
    if (auto v = get("grid.periods")) c.periods = int(to_int("grid.periods", *v));
    if (auto v = get("grid.amp_n")) c.amp_n = int(to_int("grid.amp_n", *v));
    num("grid.amp_length", c.amp_length);

    num("sim.dt", c.sim.dt);
    num("sim.t_end", c.sim.t_end);
    if (auto v = get("sim.scheme")) {
        if (*v == "etdrk4") c.sim.scheme = Scheme::ETDRK4;
        else if (*v == "imex2") c.sim.scheme = Scheme::IMEX2;
        else throw UsageError("config key sim.scheme: expected etdrk4 or imex2");
    }
    if (auto v = get("sim.dealias")) c.sim.dealias = to_bool("sim.dealias", *v);
    if (auto v = get("sim.snapshots")) c.snapshots = int(to_int("sim.snapshots", *v));
    if (auto v = get("sim.times")) c.times = parse_list(*v);
    if (auto v = get("sim.system")) {
        if (*v == "full") c.amp_full = true;
        else if (*v == "averaged") c.amp_full = false;
        else throw UsageError("config key sim.system: expected averaged or full");
    }

    if (auto v = get("initial.kind")) c.initial.kind = kind_from(*v);
    double ar = 0, ai = 0, br = 0, bi = 0;
    num("initial.A_re", ar);
    num("initial.A_im", ai);
    num("initial.B_re", br);
    num("initial.B_im", bi);
    c.initial.A = {ar, ai};
    c.initial.B = {br, bi};
    num("initial.width", c.initial.width);
    num("initial.noise", c.initial.noise);
    if (auto v = get("initial.well_prepared")) c.initial.well_prepared = to_bool("initial.well_prepared", *v);

    num("front.c0", c.c0);
    if (auto v = get("front.c_g")) c.c_g = to_double("front.c_g", *v);
    if (auto v = get("front.c_v")) c.c_v = to_double("front.c_v", *v);

    if (auto v = get("run.seed")) {
        const long long s = to_int("run.seed", *v);
        if (s < 0) throw UsageError("config key run.seed must be non-negative");
        c.seed = static_cast<unsigned long long>(s);
    }
    if (auto v = get("run.out")) c.out_dir = *v;

    if (!(c.model.epsilon > 0.0)) throw UsageError("model.epsilon must be positive");
    if (c.n < 16 || (c.n & (c.n - 1))) throw UsageError("grid.n must be a power of two >= 16");
    if (c.amp_n < 16 || (c.amp_n & (c.amp_n - 1))) throw UsageError("grid.amp_n must be a power of two >= 16");
    if (c.periods < 1) throw UsageError("grid.periods must be positive");
    if (c.amp_length < 0.0) throw UsageError("grid.amp_length must be non-negative");
    if (!(c.sim.dt > 0.0)) throw UsageError("sim.dt must be positive");
    if (!(c.sim.t_end >= 0.0)) throw UsageError("sim.t_end must be non-negative");
    if (c.snapshots < 1) throw UsageError("sim.snapshots must be at least 1");
    if (!(c.initial.width > 0.0)) throw UsageError("initial.width must be positive");
    if (c.initial.noise < 0.0) throw UsageError("initial.noise must be non-negative");
    for (std::size_t i = 0; i < c.times.size(); ++i)
        if (c.times[i] < 0.0 || (i && c.times[i] < c.times[i - 1]))
            throw UsageError("sim.times must be non-negative and non-decreasing");
    return c;
}

}  // namespace

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw UsageError("empty entry in list '" + s + "'");
        out.push_back(to_double("list", item.substr(b, e - b + 1)));
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

std::string render_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_num(v[i]);
    return s;
}

double RunConfig::pde_length() const { return 2.0 * std::numbers::pi * periods; }

double RunConfig::slow_length() const {
    return amp_length > 0.0 ? amp_length : model.epsilon * pde_length();
}

std::vector<double> RunConfig::snapshot_times() const {
    if (!times.empty()) return times;
    std::vector<double> t;
    for (int i = 0; i <= snapshots; ++i) t.push_back(sim.t_end * i / snapshots);
    return t;
}

AmplitudeCoefficients RunConfig::coefficients() const {
    return gammas ? *gammas : compute_gammas(nl, velocities(model).c_p);
}

double RunConfig::group_velocity() const { return c_g ? *c_g : velocities(model).c_g; }
double RunConfig::dispersion_velocity() const { return c_v ? *c_v : model.c_d; }

bool RunConfig::operator==(const RunConfig& o) const { return render_config(*this) == render_config(o); }

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    return from_tree(tree);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string render_config(const RunConfig& c) {
    std::ostringstream o;
    auto kv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << '\n'; };
    auto kd = [&](const std::string& k, double v) { kv(k, fmt_num(v)); };
    o << "[model]\n";
    kd("c_d", c.model.c_d);
    kd("alpha_u", c.model.alpha_u);
    kd("alpha_v", c.model.alpha_v);
    kd("epsilon", c.model.epsilon);
    o << "\n[nonlinearity]\n";
    for (const auto& f : kNl) kd(f.key, c.nl.*f.ptr);
    if (c.gammas) {
        o << "\n[gammas]\n";
        for (int j = 1; j <= 12; ++j) {
            kd("g" + std::to_string(j) + "_re", c.gammas->re(j));
            kd("g" + std::to_string(j) + "_im", c.gammas->im(j));
        }
    }
    o << "\n[grid]\n";
    kv("n", std::to_string(c.n));
    kv("periods", std::to_string(c.periods));
    kv("amp_n", std::to_string(c.amp_n));
    kd("amp_length", c.amp_length);
    o << "\n[sim]\n";
    kd("dt", c.sim.dt);
    kd("t_end", c.sim.t_end);
    kv("scheme", c.sim.scheme == Scheme::ETDRK4 ? "etdrk4" : "imex2");
    kv("dealias", c.sim.dealias ? "true" : "false");
    kv("snapshots", std::to_string(c.snapshots));
    if (!c.times.empty()) kv("times", render_list(c.times));
    kv("system", c.amp_full ? "full" : "averaged");
    o << "\n[initial]\n";
    kv("kind", kind_name(c.initial.kind));
    kd("A_re", c.initial.A.real());
    kd("A_im", c.initial.A.imag());
    kd("B_re", c.initial.B.real());
    kd("B_im", c.initial.B.imag());
    kd("width", c.initial.width);
    kd("noise", c.initial.noise);
    kv("well_prepared", c.initial.well_prepared ? "true" : "false");
    o << "\n[front]\n";
    kd("c0", c.c0);
    if (c.c_g) kd("c_g", *c.c_g);
    if (c.c_v) kd("c_v", *c.c_v);
    o << "\n[run]\n";
    kv("seed", std::to_string(c.seed));
    kv("out", c.out_dir);
    return o.str();
}

}  // namespace thlab::cli
