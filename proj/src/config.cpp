#include "srlattice/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "srlattice/sha256.hpp"

namespace srl {

using nlohmann::json;

const char* projection_name(ProjectionScheme s) {
    switch (s) {
    case ProjectionScheme::None: return "none";
    case ProjectionScheme::PS1: return "ps1";
    case ProjectionScheme::PS2: return "ps2";
    case ProjectionScheme::PS3: return "ps3";
    }
    return "?";
}

ProjectionScheme projection_from_name(const std::string& name) {
    if (name == "none") return ProjectionScheme::None;
    if (name == "ps1") return ProjectionScheme::PS1;
    if (name == "ps2") return ProjectionScheme::PS2;
    if (name == "ps3") return ProjectionScheme::PS3;
    throw ConfigError("unknown projection scheme: " + name);
}

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.model = {0.05, 1.15, 0.348, 0.39, -0.64, 100.0, 0.09, 1.0, 90.0};
    c.bounds = {0.0001, 1.0};
    c.n = 400;
    c.sigma_tilde = 5.0;
    c.M = 400;
    c.projection = ProjectionScheme::PS1;
    c.mc = {1000000, 1e-3, 20240801ull, false};
    c.x_grid = {0,  5,  10, 15, 20, 25, 30, 35, 40,
                45, 50, 55, 60, 70, 80, 90, 100};
    c.table2_sigma_hi = {0.4, 0.6, 0.8, 1.0, 2.0};
    c.table3_n = {50, 100, 200, 400, 800};
    c.table4_n = {50, 100, 200, 400, 800, 1600};
    c.table_x = 20.0;
    return c;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

} // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c = defaults();
    try {
        check_keys(j, {"model", "bounds", "lattice", "projection", "mc", "x_grid",
                       "table2_sigma_hi", "table3_n", "table4_n", "table_x",
                       "out_dir", "threads", "checkpoint_dir", "checkpoint_every",
                       "precision", "dump_terminals"},
                   "config");
        if (j.contains("model")) {
            const json& m = j["model"];
            check_keys(m, {"mu", "kappa", "theta", "sigma", "rho", "s0", "nu0",
                           "maturity", "strike"},
                       "model");
            c.model.mu = m.value("mu", c.model.mu);
            c.model.kappa = m.value("kappa", c.model.kappa);
            c.model.theta = m.value("theta", c.model.theta);
            c.model.sigma = m.value("sigma", c.model.sigma);
            c.model.rho = m.value("rho", c.model.rho);
            c.model.s0 = m.value("s0", c.model.s0);
            c.model.nu0 = m.value("nu0", c.model.nu0);
            c.model.maturity = m.value("maturity", c.model.maturity);
            c.model.strike = m.value("strike", c.model.strike);
        }
        if (j.contains("bounds")) {
            const json& b = j["bounds"];
            check_keys(b, {"sigma_lo", "sigma_hi"}, "bounds");
            c.bounds.sigma_lo = b.value("sigma_lo", c.bounds.sigma_lo);
            c.bounds.sigma_hi = b.value("sigma_hi", c.bounds.sigma_hi);
        }
        if (j.contains("lattice")) {
            const json& l = j["lattice"];
            check_keys(l, {"n", "sigma_tilde", "M"}, "lattice");
            c.n = l.value("n", c.n);
            c.sigma_tilde = l.value("sigma_tilde", c.sigma_tilde);
            c.M = l.value("M", c.M);
        }
        if (j.contains("projection"))
            c.projection = projection_from_name(j["projection"].get<std::string>());
        if (j.contains("mc")) {
            const json& m = j["mc"];
            check_keys(m, {"paths", "dt", "seed", "antithetic"}, "mc");
            c.mc.paths = m.value("paths", c.mc.paths);
            c.mc.dt = m.value("dt", c.mc.dt);
            c.mc.seed = m.value("seed", c.mc.seed);
            c.mc.antithetic = m.value("antithetic", c.mc.antithetic);
        }
        if (j.contains("x_grid")) c.x_grid = j["x_grid"].get<std::vector<double>>();
        if (j.contains("table2_sigma_hi"))
            c.table2_sigma_hi = j["table2_sigma_hi"].get<std::vector<double>>();
        if (j.contains("table3_n")) c.table3_n = j["table3_n"].get<std::vector<int>>();
        if (j.contains("table4_n")) c.table4_n = j["table4_n"].get<std::vector<int>>();
        if (j.contains("table_x")) c.table_x = j["table_x"].get<double>();
        if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("threads")) c.threads = j["threads"].get<int>();
        if (j.contains("checkpoint_dir"))
            c.checkpoint_dir = j["checkpoint_dir"].get<std::string>();
        if (j.contains("checkpoint_every"))
            c.checkpoint_every = j["checkpoint_every"].get<int>();
        if (j.contains("precision")) {
            std::string p = j["precision"].get<std::string>();
            if (p == "f64") c.precision = Precision::F64;
            else if (p == "f32") c.precision = Precision::F32;
            else throw ConfigError("precision must be f64 or f32");
        }
        if (j.contains("dump_terminals"))
            c.dump_terminals = j["dump_terminals"].get<bool>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config value: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string RunConfig::to_json_text() const {
    json j;
    j["model"] = {{"mu", model.mu},       {"kappa", model.kappa},
                  {"theta", model.theta}, {"sigma", model.sigma},
                  {"rho", model.rho},     {"s0", model.s0},
                  {"nu0", model.nu0},     {"maturity", model.maturity},
                  {"strike", model.strike}};
    j["bounds"] = {{"sigma_lo", bounds.sigma_lo}, {"sigma_hi", bounds.sigma_hi}};
    j["lattice"] = {{"n", n}, {"sigma_tilde", sigma_tilde}, {"M", M}};
    j["projection"] = projection_name(projection);
    j["mc"] = {{"paths", mc.paths},
               {"dt", mc.dt},
               {"seed", mc.seed},
               {"antithetic", mc.antithetic}};
    j["x_grid"] = x_grid;
    j["table2_sigma_hi"] = table2_sigma_hi;
    j["table3_n"] = table3_n;
    j["table4_n"] = table4_n;
    j["table_x"] = table_x;
    j["out_dir"] = out_dir;
    j["threads"] = threads;
    j["checkpoint_dir"] = checkpoint_dir;
    j["checkpoint_every"] = checkpoint_every;
    j["precision"] = precision == Precision::F64 ? "f64" : "f32";
    j["dump_terminals"] = dump_terminals;
    return j.dump(2);
}

std::array<unsigned char, 32> RunConfig::digest() const {
    // canonical form without execution-only fields
    RunConfig c = *this;
    c.out_dir.clear();
    c.threads = 0;
    c.checkpoint_dir.clear();
    c.checkpoint_every = 1;
    std::string s = c.to_json_text();
    return Sha256::digest(s.data(), s.size());
}

std::string RunConfig::digest_hex() const { return Sha256::hex(digest()); }

LatticeSpec RunConfig::lattice() const {
    return LatticeSpec::make(model, bounds, n, sigma_tilde);
}

void RunConfig::validate() const {
    model.validate();
    bounds.validate();
    if (n < 1) throw ConfigError("lattice n must be >= 1");
    if (M < 1) throw ConfigError("control grid M must be >= 1");
    if (!(sigma_tilde >= bounds.sigma_hi))
        throw ConfigError("sigma_tilde must be >= sigma_hi");
    mc.validate(model.maturity);
    if (threads < 0) throw ConfigError("threads must be >= 0");
    if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be >= 1");
    for (double x : x_grid) {
        if (x < 0.0) throw ConfigError("x values must be >= 0");
        require_x_on_grid(x, M);
    }
    for (double sh : table2_sigma_hi)
        if (!(sh > bounds.sigma_lo && sh <= sigma_tilde))
            throw ConfigError("table2 sigma_hi values must lie in (sigma_lo, sigma_tilde]");
    for (int nn : table3_n)
        if (nn < 1) throw ConfigError("table3 n values must be >= 1");
    for (int nn : table4_n)
        if (nn < 2) throw ConfigError("table4 n values must be >= 2 (uses n/2)");
}

void RunConfig::require_x_on_grid(double x, int M_used) const {
    double lam = x / model.s0;
    if (lam > 1.0 + 1e-12) return; // above one the shortfall is identically zero
    long m = std::lround(lam * M_used);
    if (std::fabs(lam - static_cast<double>(m) / M_used) > 1e-12)
        throw ConfigError("x/s0 must lie on the control grid for DP runs (x = " +
                          std::to_string(x) + ", M = " + std::to_string(M_used) + ")");
}

} // namespace srl
