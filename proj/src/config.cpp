#include "dssflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dssflow/errors.hpp"
#include "dssflow/util.hpp"

namespace dssflow {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

double to_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ConfigError("config field '" + key + "': not a number: " + it->second);
    }
}

int to_int(const std::map<std::string, std::string>& kv, const std::string& key, int fallback) {
    double v = to_double(kv, key, fallback);
    if (v != std::floor(v)) throw ConfigError("config field '" + key + "': expected an integer");
    return int(v);
}

std::string to_str(const std::map<std::string, std::string>& kv, const std::string& key,
                   const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : unquote(it->second);
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed table");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        if (!section.empty()) key = section + "." + key;
        kv[key] = val;
    }
    return kv;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_map(parse_config_text(ss.str()));
}

RunConfig RunConfig::from_map(const std::map<std::string, std::string>& kv) {
    RunConfig c;
    if (!kv.count("lambda")) throw ConfigError("config field 'lambda' is required");
    c.lambda = to_double(kv, "lambda", c.lambda);
    c.data_v = to_str(kv, "data_v", c.data_v);
    c.data_theta = to_str(kv, "data_theta", c.data_theta);
    c.annulus_file_v = to_str(kv, "annulus_file_v", c.annulus_file_v);
    c.annulus_file_theta = to_str(kv, "annulus_file_theta", c.annulus_file_theta);
    c.force = to_str(kv, "force", c.force);
    c.L = to_double(kv, "box.L", c.L);
    c.N = to_int(kv, "box.N", c.N);
    c.dealias_fraction = to_double(kv, "box.dealias_fraction", c.dealias_fraction);
    c.drift_window_fraction = to_double(kv, "box.drift_window_fraction", c.drift_window_fraction);
    c.n_s = to_int(kv, "profiles.n_s", c.n_s);
    c.epsilon = to_double(kv, "solver.epsilon", c.epsilon);
    c.alpha = to_double(kv, "profiles.alpha", c.alpha);
    c.q = to_double(kv, "profiles.q", c.q);
    c.R0 = to_double(kv, "profiles.R0", c.R0);
    c.delta = to_double(kv, "solver.delta", c.delta);
    c.mode = to_str(kv, "solver.mode", c.mode);
    c.tol_solve = to_double(kv, "solver.tol", c.tol_solve);
    c.tol_quad = to_double(kv, "profiles.tol", c.tol_quad);
    c.ds = to_double(kv, "solver.ds", c.ds);
    c.max_map_evals = to_int(kv, "solver.max_map_evals", c.max_map_evals);
    c.n_snap = to_int(kv, "output.n_snap", c.n_snap);
    c.out_dir = to_str(kv, "output.dir", c.out_dir);
    c.threads = to_int(kv, "threads", c.threads);
    c.seed = unsigned(to_int(kv, "seed", int(c.seed)));
    c.validate();
    return c;
}

void RunConfig::validate() const {
    if (!(lambda > 1.0)) throw ConfigError("config field 'lambda': must be > 1");
    if (!(L > 0)) throw ConfigError("config field 'box.L': must be > 0");
    if (N < 8 || N % 2) throw ConfigError("config field 'box.N': must be even and >= 8");
    if (!(q > 3.0 && q < 4.0)) throw ConfigError("config field 'profiles.q': must be in (3,4)");
    if (!(epsilon > 0 && epsilon < 1))
        throw ConfigError("config field 'solver.epsilon': must be in (0,1)");
    if (delta < 0) throw ConfigError("config field 'solver.delta': must be >= 0");
    if (n_s < 1) throw ConfigError("config field 'profiles.n_s': must be >= 1");
    if (mode != "periodic" && mode != "stationary")
        throw ConfigError("config field 'solver.mode': expected 'periodic' or 'stationary'");
    if (!(tol_solve > 0)) throw ConfigError("config field 'solver.tol': must be > 0");
    if (!(tol_quad > 0)) throw ConfigError("config field 'profiles.tol': must be > 0");
    if (!(ds > 0)) throw ConfigError("config field 'solver.ds': must be > 0");
    if (threads < 1) throw ConfigError("config field 'threads': must be >= 1");
    if (n_snap < 2) throw ConfigError("config field 'output.n_snap': must be >= 2");
    if (R0 < 0) throw ConfigError("config field 'profiles.R0': must be >= 0");
    if (alpha < 0) throw ConfigError("config field 'profiles.alpha': must be >= 0");
}

std::string RunConfig::canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "data_v=" << data_v << "\ndata_theta=" << data_theta << "\nannulus_file_v="
       << annulus_file_v << "\nannulus_file_theta=" << annulus_file_theta << "\nforce=" << force
       << "\nlambda=" << lambda << "\nL=" << L << "\nN=" << N << "\ndealias=" << dealias_fraction
       << "\nwindow=" << drift_window_fraction << "\nn_s=" << n_s << "\nepsilon=" << epsilon
       << "\nalpha=" << alpha << "\nq=" << q << "\ndelta=" << delta << "\nR0=" << R0
       << "\nmode=" << mode << "\ntol_solve=" << tol_solve << "\ntol_quad=" << tol_quad
       << "\nds=" << ds << "\nmax_map_evals=" << max_map_evals << "\nn_snap=" << n_snap
       << "\nseed=" << seed << "\n";
    return os.str();
}

std::uint64_t RunConfig::hash() const {
    std::string c = canonical();
    return fnv1a(c.data(), c.size());
}

}  // namespace dssflow
