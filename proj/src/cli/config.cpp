#include "config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bifsim/error.hpp"
#include "bifsim/solver.hpp"

namespace bifcli {

using bifsim::ConfigError;

namespace {

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(d))
        throw ConfigError(key + ": expected a finite number, got '" + v + "'");
    return d;
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    unsigned long long u = 0;
    try {
        if (!v.empty() && v[0] != '-' && v[0] != '+') u = std::stoull(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    return u;
}

struct Key {
    const char* name;
    const char* help;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<nlohmann::ordered_json(const RunConfig&)> get;
};

#define REAL(field, help)                                                                              \
    Key {                                                                                              \
        #field, help, [](RunConfig& c, const std::string& v) { c.field = to_double(#field, v); },     \
            [](const RunConfig& c) { return nlohmann::ordered_json(c.field); }                         \
    }
#define PARAM(field, help)                                                                                    \
    Key {                                                                                                     \
        #field, help, [](RunConfig& c, const std::string& v) { c.params.field = to_double(#field, v); },     \
            [](const RunConfig& c) { return nlohmann::ordered_json(c.params.field); }                         \
    }
#define COUNT(field, help)                                                                             \
    Key {                                                                                              \
        #field, help, [](RunConfig& c, const std::string& v) { c.field = to_count(#field, v); },      \
            [](const RunConfig& c) { return nlohmann::ordered_json(c.field); }                         \
    }
#define TEXT(field, help)                                                                              \
    Key {                                                                                              \
        #field, help, [](RunConfig& c, const std::string& v) { c.field = v; },                        \
            [](const RunConfig& c) { return nlohmann::ordered_json(c.field); }                         \
    }

const std::vector<Key>& table() {
    static const std::vector<Key> keys{
        PARAM(beta1, "drift coefficient of X below B"),
        PARAM(beta2, "drift coefficient of X above B"),
        PARAM(alpha1, "exponent below B"),
        PARAM(alpha2, "exponent above B"),
        PARAM(sigma2, "driver variance rate"),
        PARAM(t0, "start time"),
        PARAM(x0, "initial value of X"),
        REAL(dt, "driver grid step"),
        REAL(horizon, "path length or escape horizon"),
        COUNT(trials, "Monte Carlo trials"),
        COUNT(seed, "master seed"),
        REAL(epsilon, "local-time band half-width (0: 2 sigma sqrt(dt))"),
        REAL(barrier, "escape barrier (0: from bound)"),
        REAL(bound, "return probability at the barrier"),
        TEXT(out, "output prefix (empty: report to stdout)"),
        TEXT(scheme, "maximal, minimal, smoothed or delta"),
        REAL(width, "smoothing band or push duration"),
        TEXT(driver, "driver path file (.csv or .bin)"),
        TEXT(epsilons, "decreasing band widths for converge"),
        REAL(x_max, "largest initial value of the profile grid"),
        REAL(delta, "profile grid step"),
        REAL(bin_width, "profile moment bin width"),
        COUNT(bins, "number of profile moment bins"),
        COUNT(min_count, "smallest bin that is compared with theory"),
        COUNT(refine_levels, "bridge refinement levels near contact"),
        REAL(beta, "drift magnitude of the stationary pair"),
        REAL(margin, "envelope window margin (0: 10 sigma2 / beta)"),
        REAL(resolution, "excursion height resolution (0: 4 sigma sqrt(dt))"),
        REAL(assert_se, "assert estimates within this many SE of theory (0: off)"),
        TEXT(criteria, "acceptance criteria, e.g. 1,3-5 (empty: all)"),
    };
    return keys;
}

#undef REAL
#undef PARAM
#undef COUNT
#undef TEXT

const Key* find(const std::string& name) {
    for (const auto& k : table())
        if (name == k.name) return &k;
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

} // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& k : table()) v.emplace_back(k.name);
        return v;
    }();
    return names;
}

std::string key_help(const std::string& key) {
    const Key* k = find(key);
    return k ? k->help : "";
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    const Key* k = find(key);
    if (!k) {
        std::string msg = "unknown key '" + key + "'; valid keys:";
        for (const auto& n : config_keys()) msg += " " + n;
        throw ConfigError(msg);
    }
    k->set(cfg, value);
    cfg.given.insert(key);
}

void apply_text(RunConfig& cfg, const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    std::map<std::string, std::string> kv;
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        require(j.is_object(), "config: JSON must be an object");
        for (const auto& [key, v] : j.items()) {
            if (v.is_string())
                kv[key] = v.get<std::string>();
            else if (v.is_number() || v.is_boolean())
                kv[key] = v.dump();
            else
                throw ConfigError("config: value of '" + key + "' must be a scalar");
        }
    } else {
        std::istringstream is(text);
        std::string line;
        int n = 0;
        while (std::getline(is, line)) {
            ++n;
            if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            require(eq != std::string::npos, "config line " + std::to_string(n) + ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            require(!kv.count(key), "config line " + std::to_string(n) + ": repeated key '" + key + "'");
            kv[key] = trim(line.substr(eq + 1));
        }
    }
    for (const auto& [k, v] : kv) set_key(cfg, k, v);
}

void apply_file(RunConfig& cfg, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    apply_text(cfg, ss.str());
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& k : table()) j[k.name] = k.get(cfg);
    return j;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) v.push_back(to_double("list", item));
    }
    return v;
}

void validate(const RunConfig& c, const std::string& command) {
    c.params.validate();
    require(c.dt > 0.0, "dt must be positive");
    require(c.horizon > 0.0, "horizon must be positive");
    require(c.trials >= 1, "trials must be at least 1");
    require(c.epsilon >= 0.0, "epsilon must be non-negative");
    require(c.barrier >= 0.0, "barrier must be non-negative");
    require(c.bound > 0.0 && c.bound < 1.0, "bound must lie in (0, 1)");
    require(c.width > 0.0, "width must be positive");
    require(c.beta > 0.0, "beta must be positive");
    require(c.margin >= 0.0, "margin must be non-negative");
    require(c.resolution >= 0.0, "resolution must be non-negative");
    require(c.assert_se >= 0.0, "assert_se must be non-negative");
    require(c.refine_levels <= 40, "refine_levels must be at most 40");
    bifsim::parse_scheme(c.scheme);
    if (command == "rayknight") {
        require(c.delta > 0.0 && c.x_max >= 0.0, "rayknight needs delta > 0 and x_max >= 0");
        require(c.bin_width > 0.0 && c.bins >= 1, "rayknight needs bin_width > 0 and bins >= 1");
    }
    if (command == "converge") {
        const auto eps = parse_list(c.epsilons);
        require(!eps.empty(), "epsilons must list at least one width");
        for (std::size_t i = 0; i < eps.size(); ++i) {
            require(eps[i] > 0.0, "epsilons must be positive");
            require(i == 0 || eps[i] < eps[i - 1], "epsilons must decrease");
        }
    }
    require(c.horizon / c.dt <= 1e9, "horizon / dt exceeds 1e9 steps");
}

} // namespace bifcli
