#include "srl/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <system_error>

namespace srl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': not a nonnegative integer: '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct Field {
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class Member>
Field real_field(Member member) {
    return {[member](RunConfig& c, const std::string& k, const std::string& v) { member(c) = to_real(k, v); },
            [member](const RunConfig& c) { return fmt(member(c)); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = [] {
        std::vector<std::pair<std::string, Field>> t;
        auto real = [&](const char* name, auto member) { t.emplace_back(name, real_field(member)); };
        real("mu", [](auto& c) -> auto& { return c.model.mu; });
        real("sigma", [](auto& c) -> auto& { return c.model.sigma; });
        real("a", [](auto& c) -> auto& { return c.model.a; });
        real("c", [](auto& c) -> auto& { return c.model.c; });
        real("beta", [](auto& c) -> auto& { return c.model.beta; });
        t.emplace_back("lambda", Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                                           c.model.lambda = c.train.lambda = to_real(k, v);
                                       },
                                       [](const RunConfig& c) { return fmt(c.train.lambda); }});
        real("x0", [](auto& c) -> auto& { return c.train.x0; });
        real("T", [](auto& c) -> auto& { return c.train.T; });
        auto count = [&](const char* name, auto member) {
            t.emplace_back(name, Field{[member](RunConfig& c, const std::string& k, const std::string& v) {
                                           member(c) = static_cast<std::size_t>(to_unsigned(k, v));
                                       },
                                       [member](const RunConfig& c) {
                                           return std::to_string(member(c));
                                       }});
        };
        count("N", [](auto& c) -> auto& { return c.train.N; });
        count("M", [](auto& c) -> auto& { return c.train.M; });
        real("theta1_init", [](auto& c) -> auto& { return c.train.theta_init.theta1; });
        real("theta2_init", [](auto& c) -> auto& { return c.train.theta_init.theta2; });
        real("theta3_init", [](auto& c) -> auto& { return c.train.theta_init.theta3; });
        real("x_bar_init", [](auto& c) -> auto& { return c.train.x_bar_init; });
        real("alpha1", [](auto& c) -> auto& { return c.train.pe.alpha[0]; });
        real("alpha2", [](auto& c) -> auto& { return c.train.pe.alpha[1]; });
        real("alpha3", [](auto& c) -> auto& { return c.train.pe.alpha[2]; });
        real("lr_decay", [](auto& c) -> auto& { return c.train.pe.lr_decay; });
        real("grad_clip1", [](auto& c) -> auto& { return c.train.pe.grad_clip[0]; });
        real("grad_clip2", [](auto& c) -> auto& { return c.train.pe.grad_clip[1]; });
        real("grad_clip3", [](auto& c) -> auto& { return c.train.pe.grad_clip[2]; });
        real("delta_bc", [](auto& c) -> auto& { return c.train.pe.delta_bc; });
        real("alpha_pi", [](auto& c) -> auto& { return c.train.pi.alpha_pi; });
        real("root_tol", [](auto& c) -> auto& { return c.train.pi.root_tol; });
        real("max_bracket", [](auto& c) -> auto& { return c.train.pi.max_bracket; });
        t.emplace_back("seed", Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                                         c.train.seed = to_unsigned(k, v);
                                     },
                                     [](const RunConfig& c) { return std::to_string(c.train.seed); }});
        t.emplace_back("mode", Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                                         try {
                                             c.train.mode = parse_train_mode(v);
                                         } catch (const std::invalid_argument& e) {
                                             throw ConfigError("key '" + k + "': " + e.what());
                                         }
                                     },
                                     [](const RunConfig& c) { return to_string(c.train.mode); }});
        t.emplace_back("include_control_costs",
                       Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                                 c.train.pe.include_control_costs = to_bool(k, v);
                             },
                             [](const RunConfig& c) {
                                 return std::string(c.train.pe.include_control_costs ? "true" : "false");
                             }});
        return t;
    }();
    return table;
}

} // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) k.push_back(f.first);
        return k;
    }();
    return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& [name, field] : fields()) {
        if (name == key) {
            field.set(cfg, key, value);
            return;
        }
    }
    throw ConfigError("unknown key '" + key + "'");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig cfg;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError(where + "expected 'key = value'");
        try {
            set_config_value(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& [name, field] : fields()) out += name + " = " + field.get(cfg) + "\n";
    return out;
}

void validate(const RunConfig& cfg) {
    try {
        validate(cfg.model);
        validate(cfg.train);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

} // namespace srl
