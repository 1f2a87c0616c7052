#include "cli_commands.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "srl/config.hpp"
#include "srl/errors.hpp"
#include "validation.hpp"

namespace srl::cli {

namespace fs = std::filesystem;

namespace {

double parse_real(const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw std::invalid_argument("not a number: '" + text + "'");
    return v;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

// Opens `path` for writing, or returns the stream it was given when empty.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw ConfigError("cannot write '" + path + "'");
        os_ = &file_;
    }
    std::ostream& get() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

RunConfig base_config(const std::string& path, const std::vector<std::string>& overrides) {
    RunConfig cfg = path.empty() ? RunConfig{} : load_config(path);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string config;
    std::string mode;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool quiet = false;
};

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg = base_config(args.config, args.overrides);
    if (const char* env = std::getenv("SRL_SEED"); env != nullptr && *env != '\0') {
        set_config_value(cfg, "seed", env);
    }
    if (args.seed_given) cfg.train.seed = args.seed;
    if (!args.mode.empty()) set_config_value(cfg, "mode", args.mode);
    validate(cfg);

    const std::string mode = to_string(cfg.train.mode);
    const fs::path dir = args.out_dir.empty() ? fs::path("runs") / (mode + "-seed" + std::to_string(cfg.train.seed))
                                              : fs::path(args.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("output directory '" + dir.string() + "' is not writable");

    const std::string serialized = serialize_config(cfg);
    {
        std::ofstream cfg_file(dir / "config.txt");
        if (!cfg_file) throw ConfigError("output directory '" + dir.string() + "' is not writable");
        cfg_file << serialized;
    }
    nlohmann::ordered_json manifest;
    manifest["command"] = "train";
    manifest["config_path"] = args.config.empty() ? "<defaults>" : args.config;
    manifest["output_dir"] = dir.string();
    manifest["seed"] = cfg.train.seed;
    manifest["mode"] = mode;
    manifest["timestamp"] = utc_timestamp();
    manifest["config_sha1"] = git_blob_sha1(serialized);
    manifest["status"] = "running";
    auto write_manifest = [&] {
        std::ofstream m(dir / "manifest.json");
        m << manifest.dump(2) << '\n';
    };
    write_manifest();

    std::vector<EpisodeRecord> log;
    log.reserve(cfg.train.M);
    auto flush_log = [&] {
        std::ofstream csv(dir / "episodes.csv");
        write_episode_csv(csv, log);
    };
    const auto on_episode = [&](const EpisodeRecord& rec) {
        log.push_back(rec);
        if (!args.quiet && (rec.m % 50 == 0 || rec.m == cfg.train.M)) {
            err << mode << " episode " << rec.m << "/" << cfg.train.M << "  x_bar=" << rec.x_bar
                << "  linf=" << rec.linf_error << '\n';
        }
    };
    try {
        run_training(cfg.train, cfg.model, on_episode);
    } catch (const NumericError&) {
        flush_log();
        manifest["status"] = "numeric failure";
        write_manifest();
        throw;
    }
    flush_log();
    manifest["status"] = "complete";
    manifest["episodes"] = log.size();
    manifest["final_linf_error"] = log.back().linf_error;
    manifest["final_x_bar"] = log.back().x_bar;
    write_manifest();
    out << (dir / "episodes.csv").string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleArgs {
    std::string what;
    std::string config;
    std::string x = "-5..5:101";
    std::string q = "0";
    std::string z = "0.05..0.95:19";
    std::string out;
};

int cmd_oracle(const OracleArgs& args, std::ostream& out) {
    const RunConfig cfg = base_config(args.config, {});
    validate(cfg);
    const ModelParams& p = cfg.model;
    const DerivedConstants dc = derive_constants(p);

    std::vector<double> xs;
    std::vector<double> qs;
    std::vector<double> zs;
    try {
        xs = parse_grid(args.x).points();
        qs = parse_grid(args.q).points();
        zs = parse_grid(args.z).points();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid grid: ") + e.what());
    }
    for (double q : qs) {
        if (q < 0.0) throw ConfigError("invalid grid: q must be nonnegative");
    }
    for (double z : zs) {
        if (!(z >= 0.0 && z <= 1.0)) throw ConfigError("invalid grid: z must lie in [0, 1]");
    }

    Sink sink(args.out, out);
    std::ostream& os = sink.get();
    os.precision(17);
    if (args.what == "boundary") {
        os << "name,value\n"
           << "x_hat," << dc.x_hat << "\nb," << dc.b << "\nl," << dc.l << "\nc_a," << dc.c_a << "\nc_b," << dc.c_b
           << "\nphi_x_hat," << phi(dc.x_hat, dc, p) << '\n';
    } else if (args.what == "phi" || args.what == "gamma") {
        const bool is_phi = args.what == "phi";
        os << "x,value\n";
        for (double x : xs) os << x << ',' << (is_phi ? phi(x, dc, p) : gamma(x, dc, p)) << '\n';
    } else if (args.what == "psi") {
        os << "x,q,value\n";
        for (double q : qs)
            for (double x : xs) os << x << ',' << q << ',' << psi(x, q, dc, p) << '\n';
    } else {
        os << "x,z,value\n";
        for (double z : zs)
            for (double x : xs) os << x << ',' << z << ',' << outer_value_v(x, z, dc, p) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const std::string& suite, const std::string& config, std::ostream& out) {
    const RunConfig cfg = base_config(config, {});
    validate(cfg);
    std::vector<std::string> names;
    if (suite == "all") names = suite_names();
    else names.push_back(suite);

    std::vector<std::future<std::vector<CheckResult>>> jobs;
    for (const std::string& name : names) {
        jobs.push_back(std::async(std::launch::async, [name, &cfg] { return run_suite(name, cfg.model); }));
    }
    bool all_pass = true;
    std::size_t count = 0;
    for (auto& job : jobs) {
        for (const CheckResult& r : job.get()) {
            all_pass = all_pass && r.pass;
            ++count;
            out << (r.pass ? "PASS " : "FAIL ") << r.suite << ": " << r.name << "  measured=" << std::setprecision(6)
                << r.measured << "  limit=" << r.limit << '\n';
        }
    }
    out << (all_pass ? "all " : "not all ") << count << " checks passed\n";
    return all_pass ? kExitOk : kExitFailedCheck;
}

// ---------------------------------------------------------------------------
// figures

struct RunData {
    RunConfig cfg;
    std::vector<EpisodeRecord> log;
};

RunData load_run(const std::string& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("run directory '" + dir + "' does not exist");
    RunData run;
    run.cfg = load_config((fs::path(dir) / "config.txt").string());
    std::ifstream csv(fs::path(dir) / "episodes.csv");
    if (!csv) throw ConfigError("run directory '" + dir + "' has no episodes.csv");
    try {
        run.log = read_episode_csv(csv);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("'" + dir + "/episodes.csv': " + e.what());
    }
    if (run.log.empty()) throw ConfigError("'" + dir + "/episodes.csv' has no episodes");
    return run;
}

void emit_series(std::ostream& os, const RunData& run) {
    const std::string mode = to_string(run.cfg.train.mode);
    const DerivedConstants dc = derive_constants(run.cfg.model);
    const Theta truth = true_theta(dc, run.cfg.model);
    for (const EpisodeRecord& r : run.log) {
        const std::pair<const char*, double> rows[] = {
            {"theta1", r.theta.theta1},     {"theta2", r.theta.theta2},     {"theta3", r.theta.theta3},
            {"true_theta1", truth.theta1},  {"true_theta2", truth.theta2},  {"true_theta3", truth.theta3},
            {"x_bar", r.x_bar},             {"x_hat", dc.x_hat},            {"linf_error", r.linf_error},
        };
        for (const auto& [series, value] : rows) os << mode << ',' << r.m << ',' << series << ',' << fmt(value) << '\n';
    }
}

int cmd_figures(const std::string& run_dir, const std::string& compare, const std::string& out_path,
                std::ostream& out) {
    std::vector<RunData> runs{load_run(run_dir)};
    if (!compare.empty()) runs.push_back(load_run(compare));
    Sink sink(out_path, out);
    sink.get() << "mode,episode,series,value\n";
    for (const RunData& run : runs) emit_series(sink.get(), run);
    return kExitOk;
}

} // namespace

std::vector<double> GridSpec::points() const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        g.lo = g.hi = parse_real(text);
        g.n = 1;
    } else {
        g.lo = parse_real(text.substr(0, dots));
        std::string rest = text.substr(dots + 2);
        g.n = 101;
        if (const auto colon = rest.find(':'); colon != std::string::npos) {
            const std::string count = rest.substr(colon + 1);
            const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), g.n);
            if (ec != std::errc() || ptr != count.data() + count.size() || g.n < 2) {
                throw std::invalid_argument("grid point count must be an integer >= 2: '" + count + "'");
            }
            rest = rest.substr(0, colon);
        }
        g.hi = parse_real(rest);
        if (!(g.hi > g.lo)) throw std::invalid_argument("grid needs lo < hi: '" + text + "'");
    }
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi)) throw std::invalid_argument("grid bounds must be finite");
    return g;
}

std::string git_blob_sha1(const std::string& content) {
    const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1) {
        throw std::runtime_error("SHA-1 digest failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

void write_episode_csv(std::ostream& os, const std::vector<EpisodeRecord>& log) {
    os << kEpisodeHeader << '\n';
    for (const EpisodeRecord& r : log) {
        os << r.m << ',' << fmt(r.theta.theta1) << ',' << fmt(r.theta.theta2) << ',' << fmt(r.theta.theta3) << ','
           << fmt(r.x_bar) << ',' << fmt(r.linf_error) << ',';
        if (r.activation_time) os << (std::isinf(*r.activation_time) ? std::string("inf") : fmt(*r.activation_time));
        os << ',' << fmt(r.total_cost) << '\n';
    }
}

std::vector<EpisodeRecord> read_episode_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kEpisodeHeader) throw std::invalid_argument("unexpected header");
    std::vector<EpisodeRecord> log;
    for (int lineno = 2; std::getline(is, line); ++lineno) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();
        if (cells.size() != 8) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 8 fields");
        try {
            EpisodeRecord r;
            r.m = static_cast<std::size_t>(parse_real(cells[0]));
            r.theta = {parse_real(cells[1]), parse_real(cells[2]), parse_real(cells[3])};
            r.x_bar = parse_real(cells[4]);
            r.linf_error = parse_real(cells[5]);
            if (!cells[6].empty()) r.activation_time = parse_real(cells[6]);
            r.total_cost = parse_real(cells[7]);
            log.push_back(r);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return log;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Singular-control free boundary solver and actor-critic trainer", "srl"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Run the benchmark or randomized actor-critic");
    train_cmd->add_option("config", train.config, "Config file (key = value); defaults when omitted");
    train_cmd->add_option("--mode", train.mode, "benchmark or randomized (overrides the config)")
        ->check(CLI::IsMember({"benchmark", "randomized"}));
    train_cmd->add_option("--seed", train.seed, "Seed (overrides config and SRL_SEED)");
    train_cmd->add_option("--out-dir", train.out_dir, "Output directory (default runs/<mode>-seed<seed>)");
    train_cmd->add_option("--set", train.overrides, "Override a config key, key=value (repeatable)");
    train_cmd->add_flag("--quiet", train.quiet, "No progress on stderr");

    OracleArgs oracle;
    auto* oracle_cmd = app.add_subcommand("oracle", "Evaluate closed-form oracles on a grid");
    oracle_cmd->add_option("--what", oracle.what, "phi, psi, gamma, v or boundary")
        ->required()
        ->check(CLI::IsMember({"phi", "psi", "gamma", "v", "boundary"}));
    oracle_cmd->add_option("--config", oracle.config, "Config file supplying model coefficients");
    oracle_cmd->add_option("--x", oracle.x, "State grid lo..hi[:n] or a single value")->capture_default_str();
    oracle_cmd->add_option("--q", oracle.q, "Horizon grid for psi")->capture_default_str();
    oracle_cmd->add_option("--z", oracle.z, "Activated-fraction grid for v")->capture_default_str();
    oracle_cmd->add_option("--out", oracle.out, "Output CSV path (stdout when omitted)");

    std::string suite = "all";
    std::string validate_config;
    auto* validate_cmd = app.add_subcommand("validate", "Run invariant suites");
    validate_cmd->add_option("--suite", suite, "closedform, simulator, pe, pi or all")->capture_default_str();
    validate_cmd->add_option("--config", validate_config, "Config file supplying model coefficients");

    std::string run_dir;
    std::string compare;
    std::string figures_out;
    auto* figures_cmd = app.add_subcommand("figures", "Export tidy plot data from run directories");
    figures_cmd->add_option("--run-dir", run_dir, "Run directory written by train")->required();
    figures_cmd->add_option("--compare", compare, "Second run directory to include");
    figures_cmd->add_option("--out", figures_out, "Output CSV path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*train_cmd) {
            train.seed_given = train_cmd->count("--seed") > 0;
            return cmd_train(train, out, err);
        }
        if (*oracle_cmd) return cmd_oracle(oracle, out);
        if (*validate_cmd) {
            if (suite != "all" && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end()) {
                err << "error: unknown suite '" << suite << "'\n";
                return kExitConfig;
            }
            return cmd_validate(suite, validate_config, out);
        }
        return cmd_figures(run_dir, compare, figures_out, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

} // namespace srl::cli
