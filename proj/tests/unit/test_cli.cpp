#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_commands.hpp"
#include "srl/config.hpp"

using namespace srl;
using namespace srl::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "srl");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path workdir() {
    const char* env = std::getenv("SRL_TEST_WORKDIR");
    const fs::path dir = env != nullptr ? fs::path(env) : fs::temp_directory_path() / "srl_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::vector<std::string> small_run(const std::string& mode, const fs::path& dir) {
    return {"train", "--mode", mode, "--out-dir", dir.string(), "--quiet", "--set", "M=5",
            "--set", "N=200", "--set", "T=4"};
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("grid syntax") {
    const GridSpec g = parse_grid("-5..5:11");
    CHECK(g.lo == -5.0);
    CHECK(g.hi == 5.0);
    CHECK(g.n == 11);
    CHECK(g.points()[5] == doctest::Approx(0.0));
    CHECK(parse_grid("0..1").n == 101);
    CHECK(parse_grid("2.5").points() == std::vector<double>{2.5});
    CHECK_THROWS_AS(parse_grid("5..1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("0..1:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("a..b"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
}

TEST_CASE("git blob hash") {
    CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
    CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("config round-trip") {
    RunConfig cfg;
    set_config_value(cfg, "mu", "0.3");
    set_config_value(cfg, "mode", "randomized");
    set_config_value(cfg, "alpha3", "0.7");
    set_config_value(cfg, "include_control_costs", "false");
    set_config_value(cfg, "lambda", "0.25");
    std::istringstream in(serialize_config(cfg));
    const RunConfig back = parse_config(in);
    CHECK(back == cfg);
    CHECK(back.model.lambda == 0.25);
    CHECK(back.train.lambda == 0.25);
    std::istringstream defaults(serialize_config(RunConfig{}));
    CHECK(parse_config(defaults) == RunConfig{});
    CHECK(config_keys().size() == 28);
}

TEST_CASE("config errors") {
    RunConfig cfg;
    CHECK_THROWS_AS(set_config_value(cfg, "nope", "1"), ConfigError);
    CHECK_THROWS_AS(set_config_value(cfg, "mu", "fast"), ConfigError);
    CHECK_THROWS_AS(set_config_value(cfg, "M", "-3"), ConfigError);
    CHECK_THROWS_AS(set_config_value(cfg, "mode", "greedy"), ConfigError);
    std::istringstream bad("# comment\nmu = 0.25\nsigma\n");
    try {
        parse_config(bad, "run.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("run.cfg:3") != std::string::npos);
    }
    set_config_value(cfg, "beta", "0.001");
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("episode CSV round-trip") {
    std::vector<EpisodeRecord> log(3);
    for (std::size_t i = 0; i < 3; ++i) {
        log[i].m = i + 1;
        log[i].theta = {0.1 + 1e-17 * i, 0.3, 15.0 / 7.0};
        log[i].x_bar = -1.0 / 3.0;
        log[i].linf_error = 0.5;
        log[i].total_cost = 12.25;
    }
    log[1].activation_time = 3.14;
    log[2].activation_time = std::numeric_limits<double>::infinity();
    std::stringstream ss;
    write_episode_csv(ss, log);
    const auto rows = lines(ss.str());
    CHECK(rows[0] == kEpisodeHeader);
    CHECK(rows[3].find(",inf,") != std::string::npos);
    const auto back = read_episode_csv(ss);
    REQUIRE(back.size() == 3);
    CHECK(back[0].theta == log[0].theta);
    CHECK(back[0].x_bar == log[0].x_bar);
    CHECK_FALSE(back[0].activation_time.has_value());
    CHECK(*back[1].activation_time == 3.14);
    CHECK(std::isinf(*back[2].activation_time));
}

TEST_CASE("train writes the episode log and manifest") {
    const fs::path dir = workdir() / "bench";
    fs::remove_all(dir);
    const Result r = run(small_run("benchmark", dir));
    REQUIRE(r.code == kExitOk);
    const auto rows = lines(slurp(dir / "episodes.csv"));
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == kEpisodeHeader);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["command"] == "train");
    CHECK(manifest["mode"] == "benchmark");
    CHECK(manifest["status"] == "complete");
    CHECK(manifest["config_sha1"] == git_blob_sha1(slurp(dir / "config.txt")));
    CHECK(load_config((dir / "config.txt").string()).train.M == 5);
}

TEST_CASE("randomized runs fill the activation column") {
    const fs::path dir = workdir() / "rand";
    fs::remove_all(dir);
    REQUIRE(run(small_run("randomized", dir)).code == kExitOk);
    std::ifstream csv(dir / "episodes.csv");
    for (const EpisodeRecord& r : read_episode_csv(csv)) CHECK(r.activation_time.has_value());
}

TEST_CASE("seed precedence: flag over SRL_SEED over config") {
    const fs::path dir = workdir() / "seeded";
    setenv("SRL_SEED", "41", 1);
    auto args = small_run("benchmark", dir);
    REQUIRE(run(args).code == kExitOk);
    CHECK(nlohmann::json::parse(slurp(dir / "manifest.json"))["seed"] == 41);
    args.push_back("--seed");
    args.push_back("7");
    REQUIRE(run(args).code == kExitOk);
    CHECK(nlohmann::json::parse(slurp(dir / "manifest.json"))["seed"] == 7);
    unsetenv("SRL_SEED");
}

TEST_CASE("train exit codes") {
    const Result missing = run({"train", "/no/such/file.cfg"});
    CHECK(missing.code == kExitConfig);
    CHECK(missing.err.find("/no/such/file.cfg") != std::string::npos);
    CHECK(run({"train", "--set", "M=0", "--quiet", "--out-dir", (workdir() / "bad").string()}).code == kExitConfig);
    CHECK(run({"train", "--mode", "greedy"}).code == kExitConfig);
}

TEST_CASE("oracle") {
    const Result boundary = run({"oracle", "--what", "boundary"});
    REQUIRE(boundary.code == kExitOk);
    CHECK(boundary.out.find("x_hat,1.2325582737") != std::string::npos);
    CHECK(boundary.out.find("b,0.2623475382") != std::string::npos);
    CHECK(boundary.out.find("c_a,14.285714285") != std::string::npos);

    const Result gamma = run({"oracle", "--what", "gamma", "--x", "-5..5:21"});
    REQUIRE(gamma.code == kExitOk);
    const auto rows = lines(gamma.out);
    REQUIRE(rows.size() == 22);
    double prev = 2.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double v = std::stod(rows[i].substr(rows[i].find(',') + 1));
        CHECK(v < prev);
        prev = v;
    }

    const auto phi_rows = lines(run({"oracle", "--what", "phi", "--x", "-3..3:7"}).out);
    const auto psi_rows = lines(run({"oracle", "--what", "psi", "--x", "-3..3:7", "--q", "0"}).out);
    REQUIRE(phi_rows.size() == psi_rows.size());
    for (std::size_t i = 1; i < phi_rows.size(); ++i) {
        CHECK(phi_rows[i].substr(phi_rows[i].rfind(',')) == psi_rows[i].substr(psi_rows[i].rfind(',')));
    }

    CHECK(run({"oracle", "--what", "v", "--x", "0", "--z", "0.2..0.8:4"}).code == kExitOk);
    CHECK(run({"oracle", "--what", "phi", "--x", "5..1"}).code == kExitConfig);
    CHECK(run({"oracle", "--what", "v", "--z", "0.5..1.5:3"}).code == kExitConfig);
    CHECK(run({"oracle", "--what", "nothing"}).code == kExitConfig);
}

TEST_CASE("validate") {
    const Result pi = run({"validate", "--suite", "pi"});
    CHECK(pi.code == kExitOk);
    CHECK(pi.out.find("PASS pi: x_hat is a fixed point") != std::string::npos);
    CHECK(run({"validate", "--suite", "bogus"}).code == kExitConfig);
}

TEST_CASE("figures") {
    const fs::path bench = workdir() / "fig_bench";
    const fs::path rand = workdir() / "fig_rand";
    fs::remove_all(bench);
    fs::remove_all(rand);
    REQUIRE(run(small_run("benchmark", bench)).code == kExitOk);
    REQUIRE(run(small_run("randomized", rand)).code == kExitOk);

    const Result one = run({"figures", "--run-dir", bench.string()});
    REQUIRE(one.code == kExitOk);
    const auto rows = lines(one.out);
    CHECK(rows[0] == "mode,episode,series,value");
    CHECK(rows.size() == 1 + 5 * 9);
    CHECK(one.out.find("benchmark,3,true_theta3,14.285714285714") != std::string::npos);
    CHECK(one.out.find("benchmark,5,x_hat,1.23255827") != std::string::npos);

    const fs::path out = workdir() / "compare.csv";
    const Result both = run({"figures", "--run-dir", bench.string(), "--compare", rand.string(), "--out", out.string()});
    REQUIRE(both.code == kExitOk);
    const std::string csv = slurp(out);
    CHECK(csv.find("\nbenchmark,1,theta1,") != std::string::npos);
    CHECK(csv.find("\nrandomized,1,theta1,") != std::string::npos);

    CHECK(run({"figures", "--run-dir", (workdir() / "absent").string()}).code == kExitConfig);
    const fs::path empty = workdir() / "fig_empty";
    fs::create_directories(empty);
    fs::copy_file(bench / "config.txt", empty / "config.txt", fs::copy_options::overwrite_existing);
    std::ofstream(empty / "episodes.csv") << kEpisodeHeader << '\n';
    CHECK(run({"figures", "--run-dir", empty.string()}).code == kExitConfig);
}

}  // TEST_SUITE
