#pragma once

// `srl` subcommands: train, oracle, validate, figures.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "srl/trainer.hpp"

namespace srl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailedCheck = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Uniform grid written as "lo..hi:n", "lo..hi" (101 points) or a single number.
struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 1;

    [[nodiscard]] std::vector<double> points() const;
};

/// Throws std::invalid_argument on malformed input.
GridSpec parse_grid(const std::string& text);

/// Hex SHA-1 of "blob <size>\0<content>", the object id git assigns the content.
std::string git_blob_sha1(const std::string& content);

inline constexpr const char* kEpisodeHeader = "m,theta1,theta2,theta3,x_bar,linf_error,activation_time,total_cost";

void write_episode_csv(std::ostream& os, const std::vector<EpisodeRecord>& log);

/// Parses a log written by write_episode_csv; throws std::invalid_argument.
std::vector<EpisodeRecord> read_episode_csv(std::istream& is);

} // namespace srl::cli
