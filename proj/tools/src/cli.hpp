// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "report.hpp"

namespace compoly::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags or inputs; maps to kExitUsage.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string subcommand;
  std::optional<int> alpha;            // build
  std::vector<int> alphas;             // net-compare
  std::optional<double> epsilon;
  std::vector<int> degrees;
  double B = 50.0;
  std::optional<unsigned> precision_bits;
  std::optional<std::size_t> grid;     // build: certification points; regress: grid density
  std::uint64_t seed = 1;
  std::size_t batch = 100;
  std::string model;
  std::string out;
  Format format = Format::kText;
};

/// Degrees used by `regress` when none are given: 10, 20, ..., 200.
std::vector<int> default_regress_degrees();

/// `dump` receives the coefficient dump.
Report cmd_build(const RunConfig& cfg, std::ostream& dump);
Report cmd_regress(const RunConfig& cfg);
Report cmd_costs(const RunConfig& cfg);
Report cmd_net_compare(const RunConfig& cfg);

/// Full command line without the program name. Returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace compoly::cli
