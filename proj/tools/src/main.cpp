// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cli.hpp"

int main(int argc, char** argv) {
  // Reports own stdout; diagnostics go to stderr.
  spdlog::set_default_logger(spdlog::stderr_color_mt("compoly"));
  std::vector<std::string> args(argv + 1, argv + argc);
  return compoly::cli::run(args, std::cout, std::cerr);
}
