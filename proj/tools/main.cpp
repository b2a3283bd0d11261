// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gvgeom::cli::run_cli(args, std::cout, std::cerr,
                              gvgeom::cli::environment_from_process());
}
