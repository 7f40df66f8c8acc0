// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "ffsing/cli/commands.hpp"

int main(int argc, char** argv) { return ffsing::run_cli(argc, argv, std::cout, std::cerr); }
