// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>

#include "ffsing/duration.hpp"

namespace ffsing {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// Human-readable alignment dump that is also a valid duration sidecar: one
// `#` comment per group (extent, phonemes, raw durations, r_c) followed by
// its integer durations.
std::string format_alignment(const DurationPlan& plan);

// Entry point of the `ffsing` tool. Subcommands: align, train, synth, eval,
// ablate, corpus. Returns the process exit code: 0 success, 2 user or input
// error, 3 runtime or numeric failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ffsing
