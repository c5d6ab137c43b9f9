/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_CLI_HPP_
#define DEBLOATFS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "debloatfs/error.hpp"

namespace debloatfs::cli {

enum ExitCode : int {
    kExitOk            = 0,
    kExitVerifyFailed  = 1,
    kExitBadInput      = 2,
    kExitInvalidArgs   = 3,
    kExitStateMisuse   = 4,
};

int ExitCodeFor(ErrorCode code);

// "3 MB", "1.5 MB"; MB = 2^20 bytes.
std::string FormatMiB(uint64_t bytes);

/**
 * Runs one command line (args excludes the program name). Subcommands:
 * convert, profile, export, analyze, verify, materialize.
 */
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace debloatfs::cli

#endif
