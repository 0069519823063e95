// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ssc::cli {

/// Full command-line entry point (everything main() does except argv
/// unpacking), callable in-process so tests can assert stdout/stderr bytes
/// and exit codes directly.
///
/// Subcommands: aggregate, rectify, eval, dskd, gradcheck, demo.
/// Global flags: --config PATH, --dataset {semantickitti|semanticposs|
/// custom}, --seed N, --threads N, --epsilon F. SSC_THREADS serves as the
/// threads default; flags override config-file keys.
///
/// Exit codes: 0 success, 1 verification failure, 2 input/usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssc::cli
