#pragma once

// Oracle-agreement suite behind the `selftest` subcommand.

#include <vector>

#include "qprobe/figures.hpp"

namespace qprobe {

/// Each engine against an independent reference; a few seconds in total.
std::vector<CheckResult> run_selftest(int workers = 1);

}  // namespace qprobe
