#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace fracmp::cli {

inline const std::vector<std::string> kSubcommands = {"assemble-check", "solve-mp", "solve-monotone",
                                                      "sweep", "verify"};

/// Runs one subcommand, writes its outputs under cfg.output_dir and prints
/// a summary plus one "FAIL <check>: <detail>" line per failed check to
/// `out`. Returns 0 iff every check passed, 1 otherwise.
int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& out);

/// Provenance lines "key = value" (config echo, grid, s, p, R, seed).
std::vector<std::string> provenance(const RunConfig& cfg, double R);

}  // namespace fracmp::cli
