#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tubular/scenario.hpp"

namespace tubular::cli {

struct RunOptions {
  std::string command;  // curve modes effective spectrum converge
  std::string out_override;
  std::optional<std::uint64_t> seed_override;
  int threads = 0;  // 0 keeps the library default
};

// Executes one pipeline stage and writes its tables plus metadata.json into
// the output directory. Returns the process exit status.
int run_scenario(const Scenario& s, const RunOptions& opt);

// Identity suite; needs no scenario. Writes checks.csv + metadata.json and
// returns nonzero when any check fails.
int run_checks(const std::string& out_dir);

}  // namespace tubular::cli
