#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "tubular/errors.hpp"
#include "tubular/run.hpp"
#include "tubular/scenario.hpp"

namespace {

struct SubArgs {
  std::string scenario;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
  CLI::Option* seed_opt = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"effective Hamiltonians for quantum systems confined to curves and surfaces"};
  app.require_subcommand(1);

  const struct {
    const char* name;
    const char* help;
    bool needs_scenario;
  } defs[] = {
      {"curve", "sample the curve, its bending and its frame twist", true},
      {"modes", "transverse cross-section modes and energies", true},
      {"effective", "assembled effective potential and gauge field", true},
      {"spectrum", "eigenvalues of the effective operator", true},
      {"converge", "width study against the two-dimensional strip", true},
      {"check", "run the identity suite", false},
  };

  std::map<std::string, SubArgs> args;
  for (const auto& d : defs) {
    CLI::App* sub = app.add_subcommand(d.name, d.help);
    SubArgs& a = args[d.name];
    if (d.needs_scenario)
      sub->add_option("--scenario", a.scenario, "scenario file (JSON)")->required();
    sub->add_option("--out", a.out, "output directory (overrides the scenario)");
    a.seed_opt = sub->add_option("--seed", a.seed, "solver seed (overrides the scenario)");
    sub->add_option("--threads", a.threads, "internal thread count");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  const SubArgs& a = args[cmd];
  try {
    if (cmd == "check") return tubular::cli::run_checks(a.out.empty() ? "out" : a.out);
    tubular::cli::Scenario s = tubular::cli::parse_scenario(a.scenario);
    tubular::cli::RunOptions opt;
    opt.command = cmd;
    opt.out_override = a.out;
    if (a.seed_opt->count() > 0) opt.seed_override = a.seed;
    opt.threads = a.threads;
    return tubular::cli::run_scenario(s, opt);
  } catch (const tubular::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
