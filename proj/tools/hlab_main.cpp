// hlab: runs one experiment from a JSON config.
//
//   hlab spectral-scan --config scan.json --out runs/scan --threads 4
//   hlab validate --config scan.json
//
// Exit status: 0 when every acceptance check passes, 1 when a check fails,
// 2 for config or runtime errors.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hlab/error.hpp"
#include "hlab/experiments.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 1;
};

int run(const std::string& kind, const Flags& flags, bool seed_given) {
  const nlohmann::json config = hlab::load_config(flags.config);
  hlab::RunOptions options;
  options.out_dir = flags.out;
  options.threads = flags.threads;
  options.expected_kind = kind;
  if (seed_given) options.seed = flags.seed;
  const hlab::RunManifest m = hlab::run_experiment(config, options);
  for (const hlab::AcceptanceCheck& c : m.checks) {
    std::cout << (c.passed ? "ok   " : "FAIL ") << c.name << " = " << hlab::format_double(c.value)
              << " (threshold " << hlab::format_double(c.threshold) << ")\n";
  }
  std::cout << m.kind << ": " << (m.passed ? "passed" : "failed") << ", " << m.files.size()
            << " files, manifest " << m.config_hash << "\n";
  return m.passed ? 0 : 1;
}

int validate(const Flags& flags) {
  const nlohmann::json config = hlab::load_config(flags.config);
  const auto diags = hlab::validate_config(config);
  for (const auto& d : diags) std::cerr << d.field << ": " << d.message << "\n";
  if (diags.empty()) std::cout << "config is valid\n";
  return diags.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermite truncation experiments"};
  app.set_version_flag("--version", std::string(hlab::version_string()));
  app.require_subcommand(1);

  Flags flags;
  std::string chosen;
  std::vector<CLI::Option*> seed_opts;
  auto add_common = [&](CLI::App* sub, bool with_run_flags) {
    sub->add_option("--config", flags.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
    if (!with_run_flags) return;
    sub->add_option("--out", flags.out, "output directory (overrides output_dir)");
    seed_opts.push_back(sub->add_option("--seed", flags.seed, "random seed (overrides seed)"));
    sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
  };
  for (const char* kind : hlab::kExperimentKinds) {
    CLI::App* sub = app.add_subcommand(kind, std::string("run a ") + kind + " experiment");
    add_common(sub, true);
    sub->callback([&chosen, kind] { chosen = kind; });
  }
  CLI::App* val = app.add_subcommand("validate", "check a config without running it");
  add_common(val, false);
  val->callback([&chosen] { chosen = "validate"; });

  CLI11_PARSE(app, argc, argv);

  bool seed_given = false;
  for (const CLI::Option* o : seed_opts) seed_given = seed_given || o->count() > 0;
  try {
    if (chosen == "validate") return validate(flags);
    return run(chosen, flags, seed_given);
  } catch (const hlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
