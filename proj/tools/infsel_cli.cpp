// infsel command line: converge | audit | couple | enumerate, driven by a
// JSON config. Links the public C API only.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "infsel/infsel.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int threads = 0;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment JSON config")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_path, "output path (overrides the config)");
  cmd->add_option("--seed", opts.seed, "seed (overrides the config)")
      ->each([&opts](const std::string&) { opts.has_seed = true; });
  cmd->add_option("--threads", opts.threads, "worker threads (0 = config / hardware)");
  cmd->add_flag("--quiet", opts.quiet, "suppress the summary on stdout");
}

int run(const std::string& mode, const CommonOpts& opts) {
  char* summary = nullptr;
  const infsel_status st = infsel_run_config_file(
      opts.config_path.c_str(), mode.c_str(), opts.out_path.empty() ? nullptr : opts.out_path.c_str(),
      opts.has_seed ? 1 : 0, opts.seed, opts.threads, &summary);
  if (st != INFSEL_OK) {
    std::fprintf(stderr, "error: %s\n", infsel_last_error());
    return st == INFSEL_ERR_CONFIG || st == INFSEL_ERR_INVALID_ARGUMENT ? 2 : 3;
  }
  if (!opts.quiet && summary) std::printf("%s\n", summary);
  infsel_string_free(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"informative-selection simulation laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", infsel_version());

  CommonOpts converge_opts, audit_opts, couple_opts, enumerate_opts;
  add_common(app.add_subcommand("converge", "replicated sup-distance experiment across an N grid"),
             converge_opts);
  add_common(app.add_subcommand("audit", "automated checkers for the sufficient conditions"),
             audit_opts);
  add_common(app.add_subcommand("couple", "dump the embedding partition for an enumerable design"),
             couple_opts);
  add_common(app.add_subcommand("enumerate", "dump the exact design law on a drawn population"),
             enumerate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (app.got_subcommand("converge")) return run("converge", converge_opts);
  if (app.got_subcommand("audit")) return run("audit", audit_opts);
  if (app.got_subcommand("couple")) return run("couple", couple_opts);
  if (app.got_subcommand("enumerate")) return run("enumerate", enumerate_opts);
  return 2;
}
