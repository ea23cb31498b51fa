#include <omp.h>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "shearlab/experiments.hpp"
#include "shearlab/run_config.hpp"

namespace fs = std::filesystem;
using namespace shearlab;

namespace {

struct Common {
  std::string config;
  std::string out;
  long long seed = -1;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--seed", c.seed, "Override the configured seed");
  cmd->add_option("--threads", c.threads, "OpenMP thread count (0 keeps the default)")->check(CLI::NonNegativeNumber);
}

RunConfig resolve(const std::string& verb, const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig::preset(verb) : RunConfig::load(c.config);
  if (cfg.experiment != verb)
    throw std::invalid_argument("config declares experiment '" + cfg.experiment + "' but the verb is '" + verb + "'");
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.threads > 0) cfg.threads = c.threads;
  validate(cfg);
  return cfg;
}

void print_summary(const fs::path& out) {
  std::printf("summary: %s\n", (out / "summary.json").string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shear-flow mixing and chemotaxis suppression experiments"};
  app.require_subcommand(1);
  const char* verbs[] = {"ed-sweep", "toy-model", "suppression", "contraction", "gliding", "checks"};
  Common common[6];
  CLI::App* cmds[6];
  for (int i = 0; i < 6; ++i) {
    cmds[i] = app.add_subcommand(verbs[i], std::string("Run the ") + verbs[i] + " experiment");
    add_common(cmds[i], common[i]);
  }
  std::string sidecar;
  Common resume_opts;
  CLI::App* resume = app.add_subcommand("resume", "Continue a suppression run from a checkpoint sidecar");
  resume->add_option("checkpoint", sidecar, "Checkpoint sidecar (.json)")->required()->check(CLI::ExistingFile);
  resume->add_option("--out", resume_opts.out, "Output directory");
  resume->add_option("--threads", resume_opts.threads, "OpenMP thread count")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (resume->parsed()) {
      if (resume_opts.threads > 0) omp_set_num_threads(resume_opts.threads);
      const fs::path out = resume_opts.out.empty() ? fs::path("out") : fs::path(resume_opts.out);
      fs::create_directories(out);
      const SuppressionRun r = resume_suppression(sidecar, out);
      std::printf("resumed A=%g: t_end=%.6g survived=%d triggered=%d\n", r.A, r.t_end, r.survived,
                  r.verdict.triggered);
      return r.survived ? 0 : 1;
    }
    for (int i = 0; i < 6; ++i) {
      if (!cmds[i]->parsed()) continue;
      const RunConfig cfg = resolve(verbs[i], common[i]);
      if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
      const fs::path out(cfg.output_dir);
      const bool ok = run_experiment(cfg, out);
      print_summary(out);
      std::printf("%s: %s\n", verbs[i], ok ? "all assertions passed" : "assertion failures");
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
