#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "granreg/version.hpp"

#include "commands.hpp"

using namespace granreg;
using namespace granreg::tools;

int main(int argc, char** argv) {
  CLI::App app{"granreg: sparse log-linear cost models over hierarchical "
               "diagnosis codes, with granularity and ridge sweeps"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  GenOptions gen;
  auto* cmd_gen_app = app.add_subcommand("gen", "generate a synthetic corpus");
  cmd_gen_app->add_option("--config", gen.config_file, "flat key=value generator config")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_gen_app->add_option("--out-dir", gen.out_dir, "output directory")->required();

  SweepGranularityOptions sg;
  auto* sg_app = app.add_subcommand("sweep-granularity",
                                    "p, trace, mean eigenvalue, and R^2 per level");
  sg_app->add_option("--input", sg.input, "corpus file (.jsonl or .csv)")
      ->required()
      ->check(CLI::ExistingFile);
  sg_app->add_option("--out-dir", sg.out_dir, "output directory")->required();
  sg_app->add_option("--level", sg.levels, "levels to sweep (repeatable; default 2..7)");
  sg_app->add_option("--lambda", sg.lambda, "ridge penalty (0 = OLS)");
  sg_app->add_option("--train-ratio", sg.train_ratio, "train fraction");
  sg_app->add_option("--seed", sg.seed, "split seed");
  sg_app->add_option("--threads", sg.threads, "worker cap");
  sg_app->add_option("--tolerance", sg.tolerance, "solver relative-residual tolerance");

  SweepLambdaOptions sl;
  auto* sl_app = app.add_subcommand("sweep-lambda",
                                    "R^2 and rho_B over a (lambda, train-ratio) grid");
  sl_app->add_option("--input", sl.input, "corpus file")->required()->check(CLI::ExistingFile);
  sl_app->add_option("--out-dir", sl.out_dir, "output directory")->required();
  sl_app->add_option("--level", sl.level, "granularity level");
  sl_app->add_option("--lambda", sl.lambdas, "penalty grid (repeatable)");
  sl_app->add_flag("--lambda-per-n", sl.lambda_per_n,
                   "interpret --lambda values as lambda / n_train");
  sl_app->add_option("--train-ratio", sl.train_ratios, "train fractions (repeatable)");
  sl_app->add_option("--seed", sl.seed, "split seed");
  sl_app->add_option("--threads", sl.threads, "worker cap");
  sl_app->add_option("--tolerance", sl.tolerance, "solver relative-residual tolerance");

  ConsistencyOptions co;
  auto* co_app = app.add_subcommand("consistency",
                                    "resampled fit ensembles and the eta metric");
  co_app->add_option("--input", co.input, "corpus file")->required()->check(CLI::ExistingFile);
  co_app->add_option("--out-dir", co.out_dir, "output directory")->required();
  co_app->add_option("--level", co.level, "granularity level");
  co_app->add_option("--lambda", co.lambdas, "one ensemble per value (repeatable)");
  co_app->add_option("--replicates", co.replicates, "ensemble size N");
  co_app->add_option("--train-ratio", co.train_ratio, "train fraction");
  co_app->add_option("--seed", co.seed, "base seed");
  co_app->add_option("--threads", co.threads, "worker cap");
  co_app->add_option("--tolerance", co.tolerance, "solver relative-residual tolerance");
  co_app->add_flag("--include-intercept", co.include_intercept,
                   "include beta0 in the compared vectors");

  SpectrumOptions sp;
  auto* sp_app = app.add_subcommand("spectrum",
                                    "Hessian diagonal histogram, power-law fit, "
                                    "and verification reports");
  sp_app->add_option("--input", sp.input, "corpus file")->required()->check(CLI::ExistingFile);
  sp_app->add_option("--out-dir", sp.out_dir, "output directory")->required();
  sp_app->add_option("--level", sp.level, "granularity level");
  sp_app->add_option("--dense-cap", sp.dense_cap, "full-spectrum dimension cap");
  sp_app->add_option("--xmin", sp.x_min, "fixed power-law cutoff (default: KS scan)");
  sp_app->add_flag("!--linear-binning", sp.log_binning, "linear histogram bins");

  SummarizeOptions su;
  auto* su_app = app.add_subcommand("summarize", "per code-count cost summary");
  su_app->add_option("--input", su.input, "corpus file")->required()->check(CLI::ExistingFile);
  su_app->add_option("--out-dir", su.out_dir, "output directory")->required();
  su_app->add_option("--format", su.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_gen_app->parsed()) return cmd_gen(gen);
    if (sg_app->parsed()) return cmd_sweep_granularity(sg);
    if (sl_app->parsed()) return cmd_sweep_lambda(sl);
    if (co_app->parsed()) return cmd_consistency(co);
    if (sp_app->parsed()) return cmd_spectrum(sp);
    if (su_app->parsed()) return cmd_summarize(su);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
