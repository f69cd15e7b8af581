// SPDX-License-Identifier: Apache-2.0
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "acmv/app.hpp"
#include "acmv/errors.hpp"

namespace {

void add_common(CLI::App* cmd, acmv::app::Common& common, bool needs_config_file = false) {
  cmd->add_option("--config", common.config, "run config (JSON)")
      ->check(CLI::ExistingFile)
      ->required(needs_config_file);
  cmd->add_option("--seed", common.seed, "overrides the config seed");
  cmd->add_option("--out", common.out, "output directory")->required();
}

}  // namespace

int main(int argc, char** argv) {
  namespace app = acmv::app;
  app::tune_allocator();
  CLI::App cli{"Attention-based multi-view graph forecaster for gridded population"};
  cli.require_subcommand(1);

  app::SynthArgs synth;
  auto* synth_cmd = cli.add_subcommand("synth", "generate a synthetic city scenario");
  add_common(synth_cmd, synth.common);

  app::TrainArgs train;
  auto* train_cmd = cli.add_subcommand("train", "train a model on a scenario");
  add_common(train_cmd, train.common);
  train_cmd->add_option("--scenario", train.scenario, "scenario directory")->required();
  train_cmd->add_option("--variant", train.variant, "model variant")->capture_default_str();
  train_cmd->add_flag("--quiet", train.quiet, "no per-epoch progress");

  app::EvaluateArgs evaluate;
  auto* eval_cmd = cli.add_subcommand("evaluate", "test-split metrics for a checkpoint");
  add_common(eval_cmd, evaluate.common);
  eval_cmd->add_option("--checkpoint", evaluate.checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("--scenario", evaluate.scenario, "scenario directory")->required();

  app::CompareArgs compare;
  auto* cmp_cmd = cli.add_subcommand("compare", "train and score variants over seeds");
  add_common(cmp_cmd, compare.common);
  cmp_cmd->add_option("--scenario", compare.scenario, "scenario directory")->required();
  cmp_cmd->add_option("--variants", compare.variants,
                      "variant names or presets (table1, table2, all)")
      ->delimiter(',')
      ->capture_default_str();
  cmp_cmd->add_option("--seeds", compare.seeds, "explicit seed list")->delimiter(',');
  cmp_cmd->add_option("--runs", compare.runs, "seeds seed .. seed + runs - 1");
  cmp_cmd->add_option("--jobs", compare.jobs, "parallel runs")->capture_default_str();
  cmp_cmd->add_flag("--quiet", compare.quiet, "no per-run progress");

  app::ExportArgs exp;
  auto* exp_cmd = cli.add_subcommand("export-attention", "attention weights as CSV and GeoJSON");
  add_common(exp_cmd, exp.common);
  exp_cmd->add_option("--checkpoint", exp.checkpoint, "checkpoint file")->required();
  exp_cmd->add_option("--scenario", exp.scenario, "scenario directory")->required();
  exp_cmd->add_option("--from", exp.from, "first target interval (inclusive)");
  exp_cmd->add_option("--to", exp.to, "last target interval (exclusive)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) return app::cmd_synth(synth);
    if (train_cmd->parsed()) return app::cmd_train(train);
    if (eval_cmd->parsed()) return app::cmd_evaluate(evaluate);
    if (cmp_cmd->parsed()) return app::cmd_compare(compare);
    if (exp_cmd->parsed()) return app::cmd_export_attention(exp);
  } catch (const acmv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
