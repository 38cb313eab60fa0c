// attrq: multi-label attribute recognition trained as a Markov decision
// process with deep Q-learning. Subcommands: synth, train, eval, metrics,
// sweep-rho. Exit codes: 0 success, 2 validation error, 3 runtime error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "attrq/errors.hpp"
#include "attrq/io.hpp"
#include "attrq/metrics.hpp"
#include "attrq/qnet.hpp"
#include "attrq/schema.hpp"
#include "attrq/trainer.hpp"

namespace fs = std::filesystem;
using namespace attrq;

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_file(const fs::path& p, const std::string& what) {
  std::ifstream f(p);
  if (!f) throw IoError(what + ": cannot open '" + p.string() + "'");
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return text;
}

void write_file(const fs::path& p, const std::string& text, const std::string& what) {
  std::ofstream f(p, std::ios::trunc);
  if (!f) throw IoError(what + ": cannot open '" + p.string() + "' for writing");
  f << text;
  if (!f) throw IoError(what + ": write to '" + p.string() + "' failed");
}

fs::path group_ckpt_path(const fs::path& dir, std::size_t g) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "group_%03zu.ckpt", g);
  return dir / buf;
}

struct TrainFlags {
  std::string dataset;
  std::string groups;
  std::string reward = "basic";
  TrainConfig cfg;
  double rho = 0.0;
  CLI::Option* rho_opt = nullptr;
  bool parallel = false;

  void add_to(CLI::App* cmd, bool with_reward = true) {
    cmd->add_option("--dataset", dataset, "training dataset manifest")->required();
    cmd->add_option("--groups", groups, "group config file")->required();
    if (with_reward)
      cmd->add_option("--reward", reward, "reward mode: basic or gor")
          ->check(CLI::IsMember({"basic", "gor"}));
    cmd->add_option("--epochs", cfg.epochs, "training epochs");
    cmd->add_option("--batch", cfg.batch_size, "minibatch size");
    cmd->add_option("--gamma", cfg.gamma, "discount factor");
    cmd->add_option("--eps-start", cfg.eps_start, "initial exploration probability");
    cmd->add_option("--eps-end", cfg.eps_end, "final exploration probability");
    cmd->add_option("--replay", cfg.replay_capacity, "replay memory capacity");
    cmd->add_option("--target-update", cfg.target_update,
                    "target sync period in optimizer steps");
    cmd->add_option("--lr", cfg.learning_rate, "Adam learning rate");
    cmd->add_option("--seed", cfg.seed, "master seed");
    cmd->add_option("--hidden1", cfg.hidden1, "first hidden layer width");
    cmd->add_option("--hidden2", cfg.hidden2, "second hidden layer width");
    if (with_reward)
      rho_opt = cmd->add_option("--rho", rho,
                                "force one reward magnitude for every group");
    cmd->add_flag("--parallel", parallel, "train groups on parallel threads");
  }

  TrainConfig to_config() const {
    TrainConfig c = cfg;
    c.reward_mode = reward_mode_from(reward);
    if (rho_opt && rho_opt->count() > 0) c.rho_override = rho;
    c.parallel_groups = parallel;
    c.validate();
    return c;
  }
};

void write_checkpoint_dir(const fs::path& dir, const Dataset& ds,
                          const GroupConfig& groups, const TrainConfig& cfg,
                          const TrainResult& result) {
  fs::create_directories(dir);
  write_file(dir / "groups.txt", groups.to_text(ds.schema), "checkpoint dir");
  save_norm_stats(result.norm, dir / "norm.txt");
  for (std::size_t g = 0; g < result.agents.size(); ++g) {
    const GroupAgent& agent = result.agents[g];
    CheckpointMeta meta;
    meta.feature_dim = static_cast<std::uint32_t>(ds.feature_dim);
    meta.attr_count = static_cast<std::uint32_t>(ds.schema.count());
    meta.group_index = static_cast<std::uint32_t>(agent.group_index);
    meta.schema_hash = ds.schema.hash();
    meta.train_step = agent.opt_steps;
    save_checkpoint(group_ckpt_path(dir, g), agent.policy, agent.adam, meta);
  }
  write_file(dir / "train_log.txt", result.report.to_log_text(), "checkpoint dir");
  write_file(dir / "train_summary.txt", result.report.to_summary_text(cfg),
             "checkpoint dir");
}

struct LoadedRun {
  GroupConfig groups;
  NormStats norm;
  std::vector<GroupAgent> agents;
};

LoadedRun load_checkpoint_dir(const fs::path& dir, const Dataset& ds) {
  LoadedRun run{GroupConfig::single_group(ds.schema), {}, {}};
  run.groups = load_group_config(read_file(dir / "groups.txt", "checkpoint dir"),
                                 ds.schema);
  run.norm = load_norm_stats(dir / "norm.txt");
  if (run.norm.mean.size() != ds.feature_dim)
    throw ValidationError("checkpoint dir: normalization statistics were fit on " +
                          std::to_string(run.norm.mean.size()) +
                          "-dimensional features but the dataset has " +
                          std::to_string(ds.feature_dim));
  for (std::size_t g = 0; g < run.groups.group_count(); ++g) {
    const fs::path p = group_ckpt_path(dir, g);
    if (!fs::exists(p))
      throw ValidationError("checkpoint dir: missing agent checkpoint for group " +
                            std::to_string(g) + " ('" + p.string() + "')");
    Checkpoint ck = load_checkpoint(p);
    if (static_cast<int>(ck.meta.feature_dim) != ds.feature_dim ||
        static_cast<int>(ck.meta.attr_count) != ds.schema.count())
      throw ValidationError("checkpoint dir: group " + std::to_string(g) +
                            " was trained for F=" + std::to_string(ck.meta.feature_dim) +
                            ", L=" + std::to_string(ck.meta.attr_count) +
                            " but the dataset has F=" + std::to_string(ds.feature_dim) +
                            ", L=" + std::to_string(ds.schema.count()));
    if (ck.meta.schema_hash != ds.schema.hash())
      throw ValidationError("checkpoint dir: group " + std::to_string(g) +
                            " was trained on a different attribute schema");
    GroupAgent agent = GroupAgent::for_inference(static_cast<int>(g),
                                                 std::move(ck.net));
    agent.adam = std::move(ck.opt);
    run.agents.push_back(std::move(agent));
  }
  return run;
}

int run_synth(const std::string& spec_path, const std::string& out_dir,
              const std::string& prefix) {
  const SynthPairSpec sp = load_synth_spec(spec_path);
  fs::create_directories(out_dir);
  auto [train_ds, test_ds] = generate_synthetic_pair(sp.base, sp.n_train, sp.n_test);
  const fs::path train_manifest = fs::path(out_dir) / (prefix + "train.manifest");
  save_dataset(train_ds, train_manifest);
  std::cout << "wrote " << train_manifest.string() << " (" << train_ds.size()
            << " samples)\n";
  if (sp.n_test > 0) {
    const fs::path test_manifest = fs::path(out_dir) / (prefix + "test.manifest");
    save_dataset(test_ds, test_manifest);
    std::cout << "wrote " << test_manifest.string() << " (" << test_ds.size()
              << " samples)\n";
  }
  return 0;
}

int run_train(const TrainFlags& flags, const std::string& out_dir) {
  const TrainConfig cfg = flags.to_config();
  const Dataset ds = load_dataset(flags.dataset);
  const GroupConfig groups =
      load_group_config(read_file(flags.groups, "group config"), ds.schema);
  TrainResult result = train(ds, groups, cfg);
  write_checkpoint_dir(out_dir, ds, groups, cfg, result);

  std::cout << result.report.to_log_text();
  std::cout << "train split metrics:\n"
            << format_metrics(result.report.train_metrics, &ds.schema);
  std::cout << "checkpoints written to " << out_dir << "\n";
  return 0;
}

int run_eval(const std::string& ckpt_dir, const std::string& dataset_path,
             const std::string& report_path, const std::string& pred_out) {
  const Dataset ds = load_dataset(dataset_path);
  LoadedRun run = load_checkpoint_dir(ckpt_dir, ds);
  const LabelMatrix pred = predict_dataset(run.agents, ds, run.norm, run.groups);
  const MetricsReport rep = compute_metrics(ds.labels(), pred);

  std::string report = format_metrics(rep, &ds.schema);
  report += "\n";
  report += metrics_summary_text(rep);
  write_file(report_path, report, "eval report");
  if (!pred_out.empty()) export_predictions(ds, pred, pred_out);

  std::cout << format_metrics(rep, &ds.schema);
  std::cout << "report written to " << report_path << "\n";
  return 0;
}

int run_metrics(const std::string& truth_path, const std::string& pred_path,
                const std::string& report_path) {
  const Dataset ds = load_dataset(truth_path);
  const Predictions pred = load_predictions(pred_path);
  if (pred.labels.rows() != ds.size())
    throw ValidationError("metrics: prediction file has " +
                          std::to_string(pred.labels.rows()) +
                          " rows but the dataset has " + std::to_string(ds.size()));
  if (static_cast<int>(pred.labels.cols()) != ds.schema.count())
    throw ValidationError("metrics: prediction file has " +
                          std::to_string(pred.labels.cols()) +
                          " attributes but the schema has " +
                          std::to_string(ds.schema.count()));
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (pred.ids[i] != ds.samples[i].id)
      throw ValidationError("metrics: id mismatch at row " + std::to_string(i + 1) +
                            ": dataset '" + ds.samples[i].id + "' vs prediction '" +
                            pred.ids[i] + "'");

  const MetricsReport rep = compute_metrics(ds.labels(), pred.labels);
  std::cout << format_metrics(rep, &ds.schema);
  if (!report_path.empty()) {
    std::string report = format_metrics(rep, &ds.schema);
    report += "\n";
    report += metrics_summary_text(rep);
    write_file(report_path, report, "metrics report");
  }
  return 0;
}

std::vector<double> parse_rho_range(const std::string& text) {
  // lo:hi:step, e.g. 0.05:1.0:0.05.
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ValidationError("rho range must be lo:hi:step, got '" + text + "'");
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("rho range: cannot parse '" + s + "'");
    }
  };
  const double lo = num(text.substr(0, c1));
  const double hi = num(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = num(text.substr(c2 + 1));
  if (!(step > 0.0) || !(hi >= lo))
    throw ValidationError("rho range: need hi >= lo and step > 0");
  std::vector<double> values;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
  for (int i = 0; i < count; ++i) {
    // Snap to the grid so 0.05 * k prints cleanly.
    double v = lo + step * i;
    v = std::round(v * 1e9) / 1e9;
    if (v > 1.0 || v <= 0.0)
      throw ValidationError("rho range: value " + fmt_double(v) + " outside (0, 1]");
    values.push_back(v);
  }
  return values;
}

int run_sweep(const TrainFlags& flags, const std::string& rho_range,
              const std::string& test_path, const std::string& out_path) {
  const std::vector<double> rhos = parse_rho_range(rho_range);
  const Dataset ds = load_dataset(flags.dataset);
  const GroupConfig groups =
      load_group_config(read_file(flags.groups, "group config"), ds.schema);
  const Dataset eval_ds = test_path.empty() ? ds : load_dataset(test_path);

  std::string table = "attrq_rho_sweep_v1\n";
  table += "columns: rho acc f1 mA\n";
  std::printf("%8s %10s %10s %10s\n", "rho", "Acc", "F1", "mA");
  for (double rho : rhos) {
    TrainConfig cfg = flags.to_config();
    cfg.reward_mode = RewardMode::gor;
    cfg.rho_override = rho;
    TrainResult result = train(ds, groups, cfg);
    const LabelMatrix pred =
        predict_dataset(result.agents, eval_ds, result.norm, groups);
    const MetricsReport rep = compute_metrics(eval_ds.labels(), pred);
    table += fmt_double(rho) + " " + fmt_double(rep.example.acc) + " " +
             fmt_double(rep.example.f1) + " " + fmt_double(rep.mean_acc) + "\n";
    std::printf("%8.2f %10.6f %10.6f %10.6f\n", rho, rep.example.acc,
                rep.example.f1, rep.mean_acc);
  }
  write_file(out_path, table, "rho sweep");
  std::cout << "table written to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-label attribute recognition via deep Q-learning"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset pair");
  std::string synth_spec, synth_out, synth_prefix;
  synth->add_option("--spec", synth_spec, "synth spec document")->required();
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--prefix", synth_prefix, "manifest filename prefix");

  // train
  auto* train_cmd = app.add_subcommand("train", "train per-group Q-learning agents");
  TrainFlags train_flags;
  std::string train_out;
  train_flags.add_to(train_cmd);
  train_cmd->add_option("--out", train_out, "checkpoint output directory")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate checkpoints on a dataset");
  std::string eval_ckpt, eval_dataset, eval_report, eval_pred;
  eval_cmd->add_option("--ckpt-dir", eval_ckpt, "checkpoint directory")->required();
  eval_cmd->add_option("--dataset", eval_dataset, "dataset manifest")->required();
  eval_cmd->add_option("--report", eval_report, "report output path")->required();
  eval_cmd->add_option("--pred-out", eval_pred, "also export predictions here");

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "score predictions against truth");
  std::string m_truth, m_pred, m_report;
  metrics_cmd->add_option("--truth", m_truth, "dataset manifest with ground truth")
      ->required();
  metrics_cmd->add_option("--pred", m_pred, "prediction file")->required();
  metrics_cmd->add_option("--report", m_report, "report output path");

  // sweep-rho
  auto* sweep_cmd = app.add_subcommand(
      "sweep-rho", "train with forced reward magnitudes over a rho grid");
  TrainFlags sweep_flags;
  std::string sweep_range, sweep_test, sweep_out;
  sweep_cmd->add_option("--rho", sweep_range, "grid as lo:hi:step")->required();
  sweep_flags.add_to(sweep_cmd, /*with_reward=*/false);
  sweep_cmd->add_option("--test", sweep_test, "evaluation dataset manifest");
  sweep_cmd->add_option("--out", sweep_out, "table output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) return run_synth(synth_spec, synth_out, synth_prefix);
    if (*train_cmd) return run_train(train_flags, train_out);
    if (*eval_cmd) return run_eval(eval_ckpt, eval_dataset, eval_report, eval_pred);
    if (*metrics_cmd) return run_metrics(m_truth, m_pred, m_report);
    if (*sweep_cmd) return run_sweep(sweep_flags, sweep_range, sweep_test, sweep_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
