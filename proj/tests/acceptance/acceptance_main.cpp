// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exits nonzero when any criterion fails.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "attrq/io.hpp"
#include "attrq/mdp.hpp"
#include "attrq/metrics.hpp"
#include "attrq/qnet.hpp"
#include "attrq/replay.hpp"
#include "attrq/rng.hpp"
#include "attrq/schema.hpp"
#include "attrq/trainer.hpp"

namespace fs = std::filesystem;
using namespace attrq;

namespace {

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

struct Failure {
  std::string what;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure{what};
}

void require_close(double got, double want, double tol, const std::string& what) {
  if (!(std::abs(got - want) <= tol))
    throw Failure{what + ": got " + std::to_string(got) + ", want " +
                  std::to_string(want)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<void()> body;
};

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

double batch_loss(const QNetwork& net, const Eigen::MatrixXd& states,
                  const std::vector<int>& actions, const Eigen::VectorXd& y) {
  double loss = 0.0;
  for (Eigen::Index j = 0; j < states.cols(); ++j) {
    const Eigen::Vector2d q = forward(net, states.col(j));
    const double d = q[actions[static_cast<std::size_t>(j)]] - y[j];
    loss += d * d;
  }
  return loss / static_cast<double>(states.cols());
}

// Central differences are only a valid oracle where the loss is locally
// smooth; a pre-activation within the perturbation's reach of zero puts a
// rectifier kink between the two evaluation points. Batches that close are
// rejected and redrawn.
bool near_relu_kink(const QNetwork& net, const Eigen::MatrixXd& states,
                    double margin) {
  const Eigen::MatrixXd z1 = (net.w1 * states).colwise() + net.b1;
  if (z1.cwiseAbs().minCoeff() < margin) return true;
  const Eigen::MatrixXd z2 = (net.w2 * z1.cwiseMax(0.0)).colwise() + net.b2;
  return z2.cwiseAbs().minCoeff() < margin;
}

double fd_max_rel_err(QNetwork net, const Eigen::MatrixXd& states,
                      const std::vector<int>& actions, const Eigen::VectorXd& y) {
  auto [loss, g] = td_loss_and_gradients(net, states, actions, y);
  (void)loss;
  const double h = 1e-5;
  double worst = 0.0;
  auto scan = [&](double* base, Eigen::Index count, const double* analytic) {
    for (Eigen::Index i = 0; i < count; ++i) {
      const double saved = base[i];
      base[i] = saved + h;
      const double up = batch_loss(net, states, actions, y);
      base[i] = saved - h;
      const double down = batch_loss(net, states, actions, y);
      base[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double a = analytic[i];
      const double rel =
          std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
      worst = std::max(worst, rel);
    }
  };
  scan(net.w1.data(), net.w1.size(), g.w1.data());
  scan(net.b1.data(), net.b1.size(), g.b1.data());
  scan(net.w2.data(), net.w2.size(), g.w2.data());
  scan(net.b2.data(), net.b2.size(), g.b2.data());
  scan(net.w3.data(), net.w3.size(), g.w3.data());
  scan(net.b3.data(), net.b3.size(), g.b3.data());
  return worst;
}

std::string checkpoint_bytes(const GroupAgent& agent) {
  CheckpointMeta meta;
  meta.group_index = static_cast<std::uint32_t>(agent.group_index);
  meta.train_step = agent.opt_steps;
  return save_checkpoint(agent.policy, agent.adam, meta);
}

// The enumerable instance: four distinct feature points, three attributes,
// one group, strong per-(feature, attribute) label majorities.
Dataset enumerable_instance(std::size_t n, std::uint64_t seed) {
  Dataset ds;
  ds.schema = AttributeSchema::from_names({"a0", "a1", "a2"});
  ds.feature_dim = 4;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.id = "e" + std::to_string(i);
    const int fidx = static_cast<int>(i % 4);
    s.features = Eigen::VectorXd::Zero(4);
    s.features[fidx] = 2.0;
    s.labels.resize(3);
    for (int a = 0; a < 3; ++a) {
      const double p = ((fidx + a) % 2 == 0) ? 0.85 : 0.15;
      s.labels[static_cast<std::size_t>(a)] = rng.uniform() < p ? 1 : 0;
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

LabelMatrix random_label_matrix(std::size_t n, std::size_t l, double rate, Rng& rng) {
  LabelMatrix m(n, l);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < l; ++j) m.set(i, j, rng.uniform() < rate ? 1 : 0);
  return m;
}

struct OracleResult {
  double ma, acc, prec, rec, f1;
};

OracleResult set_oracle(const LabelMatrix& truth, const LabelMatrix& pred) {
  const std::size_t n = truth.rows(), l = truth.cols();
  OracleResult r{};
  double ma = 0.0;
  for (std::size_t j = 0; j < l; ++j) {
    double tp = 0, p = 0, tn = 0, neg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (truth(i, j) == 1) {
        p += 1;
        if (pred(i, j) == 1) tp += 1;
      } else {
        neg += 1;
        if (pred(i, j) == 0) tn += 1;
      }
    }
    ma += (p > 0 ? tp / p : 0.0) + (neg > 0 ? tn / neg : 0.0);
  }
  r.ma = ma / (2.0 * static_cast<double>(l));
  double acc = 0, prec = 0, rec = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::size_t> y, f, inter, uni;
    for (std::size_t j = 0; j < l; ++j) {
      if (truth(i, j)) y.insert(j);
      if (pred(i, j)) f.insert(j);
    }
    std::set_intersection(y.begin(), y.end(), f.begin(), f.end(),
                          std::inserter(inter, inter.begin()));
    std::set_union(y.begin(), y.end(), f.begin(), f.end(),
                   std::inserter(uni, uni.begin()));
    acc += uni.empty() ? 1.0 : static_cast<double>(inter.size()) / uni.size();
    prec += f.empty() ? 0.0 : static_cast<double>(inter.size()) / f.size();
    rec += y.empty() ? 0.0 : static_cast<double>(inter.size()) / y.size();
  }
  r.acc = acc / static_cast<double>(n);
  r.prec = prec / static_cast<double>(n);
  r.rec = rec / static_cast<double>(n);
  r.f1 = (r.prec + r.rec) > 0 ? 2 * r.prec * r.rec / (r.prec + r.rec) : 0.0;
  return r;
}

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("attrq_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

#ifdef ATTRQ_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(ATTRQ_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
#endif

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  require(f.good(), "cannot open " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

void criterion_reward_tables() {
  // Basic reward, all four (a, l) cases.
  require(basic_reward(Action::present, 1) == 1.0, "basic (1,1)");
  require(basic_reward(Action::absent, 1) == -1.0, "basic (0,1)");
  require(basic_reward(Action::present, 0) == -1.0, "basic (1,0)");
  require(basic_reward(Action::absent, 0) == 1.0, "basic (0,0)");

  // Group-optimized reward, all four branches for each magnitude.
  for (double rho : {0.15, 0.25, 0.35, 0.45, 0.55}) {
    require(gor_reward(Action::present, 1, rho) == 1.0, "gor a=1 l=1");
    require(gor_reward(Action::absent, 1, rho) == -1.0, "gor a=0 l=1");
    require(gor_reward(Action::present, 0, rho) == -rho, "gor a=1 l=0");
    require(gor_reward(Action::absent, 0, rho) == rho, "gor a=0 l=0");
  }

  // All five magnitude intervals, boundaries inclusive below.
  require(rho_for(0.0) == 0.15, "interval [0,0.05) lower bound");
  require(rho_for(0.03) == 0.15, "interval [0,0.05)");
  require(rho_for(0.049999) == 0.15, "interval [0,0.05) upper edge");
  require(rho_for(0.05) == 0.25, "boundary 0.05 inclusive below");
  require(rho_for(0.15) == 0.25, "interval [0.05,0.25)");
  require(rho_for(0.25) == 0.35, "boundary 0.25");
  require(rho_for(0.3) == 0.35, "interval [0.25,0.35)");
  require(rho_for(0.35) == 0.45, "boundary 0.35");
  require(rho_for(0.4) == 0.45, "interval [0.35,0.45)");
  require(rho_for(0.45) == 0.55, "boundary 0.45");
  require(rho_for(0.999) == 0.55, "interval [0.45,1)");
}

void criterion_gradient_check() {
  Rng rng(20240915);
  int networks = 0;
  double worst = 0.0;
  while (networks < 20) {
    const int d_in = 2 + static_cast<int>(rng.below(63));  // up to 64
    const int h1 = 3 + static_cast<int>(rng.below(8));
    const int h2 = 2 + static_cast<int>(rng.below(6));
    const int batch = 1 + static_cast<int>(rng.below(8));
    auto net = init_network(d_in, rng.next_u64(), h1, h2);
    Eigen::MatrixXd states(d_in, batch);
    do {
      for (int r = 0; r < d_in; ++r)
        for (int c = 0; c < batch; ++c) states(r, c) = rng.normal();
    } while (near_relu_kink(net, states, 1e-3));
    std::vector<int> actions;
    Eigen::VectorXd y(batch);
    for (int j = 0; j < batch; ++j) {
      actions.push_back(static_cast<int>(rng.below(2)));
      y[j] = rng.normal();
    }
    const double err = fd_max_rel_err(net, states, actions, y);
    worst = std::max(worst, err);
    require(err <= 1e-4, "finite-difference mismatch " + std::to_string(err) +
                             " on network " + std::to_string(networks));
    ++networks;
  }
  std::printf("        gradient check: 20 networks, max relative error %.3g\n",
              worst);
}

void criterion_tabular_oracle() {
  Dataset ds = enumerable_instance(400, 31);
  auto groups = GroupConfig::single_group(ds.schema);
  TrainConfig cfg;  // paper defaults: 15 epochs, B=2000, C=100, batch 64
  cfg.seed = 7;
  auto result = train(ds, groups, cfg);

  // Exhaustive counting oracle: majority label per (feature point, attribute).
  int counts[4][3] = {};
  int totals[4] = {};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int fidx = static_cast<int>(i % 4);
    ++totals[fidx];
    for (int a = 0; a < 3; ++a)
      counts[fidx][a] += ds.samples[i].labels[static_cast<std::size_t>(a)];
  }

  const Eigen::MatrixXd cols = normalized_feature_columns(ds, result.norm);
  int agree = 0;
  for (int fidx = 0; fidx < 4; ++fidx) {
    const auto bits = predict_image(result.agents, cols.col(fidx), groups);
    for (int a = 0; a < 3; ++a) {
      const int majority = 2 * counts[fidx][a] >= totals[fidx] ? 1 : 0;
      if (bits[static_cast<std::size_t>(a)] == majority) ++agree;
    }
  }
  std::printf("        tabular oracle: %d of 12 (feature, attribute) pairs\n", agree);
  require(agree >= static_cast<int>(std::ceil(0.95 * 12)),
          "greedy policy matches the counting oracle on only " +
              std::to_string(agree) + " of 12 pairs");
}

void criterion_separable_synthetic() {
  SynthSpec spec;
  spec.feature_dim = 16;
  spec.attr_count = 8;
  spec.rates = {0.35, 0.5, 0.2, 0.6, 0.45, 0.3, 0.55, 0.25};
  spec.snr = std::numeric_limits<double>::infinity();  // zero noise
  spec.seed = 2027;
  auto [train_ds, test_ds] = generate_synthetic_pair(spec, 500, 200);

  auto groups = load_group_config(
      "g0: attr00, attr01, attr02, attr03\n"
      "g1: attr04, attr05, attr06, attr07\n",
      train_ds.schema);
  TrainConfig cfg;  // paper defaults, single-threaded
  cfg.seed = 5;
  auto result = train(train_ds, groups, cfg);

  const LabelMatrix pred =
      predict_dataset(result.agents, test_ds, result.norm, groups);
  const MetricsReport rep = compute_metrics(test_ds.labels(), pred);
  std::printf("        separable synthetic: test mA %.4f, Acc %.4f\n",
              rep.mean_acc, rep.example.acc);
  require(rep.mean_acc >= 0.95, "test mA " + std::to_string(rep.mean_acc) +
                                    " below 0.95");
  require(rep.example.acc >= 0.90, "test Acc " + std::to_string(rep.example.acc) +
                                       " below 0.90");
}

void criterion_gor_ablation() {
  SynthSpec spec;
  spec.feature_dim = 12;
  spec.attr_count = 4;
  spec.rates = {0.05, 0.35, 0.5, 0.25};  // one rare attribute at 5%
  spec.snr = 1.2;
  spec.seed = 97;
  auto [train_ds, test_ds] = generate_synthetic_pair(spec, 600, 300);
  auto groups = GroupConfig::single_group(train_ds.schema);

  TrainConfig basic_cfg;
  basic_cfg.seed = 3;
  TrainConfig gor_cfg = basic_cfg;  // matched seeds and hyperparameters
  gor_cfg.reward_mode = RewardMode::gor;

  auto basic_run = train(train_ds, groups, basic_cfg);
  auto gor_run = train(train_ds, groups, gor_cfg);
  require(gor_run.agents[0].stats.has_value(), "gor stats missing");

  auto eval = [&](const TrainResult& r) {
    const LabelMatrix pred = predict_dataset(r.agents, test_ds, r.norm, groups);
    return compute_metrics(test_ds.labels(), pred);
  };
  const MetricsReport basic_rep = eval(basic_run);
  const MetricsReport gor_rep = eval(gor_run);

  auto recall_of = [](const MetricsReport& rep, int attr) {
    const auto& at = rep.per_attribute[static_cast<std::size_t>(attr)];
    return at.p == 0 ? 0.0 : static_cast<double>(at.tp) / static_cast<double>(at.p);
  };
  const double rec_basic = recall_of(basic_rep, 0);
  const double rec_gor = recall_of(gor_rep, 0);
  std::printf(
      "        gor ablation (rho %.2f): rare-attr recall %.4f -> %.4f, "
      "mA %.4f -> %.4f, Prec %.4f -> %.4f\n",
      gor_run.agents[0].rho, rec_basic, rec_gor, basic_rep.mean_acc,
      gor_rep.mean_acc, basic_rep.example.prec, gor_rep.example.prec);
  require(rec_gor > rec_basic,
          "gor recall on the rare attribute not strictly higher (" +
              std::to_string(rec_gor) + " vs " + std::to_string(rec_basic) + ")");
  require(gor_rep.mean_acc > basic_rep.mean_acc,
          "gor mA not higher (" + std::to_string(gor_rep.mean_acc) + " vs " +
              std::to_string(basic_rep.mean_acc) + ")");
}

void criterion_metrics_oracle() {
  Rng rng(314159);
  for (int trial = 0; trial < 100; ++trial) {
    const auto truth = random_label_matrix(20, 10, rng.uniform(0.1, 0.9), rng);
    const auto pred = random_label_matrix(20, 10, rng.uniform(0.1, 0.9), rng);
    const MetricsReport rep = compute_metrics(truth, pred);
    const OracleResult oracle = set_oracle(truth, pred);
    require_close(rep.mean_acc, oracle.ma, 1e-12, "mA vs oracle");
    require_close(rep.example.acc, oracle.acc, 1e-12, "Acc vs oracle");
    require_close(rep.example.prec, oracle.prec, 1e-12, "Prec vs oracle");
    require_close(rep.example.rec, oracle.rec, 1e-12, "Rec vs oracle");
    require_close(rep.example.f1, oracle.f1, 1e-12, "F1 vs oracle");
  }

  // Hand case: Y={1,2}, f={2,3} -> Acc exactly 1/3.
  LabelMatrix truth(1, 5), pred(1, 5);
  truth.set(0, 1, 1);
  truth.set(0, 2, 1);
  pred.set(0, 2, 1);
  pred.set(0, 3, 1);
  const auto em = example_metrics(truth, pred);
  require(em.acc == 1.0 / 3.0, "hand Acc case");
  require(em.prec == 0.5, "hand Prec case");
  require(em.rec == 0.5, "hand Rec case");
  require(em.f1 == 0.5, "hand F1 case");

  // Hand case: L=1, TP=1, P=2, TN=3, N=4 -> mA = 0.625 exactly.
  LabelMatrix t2(6, 1), p2(6, 1);
  t2.set(0, 0, 1);
  t2.set(1, 0, 1);
  p2.set(0, 0, 1);
  p2.set(2, 0, 1);
  require(mean_accuracy(t2, p2) == 0.625, "hand mA case");
}

void criterion_dqn_mechanics() {
  // Replay capacity and FIFO eviction: 2500 pushes into capacity 2000.
  ReplayMemory mem(2000);
  for (int i = 0; i < 2500; ++i) {
    Transition t;
    t.state = Eigen::VectorXd::Constant(1, static_cast<double>(i));
    t.reward = i;
    t.done = true;
    mem.push(std::move(t));
  }
  require(mem.size() == 2000, "replay size after overflow");
  require(mem.oldest(0).reward == 500.0, "FIFO eviction order");
  require(mem.oldest(1999).reward == 2499.0, "newest element");

  // Epsilon schedule endpoints, exactly 0.9 and 0.05.
  TrainConfig cfg;
  require(epsilon_at(0, 12345, cfg) == 0.9, "epsilon at step 0");
  require(epsilon_at(12345, 12345, cfg) == 0.05, "epsilon at final step");

  // TD target branches.
  require(td_target(1.0, true, std::nullopt, 0.9) == 1.0, "terminal target");
  Eigen::Vector2d qn(0.5, 0.3);
  require(td_target(-1.0, false, qn, 0.9) == -0.55, "bootstrap target");
  Eigen::Vector2d zeros(0.0, 0.0);
  require(td_target(0.25, false, zeros, 0.9) == 0.25, "zero bootstrap");

  // Target sync cadence at C=100: syncs == floor(opt_steps / 100).
  Dataset ds = enumerable_instance(40, 8);
  auto groups = GroupConfig::single_group(ds.schema);
  TrainConfig small;
  small.epochs = 3;
  small.hidden1 = 32;
  small.hidden2 = 16;
  small.seed = 9;
  auto result = train(ds, groups, small);
  const auto& agent = result.agents[0];
  require(agent.env_steps == 3LL * 40 * 3, "environment step accounting");
  require(agent.opt_steps == agent.env_steps - (small.batch_size - 1),
          "optimizer step accounting");
  require(agent.target_syncs == agent.opt_steps / small.target_update,
          "sync count == floor(n / C)");
}

void criterion_determinism_persistence() {
  SynthSpec spec;
  spec.feature_dim = 8;
  spec.attr_count = 4;
  spec.rates = {0.3, 0.5, 0.4, 0.2};
  spec.snr = 3.0;
  spec.seed = 404;
  auto [train_ds, test_ds] = generate_synthetic_pair(spec, 120, 40);
  auto groups = load_group_config("g0: attr00, attr01\ng1: attr02, attr03\n",
                                  train_ds.schema);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 2028;

  auto a = train(train_ds, groups, cfg);
  auto b = train(train_ds, groups, cfg);
  require(a.report.to_summary_text(cfg) == b.report.to_summary_text(cfg),
          "summaries differ between identical runs");
  for (std::size_t g = 0; g < a.agents.size(); ++g)
    require(checkpoint_bytes(a.agents[g]) == checkpoint_bytes(b.agents[g]),
            "checkpoints differ between identical runs");

  // Save -> load preserves forward outputs exactly.
  const std::string bytes = checkpoint_bytes(a.agents[0]);
  const Checkpoint ck = load_checkpoint(bytes);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd x(a.agents[0].policy.input_dim());
    for (Eigen::Index d = 0; d < x.size(); ++d) x[d] = rng.normal();
    const Eigen::Vector2d qa = forward(a.agents[0].policy, x);
    const Eigen::Vector2d qb = forward(ck.net, x);
    require(qa == qb, "forward outputs changed across save/load");
  }

  // Parallel groups equal the sequential run per group.
  TrainConfig par = cfg;
  par.parallel_groups = true;
  auto p = train(train_ds, groups, par);
  for (std::size_t g = 0; g < a.agents.size(); ++g)
    require(checkpoint_bytes(a.agents[g]) == checkpoint_bytes(p.agents[g]),
            "parallel-group checkpoint differs from sequential for group " +
                std::to_string(g));
  require(a.report.to_log_text() == p.report.to_log_text(),
          "parallel-group log differs from sequential");
}

void criterion_rho_sweep() {
  // Step-for-step: gor with rho forced to 1 equals basic reward training.
  SynthSpec spec;
  spec.feature_dim = 8;
  spec.attr_count = 3;
  spec.rates = {0.15, 0.4, 0.55};
  spec.snr = 2.0;
  spec.seed = 33;
  auto [train_ds, test_ds] = generate_synthetic_pair(spec, 150, 60);
  auto groups = GroupConfig::single_group(train_ds.schema);

  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 32;
  cfg.hidden1 = 64;
  cfg.hidden2 = 32;
  cfg.seed = 17;

  auto basic_run = train(train_ds, groups, cfg);
  TrainConfig forced = cfg;
  forced.reward_mode = RewardMode::gor;
  forced.rho_override = 1.0;
  auto forced_run = train(train_ds, groups, forced);
  require(basic_run.report.to_log_text() == forced_run.report.to_log_text(),
          "rho=1 gor log differs from basic");
  require(checkpoint_bytes(basic_run.agents[0]) ==
              checkpoint_bytes(forced_run.agents[0]),
          "rho=1 gor checkpoint differs from basic");

#ifdef ATTRQ_CLI_PATH
  // The command line harness: 20 rho values, Acc/F1/mA table.
  const fs::path d = scratch_dir() / "sweep";
  fs::create_directories(d);
  save_dataset(train_ds, d / "train.manifest");
  save_dataset(test_ds, d / "test.manifest");
  {
    std::ofstream g(d / "groups.txt");
    g << groups.to_text(train_ds.schema);
  }
  const std::string common_args =
      " --dataset " + (d / "train.manifest").string() + " --groups " +
      (d / "groups.txt").string() +
      " --epochs 3 --batch 32 --hidden1 64 --hidden2 32 --seed 17";
  require(run_cli("sweep-rho --rho 0.05:1.0:0.05" + common_args + " --test " +
                  (d / "test.manifest").string() + " --out " +
                  (d / "table.txt").string()) == 0,
          "sweep-rho run failed");

  // 20 rows with rho from 0.05 to 1.00.
  const std::string table = slurp(d / "table.txt");
  std::istringstream in(table);
  std::string line;
  std::getline(in, line);
  require(line == "attrq_rho_sweep_v1", "table magic");
  std::getline(in, line);
  require(line == "columns: rho acc f1 mA", "table columns");
  int rows = 0;
  std::string row_rho_1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    if (line.rfind("1 ", 0) == 0) row_rho_1 = line;
  }
  require(rows == 20, "expected 20 sweep rows, got " + std::to_string(rows));
  require(!row_rho_1.empty(), "rho=1 row missing");

  // The rho=1.0 row reproduces the basic-reward evaluation exactly.
  const LabelMatrix pred =
      predict_dataset(basic_run.agents, test_ds, basic_run.norm, groups);
  const MetricsReport rep = compute_metrics(test_ds.labels(), pred);
  std::istringstream row(row_rho_1);
  double rho_v, acc_v, f1_v, ma_v;
  row >> rho_v >> acc_v >> f1_v >> ma_v;
  require(rho_v == 1.0, "rho column");
  require(acc_v == rep.example.acc, "sweep Acc at rho=1 differs from basic");
  require(f1_v == rep.example.f1, "sweep F1 at rho=1 differs from basic");
  require(ma_v == rep.mean_acc, "sweep mA at rho=1 differs from basic");
#else
  require(false, "acceptance built without the command line tool");
#endif
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "exact reward tables (basic, gor, rho intervals)", 1.0,
       criterion_reward_tables},
      {2, "gradient check vs central finite differences", 30.0,
       criterion_gradient_check},
      {3, "tabular-oracle equivalence on an enumerable instance", 120.0,
       criterion_tabular_oracle},
      {4, "separable-synthetic learning (mA >= 0.95, Acc >= 0.90)", 300.0,
       criterion_separable_synthetic},
      {5, "gor ablation direction on an imbalanced set", 600.0,
       criterion_gor_ablation},
      {6, "metrics vs brute-force set-arithmetic oracle", 5.0,
       criterion_metrics_oracle},
      {7, "dqn mechanics: replay, sync cadence, epsilon, td target", 10.0,
       criterion_dqn_mechanics},
      {8, "determinism, persistence, parallel/sequential equality", 300.0,
       criterion_determinism_persistence},
      {9, "rho sweep harness and rho=1 equivalence with basic", 1200.0,
       criterion_rho_sweep},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string note;
    bool ok = true;
    try {
      c.body();
    } catch (const Failure& f) {
      ok = false;
      note = f.what;
    } catch (const std::exception& e) {
      ok = false;
      note = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (ok && seconds > c.budget_seconds) {
      ok = false;
      note = "exceeded time budget of " + std::to_string(c.budget_seconds) + " s";
    }
    std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL",
                c.id, c.name, seconds, note.empty() ? "" : " - ",
                note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }

  std::error_code ec;
  fs::remove_all(scratch_dir(), ec);

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
