#include "attrq/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <thread>

#include "attrq/errors.hpp"
#include "attrq/mdp.hpp"

namespace attrq {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* reward_mode_name(RewardMode m) {
  return m == RewardMode::basic ? "basic" : "gor";
}

RewardMode reward_mode_from(const std::string& name) {
  if (name == "basic") return RewardMode::basic;
  if (name == "gor") return RewardMode::gor;
  throw ValidationError("reward mode must be 'basic' or 'gor', got '" + name + "'");
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ValidationError("train config: epochs must be >= 0");
  if (replay_capacity == 0)
    throw ValidationError("train config: replay capacity must be positive");
  if (target_update <= 0)
    throw ValidationError("train config: target update period must be positive");
  if (batch_size <= 0) throw ValidationError("train config: batch size must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw ValidationError("train config: gamma must lie in [0, 1]");
  if (!(eps_end >= 0.0 && eps_start <= 1.0 && eps_end <= eps_start))
    throw ValidationError("train config: need 0 <= eps_end <= eps_start <= 1");
  if (!(learning_rate > 0.0))
    throw ValidationError("train config: learning rate must be positive");
  if (rho_override && (!(*rho_override > 0.0) || *rho_override > 1.0))
    throw ValidationError("train config: rho override must lie in (0, 1]");
  if (hidden1 < 1 || hidden2 < 1)
    throw ValidationError("train config: hidden widths must be >= 1");
}

GroupAgent GroupAgent::for_inference(int group_index, QNetwork net) {
  GroupAgent a;
  a.group_index = group_index;
  a.target = net;
  a.policy = std::move(net);
  a.adam = AdamState::fresh(a.policy);
  return a;
}

double epsilon_at(std::int64_t global_step, std::int64_t total_steps,
                  const TrainConfig& cfg) {
  if (total_steps < 1)
    throw ValidationError("epsilon_at: total steps must be >= 1");
  // Endpoints are returned exactly; interpolation only strictly inside.
  if (global_step <= 0) return cfg.eps_start;
  if (global_step >= total_steps) return cfg.eps_end;
  const double frac =
      static_cast<double>(global_step) / static_cast<double>(total_steps);
  return cfg.eps_start + (cfg.eps_end - cfg.eps_start) * frac;
}

Action select_action(const QNetwork& net, const Eigen::VectorXd& state_vec,
                     double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw ValidationError("select_action: epsilon outside [0, 1]");
  if (rng.uniform() < epsilon) return static_cast<Action>(rng.coin());
  return greedy_action(net, state_vec);
}

Action greedy_action(const QNetwork& net, const Eigen::VectorXd& state_vec) {
  const Eigen::Vector2d q = forward(net, state_vec);
  return q[1] > q[0] ? Action::present : Action::absent;
}

double td_target(double reward, bool done,
                 const std::optional<Eigen::Vector2d>& target_q_next,
                 double gamma) {
  if (done != !target_q_next.has_value())
    throw ValidationError("td_target: next-state Q values must be present exactly "
                          "for non-terminal transitions");
  if (done) return reward;
  return reward + gamma * target_q_next->maxCoeff();
}

namespace {

struct GroupTrainOutput {
  GroupAgent agent;
  std::vector<EpochRecord> records;
};

/// Greedy bit accuracy of one agent over its group's columns.
double group_bit_accuracy(const GroupAgent& agent,
                          const Eigen::MatrixXd& feat_cols,
                          const LabelMatrix& labels,
                          const std::vector<int>& attrs, int attr_count) {
  const std::size_t n = labels.rows();
  const int t_len = static_cast<int>(attrs.size());
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    MdpState s = init_episode(feat_cols.col(static_cast<Eigen::Index>(i)),
                              agent.group_index, attrs, attr_count,
                              static_cast<int>(i));
    for (int t = 0; t < t_len; ++t) {
      const Action a = greedy_action(agent.policy, s.net_input());
      if (action_value(a) == labels(i, static_cast<std::size_t>(attrs[static_cast<std::size_t>(t)])))
        ++correct;
      StepOutcome out = transition(s, a, attrs, attr_count);
      if (out.done) break;
      s = std::move(*out.next_state);
    }
  }
  return static_cast<double>(correct) / (static_cast<double>(n) * t_len);
}

GroupTrainOutput train_one_group(const Eigen::MatrixXd& feat_cols,
                                 const LabelMatrix& labels,
                                 const AttributeGroup& group, int group_index,
                                 int attr_count, const TrainConfig& cfg) {
  const std::vector<int>& attrs = group.attributes;
  const int t_len = static_cast<int>(attrs.size());
  const std::size_t n = labels.rows();
  const int d_in = static_cast<int>(feat_cols.rows()) + 3 * attr_count;

  GroupTrainOutput out;
  GroupAgent& agent = out.agent;
  agent.group_index = group_index;
  agent.policy = init_network(d_in, derive_seed(cfg.seed, static_cast<std::uint64_t>(group_index), 0),
                              cfg.hidden1, cfg.hidden2);
  agent.target = sync_target(agent.policy);
  agent.adam = AdamState::fresh(agent.policy, cfg.learning_rate);
  agent.replay = ReplayMemory(cfg.replay_capacity);

  if (cfg.reward_mode == RewardMode::gor) {
    if (cfg.rho_override) {
      agent.rho = *cfg.rho_override;
    } else {
      try {
        agent.stats = compute_group_stats(labels, attrs);
      } catch (const ValidationError& e) {
        throw ValidationError("group '" + group.name + "': " + e.what() +
                              " (use a rho override or basic reward)");
      }
      agent.rho = agent.stats->rho;
    }
  }

  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(group_index), 1));
  const std::int64_t total_env_steps =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(cfg.epochs) *
                                    static_cast<std::int64_t>(n) * t_len);
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  // Reused minibatch buffers.
  Eigen::MatrixXd batch_states(d_in, cfg.batch_size);
  std::vector<int> batch_actions(batch);
  Eigen::VectorXd batch_targets(cfg.batch_size);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double reward_sum = 0.0;
    double loss_sum = 0.0;
    std::int64_t loss_count = 0;

    for (std::size_t img : order) {
      MdpState s = init_episode(feat_cols.col(static_cast<Eigen::Index>(img)),
                                group_index, attrs, attr_count,
                                static_cast<int>(img));
      for (int t = 0; t < t_len; ++t) {
        const double eps = epsilon_at(agent.env_steps, total_env_steps, cfg);
        Eigen::VectorXd state_vec = s.net_input();
        const Action a = select_action(agent.policy, state_vec, eps, rng);
        const int label =
            labels(img, static_cast<std::size_t>(attrs[static_cast<std::size_t>(t)]));
        const double r = cfg.reward_mode == RewardMode::gor
                             ? gor_reward(a, label, agent.rho)
                             : basic_reward(a, label);
        StepOutcome outcome = transition(s, a, attrs, attr_count);

        Transition tr;
        tr.state = std::move(state_vec);
        tr.action = a;
        tr.reward = r;
        tr.done = outcome.done;
        if (!outcome.done) tr.next_state = outcome.next_state->net_input();
        agent.replay.push(std::move(tr));
        ++agent.env_steps;
        reward_sum += r;

        if (agent.replay.size() >= batch) {
          const auto sampled = agent.replay.sample(batch, rng);

          // Target-network values for the non-terminal successors.
          std::vector<int> nt_slot(batch, -1);
          int nt_count = 0;
          for (std::size_t j = 0; j < batch; ++j)
            if (!sampled[j]->done) nt_slot[j] = nt_count++;
          Eigen::Matrix2Xd q_next(2, nt_count);
          if (nt_count > 0) {
            Eigen::MatrixXd next_states(d_in, nt_count);
            for (std::size_t j = 0; j < batch; ++j)
              if (nt_slot[j] >= 0)
                next_states.col(nt_slot[j]) = *sampled[j]->next_state;
            q_next = forward_batch(agent.target, next_states);
          }

          for (std::size_t j = 0; j < batch; ++j) {
            batch_states.col(static_cast<Eigen::Index>(j)) = sampled[j]->state;
            batch_actions[j] = action_value(sampled[j]->action);
            std::optional<Eigen::Vector2d> qn;
            if (nt_slot[j] >= 0) qn = q_next.col(nt_slot[j]);
            batch_targets[static_cast<Eigen::Index>(j)] =
                td_target(sampled[j]->reward, sampled[j]->done, qn, cfg.gamma);
          }

          auto [loss, grads] =
              td_loss_and_gradients(agent.policy, batch_states, batch_actions,
                                    batch_targets);
          adam_step(agent.policy, grads, agent.adam);
          ++agent.opt_steps;
          loss_sum += loss;
          ++loss_count;
          if (agent.opt_steps % cfg.target_update == 0) {
            agent.target = sync_target(agent.policy);
            ++agent.target_syncs;
          }
        }

        if (outcome.done) break;
        s = std::move(*outcome.next_state);
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.group = group_index;
    rec.mean_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    rec.mean_reward = reward_sum / (static_cast<double>(n) * t_len);
    rec.bit_accuracy = group_bit_accuracy(agent, feat_cols, labels, attrs, attr_count);
    rec.opt_steps = agent.opt_steps;
    out.records.push_back(rec);
  }
  return out;
}

}  // namespace

TrainResult train(const Dataset& dataset, const GroupConfig& groups,
                  const TrainConfig& cfg) {
  cfg.validate();
  dataset.validate();
  if (groups.attribute_count() != dataset.schema.count())
    throw ValidationError("train: group config covers " +
                          std::to_string(groups.attribute_count()) +
                          " attributes but the dataset schema has " +
                          std::to_string(dataset.schema.count()));

  TrainResult result;
  result.norm = dataset.norm ? *dataset.norm : compute_norm_stats(dataset);
  const Eigen::MatrixXd feat_cols = normalized_feature_columns(dataset, result.norm);
  const LabelMatrix labels = dataset.labels();
  const int attr_count = dataset.schema.count();
  const std::size_t g_count = groups.group_count();

  std::vector<GroupTrainOutput> outputs(g_count);
  if (cfg.parallel_groups && g_count > 1) {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(g_count);
    workers.reserve(g_count);
    for (std::size_t g = 0; g < g_count; ++g) {
      workers.emplace_back([&, g]() {
        try {
          outputs[g] = train_one_group(feat_cols, labels, groups.group(g),
                                       static_cast<int>(g), attr_count, cfg);
        } catch (...) {
          errors[g] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (std::size_t g = 0; g < g_count; ++g)
      outputs[g] = train_one_group(feat_cols, labels, groups.group(g),
                                   static_cast<int>(g), attr_count, cfg);
  }

  for (auto& o : outputs) {
    result.report.total_env_steps += o.agent.env_steps;
    result.report.total_opt_steps += o.agent.opt_steps;
    result.report.total_target_syncs += o.agent.target_syncs;
    for (const auto& r : o.records) result.report.records.push_back(r);
    result.agents.push_back(std::move(o.agent));
  }
  std::sort(result.report.records.begin(), result.report.records.end(),
            [](const EpochRecord& a, const EpochRecord& b) {
              return a.group != b.group ? a.group < b.group : a.epoch < b.epoch;
            });

  if (cfg.epochs > 0) {
    const LabelMatrix pred = predict_dataset(result.agents, dataset, result.norm, groups);
    result.report.train_metrics = compute_metrics(labels, pred);
  }
  return result;
}

std::vector<std::uint8_t> predict_image(const std::vector<GroupAgent>& agents,
                                        const Eigen::VectorXd& features_norm,
                                        const GroupConfig& groups) {
  if (agents.size() != groups.group_count())
    throw ValidationError("predict: " + std::to_string(agents.size()) +
                          " agents for " + std::to_string(groups.group_count()) +
                          " groups");
  const int attr_count = groups.attribute_count();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(attr_count), 0);
  for (std::size_t g = 0; g < groups.group_count(); ++g) {
    if (agents[g].group_index != static_cast<int>(g))
      throw ValidationError("predict: missing agent for group " + std::to_string(g));
    const std::vector<int>& attrs = groups.group(g).attributes;
    MdpState s = init_episode(features_norm, static_cast<int>(g), attrs,
                              attr_count, -1);
    for (std::size_t t = 0; t < attrs.size(); ++t) {
      const Action a = greedy_action(agents[g].policy, s.net_input());
      out[static_cast<std::size_t>(attrs[t])] =
          static_cast<std::uint8_t>(action_value(a));
      StepOutcome outcome = transition(s, a, attrs, attr_count);
      if (outcome.done) break;
      s = std::move(*outcome.next_state);
    }
  }
  return out;
}

LabelMatrix predict_dataset(const std::vector<GroupAgent>& agents,
                            const Dataset& dataset, const NormStats& norm,
                            const GroupConfig& groups) {
  const Eigen::MatrixXd feat_cols = normalized_feature_columns(dataset, norm);
  LabelMatrix pred(dataset.size(), dataset.schema.count());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto bits =
        predict_image(agents, feat_cols.col(static_cast<Eigen::Index>(i)), groups);
    for (std::size_t j = 0; j < bits.size(); ++j) pred.set(i, j, bits[j]);
  }
  return pred;
}

std::string TrainingReport::to_log_text() const {
  std::string out;
  for (const auto& r : records) {
    out += "epoch=" + std::to_string(r.epoch);
    out += " group=" + std::to_string(r.group);
    out += " mean_loss=" + fmt_double(r.mean_loss);
    out += " mean_reward=" + fmt_double(r.mean_reward);
    out += " bit_accuracy=" + fmt_double(r.bit_accuracy);
    out += " opt_steps=" + std::to_string(r.opt_steps);
    out += '\n';
  }
  return out;
}

std::string TrainingReport::to_summary_text(const TrainConfig& cfg) const {
  std::string out = "attrq_train_summary_v1\n";
  out += "reward_mode: " + std::string(reward_mode_name(cfg.reward_mode)) + "\n";
  out += "epochs: " + std::to_string(cfg.epochs) + "\n";
  out += "batch_size: " + std::to_string(cfg.batch_size) + "\n";
  out += "gamma: " + fmt_double(cfg.gamma) + "\n";
  out += "eps_start: " + fmt_double(cfg.eps_start) + "\n";
  out += "eps_end: " + fmt_double(cfg.eps_end) + "\n";
  out += "replay_capacity: " + std::to_string(cfg.replay_capacity) + "\n";
  out += "target_update: " + std::to_string(cfg.target_update) + "\n";
  out += "learning_rate: " + fmt_double(cfg.learning_rate) + "\n";
  out += "seed: " + std::to_string(cfg.seed) + "\n";
  if (cfg.rho_override) out += "rho_override: " + fmt_double(*cfg.rho_override) + "\n";
  for (const auto& r : records) {
    out += "record: epoch=" + std::to_string(r.epoch) +
           " group=" + std::to_string(r.group) +
           " mean_loss=" + fmt_double(r.mean_loss) +
           " mean_reward=" + fmt_double(r.mean_reward) +
           " bit_accuracy=" + fmt_double(r.bit_accuracy) +
           " opt_steps=" + std::to_string(r.opt_steps) + "\n";
  }
  out += "total_env_steps: " + std::to_string(total_env_steps) + "\n";
  out += "total_opt_steps: " + std::to_string(total_opt_steps) + "\n";
  out += "total_target_syncs: " + std::to_string(total_target_syncs) + "\n";
  out += "train_mA: " + fmt_double(train_metrics.mean_acc) + "\n";
  out += "train_acc: " + fmt_double(train_metrics.example.acc) + "\n";
  out += "train_prec: " + fmt_double(train_metrics.example.prec) + "\n";
  out += "train_rec: " + fmt_double(train_metrics.example.rec) + "\n";
  out += "train_f1: " + fmt_double(train_metrics.example.f1) + "\n";
  return out;
}

}  // namespace attrq
