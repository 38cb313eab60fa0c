#include "attrq/qnet.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "attrq/errors.hpp"
#include "attrq/rng.hpp"

namespace attrq {

namespace {

void fill_glorot(Eigen::MatrixXd& w, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      w(r, c) = rng.uniform(-bound, bound);
}

void check_input_dim(const QNetwork& net, Eigen::Index dim) {
  if (dim != net.input_dim())
    throw ValidationError("qnet: state vector of dimension " +
                          std::to_string(dim) + " fed to a network expecting " +
                          std::to_string(net.input_dim()));
}

}  // namespace

std::size_t QNetwork::parameter_count() const {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() +
                                  b2.size() + w3.size() + b3.size());
}

Gradients Gradients::zeros_like(const QNetwork& net) {
  Gradients g;
  g.w1 = Eigen::MatrixXd::Zero(net.w1.rows(), net.w1.cols());
  g.w2 = Eigen::MatrixXd::Zero(net.w2.rows(), net.w2.cols());
  g.w3 = Eigen::MatrixXd::Zero(net.w3.rows(), net.w3.cols());
  g.b1 = Eigen::VectorXd::Zero(net.b1.size());
  g.b2 = Eigen::VectorXd::Zero(net.b2.size());
  g.b3 = Eigen::VectorXd::Zero(net.b3.size());
  return g;
}

AdamState AdamState::fresh(const QNetwork& net, double learning_rate) {
  AdamState st;
  st.m = Gradients::zeros_like(net);
  st.v = Gradients::zeros_like(net);
  st.learning_rate = learning_rate;
  return st;
}

QNetwork init_network(int input_dim, std::uint64_t seed, int hidden1,
                      int hidden2) {
  if (input_dim < 1) throw ValidationError("qnet: input dimension must be >= 1");
  if (hidden1 < 1 || hidden2 < 1)
    throw ValidationError("qnet: hidden widths must be >= 1");
  Rng rng(seed);
  QNetwork net;
  net.w1.resize(hidden1, input_dim);
  net.w2.resize(hidden2, hidden1);
  net.w3.resize(2, hidden2);
  fill_glorot(net.w1, rng);
  fill_glorot(net.w2, rng);
  fill_glorot(net.w3, rng);
  net.b1 = Eigen::VectorXd::Zero(hidden1);
  net.b2 = Eigen::VectorXd::Zero(hidden2);
  net.b3 = Eigen::VectorXd::Zero(2);
  return net;
}

Eigen::Vector2d forward(const QNetwork& net, const Eigen::VectorXd& state_vec) {
  check_input_dim(net, state_vec.size());
  Eigen::VectorXd h1 = ((net.w1 * state_vec) + net.b1).cwiseMax(0.0);
  Eigen::VectorXd h2 = ((net.w2 * h1) + net.b2).cwiseMax(0.0);
  return (net.w3 * h2) + net.b3;
}

Eigen::Matrix2Xd forward_batch(const QNetwork& net,
                               const Eigen::MatrixXd& states) {
  check_input_dim(net, states.rows());
  Eigen::MatrixXd h1 = ((net.w1 * states).colwise() + net.b1).cwiseMax(0.0);
  Eigen::MatrixXd h2 = ((net.w2 * h1).colwise() + net.b2).cwiseMax(0.0);
  return ((net.w3 * h2).colwise() + net.b3);
}

std::pair<double, Gradients> td_loss_and_gradients(
    const QNetwork& net, const Eigen::MatrixXd& states,
    const std::vector<int>& actions, const Eigen::VectorXd& targets) {
  check_input_dim(net, states.rows());
  const Eigen::Index batch = states.cols();
  if (batch == 0) throw ValidationError("qnet: empty batch");
  if (static_cast<Eigen::Index>(actions.size()) != batch ||
      targets.size() != batch)
    throw ValidationError("qnet: batch size mismatch between states, actions "
                          "and targets");

  Eigen::MatrixXd z1 = (net.w1 * states).colwise() + net.b1;
  Eigen::MatrixXd h1 = z1.cwiseMax(0.0);
  Eigen::MatrixXd z2 = (net.w2 * h1).colwise() + net.b2;
  Eigen::MatrixXd h2 = z2.cwiseMax(0.0);
  Eigen::MatrixXd q = (net.w3 * h2).colwise() + net.b3;

  // loss = mean_j (y_j - Q(s_j, a_j))^2; only the taken action's head is hit.
  double loss = 0.0;
  Eigen::MatrixXd g3 = Eigen::MatrixXd::Zero(2, batch);
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (Eigen::Index j = 0; j < batch; ++j) {
    const int a = actions[static_cast<std::size_t>(j)];
    if (a != 0 && a != 1)
      throw ValidationError("qnet: action index must be 0 or 1");
    const double diff = q(a, j) - targets[j];
    loss += diff * diff * inv_batch;
    g3(a, j) = 2.0 * diff * inv_batch;
  }

  Gradients g;
  g.w3 = g3 * h2.transpose();
  g.b3 = g3.rowwise().sum();
  Eigen::MatrixXd g2 =
      (net.w3.transpose() * g3).cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
  g.w2 = g2 * h1.transpose();
  g.b2 = g2.rowwise().sum();
  Eigen::MatrixXd g1 =
      (net.w2.transpose() * g2).cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  g.w1 = g1 * states.transpose();
  g.b1 = g1.rowwise().sum();
  return {loss, std::move(g)};
}

namespace {

void adam_update(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad,
                 Eigen::MatrixXd& m, Eigen::MatrixXd& v, const AdamState& st) {
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  m = st.beta1 * m + (1.0 - st.beta1) * grad;
  v = st.beta2 * v + (1.0 - st.beta2) * grad.cwiseProduct(grad);
  param.array() -=
      st.learning_rate * (m.array() / bc1) /
      ((v.array() / bc2).sqrt() + st.epsilon);
}

void adam_update_vec(Eigen::Ref<Eigen::VectorXd> param, const Eigen::VectorXd& grad,
                     Eigen::VectorXd& m, Eigen::VectorXd& v, const AdamState& st) {
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  m = st.beta1 * m + (1.0 - st.beta1) * grad;
  v = st.beta2 * v + (1.0 - st.beta2) * grad.cwiseProduct(grad);
  param.array() -=
      st.learning_rate * (m.array() / bc1) /
      ((v.array() / bc2).sqrt() + st.epsilon);
}

}  // namespace

void adam_step(QNetwork& net, const Gradients& grads, AdamState& opt) {
  if (grads.w1.rows() != net.w1.rows() || grads.w1.cols() != net.w1.cols() ||
      grads.w2.rows() != net.w2.rows() || grads.w2.cols() != net.w2.cols() ||
      grads.w3.rows() != net.w3.rows() || grads.w3.cols() != net.w3.cols())
    throw ValidationError("qnet: gradient shape mismatch");
  ++opt.step;
  adam_update(net.w1, grads.w1, opt.m.w1, opt.v.w1, opt);
  adam_update_vec(net.b1, grads.b1, opt.m.b1, opt.v.b1, opt);
  adam_update(net.w2, grads.w2, opt.m.w2, opt.v.w2, opt);
  adam_update_vec(net.b2, grads.b2, opt.m.b2, opt.v.b2, opt);
  adam_update(net.w3, grads.w3, opt.m.w3, opt.v.w3, opt);
  adam_update_vec(net.b3, grads.b3, opt.m.b3, opt.v.b3, opt);
}

QNetwork sync_target(const QNetwork& policy) { return policy; }

// ---------------------------------------------------------------------------
// Checkpoint serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'G', 'R', 'L', 'Q'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_matrix(std::string& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

void put_vector(std::string& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v[i]);
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint16_t u16() { return static_cast<std::uint16_t>(u(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(u(4)); }
  std::uint64_t u64() { return u(8); }
  double f64() { return std::bit_cast<double>(u64()); }

  void matrix(Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = f64();
  }

  void vector(Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f64();
  }

  std::size_t pos() const { return pos_; }

 private:
  std::uint64_t u(int n) {
    if (pos_ + static_cast<std::size_t>(n) > bytes_.size())
      throw ValidationError("checkpoint: truncated stream");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string save_checkpoint(const QNetwork& net, const AdamState& opt,
                            const CheckpointMeta& meta) {
  std::string out;
  out.reserve(128 + 3 * net.parameter_count() * 8);
  out.append(kMagic, 4);
  put_u16(out, kVersion);
  put_u16(out, 0);  // flags
  put_u32(out, meta.feature_dim);
  put_u32(out, meta.attr_count);
  put_u32(out, static_cast<std::uint32_t>(net.input_dim()));
  put_u32(out, static_cast<std::uint32_t>(net.hidden1()));
  put_u32(out, static_cast<std::uint32_t>(net.hidden2()));
  put_u32(out, meta.group_index);
  put_u64(out, meta.schema_hash);
  put_u64(out, std::bit_cast<std::uint64_t>(meta.train_step));
  put_u64(out, std::bit_cast<std::uint64_t>(opt.step));
  put_f64(out, opt.learning_rate);
  put_f64(out, opt.beta1);
  put_f64(out, opt.beta2);
  put_f64(out, opt.epsilon);
  put_matrix(out, net.w1);
  put_vector(out, net.b1);
  put_matrix(out, net.w2);
  put_vector(out, net.b2);
  put_matrix(out, net.w3);
  put_vector(out, net.b3);
  for (const Gradients* g : {&opt.m, &opt.v}) {
    put_matrix(out, g->w1);
    put_vector(out, g->b1);
    put_matrix(out, g->w2);
    put_vector(out, g->b2);
    put_matrix(out, g->w3);
    put_vector(out, g->b3);
  }
  const std::uint64_t checksum = fnv1a64(std::string_view(out));
  put_u64(out, checksum);
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const QNetwork& net,
                     const AdamState& opt, const CheckpointMeta& meta) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("checkpoint: cannot open '" + path.string() + "' for writing");
  const std::string bytes = save_checkpoint(net, opt, meta);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("checkpoint: write to '" + path.string() + "' failed");
}

Checkpoint load_checkpoint(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw ValidationError("checkpoint: bad magic bytes");

  Reader r(bytes);
  r.u32();  // skip magic, already verified
  const std::uint16_t version = r.u16();
  if (version != kVersion)
    throw ValidationError("checkpoint: unsupported format version " +
                          std::to_string(version));
  r.u16();  // flags

  Checkpoint ck;
  ck.meta.feature_dim = r.u32();
  ck.meta.attr_count = r.u32();
  const std::uint32_t d_in = r.u32();
  const std::uint32_t h1 = r.u32();
  const std::uint32_t h2 = r.u32();
  ck.meta.group_index = r.u32();
  ck.meta.schema_hash = r.u64();
  ck.meta.train_step = std::bit_cast<std::int64_t>(r.u64());
  if (d_in < 1 || h1 < 1 || h2 < 1)
    throw ValidationError("checkpoint: invalid layer dimensions");

  ck.net.w1.resize(h1, d_in);
  ck.net.w2.resize(h2, h1);
  ck.net.w3.resize(2, h2);
  ck.net.b1.resize(h1);
  ck.net.b2.resize(h2);
  ck.net.b3.resize(2);

  ck.opt.step = std::bit_cast<std::int64_t>(r.u64());
  ck.opt.learning_rate = r.f64();
  ck.opt.beta1 = r.f64();
  ck.opt.beta2 = r.f64();
  ck.opt.epsilon = r.f64();
  ck.opt.m = Gradients::zeros_like(ck.net);
  ck.opt.v = Gradients::zeros_like(ck.net);

  r.matrix(ck.net.w1);
  r.vector(ck.net.b1);
  r.matrix(ck.net.w2);
  r.vector(ck.net.b2);
  r.matrix(ck.net.w3);
  r.vector(ck.net.b3);
  for (Gradients* g : {&ck.opt.m, &ck.opt.v}) {
    r.matrix(g->w1);
    r.vector(g->b1);
    r.matrix(g->w2);
    r.vector(g->b2);
    r.matrix(g->w3);
    r.vector(g->b3);
  }

  const std::size_t payload_end = r.pos();
  const std::uint64_t stored = r.u64();
  if (payload_end + 8 != bytes.size())
    throw ValidationError("checkpoint: trailing bytes after checksum");
  const std::uint64_t computed =
      fnv1a64(std::string_view(bytes.data(), payload_end));
  if (stored != computed)
    throw ValidationError("checkpoint: checksum mismatch, stream corrupt");
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("checkpoint: cannot open '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  return load_checkpoint(bytes);
}

}  // namespace attrq
