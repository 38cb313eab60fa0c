#include "attrq/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_set>

#include "attrq/errors.hpp"
#include "attrq/rng.hpp"

namespace attrq {

namespace {

constexpr std::string_view kDatasetMagic = "attrq_dataset_v1";
constexpr std::string_view kNormMagic = "attrq_norm_v1";
constexpr std::string_view kSynthMagic = "attrq_synth_v1";

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(what + ": cannot parse number '" + s + "'");
  }
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    std::int64_t v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(what + ": cannot parse integer '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(what + ": cannot parse integer '" + s + "'");
  }
}

/// Parses a `magic` + `key: value` document into an ordered key map.
std::map<std::string, std::string> parse_kv_document(
    const std::string& text, std::string_view magic, const std::string& what) {
  std::istringstream in(text);
  std::string line;
  bool saw_magic = false;
  std::map<std::string, std::string> kv;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!saw_magic) {
      if (t != magic)
        throw ValidationError(what + ": expected first line '" +
                              std::string(magic) + "', got '" + t + "'");
      saw_magic = true;
      continue;
    }
    std::size_t colon = t.find(':');
    if (colon == std::string::npos)
      throw ValidationError(what + " line " + std::to_string(line_no) +
                            ": expected 'key: value'");
    std::string key = trim(t.substr(0, colon));
    std::string value = trim(t.substr(colon + 1));
    if (!kv.emplace(key, value).second)
      throw ValidationError(what + ": duplicate key '" + key + "'");
  }
  if (!saw_magic) throw ValidationError(what + ": empty document");
  return kv;
}

std::string take(std::map<std::string, std::string>& kv, const std::string& key,
                 const std::string& what) {
  auto it = kv.find(key);
  if (it == kv.end())
    throw ValidationError(what + ": missing key '" + key + "'");
  std::string v = it->second;
  kv.erase(it);
  return v;
}

std::optional<std::string> take_optional(std::map<std::string, std::string>& kv,
                                         const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) return std::nullopt;
  std::string v = it->second;
  kv.erase(it);
  return v;
}

void expect_no_leftover(const std::map<std::string, std::string>& kv,
                        const std::string& what) {
  if (!kv.empty())
    throw ValidationError(what + ": unknown key '" + kv.begin()->first + "'");
}

Eigen::VectorXd parse_vector(const std::string& s, int expected,
                             const std::string& what) {
  auto toks = split_ws(s);
  if (static_cast<int>(toks.size()) != expected)
    throw ValidationError(what + ": expected " + std::to_string(expected) +
                          " values, got " + std::to_string(toks.size()));
  Eigen::VectorXd v(expected);
  for (int i = 0; i < expected; ++i) v[i] = parse_double(toks[i], what);
  return v;
}

std::string render_vector(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += fmt_double(v[i]);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& p, const std::string& what) {
  std::ifstream f(p);
  if (!f) throw IoError(what + ": cannot open '" + p.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& p, const std::string& text,
                     const std::string& what) {
  std::ofstream f(p, std::ios::trunc);
  if (!f) throw IoError(what + ": cannot open '" + p.string() + "' for writing");
  f << text;
  if (!f) throw IoError(what + ": write to '" + p.string() + "' failed");
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

LabelMatrix Dataset::labels() const {
  LabelMatrix m(samples.size(), schema.count());
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (int j = 0; j < schema.count(); ++j)
      m.set(i, static_cast<std::size_t>(j), samples[i].labels[static_cast<std::size_t>(j)]);
  return m;
}

Eigen::MatrixXd Dataset::feature_columns() const {
  Eigen::MatrixXd m(feature_dim, samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    m.col(static_cast<Eigen::Index>(i)) = samples[i].features;
  return m;
}

void Dataset::validate() const {
  if (samples.empty()) throw ValidationError("dataset: no samples");
  if (schema.count() == 0) throw ValidationError("dataset: empty attribute schema");
  if (feature_dim <= 0) throw ValidationError("dataset: feature_dim must be positive");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (s.features.size() != feature_dim)
      throw ValidationError("dataset: sample '" + s.id + "' has " +
                            std::to_string(s.features.size()) +
                            " features, expected " + std::to_string(feature_dim));
    if (static_cast<int>(s.labels.size()) != schema.count())
      throw ValidationError("dataset: sample '" + s.id + "' has " +
                            std::to_string(s.labels.size()) +
                            " labels, expected " + std::to_string(schema.count()));
    for (std::size_t j = 0; j < s.labels.size(); ++j)
      if (s.labels[j] > 1)
        throw ValidationError("dataset: non-binary label at row " +
                              std::to_string(i + 1) + ", column " +
                              std::to_string(j + 1));
    if (!seen.insert(s.id).second)
      throw ValidationError("dataset: duplicate id '" + s.id + "' at row " +
                            std::to_string(i + 1));
  }
  if (norm && (norm->mean.size() != feature_dim || norm->stddev.size() != feature_dim))
    throw ValidationError("dataset: normalization statistics dimension mismatch");
}

// ---------------------------------------------------------------------------
// Synthetic generation
// ---------------------------------------------------------------------------

void SynthSpec::validate() const {
  if (n == 0) throw ValidationError("synth spec: n must be positive");
  if (feature_dim <= 0) throw ValidationError("synth spec: feature_dim must be positive");
  if (attr_count <= 0) throw ValidationError("synth spec: attr_count must be positive");
  if (static_cast<int>(rates.size()) != attr_count)
    throw ValidationError("synth spec: expected " + std::to_string(attr_count) +
                          " rates, got " + std::to_string(rates.size()));
  for (double r : rates)
    if (!(r > 0.0 && r < 1.0))
      throw ValidationError("synth spec: positive rate " + fmt_double(r) +
                            " outside (0, 1)");
  if (!(snr > 0.0))
    throw ValidationError("synth spec: signal-to-noise must be positive");
  if (!attr_names.empty() && static_cast<int>(attr_names.size()) != attr_count)
    throw ValidationError("synth spec: attribute name count mismatch");
}

namespace {

std::vector<std::string> default_names(int l) {
  std::vector<std::string> names(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "attr%02d", i);
    names[static_cast<std::size_t>(i)] = buf;
  }
  return names;
}

Dataset synth_impl(const SynthSpec& spec, std::size_t id_offset) {
  spec.validate();
  const int f = spec.feature_dim;
  const int l = spec.attr_count;

  Rng rng_mix(derive_seed(spec.seed, 1));
  Rng rng_labels(derive_seed(spec.seed, 2));
  Rng rng_noise(derive_seed(spec.seed, 3));

  Eigen::MatrixXd mix(f, l);
  const double scale = 1.0 / std::sqrt(static_cast<double>(l));
  for (int r = 0; r < f; ++r)
    for (int c = 0; c < l; ++c) mix(r, c) = rng_mix.normal() * scale;

  Dataset ds;
  ds.schema = AttributeSchema::from_names(
      spec.attr_names.empty() ? default_names(l) : spec.attr_names);
  ds.feature_dim = f;
  ds.split = spec.split;
  ds.samples.resize(spec.n);

  Eigen::MatrixXd signals(f, static_cast<Eigen::Index>(spec.n));
  for (std::size_t i = 0; i < spec.n; ++i) {
    Sample& s = ds.samples[i];
    char buf[24];
    std::snprintf(buf, sizeof(buf), "s%06zu", i + id_offset);
    s.id = buf;
    s.labels.resize(static_cast<std::size_t>(l));
    Eigen::VectorXd lv(l);
    for (int j = 0; j < l; ++j) {
      const std::uint8_t bit =
          rng_labels.uniform() < spec.rates[static_cast<std::size_t>(j)] ? 1 : 0;
      s.labels[static_cast<std::size_t>(j)] = bit;
      lv[j] = bit;
    }
    signals.col(static_cast<Eigen::Index>(i)) = mix * lv;
  }

  // Noise scale from the centered signal spread so snr describes variation,
  // not the DC offset.
  double noise_sd = 0.0;
  if (std::isfinite(spec.snr)) {
    Eigen::VectorXd row_mean = signals.rowwise().mean();
    double var = (signals.colwise() - row_mean).squaredNorm() /
                 static_cast<double>(signals.size());
    double sd = std::sqrt(var);
    if (sd <= 0.0) sd = 1.0;
    noise_sd = sd / spec.snr;
  }

  for (std::size_t i = 0; i < spec.n; ++i) {
    Eigen::VectorXd feat = signals.col(static_cast<Eigen::Index>(i));
    if (noise_sd > 0.0)
      for (int d = 0; d < f; ++d) feat[d] += noise_sd * rng_noise.normal();
    ds.samples[i].features = std::move(feat);
  }
  ds.validate();
  return ds;
}

}  // namespace

Dataset generate_synthetic(const SynthSpec& spec) { return synth_impl(spec, 0); }

std::pair<Dataset, Dataset> generate_synthetic_pair(const SynthSpec& spec,
                                                    std::size_t n_train,
                                                    std::size_t n_test) {
  if (n_train == 0) throw ValidationError("synth spec: n_train must be positive");
  SynthSpec whole = spec;
  whole.n = n_train + n_test;
  whole.split = "train";
  Dataset all = synth_impl(whole, 0);

  Dataset train;
  train.schema = all.schema;
  train.feature_dim = all.feature_dim;
  train.split = "train";
  train.samples.assign(all.samples.begin(),
                       all.samples.begin() + static_cast<std::ptrdiff_t>(n_train));

  Dataset test;
  test.schema = all.schema;
  test.feature_dim = all.feature_dim;
  test.split = "test";
  test.samples.assign(all.samples.begin() + static_cast<std::ptrdiff_t>(n_train),
                      all.samples.end());

  NormStats norm = compute_norm_stats(train);
  train.norm = norm;
  if (!test.samples.empty()) test.norm = norm;
  return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

NormStats compute_norm_stats(const Dataset& ds) {
  if (ds.samples.empty()) throw ValidationError("norm stats: empty dataset");
  NormStats st;
  st.mean = Eigen::VectorXd::Zero(ds.feature_dim);
  for (const Sample& s : ds.samples) st.mean += s.features;
  st.mean /= static_cast<double>(ds.samples.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(ds.feature_dim);
  for (const Sample& s : ds.samples) {
    Eigen::VectorXd d = s.features - st.mean;
    var += d.cwiseProduct(d);
  }
  var /= static_cast<double>(ds.samples.size());
  st.stddev = var.cwiseSqrt();
  for (Eigen::Index i = 0; i < st.stddev.size(); ++i)
    if (st.stddev[i] < 1e-12) st.stddev[i] = 1.0;  // constant dimension
  return st;
}

Eigen::MatrixXd normalized_feature_columns(const Dataset& ds, const NormStats& norm) {
  if (norm.mean.size() != ds.feature_dim || norm.stddev.size() != ds.feature_dim)
    throw ValidationError("norm stats: dimension mismatch with dataset");
  Eigen::MatrixXd m(ds.feature_dim, ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    m.col(static_cast<Eigen::Index>(i)) =
        (ds.samples[i].features - norm.mean).cwiseQuotient(norm.stddev);
  return m;
}

void save_norm_stats(const NormStats& norm, const std::filesystem::path& path) {
  std::string out(kNormMagic);
  out += "\nmean: " + render_vector(norm.mean);
  out += "\nstd: " + render_vector(norm.stddev);
  out += "\n";
  write_text_file(path, out, "norm stats");
}

NormStats load_norm_stats(const std::filesystem::path& path) {
  auto kv = parse_kv_document(read_text_file(path, "norm stats"), kNormMagic,
                              "norm stats");
  std::string mean = take(kv, "mean", "norm stats");
  std::string sd = take(kv, "std", "norm stats");
  expect_no_leftover(kv, "norm stats");
  auto mean_toks = split_ws(mean);
  NormStats st;
  st.mean = parse_vector(mean, static_cast<int>(mean_toks.size()), "norm stats");
  st.stddev = parse_vector(sd, static_cast<int>(mean_toks.size()), "norm stats");
  for (Eigen::Index i = 0; i < st.stddev.size(); ++i)
    if (!(st.stddev[i] > 0.0))
      throw ValidationError("norm stats: non-positive standard deviation");
  return st;
}

// ---------------------------------------------------------------------------
// Dataset files
// ---------------------------------------------------------------------------

namespace {

std::filesystem::path sibling(const std::filesystem::path& manifest,
                              const std::string& suffix) {
  std::filesystem::path p = manifest;
  p.replace_extension();
  p += suffix;
  return p;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::filesystem::path& manifest_path) {
  ds.validate();
  const std::filesystem::path features_path = sibling(manifest_path, ".features.bin");
  const std::filesystem::path labels_path = sibling(manifest_path, ".labels.txt");
  const std::filesystem::path ids_path = sibling(manifest_path, ".ids.txt");

  {
    std::ofstream f(features_path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("dataset: cannot open '" + features_path.string() + "'");
    std::string buf;
    buf.reserve(ds.samples.size() * static_cast<std::size_t>(ds.feature_dim) * 8);
    for (const Sample& s : ds.samples) {
      for (Eigen::Index d = 0; d < s.features.size(); ++d) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(s.features[d]);
        for (int b = 0; b < 8; ++b)
          buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
      }
    }
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw IoError("dataset: write to '" + features_path.string() + "' failed");
  }
  {
    std::string buf;
    for (const Sample& s : ds.samples) {
      for (std::size_t j = 0; j < s.labels.size(); ++j) {
        if (j) buf += ' ';
        buf += s.labels[j] ? '1' : '0';
      }
      buf += '\n';
    }
    write_text_file(labels_path, buf, "dataset");
  }
  {
    std::string buf;
    for (const Sample& s : ds.samples) {
      buf += s.id;
      buf += '\n';
    }
    write_text_file(ids_path, buf, "dataset");
  }

  std::string m(kDatasetMagic);
  m += "\nsplit: " + ds.split;
  m += "\nfeature_dim: " + std::to_string(ds.feature_dim);
  m += "\nattr_count: " + std::to_string(ds.schema.count());
  m += "\nattributes:";
  for (const auto& n : ds.schema.names()) m += " " + n;
  m += "\nfeatures_file: " + features_path.filename().string();
  m += "\nlabels_file: " + labels_path.filename().string();
  m += "\nids_file: " + ids_path.filename().string();
  if (ds.norm) {
    m += "\nnorm_mean: " + render_vector(ds.norm->mean);
    m += "\nnorm_std: " + render_vector(ds.norm->stddev);
  }
  m += "\n";
  write_text_file(manifest_path, m, "dataset");
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  auto kv = parse_kv_document(read_text_file(manifest_path, "dataset manifest"),
                              kDatasetMagic, "dataset manifest");
  Dataset ds;
  ds.split = take(kv, "split", "dataset manifest");
  ds.feature_dim = static_cast<int>(parse_int(take(kv, "feature_dim", "dataset manifest"),
                                              "dataset manifest"));
  const int attr_count = static_cast<int>(
      parse_int(take(kv, "attr_count", "dataset manifest"), "dataset manifest"));
  auto names = split_ws(take(kv, "attributes", "dataset manifest"));
  if (static_cast<int>(names.size()) != attr_count)
    throw ValidationError("dataset manifest: attr_count is " +
                          std::to_string(attr_count) + " but " +
                          std::to_string(names.size()) + " attributes listed");
  ds.schema = AttributeSchema::from_names(std::move(names));
  if (ds.feature_dim <= 0)
    throw ValidationError("dataset manifest: feature_dim must be positive");

  const auto dir = manifest_path.parent_path();
  const auto features_path = dir / take(kv, "features_file", "dataset manifest");
  const auto labels_path = dir / take(kv, "labels_file", "dataset manifest");
  std::optional<std::filesystem::path> ids_path;
  if (auto v = take_optional(kv, "ids_file")) ids_path = dir / *v;

  auto norm_mean = take_optional(kv, "norm_mean");
  auto norm_std = take_optional(kv, "norm_std");
  if (norm_mean.has_value() != norm_std.has_value())
    throw ValidationError("dataset manifest: norm_mean and norm_std must appear together");
  if (norm_mean) {
    NormStats st;
    st.mean = parse_vector(*norm_mean, ds.feature_dim, "dataset manifest norm_mean");
    st.stddev = parse_vector(*norm_std, ds.feature_dim, "dataset manifest norm_std");
    for (Eigen::Index i = 0; i < st.stddev.size(); ++i)
      if (!(st.stddev[i] > 0.0))
        throw ValidationError("dataset manifest: non-positive norm_std entry");
    ds.norm = std::move(st);
  }
  expect_no_leftover(kv, "dataset manifest");

  // Labels first: they fix N.
  {
    std::ifstream f(labels_path);
    if (!f) throw IoError("dataset: cannot open labels file '" + labels_path.string() + "'");
    std::string line;
    std::size_t row = 0;
    while (std::getline(f, line)) {
      std::string t = trim(line);
      if (t.empty()) continue;
      ++row;
      auto toks = split_ws(t);
      if (static_cast<int>(toks.size()) != attr_count)
        throw ValidationError("dataset labels: row " + std::to_string(row) +
                              " has " + std::to_string(toks.size()) +
                              " entries, expected " + std::to_string(attr_count));
      Sample s;
      s.labels.resize(static_cast<std::size_t>(attr_count));
      for (int j = 0; j < attr_count; ++j) {
        const std::string& tok = toks[static_cast<std::size_t>(j)];
        if (tok == "0") s.labels[static_cast<std::size_t>(j)] = 0;
        else if (tok == "1") s.labels[static_cast<std::size_t>(j)] = 1;
        else
          throw ValidationError("dataset labels: value '" + tok + "' at row " +
                                std::to_string(row) + ", column " +
                                std::to_string(j + 1) + " is not a bit");
      }
      ds.samples.push_back(std::move(s));
    }
  }
  if (ds.samples.empty()) throw ValidationError("dataset: labels file has no rows");
  const std::size_t n = ds.samples.size();

  // Features: exact byte count check against N x F.
  {
    std::ifstream f(features_path, std::ios::binary);
    if (!f) throw IoError("dataset: cannot open features file '" + features_path.string() + "'");
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const std::size_t expected = n * static_cast<std::size_t>(ds.feature_dim) * 8;
    if (bytes.size() != expected)
      throw ValidationError("dataset features: file holds " +
                            std::to_string(bytes.size()) + " bytes, expected " +
                            std::to_string(expected) + " (" + std::to_string(n) +
                            " x " + std::to_string(ds.feature_dim) + " float64)");
    std::size_t off = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::VectorXd feat(ds.feature_dim);
      for (int d = 0; d < ds.feature_dim; ++d) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
          bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[off + static_cast<std::size_t>(b)]))
                  << (8 * b);
        feat[d] = std::bit_cast<double>(bits);
        off += 8;
      }
      ds.samples[i].features = std::move(feat);
    }
  }

  // Ids: optional file, defaults to the row number.
  if (ids_path) {
    std::ifstream f(*ids_path);
    if (!f) throw IoError("dataset: cannot open ids file '" + ids_path->string() + "'");
    std::string line;
    std::size_t row = 0;
    while (std::getline(f, line)) {
      std::string t = trim(line);
      if (t.empty()) continue;
      if (row >= n)
        throw ValidationError("dataset ids: more ids than samples");
      ds.samples[row].id = t;
      ++row;
    }
    if (row != n)
      throw ValidationError("dataset ids: " + std::to_string(row) +
                            " ids for " + std::to_string(n) + " samples");
  } else {
    for (std::size_t i = 0; i < n; ++i) ds.samples[i].id = std::to_string(i);
  }

  ds.validate();
  return ds;
}

// ---------------------------------------------------------------------------
// Predictions
// ---------------------------------------------------------------------------

void export_predictions(const Dataset& ds, const LabelMatrix& pred,
                        const std::filesystem::path& path) {
  if (pred.rows() != ds.samples.size())
    throw ValidationError("predictions: " + std::to_string(pred.rows()) +
                          " rows for a dataset of " +
                          std::to_string(ds.samples.size()) + " samples");
  if (static_cast<int>(pred.cols()) != ds.schema.count())
    throw ValidationError("predictions: column count mismatch with schema");
  std::string buf;
  for (std::size_t i = 0; i < pred.rows(); ++i) {
    buf += ds.samples[i].id;
    for (std::size_t j = 0; j < pred.cols(); ++j) {
      buf += ' ';
      buf += pred(i, j) ? '1' : '0';
    }
    buf += '\n';
  }
  write_text_file(path, buf, "predictions");
}

Predictions load_predictions(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("predictions: cannot open '" + path.string() + "'");
  Predictions out;
  std::vector<std::uint8_t> data;
  std::size_t cols = 0;
  std::string line;
  std::size_t row = 0;
  while (std::getline(f, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    ++row;
    auto toks = split_ws(t);
    if (toks.size() < 2)
      throw ValidationError("predictions: row " + std::to_string(row) +
                            " needs an id and at least one bit");
    if (cols == 0) cols = toks.size() - 1;
    if (toks.size() - 1 != cols)
      throw ValidationError("predictions: row " + std::to_string(row) +
                            " has " + std::to_string(toks.size() - 1) +
                            " bits, expected " + std::to_string(cols));
    out.ids.push_back(toks[0]);
    for (std::size_t j = 1; j < toks.size(); ++j) {
      if (toks[j] == "0") data.push_back(0);
      else if (toks[j] == "1") data.push_back(1);
      else
        throw ValidationError("predictions: value '" + toks[j] + "' at row " +
                              std::to_string(row) + ", column " +
                              std::to_string(j) + " is not a bit");
    }
  }
  if (out.ids.empty()) throw ValidationError("predictions: empty file");
  out.labels = LabelMatrix::from_data(out.ids.size(), cols, std::move(data));
  return out;
}

// ---------------------------------------------------------------------------
// Synth spec document
// ---------------------------------------------------------------------------

SynthPairSpec parse_synth_spec(const std::string& text) {
  auto kv = parse_kv_document(text, kSynthMagic, "synth spec");
  SynthPairSpec sp;
  sp.n_train = static_cast<std::size_t>(parse_int(take(kv, "n_train", "synth spec"), "synth spec"));
  sp.n_test = 0;
  if (auto v = take_optional(kv, "n_test"))
    sp.n_test = static_cast<std::size_t>(parse_int(*v, "synth spec"));
  sp.base.feature_dim = static_cast<int>(parse_int(take(kv, "feature_dim", "synth spec"), "synth spec"));
  sp.base.attr_count = static_cast<int>(parse_int(take(kv, "attr_count", "synth spec"), "synth spec"));

  auto rates = take_optional(kv, "rates");
  auto rate = take_optional(kv, "rate");
  if (rates.has_value() == rate.has_value())
    throw ValidationError("synth spec: provide exactly one of 'rate' or 'rates'");
  if (rates) {
    auto toks = split_ws(*rates);
    for (const auto& t : toks) sp.base.rates.push_back(parse_double(t, "synth spec rates"));
  } else {
    sp.base.rates.assign(static_cast<std::size_t>(sp.base.attr_count),
                         parse_double(*rate, "synth spec rate"));
  }

  std::string snr = take(kv, "snr", "synth spec");
  sp.base.snr = (snr == "inf" || snr == "infinity")
                    ? std::numeric_limits<double>::infinity()
                    : parse_double(snr, "synth spec snr");
  sp.base.seed = parse_u64(take(kv, "seed", "synth spec"), "synth spec");
  if (auto v = take_optional(kv, "attributes")) sp.base.attr_names = split_ws(*v);
  expect_no_leftover(kv, "synth spec");

  sp.base.n = sp.n_train + sp.n_test;
  sp.base.validate();
  return sp;
}

SynthPairSpec load_synth_spec(const std::filesystem::path& path) {
  return parse_synth_spec(read_text_file(path, "synth spec"));
}

}  // namespace attrq
