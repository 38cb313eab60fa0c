#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "attrq/label_matrix.hpp"
#include "attrq/schema.hpp"

namespace attrq {

/// Per-dimension standardization statistics, computed on a training split
/// and reused verbatim at evaluation time.
struct NormStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // floored away from zero
};

struct Sample {
  std::string id;
  Eigen::VectorXd features;
  std::vector<std::uint8_t> labels;
};

struct Dataset {
  AttributeSchema schema;
  int feature_dim = 0;
  std::string split = "train";
  std::vector<Sample> samples;
  std::optional<NormStats> norm;

  std::size_t size() const { return samples.size(); }
  LabelMatrix labels() const;
  /// Features column-stacked (feature_dim x N).
  Eigen::MatrixXd feature_columns() const;
  void validate() const;
};

/// Recipe for a reproducible synthetic dataset: labels are independent
/// Bernoulli draws per attribute, features are a seeded random linear mix of
/// the label vector plus Gaussian noise scaled by the signal-to-noise ratio
/// (snr = +infinity means noise-free).
struct SynthSpec {
  std::size_t n = 0;
  int feature_dim = 0;
  int attr_count = 0;
  std::vector<double> rates;  // one positive rate per attribute, each in (0,1)
  double snr = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  std::string split = "train";
  std::vector<std::string> attr_names;  // defaults to attr00, attr01, ...

  void validate() const;
};

Dataset generate_synthetic(const SynthSpec& spec);

/// Train/test pair sharing one mixing matrix so both splits come from the
/// same feature distribution; normalization statistics are computed on the
/// train part and attached to both.
std::pair<Dataset, Dataset> generate_synthetic_pair(const SynthSpec& spec,
                                                    std::size_t n_train,
                                                    std::size_t n_test);

/// Manifest format (text, `key: value`): first line `attrq_dataset_v1`,
/// keys split, feature_dim, attr_count, attributes (space separated),
/// features_file, labels_file, optional ids_file, optional norm_mean /
/// norm_std. The features file is raw little-endian float64, row-major
/// N x F; the labels file is N lines of L space-separated bits.
Dataset load_dataset(const std::filesystem::path& manifest_path);
void save_dataset(const Dataset& ds, const std::filesystem::path& manifest_path);

NormStats compute_norm_stats(const Dataset& ds);
/// (feature_dim x N) matrix of standardized features.
Eigen::MatrixXd normalized_feature_columns(const Dataset& ds, const NormStats& norm);

void save_norm_stats(const NormStats& norm, const std::filesystem::path& path);
NormStats load_norm_stats(const std::filesystem::path& path);

struct Predictions {
  std::vector<std::string> ids;
  LabelMatrix labels;
};

/// Text rows `id b1 ... bL`, one per sample, dataset order preserved.
void export_predictions(const Dataset& ds, const LabelMatrix& pred,
                        const std::filesystem::path& path);
Predictions load_predictions(const std::filesystem::path& path);

/// SynthSpec document (text, `key: value`): first line `attrq_synth_v1`,
/// keys n_train, n_test, feature_dim, attr_count, rate or rates, snr, seed,
/// optional attributes.
struct SynthPairSpec {
  SynthSpec base;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};
SynthPairSpec parse_synth_spec(const std::string& text);
SynthPairSpec load_synth_spec(const std::filesystem::path& path);

}  // namespace attrq
