#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "attrq/label_matrix.hpp"

namespace attrq {

/// Ordered universe of attribute names. Immutable after construction.
class AttributeSchema {
 public:
  AttributeSchema() = default;  // empty placeholder, invalid for training

  /// Validates that names are unique, non-empty and free of the separator
  /// characters used by the on-disk formats (whitespace, ',' and ':').
  static AttributeSchema from_names(std::vector<std::string> names);

  const std::vector<std::string>& names() const { return names_; }
  int count() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_.at(i); }

  /// Index of an attribute name, or -1 when absent.
  int find(const std::string& name) const;

  /// Stable content hash over the ordered name list; stored in checkpoints
  /// so a network is never evaluated against a different attribute universe.
  std::uint64_t hash() const { return hash_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::uint64_t hash_ = 0;
};

struct AttributeGroup {
  std::string name;
  std::vector<int> attributes;  // schema indices, document order
};

/// A partition of the attribute universe into named, ordered groups.
class GroupConfig {
 public:
  /// Parses the one-group-per-line `name: attr1, attr2, ...` document and
  /// validates that it partitions the schema exactly.
  static GroupConfig parse(const std::string& text, const AttributeSchema& schema);

  /// Degenerate partition with every attribute in one group.
  static GroupConfig single_group(const AttributeSchema& schema,
                                  const std::string& name = "all");

  const std::vector<AttributeGroup>& groups() const { return groups_; }
  const AttributeGroup& group(std::size_t i) const { return groups_.at(i); }
  std::size_t group_count() const { return groups_.size(); }
  int attribute_count() const { return attribute_count_; }

  /// Renders back to the document format (round-trips through parse).
  std::string to_text(const AttributeSchema& schema) const;

 private:
  GroupConfig() = default;
  std::vector<AttributeGroup> groups_;
  int attribute_count_ = 0;
};

GroupConfig load_group_config(const std::string& text, const AttributeSchema& schema);

/// Per-group imbalance statistics driving the group-optimized reward.
struct GroupStats {
  int attr_count = 0;          // T
  std::int64_t n_samples = 0;  // N
  std::int64_t positive_sum = 0;  // sum of per-attribute positive counts
  double imbalance = 0.0;      // c = positive_sum / (T*N - positive_sum)
  double rho = 0.0;            // reward magnitude from the c -> rho table
};

/// Piecewise-constant map from imbalance coefficient to reward magnitude.
/// Intervals are half-open: [0,.05) [.05,.25) [.25,.35) [.35,.45) [.45,1).
double rho_for(double c);

GroupStats compute_group_stats(const LabelMatrix& labels, std::span<const int> group);

}  // namespace attrq
