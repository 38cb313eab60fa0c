#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attrq/label_matrix.hpp"
#include "attrq/schema.hpp"

namespace attrq {

struct ExampleMetrics {
  double acc = 0.0;
  double prec = 0.0;
  double rec = 0.0;
  double f1 = 0.0;
};

struct AttributeAccuracy {
  std::int64_t tp = 0, p = 0;  // true positives / positives
  std::int64_t tn = 0, n = 0;  // true negatives / negatives
};

struct MetricsReport {
  double mean_acc = 0.0;  // mA, label-based
  ExampleMetrics example;
  std::vector<AttributeAccuracy> per_attribute;
  // Attributes with no positive (or no negative) ground-truth samples; their
  // degenerate term counts as 0 in mA and is worth a warning upstream.
  std::vector<int> no_positive_attrs;
  std::vector<int> no_negative_attrs;
};

/// Label-based mean accuracy: averages per-attribute positive and negative
/// recognition rates over all attributes.
double mean_accuracy(const LabelMatrix& truth, const LabelMatrix& pred);

/// Instance-based accuracy / precision / recall / F1 over per-sample
/// positive-label sets. Empty-set conventions: |f|=0 contributes 0 to Prec,
/// |Y|=0 contributes 0 to Rec, and an empty union counts as perfect
/// agreement for Acc.
ExampleMetrics example_metrics(const LabelMatrix& truth, const LabelMatrix& pred);

MetricsReport compute_metrics(const LabelMatrix& truth, const LabelMatrix& pred);

/// Human-readable report; lists degenerate attributes when a schema is given.
std::string format_metrics(const MetricsReport& r,
                           const AttributeSchema* schema = nullptr);

/// Machine-readable key=value lines.
std::string metrics_summary_text(const MetricsReport& r);

}  // namespace attrq
