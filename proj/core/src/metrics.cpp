#include "attrq/metrics.hpp"

#include <cstdio>

#include "attrq/errors.hpp"

namespace attrq {

namespace {

void check_shapes(const LabelMatrix& truth, const LabelMatrix& pred) {
  if (truth.rows() != pred.rows() || truth.cols() != pred.cols())
    throw ValidationError(
        "metrics: shape mismatch, truth is " + std::to_string(truth.rows()) +
        "x" + std::to_string(truth.cols()) + " but prediction is " +
        std::to_string(pred.rows()) + "x" + std::to_string(pred.cols()));
  if (truth.rows() == 0 || truth.cols() == 0)
    throw ValidationError("metrics: empty label matrix");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double mean_accuracy(const LabelMatrix& truth, const LabelMatrix& pred) {
  return compute_metrics(truth, pred).mean_acc;
}

ExampleMetrics example_metrics(const LabelMatrix& truth, const LabelMatrix& pred) {
  return compute_metrics(truth, pred).example;
}

MetricsReport compute_metrics(const LabelMatrix& truth, const LabelMatrix& pred) {
  check_shapes(truth, pred);
  const std::size_t n = truth.rows();
  const std::size_t l = truth.cols();

  MetricsReport rep;
  rep.per_attribute.assign(l, AttributeAccuracy{});

  double acc_sum = 0.0, prec_sum = 0.0, rec_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t inter = 0, y_size = 0, f_size = 0;
    for (std::size_t j = 0; j < l; ++j) {
      const int y = truth(i, j);
      const int f = pred(i, j);
      auto& at = rep.per_attribute[j];
      if (y == 1) {
        ++at.p;
        if (f == 1) ++at.tp;
      } else {
        ++at.n;
        if (f == 0) ++at.tn;
      }
      y_size += y;
      f_size += f;
      inter += (y == 1 && f == 1) ? 1 : 0;
    }
    const std::int64_t uni = y_size + f_size - inter;
    acc_sum += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    prec_sum += f_size == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(f_size);
    rec_sum += y_size == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(y_size);
  }

  double ma_sum = 0.0;
  for (std::size_t j = 0; j < l; ++j) {
    const auto& at = rep.per_attribute[j];
    if (at.p == 0) rep.no_positive_attrs.push_back(static_cast<int>(j));
    if (at.n == 0) rep.no_negative_attrs.push_back(static_cast<int>(j));
    const double tp_rate = at.p == 0 ? 0.0 : static_cast<double>(at.tp) / static_cast<double>(at.p);
    const double tn_rate = at.n == 0 ? 0.0 : static_cast<double>(at.tn) / static_cast<double>(at.n);
    ma_sum += tp_rate + tn_rate;
  }
  rep.mean_acc = ma_sum / (2.0 * static_cast<double>(l));

  const double inv_n = 1.0 / static_cast<double>(n);
  rep.example.acc = acc_sum * inv_n;
  rep.example.prec = prec_sum * inv_n;
  rep.example.rec = rec_sum * inv_n;
  const double pr = rep.example.prec + rep.example.rec;
  rep.example.f1 = pr > 0.0 ? 2.0 * rep.example.prec * rep.example.rec / pr : 0.0;
  return rep;
}

std::string format_metrics(const MetricsReport& r, const AttributeSchema* schema) {
  std::string out;
  out += "mA:   " + fmt6(r.mean_acc) + "\n";
  out += "Acc:  " + fmt6(r.example.acc) + "\n";
  out += "Prec: " + fmt6(r.example.prec) + "\n";
  out += "Rec:  " + fmt6(r.example.rec) + "\n";
  out += "F1:   " + fmt6(r.example.f1) + "\n";
  auto name_of = [&](int j) {
    return schema ? schema->name(j) : "attribute " + std::to_string(j);
  };
  for (int j : r.no_positive_attrs)
    out += "warning: " + name_of(j) + " has no positive samples, mA term set to 0\n";
  for (int j : r.no_negative_attrs)
    out += "warning: " + name_of(j) + " has no negative samples, mA term set to 0\n";
  return out;
}

std::string metrics_summary_text(const MetricsReport& r) {
  std::string out;
  out += "mA=" + fmt(r.mean_acc) + "\n";
  out += "acc=" + fmt(r.example.acc) + "\n";
  out += "prec=" + fmt(r.example.prec) + "\n";
  out += "rec=" + fmt(r.example.rec) + "\n";
  out += "f1=" + fmt(r.example.f1) + "\n";
  return out;
}

}  // namespace attrq
