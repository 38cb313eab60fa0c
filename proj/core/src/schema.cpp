#include "attrq/schema.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "attrq/errors.hpp"
#include "attrq/rng.hpp"

namespace attrq {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

AttributeSchema AttributeSchema::from_names(std::vector<std::string> names) {
  if (names.empty())
    throw ValidationError("attribute schema: name list is empty");
  AttributeSchema s;
  s.names_ = std::move(names);
  for (std::size_t i = 0; i < s.names_.size(); ++i) {
    const std::string& n = s.names_[i];
    if (n.empty())
      throw ValidationError("attribute schema: empty name at position " +
                            std::to_string(i));
    for (char c : n) {
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ':')
        throw ValidationError("attribute schema: name '" + n +
                              "' contains a separator character");
    }
    auto [it, inserted] = s.index_.emplace(n, static_cast<int>(i));
    if (!inserted)
      throw ValidationError("attribute schema: duplicate name '" + n + "'");
  }
  std::string joined;
  for (const auto& n : s.names_) {
    joined += n;
    joined += '\n';
  }
  s.hash_ = fnv1a64(joined);
  return s;
}

int AttributeSchema::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

GroupConfig GroupConfig::parse(const std::string& text,
                               const AttributeSchema& schema) {
  GroupConfig cfg;
  cfg.attribute_count_ = schema.count();
  std::vector<int> owner(schema.count(), -1);

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t colon = t.find(':');
    if (colon == std::string::npos)
      throw ValidationError("group config line " + std::to_string(line_no) +
                            ": missing ':' separator");
    std::string gname = trim(t.substr(0, colon));
    if (gname.empty())
      throw ValidationError("group config line " + std::to_string(line_no) +
                            ": empty group name");
    for (const auto& g : cfg.groups_) {
      if (g.name == gname)
        throw ValidationError("group config: duplicate group name '" + gname + "'");
    }

    AttributeGroup group;
    group.name = gname;
    std::string rest = t.substr(colon + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      std::size_t comma = rest.find(',', pos);
      std::string tok = trim(comma == std::string::npos
                                 ? rest.substr(pos)
                                 : rest.substr(pos, comma - pos));
      if (!tok.empty()) {
        int idx = schema.find(tok);
        if (idx < 0)
          throw ValidationError("group config: unknown attribute '" + tok +
                                "' in group '" + gname + "'");
        if (owner[idx] >= 0)
          throw ValidationError("group config: duplicate attribute '" + tok + "'");
        owner[idx] = static_cast<int>(cfg.groups_.size());
        group.attributes.push_back(idx);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (group.attributes.empty())
      throw ValidationError("group config: empty group '" + gname + "'");
    cfg.groups_.push_back(std::move(group));
  }

  if (cfg.groups_.empty())
    throw ValidationError("group config: document defines no groups");
  for (int i = 0; i < schema.count(); ++i) {
    if (owner[i] < 0)
      throw ValidationError("group config: missing attribute '" +
                            schema.name(i) + "'");
  }
  return cfg;
}

GroupConfig GroupConfig::single_group(const AttributeSchema& schema,
                                      const std::string& name) {
  GroupConfig cfg;
  cfg.attribute_count_ = schema.count();
  AttributeGroup g;
  g.name = name;
  g.attributes.resize(schema.count());
  for (int i = 0; i < schema.count(); ++i) g.attributes[i] = i;
  cfg.groups_.push_back(std::move(g));
  return cfg;
}

std::string GroupConfig::to_text(const AttributeSchema& schema) const {
  std::string out;
  for (const auto& g : groups_) {
    out += g.name;
    out += ":";
    for (std::size_t i = 0; i < g.attributes.size(); ++i) {
      out += i == 0 ? " " : ", ";
      out += schema.name(g.attributes[i]);
    }
    out += '\n';
  }
  return out;
}

GroupConfig load_group_config(const std::string& text,
                              const AttributeSchema& schema) {
  return GroupConfig::parse(text, schema);
}

double rho_for(double c) {
  if (!(c >= 0.0) || c >= 1.0)
    throw ValidationError("rho_for: imbalance coefficient " +
                          std::to_string(c) + " outside [0, 1)");
  if (c < 0.05) return 0.15;
  if (c < 0.25) return 0.25;
  if (c < 0.35) return 0.35;
  if (c < 0.45) return 0.45;
  return 0.55;
}

GroupStats compute_group_stats(const LabelMatrix& labels,
                               std::span<const int> group) {
  if (labels.rows() == 0)
    throw ValidationError("compute_group_stats: empty dataset");
  if (group.empty())
    throw ValidationError("compute_group_stats: empty group");
  for (int a : group) {
    if (a < 0 || static_cast<std::size_t>(a) >= labels.cols())
      throw ValidationError("compute_group_stats: attribute index " +
                            std::to_string(a) + " out of range");
  }

  GroupStats st;
  st.attr_count = static_cast<int>(group.size());
  st.n_samples = static_cast<std::int64_t>(labels.rows());
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    for (int a : group) st.positive_sum += labels(r, static_cast<std::size_t>(a));
  }
  const std::int64_t denom =
      static_cast<std::int64_t>(st.attr_count) * st.n_samples - st.positive_sum;
  if (denom == 0)
    throw ValidationError(
        "compute_group_stats: degenerate group, every label positive");
  st.imbalance = static_cast<double>(st.positive_sum) / static_cast<double>(denom);
  st.rho = rho_for(st.imbalance);
  return st;
}

}  // namespace attrq
