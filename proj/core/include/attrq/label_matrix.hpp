#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "attrq/errors.hpp"

namespace attrq {

/// Dense binary matrix: N sample rows by L attribute columns, entries in {0,1}.
class LabelMatrix {
 public:
  LabelMatrix() = default;

  LabelMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static LabelMatrix from_data(std::size_t rows, std::size_t cols,
                               std::vector<std::uint8_t> data) {
    if (data.size() != rows * cols)
      throw ValidationError("LabelMatrix: data size does not match shape");
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i] > 1)
        throw ValidationError("LabelMatrix: non-binary entry at row " +
                              std::to_string(i / cols) + ", column " +
                              std::to_string(i % cols));
    }
    LabelMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::uint8_t operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  void set(std::size_t r, std::size_t c, std::uint8_t v) {
    if (v > 1) throw ValidationError("LabelMatrix: entry must be 0 or 1");
    data_[r * cols_ + c] = v;
  }

  std::span<const std::uint8_t> row(std::size_t r) const {
    return std::span<const std::uint8_t>(data_.data() + r * cols_, cols_);
  }

  const std::vector<std::uint8_t>& data() const { return data_; }

  bool operator==(const LabelMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> data_;
};

}  // namespace attrq
