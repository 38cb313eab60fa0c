#pragma once

#include <stdexcept>
#include <string>

namespace attrq {

/// Malformed inputs: bad config documents, shape mismatches, out-of-range values.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem and stream failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace attrq
