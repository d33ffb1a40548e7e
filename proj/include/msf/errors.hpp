#pragma once

#include <stdexcept>
#include <string>

namespace msf {

/// A scripted hash family was asked for a digest it has no entry for.
class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mutation attempted on a sealed filter.
class SealedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A query contradicted a structural guarantee of the filter (an inserted
/// element reported absent, or an SBF verdict below the true label). Only a
/// broken hash family or corrupted cells can cause this.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed dataset or element encoding.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace msf
