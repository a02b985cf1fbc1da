#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blockqd {

// A dense inverse/solve met a pivot below the reciprocal-condition floor.
class SingularError : public std::runtime_error {
public:
  SingularError(const std::string& what, double rcond)
      : std::runtime_error(what), rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

private:
  double rcond_;
};

// The minor of a quasi-determinant failed the rcond floor; the
// quasi-determinant is not well defined at this position.
class SingularMinorError : public SingularError {
public:
  using SingularError::SingularError;
};

// An LR-type pivot block q_m became numerically singular mid-sweep. The
// plain (unpivoted) iteration cannot continue; perturb the input instead.
class BreakdownError : public std::runtime_error {
public:
  BreakdownError(const std::string& what, std::size_t layer,
                 std::size_t pivot_index, double rcond)
      : std::runtime_error(what),
        layer_(layer),
        pivot_index_(pivot_index),
        rcond_(rcond) {}
  std::size_t layer() const noexcept { return layer_; }
  // 1-based index of the offending pivot block q_m.
  std::size_t pivot_index() const noexcept { return pivot_index_; }
  double rcond() const noexcept { return rcond_; }

private:
  std::size_t layer_;
  std::size_t pivot_index_;
  double rcond_;
};

// The small dense eigenvalue iteration did not converge, or a computed
// value failed its residual certificate.
class EigenvalueError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed external input (problem/measure files).
class InputError : public std::runtime_error {
public:
  enum class Kind { Parse, Dimension, Io };
  InputError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

}  // namespace blockqd
