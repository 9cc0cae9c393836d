#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cbp {

/// Weighted means left the invariant region by more than the tolerance.
class WeakMonotonicityViolation : public std::runtime_error {
 public:
  WeakMonotonicityViolation(std::size_t index, double mean, double m, double M)
      : std::runtime_error(describe(index, mean, m, M)), index_(index), mean_(mean) {}

  std::size_t index() const noexcept { return index_; }
  double mean() const noexcept { return mean_; }

 private:
  static std::string describe(std::size_t index, double mean, double m, double M) {
    std::ostringstream os;
    os.precision(17);
    os << "weighted mean " << mean << " at index " << index << " outside [" << m << ", " << M << "]";
    return os.str();
  }

  std::size_t index_;
  double mean_;
};

class CflViolation : public std::runtime_error {
 public:
  CflViolation(const std::string& what, double admissible_dt)
      : std::runtime_error(what + " (admissible dt " + std::to_string(admissible_dt) + ")"),
        admissible_dt_(admissible_dt) {}

  double admissible_dt() const noexcept { return admissible_dt_; }

 private:
  double admissible_dt_;
};

/// Saw-tooth set whose total mass cannot be placed inside [m, M].
class InfeasibleRedistribution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeMismatch : public std::invalid_argument {
 public:
  SizeMismatch(const std::string& where, std::size_t expected, std::size_t got)
      : std::invalid_argument(where + ": expected length " + std::to_string(expected) + ", got " +
                              std::to_string(got)) {}
};

inline void require_size(const char* where, std::size_t expected, std::size_t got) {
  if (expected != got) throw SizeMismatch(where, expected, got);
}

}  // namespace cbp
