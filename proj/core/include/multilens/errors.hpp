#ifndef MULTILENS_ERRORS_HPP
#define MULTILENS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace multilens {

/// A traced ray passed within the exclusion radius of a point mass.
/// `plane_index` is the 1-based index of the plane where the ray was blocked.
class ObstructionError : public std::runtime_error {
 public:
  ObstructionError(int plane_index, double u, double v)
      : std::runtime_error("ray obstructed at plane " +
                           std::to_string(plane_index) + " near (" +
                           std::to_string(u) + ", " + std::to_string(v) + ")"),
        plane_index(plane_index),
        u(u),
        v(v) {}

  int plane_index;
  double u;
  double v;
};

/// Invalid domain object (bad field value, broken invariant).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// A search or construction step failed to reach its contract
/// (count mismatch, non-stabilizing grid search, non-monotone bisection).
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Root finding could not satisfy the request (not used for individual
/// diverged seeds, which are normal; this signals a misconfigured solve).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace multilens

#endif
