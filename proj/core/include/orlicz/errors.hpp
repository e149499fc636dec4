#ifndef ORLICZ_ERRORS_HPP
#define ORLICZ_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace orlicz {

// A structural hypothesis on the operator or the nonlinearity failed.
// `tag` names the hypothesis ("phi1".."phi4", "g1".."g4", ...) and
// `witness` is the sample point where it was observed to fail.
class HypothesisError : public std::runtime_error {
public:
  HypothesisError(std::string tag, double witness, const std::string& what)
      : std::runtime_error(what), tag_(std::move(tag)), witness_(witness) {}
  const std::string& tag() const { return tag_; }
  double witness() const { return witness_; }

private:
  std::string tag_;
  double witness_;
};

// Root finding could not bracket the target within the configured range.
class BracketError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mountain-pass geometry could not be certified (no positive rim level,
// or no endpoint with negative energy within the search budget).
class GeometryError : public std::runtime_error {
public:
  GeometryError(std::string reason_tag, const std::string& what)
      : std::runtime_error(what), tag_(std::move(reason_tag)) {}
  const std::string& tag() const { return tag_; }

private:
  std::string tag_;
};

// An iterative solver ran out of its budget.  Carries the best iterate
// (nodal values) and its residual so callers can still write output.
class NonconvergenceError : public std::runtime_error {
public:
  NonconvergenceError(const std::string& what, std::vector<double> best,
                      double residual)
      : std::runtime_error(what), best_(std::move(best)), residual_(residual) {}
  const std::vector<double>& best_iterate() const { return best_; }
  double residual() const { return residual_; }

private:
  std::vector<double> best_;
  double residual_;
};

// An a-priori bound monitor exceeded its configured cap.
class BoundViolationError : public std::runtime_error {
public:
  BoundViolationError(const std::string& what, double eps, double value)
      : std::runtime_error(what), eps_(eps), value_(value) {}
  double eps() const { return eps_; }
  double value() const { return value_; }

private:
  double eps_;
  double value_;
};

class MeshMismatchError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace orlicz

#endif
