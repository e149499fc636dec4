#ifndef ORLICZ_SOURCE_HPP
#define ORLICZ_SOURCE_HPP

#include <functional>
#include <string>
#include <vector>

#include "orlicz/mesh.hpp"

namespace orlicz {

// Right-hand side f, evaluated at the element quadrature points.
// Accepts a constant, a nodal vector (interpolated), or a callable.
class SourceTerm {
public:
  SourceTerm() : SourceTerm(0.0) {}
  explicit SourceTerm(double constant);
  explicit SourceTerm(std::vector<double> nodal);
  explicit SourceTerm(std::function<double(double, double)> fn);

  // one sample per element point
  std::vector<double> sample(const Mesh& mesh) const;

  // quadrature L^N norm with N tied to the mesh dimension
  double lN_norm(const Mesh& mesh) const;
  double lq_norm_on(const Mesh& mesh, double q) const;

  // "const:<v>" or "file:<csv of nodal values>"
  static SourceTerm parse(const std::string& spec);

private:
  enum class Kind { Constant, Nodal, Callable } kind_;
  double constant_ = 0.0;
  std::vector<double> nodal_;
  std::function<double(double, double)> fn_;
};

}  // namespace orlicz

#endif
