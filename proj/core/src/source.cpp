#include "orlicz/source.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "orlicz/errors.hpp"

namespace orlicz {

SourceTerm::SourceTerm(double constant) : kind_(Kind::Constant), constant_(constant) {}
SourceTerm::SourceTerm(std::vector<double> nodal)
    : kind_(Kind::Nodal), nodal_(std::move(nodal)) {}
SourceTerm::SourceTerm(std::function<double(double, double)> fn)
    : kind_(Kind::Callable), fn_(std::move(fn)) {}

std::vector<double> SourceTerm::sample(const Mesh& mesh) const {
  std::vector<double> out(mesh.num_elements());
  switch (kind_) {
    case Kind::Constant:
      std::fill(out.begin(), out.end(), constant_);
      break;
    case Kind::Nodal: {
      if (static_cast<int>(nodal_.size()) != mesh.num_nodes())
        throw MeshMismatchError("source nodal vector does not match mesh");
      const int nv = mesh.verts_per_element();
      for (int e = 0; e < mesh.num_elements(); ++e) {
        double v = 0.0;
        for (int l = 0; l < nv; ++l) v += nodal_[mesh.vertex(e, l)];
        out[e] = v / nv;
      }
      break;
    }
    case Kind::Callable:
      for (int e = 0; e < mesh.num_elements(); ++e)
        out[e] = fn_(mesh.centroid(e, 0), mesh.dim() == 2 ? mesh.centroid(e, 1) : 0.0);
      break;
  }
  return out;
}

double SourceTerm::lq_norm_on(const Mesh& mesh, double q) const {
  auto s = sample(mesh);
  return lq_norm(s, mesh, q);
}

double SourceTerm::lN_norm(const Mesh& mesh) const {
  return lq_norm_on(mesh, static_cast<double>(mesh.dim()));
}

SourceTerm SourceTerm::parse(const std::string& spec) {
  if (spec.rfind("const:", 0) == 0) return SourceTerm(std::stod(spec.substr(6)));
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw ConfigError("cannot open source file: " + spec.substr(5));
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      double v;
      if (ls >> v) vals.push_back(v);
    }
    return SourceTerm(std::move(vals));
  }
  throw ConfigError("unknown source '" + spec + "' (expected const:<v> or file:<path>)");
}

}  // namespace orlicz
