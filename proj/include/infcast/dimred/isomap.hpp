#pragma once

#include "infcast/core/linalg.hpp"
#include "infcast/core/types.hpp"
#include "infcast/dimred/factor_matrix.hpp"
#include "infcast/dimred/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace infcast {

inline constexpr double kNoEdge = std::numeric_limits<double>::infinity();

/// Symmetric k-NN graph: (i, j) is an edge with weight dist(i, j) when
/// either point is among the other's k nearest neighbors.
inline Matrix knn_graph(const Matrix& dist, Index k) {
  const Index n = dist.rows();
  Matrix g = Matrix::Constant(n, n, kNoEdge);
  g.diagonal().setZero();
  const auto nn = neighbors::knn(dist, k);
  for (Index i = 0; i < n; ++i) {
    for (Index j : nn[static_cast<std::size_t>(i)]) {
      g(i, j) = dist(i, j);
      g(j, i) = dist(j, i);
    }
  }
  return g;
}

/// All-pairs shortest paths (Floyd-Warshall). Unreachable pairs stay +inf.
inline Matrix shortest_paths(const Matrix& graph) {
  Matrix d = graph;
  const Index n = d.rows();
  for (Index m = 0; m < n; ++m) {
    for (Index i = 0; i < n; ++i) {
      const double dim = d(i, m);
      if (dim == kNoEdge) continue;
      for (Index j = 0; j < n; ++j) {
        const double via = dim + d(m, j);
        if (via < d(i, j)) d(i, j) = via;
      }
    }
  }
  return d;
}

inline std::vector<std::vector<Index>> connected_components(const Matrix& graph) {
  const Index n = graph.rows();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<Index>> comps;
  for (Index s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    comps.emplace_back();
    std::vector<Index> stack{s};
    label[static_cast<std::size_t>(s)] = static_cast<int>(comps.size() - 1);
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      comps.back().push_back(u);
      for (Index v = 0; v < n; ++v) {
        if (v != u && graph(u, v) != kNoEdge && label[static_cast<std::size_t>(v)] < 0) {
          label[static_cast<std::size_t>(v)] = static_cast<int>(comps.size() - 1);
          stack.push_back(v);
        }
      }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  return comps;
}

inline std::string describe_components(const std::vector<std::vector<Index>>& comps) {
  std::ostringstream os;
  os << comps.size() << " components:";
  for (const auto& c : comps) {
    os << " {";
    for (std::size_t i = 0; i < c.size() && i < 8; ++i) os << (i ? "," : "") << c[i];
    if (c.size() > 8) os << ",...(" << c.size() << ")";
    os << "}";
  }
  return os.str();
}

struct MdsResult {
  Matrix coordinates;
  Vector eigenvalues;  // full spectrum of B, descending
  std::vector<std::string> warnings;
};

/// Classical MDS: B = -1/2 J D^2 J, coordinates = top-q eigenvectors scaled
/// by sqrt(eigenvalue).
inline MdsResult classical_mds(const Matrix& dist, Index q) {
  const Index n = dist.rows();
  if (dist.cols() != n) throw ValidationError("classical_mds: distance matrix must be square");
  if (q < 1 || q >= n) throw ValidationError("classical_mds: q must lie in [1, n-1]");
  if (!dist.allFinite()) throw NumericalError("classical_mds: non-finite distances");
  const Matrix j = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const Matrix b = symmetrize(-0.5 * j * dist.cwiseProduct(dist) * j);
  const SpectralDecomposition eig = symmetric_eigen(b);
  MdsResult r;
  r.eigenvalues = eig.eigenvalues;
  r.coordinates.resize(n, q);
  for (Index s = 0; s < q; ++s) {
    r.coordinates.col(s) = eig.eigenvectors.col(s) * std::sqrt(std::max(0.0, eig.eigenvalues(s)));
  }
  const double most_negative = eig.eigenvalues.minCoeff();
  if (most_negative < 0.0 && -most_negative > eig.eigenvalues(q - 1)) {
    std::ostringstream os;
    os << "classical_mds: negative eigenvalue " << most_negative << " exceeds the q-th positive eigenvalue "
       << eig.eigenvalues(q - 1) << " in magnitude";
    r.warnings.push_back(os.str());
  }
  return r;
}

/// Smallest k giving a connected k-NN graph, plus a margin of two.
inline Index isomap_auto_k(const Matrix& dist) {
  const Index n = dist.rows();
  for (Index k = 1; k < n; ++k) {
    if (connected_components(knn_graph(dist, k)).size() == 1) return std::min<Index>(k + 2, n - 1);
  }
  return n - 1;
}

struct IsomapResult {
  FactorMatrix factors;
  Matrix geodesic;
  Index k = 0;
};

/// Points are the T time rows of X, dissimilarities are Manhattan distances.
/// k <= 0 selects isomap_auto_k.
inline IsomapResult isomap_full(const Matrix& x, Index q, Index k = 0) {
  const Matrix dist = neighbors::manhattan(x);
  IsomapResult r;
  r.k = k > 0 ? k : isomap_auto_k(dist);
  const Matrix graph = knn_graph(dist, r.k);
  const auto comps = connected_components(graph);
  if (comps.size() > 1) {
    throw NumericalError("isomap: neighborhood graph (k=" + std::to_string(r.k) + ") is disconnected, " +
                         describe_components(comps));
  }
  r.geodesic = shortest_paths(graph);
  MdsResult mds = classical_mds(r.geodesic, q);
  r.factors.method = CompressionMethod::isomap;
  r.factors.values = std::move(mds.coordinates);
  r.factors.eigenvalues = mds.eigenvalues.head(q);
  const double pos = mds.eigenvalues.cwiseMax(0.0).sum();
  r.factors.explained_share = pos > 0.0 ? Vector(r.factors.eigenvalues.cwiseMax(0.0) / pos) : Vector::Zero(q);
  r.factors.warnings = std::move(mds.warnings);
  return r;
}

inline FactorMatrix isomap(const Matrix& x, Index q, Index k = 0) { return isomap_full(x, q, k).factors; }

}  // namespace infcast
