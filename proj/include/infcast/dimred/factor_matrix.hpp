#pragma once

#include "infcast/core/csv.hpp"
#include "infcast/core/types.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace infcast {

enum class CompressionMethod {
  pca_linear,
  pca_squared,
  pca_gauss_kernel,
  pca_poly_kernel,
  diffusion_map,
  lle,
  isomap,
  autoencoder
};

inline constexpr std::array<CompressionMethod, 8> kAllMethods = {
    CompressionMethod::pca_linear,    CompressionMethod::pca_squared, CompressionMethod::pca_gauss_kernel,
    CompressionMethod::pca_poly_kernel, CompressionMethod::diffusion_map, CompressionMethod::lle,
    CompressionMethod::isomap,        CompressionMethod::autoencoder};

constexpr std::string_view to_string(CompressionMethod m) {
  switch (m) {
    case CompressionMethod::pca_linear: return "pca_linear";
    case CompressionMethod::pca_squared: return "pca_squared";
    case CompressionMethod::pca_gauss_kernel: return "pca_gauss_kernel";
    case CompressionMethod::pca_poly_kernel: return "pca_poly_kernel";
    case CompressionMethod::diffusion_map: return "diffusion_map";
    case CompressionMethod::lle: return "lle";
    case CompressionMethod::isomap: return "isomap";
    case CompressionMethod::autoencoder: return "autoencoder";
  }
  return "unknown";
}

inline std::optional<CompressionMethod> parse_method(std::string_view name) {
  for (auto m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

/// T x q latent factors. Eigen-based methods also fill `eigenvalues`
/// (leading spectrum, descending), `explained_share` and `loadings`.
struct FactorMatrix {
  Matrix values;
  CompressionMethod method = CompressionMethod::pca_linear;
  Vector eigenvalues;
  Vector explained_share;
  Matrix loadings;
  std::vector<std::string> warnings;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

inline void write_factor_csv(std::ostream& out, const FactorMatrix& f, const std::vector<YearMonth>& dates) {
  if (static_cast<Index>(dates.size()) != f.rows()) throw ValidationError("write_factor_csv: date count mismatch");
  std::vector<std::string> cells{"date"};
  for (Index j = 0; j < f.cols(); ++j) cells.push_back("f" + std::to_string(j + 1));
  csv::write_row(out, cells);
  for (Index t = 0; t < f.rows(); ++t) {
    cells.assign(1, dates[static_cast<std::size_t>(t)].to_string());
    for (Index j = 0; j < f.cols(); ++j) cells.push_back(csv::format_double(f.values(t, j)));
    csv::write_row(out, cells);
  }
}

/// Sidecar with eigenvalues and explained shares (empty body for methods
/// without a spectrum).
inline void write_factor_diagnostics_csv(std::ostream& out, const FactorMatrix& f) {
  csv::write_row(out, {"component", "eigenvalue", "explained_share"});
  for (Index j = 0; j < f.eigenvalues.size(); ++j) {
    const double share = j < f.explained_share.size() ? f.explained_share(j) : std::nan("");
    csv::write_row(out, {std::to_string(j + 1), csv::format_double(f.eigenvalues(j)), csv::format_double(share)});
  }
}

}  // namespace infcast
