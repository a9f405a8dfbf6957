#pragma once

#include "infcast/core/types.hpp"
#include "infcast/dimred/autoencoder.hpp"
#include "infcast/dimred/diffusion_map.hpp"
#include "infcast/dimred/factor_matrix.hpp"
#include "infcast/dimred/isomap.hpp"
#include "infcast/dimred/lle.hpp"
#include "infcast/dimred/pca.hpp"

#include <algorithm>
#include <string>

namespace infcast {

/// Per-method parameters. Zero means "use the default rule".
struct MethodParams {
  double poly_scale = 0.0;   // c0
  double gauss_scale = 0.0;  // c1
  int diffusion_steps = 0;   // n, default T
  Index diffusion_k = 0;
  Index lle_k = 0;
  Index isomap_k = 0;
  AutoencoderConfig autoencoder;
};

struct CompressionSpec {
  CompressionMethod method = CompressionMethod::pca_linear;
  Index q = 5;
  MethodParams params;
};

inline void validate(const CompressionSpec& spec, Index t, Index k) {
  const Index cap = std::min(t, k);
  if (spec.q < 1 || spec.q >= cap) {
    throw ValidationError("compress: q=" + std::to_string(spec.q) + " must lie in [1, " + std::to_string(cap - 1) +
                          "] for a " + std::to_string(t) + "x" + std::to_string(k) + " panel");
  }
  const auto& p = spec.params;
  if (p.poly_scale < 0.0 || p.gauss_scale < 0.0) throw ValidationError("compress: kernel scales must be positive");
  if (p.diffusion_steps < 0 || p.diffusion_k < 0 || p.lle_k < 0 || p.isomap_k < 0) {
    throw ValidationError("compress: neighbor counts and step counts must be positive");
  }
  if (p.autoencoder.learning_rate <= 0.0) throw ValidationError("compress: autoencoder learning rate must be positive");
}

inline FactorMatrix compress(const Matrix& x, const CompressionSpec& spec) {
  validate(spec, x.rows(), x.cols());
  const auto& p = spec.params;
  switch (spec.method) {
    case CompressionMethod::pca_linear: return pca_linear(x, spec.q);
    case CompressionMethod::pca_squared: return pca_squared(x, spec.q);
    case CompressionMethod::pca_gauss_kernel: return kernel_pca(x, spec.q, KernelKind::gaussian, p.gauss_scale);
    case CompressionMethod::pca_poly_kernel: return kernel_pca(x, spec.q, KernelKind::polynomial, p.poly_scale);
    case CompressionMethod::diffusion_map: return diffusion_map(x, spec.q, p.diffusion_steps, p.diffusion_k);
    case CompressionMethod::lle: return lle(x, spec.q, p.lle_k);
    case CompressionMethod::isomap: return isomap(x, spec.q, p.isomap_k);
    case CompressionMethod::autoencoder: return autoencoder(x, spec.q, p.autoencoder);
  }
  throw ValidationError("compress: unknown method");
}

}  // namespace infcast
