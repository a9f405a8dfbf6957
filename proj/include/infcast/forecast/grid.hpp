#pragma once

#include "infcast/core/types.hpp"
#include "infcast/dimred/factor_matrix.hpp"
#include "infcast/tvp/model_spec.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace infcast {

enum class ModelFamily { factor, autoregressive, extended_pc };

/// One model of the forecasting grid.
struct ModelCell {
  ModelFamily family = ModelFamily::factor;
  CompressionMethod method = CompressionMethod::pca_linear;  // factor models only
  Index q = 0;                                               // factor models only
  bool tvp = false;
  Prior prior = Prior::horseshoe;

  /// e.g. "pca_linear_q5_tvp_hs", "ar_const_hs", "epc_const_ssvs".
  std::string id() const {
    std::string s;
    switch (family) {
      case ModelFamily::factor: s = std::string(to_string(method)) + "_q" + std::to_string(q); break;
      case ModelFamily::autoregressive: s = "ar"; break;
      case ModelFamily::extended_pc: s = "epc"; break;
    }
    return s + (tvp ? "_tvp_" : "_const_") + std::string(to_string(prior));
  }

  bool operator==(const ModelCell&) const = default;
};

inline std::optional<ModelCell> parse_model_id(std::string_view id) {
  auto cut_suffix = [&](std::string_view& s) -> std::string_view {
    const auto pos = s.rfind('_');
    if (pos == std::string_view::npos) return {};
    auto tail = s.substr(pos + 1);
    s = s.substr(0, pos);
    return tail;
  };
  std::string_view rest = id;
  ModelCell c;
  const auto prior = parse_prior(cut_suffix(rest));
  if (!prior) return std::nullopt;
  c.prior = *prior;
  const auto mode = cut_suffix(rest);
  if (mode != "tvp" && mode != "const") return std::nullopt;
  c.tvp = mode == "tvp";
  if (rest == "ar") {
    c.family = ModelFamily::autoregressive;
    return c;
  }
  if (rest == "epc") {
    c.family = ModelFamily::extended_pc;
    return c;
  }
  const auto qpart = cut_suffix(rest);
  if (qpart.size() < 2 || qpart[0] != 'q') return std::nullopt;
  try {
    c.q = std::stoi(std::string(qpart.substr(1)));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  const auto m = parse_method(rest);
  if (!m || c.q < 1) return std::nullopt;
  c.method = *m;
  return c;
}

struct GridConfig {
  std::vector<CompressionMethod> methods{kAllMethods.begin(), kAllMethods.end()};
  std::vector<Index> qs{5, 15, 30};
  std::vector<bool> tvp_modes{false, true};
  std::vector<Prior> priors{Prior::horseshoe, Prior::ssvs};
  bool include_ar = true;
  bool include_epc = true;  // constant-parameter only
};

inline std::vector<ModelCell> build_grid(const GridConfig& g) {
  std::vector<ModelCell> out;
  for (auto m : g.methods)
    for (auto q : g.qs)
      for (bool tvp : g.tvp_modes)
        for (auto p : g.priors) out.push_back({ModelFamily::factor, m, q, tvp, p});
  if (g.include_ar) {
    for (bool tvp : g.tvp_modes)
      for (auto p : g.priors) out.push_back({ModelFamily::autoregressive, CompressionMethod::pca_linear, 0, tvp, p});
  }
  if (g.include_epc) {
    for (auto p : g.priors) out.push_back({ModelFamily::extended_pc, CompressionMethod::pca_linear, 0, false, p});
  }
  return out;
}

/// The benchmark of every relative table: constant-parameter AR with the
/// horseshoe prior.
inline std::string benchmark_id() { return "ar_const_hs"; }

}  // namespace infcast
