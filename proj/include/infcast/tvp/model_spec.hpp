#pragma once

#include "infcast/core/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace infcast {

enum class Prior { horseshoe, ssvs };

constexpr std::string_view to_string(Prior p) { return p == Prior::horseshoe ? "hs" : "ssvs"; }

inline std::optional<Prior> parse_prior(std::string_view s) {
  if (s == "hs" || s == "horseshoe") return Prior::horseshoe;
  if (s == "ssvs") return Prior::ssvs;
  return std::nullopt;
}

/// `draws` counts every Gibbs sweep including burn-in.
struct McmcBudget {
  int draws = 10000;
  int burn = 2000;
  int thin = 1;

  int retained() const { return (draws - burn) / thin; }

  void validate() const {
    if (burn < 0 || draws <= burn) throw ValidationError("mcmc: need draws > burn >= 0");
    if (thin < 1) throw ValidationError("mcmc: thin must be >= 1");
  }
};

/// mu ~ N(mu_mean, mu_var), (rho + 1) / 2 ~ Beta(rho_a, rho_b),
/// theta2 ~ Gamma(theta2_shape, rate theta2_rate).
struct SvPriors {
  double mu_mean = 0.0;
  double mu_var = 10.0;
  double rho_a = 25.0;
  double rho_b = 5.0;
  double theta2_shape = 0.5;
  double theta2_rate = 0.5;
};

/// Spike and slab variances as multiples of the least-squares coefficient
/// variance. Explicit vectors (length 2M, or M in constant mode) override
/// the data-driven scaling.
struct SsvsSettings {
  double spike = 0.01;
  double slab = 100.0;
  double inclusion = 0.5;
  double ridge = 1e-6;
  Vector spike_var;
  Vector slab_var;
};

struct ModelSpec {
  bool tvp = true;
  Prior prior = Prior::horseshoe;
  McmcBudget mcmc;
  SvPriors sv;
  SsvsSettings ssvs;
  std::uint64_t seed = 1;
  bool store_paths = false;  // keep every retained beta_t path

  void validate(Index m) const {
    mcmc.validate();
    if (m < 1) throw ValidationError("model: need at least one regressor");
    if (!(sv.mu_var > 0.0) || !(sv.rho_a > 0.0) || !(sv.rho_b > 0.0) || !(sv.theta2_shape > 0.0) ||
        !(sv.theta2_rate > 0.0)) {
      throw ValidationError("model: stochastic-volatility prior parameters must be positive");
    }
    if (!(ssvs.spike > 0.0) || !(ssvs.slab > 0.0)) throw ValidationError("model: SSVS scales must be positive");
    if (!(ssvs.inclusion > 0.0 && ssvs.inclusion < 1.0)) throw ValidationError("model: SSVS inclusion in (0, 1)");
  }
};

}  // namespace infcast
