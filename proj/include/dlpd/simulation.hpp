#pragma once

#include "dlpd/classifier.hpp"
#include "dlpd/core.hpp"

#include <string_view>

namespace dlpd {

// The four simulation designs. Coordinates 1..20 carry the class difference.
//   M1: mu_X = 1; mu_Y = 0 (1..20), 1 (21..p); Sigma = (0.5^|i-j|).
//   M2: mu_X = e^u; mu_Y = u (1..20), e^u (21..p); Sigma(u) = (u^|i-j|).
//   M3: mu_X = u; mu_Y = -u (1..20), u (21..p); Sigma(u) = u 11^T + (1-u) I.
//   M4 (d = 2, s = u1 + u2): mu_X = 0.5 + sin s (1..20), cos s (21..p);
//       mu_Y = cos s; Sigma = rho 11^T + (1-rho) I, rho = |u1 - u2| / s.
enum class ModelId { M1, M2, M3, M4 };

std::string_view to_string(ModelId id);
ModelId parse_model_id(std::string_view text);  // "M1".."M4" or "1".."4"
Index covariate_dim(ModelId id);

inline constexpr Index kSignalCoordinates = 20;

struct ModelSpec {
  ModelId id = ModelId::M1;
  Index p = 50;
  Index n1 = 100;
  Index n2 = 100;
  RngSeed seed{};

  Index covariate_dim() const { return dlpd::covariate_dim(id); }
  void validate() const;
};

OracleModel oracle_of(ModelId id, Index p);
inline OracleModel oracle_of(const ModelSpec& spec) {
  spec.validate();
  return oracle_of(spec.id, spec.p);
}

// Covariates i.i.d. U[0,1]^d for all X samples then all Y samples; then one
// Gaussian feature vector per sample in the same order. X rows come first.
DataSet sample_dataset(const ModelSpec& spec);

// Seed of the evaluation sample that accompanies a training seed.
RngSeed test_seed(RngSeed train_seed);
DataSet sample_test_dataset(const ModelSpec& spec, Index n1, Index n2);

// Sigma(u)^{-1} [mu_X(u) - mu_Y(u)]
Vector true_beta(const ModelSpec& spec, const CovariatePoint& u);

}  // namespace dlpd
