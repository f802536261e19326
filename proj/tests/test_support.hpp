#pragma once

#include "dlpd/core.hpp"

namespace testing_support {

inline dlpd::Matrix random_matrix(dlpd::Rng& rng, dlpd::Index rows, dlpd::Index cols) {
  dlpd::Matrix m(rows, cols);
  for (dlpd::Index j = 0; j < cols; ++j)
    for (dlpd::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline dlpd::Vector random_vector(dlpd::Rng& rng, dlpd::Index n) {
  dlpd::Vector v(n);
  for (dlpd::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

// Well-conditioned SPD matrix: A A^T / p + 0.5 I.
inline dlpd::Matrix random_spd(dlpd::Rng& rng, dlpd::Index p) {
  const dlpd::Matrix a = random_matrix(rng, p, p);
  return a * a.transpose() / static_cast<double>(p) + 0.5 * dlpd::Matrix::Identity(p, p);
}

// Sample covariance of k points, singular when k <= p.
inline dlpd::Matrix random_sample_covariance(dlpd::Rng& rng, dlpd::Index p, dlpd::Index k) {
  const dlpd::Matrix x = random_matrix(rng, k, p);
  const dlpd::Matrix c = x.rowwise() - x.colwise().mean();
  dlpd::Matrix s = c.transpose() * c / static_cast<double>(k);
  return 0.5 * (s + s.transpose());
}

}  // namespace testing_support
