#pragma once

// shared sampling helpers for the test suites

#include <random>

#include "chg/hermitian.hpp"
#include "chg/projective.hpp"

namespace chg::testsupport {

inline CVec cv(std::initializer_list<cplx> entries) {
  CVec v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (cplx c : entries) v(i++) = c;
  return v;
}

inline ProjectivePoint random_point(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVec v(n + 1);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
  return normalize_point(v);
}

// Exact boundary point with the corner coordinates bounded away from zero:
// given z_0 and the middle block, the boundary condition fixes Re(z_0
// conj(z_n)) and leaves Im free.
inline ProjectivePoint random_boundary_point(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
  CVec v(n + 1);
  v(0) = std::polar(mag(rng), ang(rng));
  for (int j = 1; j < n; ++j) v(j) = cplx(g(rng), g(rng)) * 0.7;
  double c = -0.5 * v.segment(1, n - 1).squaredNorm();
  double s = (ang(rng) < M_PI ? 1.0 : -1.0) * mag(rng);
  v(n) = std::conj(cplx(c, s) / v(0));
  return normalize_point(v);
}

inline CMat random_unitary(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMat> qr(A);
  return qr.householderQ() * CMat::Identity(n, n);
}

}  // namespace chg::testsupport
