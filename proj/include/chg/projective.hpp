#pragma once

// Complex projective linear algebra: canonical points, subspaces given by
// orthonormal frames, span/meet, the Fubini-Study metric and the second
// compound (wedge-square) action used for line dynamics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "chg/config.hpp"
#include "chg/errors.hpp"

namespace chg {

// Multiplies v by the unit phase that makes the entry of largest magnitude
// real and positive. Ties within `tie` of the maximum resolve to the first
// index, so the result is a total canonical form.
template <typename Derived>
void canonicalize_phase(Eigen::MatrixBase<Derived>& v, double tie = tol::phase_tie) {
  double maxmag = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) maxmag = std::max(maxmag, std::abs(v(i)));
  if (maxmag <= 0.0) return;
  Eigen::Index pick = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= maxmag - tie) { pick = i; break; }
  }
  cplx c = v(pick);
  double a = std::abs(c);
  if (a == 0.0) return;
  v *= std::conj(c) / a;
  // force the pivot entry exactly real
  v(pick) = cplx(std::abs(v(pick)), 0.0);
}

struct ProjectivePoint {
  CVec coords;  // unit-norm, phase-canonical representative
  int dim_n = 0;

  int ambient() const { return dim_n; }
};

inline ProjectivePoint normalize_point(const CVec& v) {
  double nrm = v.norm();
  if (!(nrm > tol::zero_vector)) fail(errc::zero_vector, "representative has norm below threshold");
  CVec w = v / nrm;
  canonicalize_phase(w);
  return ProjectivePoint{std::move(w), static_cast<int>(v.size()) - 1};
}

inline ProjectivePoint basis_point(int n, int i) {
  CVec v = CVec::Zero(n + 1);
  v(i) = 1.0;
  return normalize_point(v);
}

// Fubini-Study distance in radians, in [0, pi/2]. Computed with atan2 so that
// nearly-coincident and nearly-orthogonal pairs are both stable.
inline double fs_distance(const ProjectivePoint& p, const ProjectivePoint& q) {
  if (p.coords.size() != q.coords.size())
    fail(errc::dimension_mismatch, "points live in different ambient spaces");
  cplx overlap = p.coords.dot(q.coords);  // p^H q
  CVec perp = q.coords - overlap * p.coords;
  return std::atan2(perp.norm(), std::abs(overlap));
}

inline bool points_equal(const ProjectivePoint& p, const ProjectivePoint& q,
                         double tolr = tol::coincident) {
  return fs_distance(p, q) < tolr;
}

// A projective subspace of dimension proj_dim, stored as k+1 standard-
// orthonormal columns. An empty frame encodes the empty intersection.
struct ProjectiveSubspace {
  CMat frame;  // (n+1) x (k+1), orthonormal columns
  int dim_n = 0;

  int proj_dim() const { return static_cast<int>(frame.cols()) - 1; }
  bool is_empty() const { return frame.cols() == 0; }
  int ambient() const { return dim_n; }
};

inline ProjectiveSubspace subspace_of_point(const ProjectivePoint& p) {
  CMat f(p.coords.size(), 1);
  f.col(0) = p.coords;
  return ProjectiveSubspace{std::move(f), p.dim_n};
}

namespace detail {

// Orthonormal column basis of the column space of M, rank decided at
// rank_rel * sigma_max.
inline CMat column_space(const CMat& M, double rank_rel = tol::rank_rel) {
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double cutoff = sv.size() ? sv(0) * rank_rel : 0.0;
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the right null space of M at the same threshold.
inline CMat null_space(const CMat& M, double rank_rel = tol::rank_rel) {
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cutoff = sv.size() ? sv(0) * rank_rel : 0.0;
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;
  return svd.matrixV().rightCols(M.cols() - r);
}

// Orthonormal complement of an orthonormal frame inside C^{rows}.
inline CMat frame_complement(const CMat& F, Eigen::Index rows) {
  if (F.cols() == 0) return CMat::Identity(rows, rows);
  return null_space(F.adjoint());
}

}  // namespace detail

inline ProjectiveSubspace span(const std::vector<CVec>& reps, int dim_n,
                               double rank_rel = tol::rank_rel) {
  if (reps.empty()) fail(errc::bad_config, "span of an empty list");
  CMat M(dim_n + 1, static_cast<Eigen::Index>(reps.size()));
  for (size_t i = 0; i < reps.size(); ++i) {
    if (reps[i].size() != dim_n + 1) fail(errc::dimension_mismatch, "span: mixed ambient dimensions");
    M.col(static_cast<Eigen::Index>(i)) = reps[i].normalized();
  }
  return ProjectiveSubspace{detail::column_space(M, rank_rel), dim_n};
}

inline ProjectiveSubspace span(const std::vector<ProjectivePoint>& pts,
                               double rank_rel = tol::rank_rel) {
  std::vector<CVec> reps;
  reps.reserve(pts.size());
  for (const auto& p : pts) reps.push_back(p.coords);
  if (pts.empty()) fail(errc::bad_config, "span of an empty list");
  return span(reps, pts.front().dim_n, rank_rel);
}

inline ProjectiveSubspace span(const std::vector<ProjectiveSubspace>& subs,
                               double rank_rel = tol::rank_rel) {
  if (subs.empty()) fail(errc::bad_config, "span of an empty list");
  std::vector<CVec> reps;
  for (const auto& s : subs)
    for (Eigen::Index j = 0; j < s.frame.cols(); ++j) reps.push_back(s.frame.col(j));
  return span(reps, subs.front().dim_n, rank_rel);
}

inline ProjectiveSubspace span2(const ProjectiveSubspace& a, const ProjectiveSubspace& b,
                                double rank_rel = tol::rank_rel) {
  return span(std::vector<ProjectiveSubspace>{a, b}, rank_rel);
}

// Intersection, computed as the null space of the stacked orthogonal
// complements. Returns an empty subspace when the intersection is trivial.
inline ProjectiveSubspace meet(const ProjectiveSubspace& a, const ProjectiveSubspace& b,
                               double rank_rel = tol::rank_rel) {
  if (a.dim_n != b.dim_n) fail(errc::dimension_mismatch, "meet: mixed ambient dimensions");
  Eigen::Index N = a.dim_n + 1;
  CMat ca = detail::frame_complement(a.frame, N);
  CMat cb = detail::frame_complement(b.frame, N);
  CMat rows(ca.cols() + cb.cols(), N);
  rows.topRows(ca.cols()) = ca.adjoint();
  rows.bottomRows(cb.cols()) = cb.adjoint();
  if (rows.rows() == 0) return ProjectiveSubspace{CMat::Identity(N, N), a.dim_n};
  CMat null = detail::null_space(rows, rank_rel);
  return ProjectiveSubspace{std::move(null), a.dim_n};
}

inline bool subspace_contains(const ProjectiveSubspace& s, const ProjectivePoint& p,
                              double tolr = 1e-8) {
  if (s.is_empty()) return false;
  CVec resid = p.coords - s.frame * (s.frame.adjoint() * p.coords);
  return resid.norm() < tolr;
}

// sin of the principal angle from p to the nearest point of s
inline double point_to_subspace(const ProjectivePoint& p, const ProjectiveSubspace& s) {
  if (s.is_empty()) return M_PI / 2;
  CVec resid = p.coords - s.frame * (s.frame.adjoint() * p.coords);
  return std::asin(std::min(1.0, resid.norm()));
}

// Frobenius distance between orthogonal projectors; 0 iff equal subspaces.
inline double subspace_distance(const ProjectiveSubspace& a, const ProjectiveSubspace& b) {
  if (a.dim_n != b.dim_n) fail(errc::dimension_mismatch, "subspace_distance");
  Eigen::Index N = a.dim_n + 1;
  CMat pa = a.is_empty() ? CMat::Zero(N, N) : CMat(a.frame * a.frame.adjoint());
  CMat pb = b.is_empty() ? CMat::Zero(N, N) : CMat(b.frame * b.frame.adjoint());
  return (pa - pb).norm();
}

inline ProjectiveSubspace line_through(const ProjectivePoint& p, const ProjectivePoint& q,
                                       double coincident = tol::coincident) {
  if (fs_distance(p, q) < coincident) fail(errc::coincident_points, "line through coincident points");
  return span(std::vector<ProjectivePoint>{p, q});
}

// --- second compound / Pluecker machinery -----------------------------------

inline std::vector<std::pair<int, int>> wedge_index_pairs(int N) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<size_t>(N) * (N - 1) / 2);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) pairs.emplace_back(i, j);
  return pairs;
}

// Induced action on wedge^2 C^N in the lexicographic basis e_i ^ e_j, i<j.
inline CMat second_compound(const CMat& M) {
  if (M.rows() != M.cols()) fail(errc::dimension_mismatch, "second_compound of non-square matrix");
  int N = static_cast<int>(M.rows());
  auto pairs = wedge_index_pairs(N);
  Eigen::Index m = static_cast<Eigen::Index>(pairs.size());
  CMat C(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    auto [i, j] = pairs[static_cast<size_t>(r)];
    for (Eigen::Index c = 0; c < m; ++c) {
      auto [k, l] = pairs[static_cast<size_t>(c)];
      C(r, c) = M(i, k) * M(j, l) - M(i, l) * M(j, k);
    }
  }
  return C;
}

struct LinePoint {
  ProjectivePoint plucker;  // canonical point in P(wedge^2 C^{n+1})
  int dim_n = 0;
};

inline CVec wedge2(const CVec& v, const CVec& w) {
  int N = static_cast<int>(v.size());
  auto pairs = wedge_index_pairs(N);
  CVec out(static_cast<Eigen::Index>(pairs.size()));
  for (size_t r = 0; r < pairs.size(); ++r) {
    auto [i, j] = pairs[r];
    out(static_cast<Eigen::Index>(r)) = v(i) * w(j) - v(j) * w(i);
  }
  return out;
}

inline LinePoint plucker_of_line(const ProjectiveSubspace& line) {
  if (line.proj_dim() != 1) fail(errc::dimension_mismatch, "plucker_of_line expects a line");
  return LinePoint{normalize_point(wedge2(line.frame.col(0), line.frame.col(1))), line.dim_n};
}

}  // namespace chg
