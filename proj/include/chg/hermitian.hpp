#pragma once

// The signature-(1,n) Hermitian geometry: the form <,>, ball classification,
// polar subspaces, the Cartan angular invariant and the pencil metric d_p.
//
// Convention: <w,v> is linear in the FIRST argument, <w,v> = v^* H w.

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "chg/config.hpp"
#include "chg/errors.hpp"
#include "chg/projective.hpp"

namespace chg {

struct HermitianContext {
  int n = 0;
  CMat H;  // 1s at corners (0,n),(n,0); identity block in between

  int N() const { return n + 1; }
};

inline HermitianContext make_context(int n) {
  if (n < 1) fail(errc::bad_config, "ambient hyperbolic dimension must be >= 1");
  CMat H = CMat::Zero(n + 1, n + 1);
  H(0, n) = 1.0;
  H(n, 0) = 1.0;
  for (int j = 1; j < n; ++j) H(j, j) = 1.0;
  return HermitianContext{n, std::move(H)};
}

inline cplx herm(const HermitianContext& ctx, const CVec& w, const CVec& v) {
  if (w.size() != ctx.N() || v.size() != ctx.N())
    fail(errc::dimension_mismatch, "herm: vector length mismatch");
  // v.dot(x) = v^* x, so this is v^* H w
  return v.dot(ctx.H * w);
}

inline cplx herm(const HermitianContext& ctx, const ProjectivePoint& p, const ProjectivePoint& q) {
  return herm(ctx, p.coords, q.coords);
}

enum class Region { Interior, Boundary, Exterior };

struct BallPosition {
  Region classification = Region::Exterior;
  double value = 0.0;  // <w,w>/|w|^2
};

inline BallPosition ball_position(const HermitianContext& ctx, const ProjectivePoint& p,
                                  double tolr = tol::boundary) {
  double value = herm(ctx, p.coords, p.coords).real();  // unit representative
  Region cls = value < -tolr ? Region::Interior
             : value > tolr  ? Region::Exterior
                             : Region::Boundary;
  return BallPosition{cls, value};
}

inline bool is_boundary(const HermitianContext& ctx, const ProjectivePoint& p,
                        double tolr = tol::boundary) {
  return ball_position(ctx, p, tolr).classification == Region::Boundary;
}

// <,>-orthogonal complement. dim P + dim polar(P) = n-1.
inline ProjectiveSubspace polar(const HermitianContext& ctx, const ProjectiveSubspace& P,
                                double rank_rel = tol::rank_rel) {
  if (P.dim_n != ctx.n) fail(errc::dimension_mismatch, "polar: ambient mismatch");
  CMat rows = (ctx.H * P.frame).adjoint();  // <w, f_i> = (H f_i)^* w
  return ProjectiveSubspace{detail::null_space(rows, rank_rel), ctx.n};
}

inline ProjectiveSubspace polar(const HermitianContext& ctx, const ProjectivePoint& p,
                                double rank_rel = tol::rank_rel) {
  return polar(ctx, subspace_of_point(p), rank_rel);
}

// Cartan angular invariant of a boundary triple, arg(-<x,y><y,z><z,x>).
inline double cartan_invariant(const HermitianContext& ctx, const ProjectivePoint& x,
                               const ProjectivePoint& y, const ProjectivePoint& z,
                               double boundary_tol = tol::boundary,
                               double coincident = tol::coincident) {
  for (const auto* p : {&x, &y, &z})
    if (!is_boundary(ctx, *p, boundary_tol))
      fail(errc::not_boundary, "cartan_invariant needs boundary points");
  if (fs_distance(x, y) < coincident || fs_distance(y, z) < coincident ||
      fs_distance(z, x) < coincident)
    fail(errc::coincident_points, "cartan_invariant needs pairwise-distinct points");
  cplx prod = herm(ctx, x.coords, y.coords) * herm(ctx, y.coords, z.coords) *
              herm(ctx, z.coords, x.coords);
  return std::arg(-prod);
}

enum class TripleClass { ComplexLine, Lagrangian, Generic };

inline TripleClass triple_class(const HermitianContext& ctx, const ProjectivePoint& x,
                                const ProjectivePoint& y, const ProjectivePoint& z,
                                double class_tol = tol::triple_class,
                                double boundary_tol = tol::boundary) {
  double A = cartan_invariant(ctx, x, y, z, boundary_tol);
  if (std::abs(2 * A - M_PI) < class_tol || std::abs(2 * A + M_PI) < class_tol)
    return TripleClass::ComplexLine;
  if (std::abs(A) < class_tol) return TripleClass::Lagrangian;
  return TripleClass::Generic;
}

// Picks a representative of l independent of the base point p (the component
// of the frame orthogonal to p).
inline CVec pencil_line_direction(const ProjectivePoint& p, const ProjectiveSubspace& l) {
  CVec best;
  double best_norm = -1.0;
  for (Eigen::Index j = 0; j < l.frame.cols(); ++j) {
    CVec cand = l.frame.col(j) - p.coords * (p.coords.dot(l.frame.col(j)));
    if (cand.norm() > best_norm) { best_norm = cand.norm(); best = cand; }
  }
  return best;
}

// d_p on the pencil of lines through a boundary point p inside p^perp:
// arccos of |<q1,q2>| / sqrt(<q1,q1><q2,q2>) for any q_i in l_i \ {p}.
inline double pencil_distance(const HermitianContext& ctx, const ProjectivePoint& p,
                              const ProjectiveSubspace& l1, const ProjectiveSubspace& l2,
                              double contain_tol = 1e-8) {
  if (!is_boundary(ctx, p, 1e-6)) fail(errc::not_boundary, "pencil base must be on the boundary");
  ProjectiveSubspace carrier = polar(ctx, p);
  for (const auto* l : {&l1, &l2}) {
    if (l->proj_dim() != 1) fail(errc::not_in_pencil, "pencil elements are lines");
    if (!subspace_contains(*l, p, contain_tol))
      fail(errc::not_in_pencil, "line does not pass through the base point");
    for (Eigen::Index j = 0; j < l->frame.cols(); ++j) {
      CVec resid = l->frame.col(j) - carrier.frame * (carrier.frame.adjoint() * l->frame.col(j));
      if (resid.norm() > contain_tol) fail(errc::not_in_pencil, "line leaves the tangent hyperplane");
    }
  }
  CVec q1 = pencil_line_direction(p, l1);
  CVec q2 = pencil_line_direction(p, l2);
  double n1 = herm(ctx, q1, q1).real();
  double n2 = herm(ctx, q2, q2).real();
  if (n1 <= 0 || n2 <= 0) fail(errc::numerical_failure, "pencil metric: non-positive norms");
  double c = std::abs(herm(ctx, q1, q2)) / std::sqrt(n1 * n2);
  return std::acos(std::clamp(c, 0.0, 1.0));
}

// arcsin(|<q,p>| / (|q||p|)); zero iff q lies on the hyperplane tangent at p.
inline double dist_to_tangent_hyperplane(const HermitianContext& ctx, const ProjectivePoint& q,
                                         const ProjectivePoint& p) {
  double s = std::abs(herm(ctx, q.coords, p.coords));  // unit representatives, |Hp| = |p|
  return std::asin(std::clamp(s, 0.0, 1.0));
}

// Smallest value of <w,w>/|w|^2 over a subspace: the least eigenvalue of the
// form restricted to the frame.
inline double min_form_value(const HermitianContext& ctx, const ProjectiveSubspace& s) {
  CMat G = s.frame.adjoint() * ctx.H * s.frame;
  Eigen::SelfAdjointEigenSolver<CMat> es((G + G.adjoint()) / 2.0);
  return es.eigenvalues().minCoeff();
}

}  // namespace chg
