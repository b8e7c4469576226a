#pragma once

// Limit-pair dynamics and the control-group constructions: tau/theta limits
// of sequences tending simply to infinity, D-set prediction and sampling,
// pencil isometries with the star operation, Cartan extensions on the
// Pluecker image, and the boundary-point maps phi_z / M_z / Phi_xyz.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "chg/config.hpp"
#include "chg/errors.hpp"
#include "chg/group.hpp"
#include "chg/hermitian.hpp"
#include "chg/projective.hpp"

namespace chg {

namespace detail {

// Pivoted Gram-Schmidt over projected standard basis vectors; deterministic
// and stable under perturbations of the subspace.
inline CMat canonical_basis_from_projector(const CMat& P, Eigen::Index k) {
  Eigen::Index N = P.rows();
  if (k == 0) return CMat(N, 0);
  std::vector<CVec> cands;
  cands.reserve(static_cast<size_t>(N));
  for (Eigen::Index j = 0; j < N; ++j) cands.push_back(P.col(j));
  CMat B(N, k);
  for (Eigen::Index step = 0; step < k; ++step) {
    size_t best = 0;
    double best_norm = -1.0;
    for (size_t j = 0; j < cands.size(); ++j) {
      double nn = cands[j].norm();
      if (nn > best_norm + 1e-15) { best_norm = nn; best = j; }
    }
    if (best_norm < 1e-8) fail(errc::numerical_failure, "degenerate subspace basis");
    CVec v = cands[best] / best_norm;
    canonicalize_phase(v);
    B.col(step) = v;
    for (auto& c : cands) c -= v * (v.dot(c));
  }
  return B;
}

}  // namespace detail

// The pencil of lines through a boundary point p inside p^perp. `frame` holds
// the quotient directions: an orthonormal basis of p^perp minus the p axis.
struct Pencil {
  ProjectivePoint base;
  ProjectiveSubspace carrier;
  CMat frame;  // (n+1) x (n-1)

  int quotient_dim() const { return static_cast<int>(frame.cols()); }
};

inline Pencil make_pencil(const HermitianContext& ctx, const ProjectivePoint& p,
                          double boundary_tol = 1e-6) {
  if (!is_boundary(ctx, p, boundary_tol)) fail(errc::not_boundary, "pencil base must be on the boundary");
  ProjectiveSubspace carrier = polar(ctx, p);
  CMat P = carrier.frame * carrier.frame.adjoint() - p.coords * p.coords.adjoint();
  CMat frame = detail::canonical_basis_from_projector(P, ctx.n - 1);
  return Pencil{p, std::move(carrier), std::move(frame)};
}

inline ProjectiveSubspace pencil_line(const Pencil& pencil, const CVec& quotient_coords) {
  CVec dir = pencil.frame * quotient_coords;
  return span(std::vector<CVec>{pencil.base.coords, dir}, pencil.base.dim_n);
}

inline CVec pencil_coords(const Pencil& pencil, const ProjectiveSubspace& line) {
  CVec dir = pencil_line_direction(pencil.base, line);
  CVec coords = pencil.frame.adjoint() * dir;
  if (coords.norm() < 1e-10) fail(errc::not_in_pencil, "line has no component in the pencil");
  return coords;
}

// A map between pencils, stored as an (n-1)x(n-1) matrix acting between the
// quotient frames. Unitary matrix <=> pencil isometry.
struct PencilMap {
  Pencil source;
  Pencil target;
  CMat mat;
};

inline CMat normalize_pencil_matrix(CMat M) {
  double nrm = M.norm();
  if (!(nrm > tol::zero_vector)) fail(errc::numerical_failure, "zero pencil matrix");
  M *= std::sqrt(static_cast<double>(M.rows())) / nrm;
  Eigen::Map<CVec> flat(M.data(), M.size());
  canonicalize_phase(flat);
  return M;
}

// Quotient matrix of a linear map G that sends source base to target base and
// source carrier into target carrier.
inline PencilMap pencil_map_from_linear(const HermitianContext& ctx, const CMat& G,
                                        const Pencil& source, const Pencil& target) {
  CMat proj = CMat::Identity(ctx.N(), ctx.N()) - target.base.coords * target.base.coords.adjoint();
  CMat M = target.frame.adjoint() * proj * G * source.frame;
  return PencilMap{source, target, normalize_pencil_matrix(std::move(M))};
}

inline ProjectiveSubspace apply_pencil_map(const PencilMap& pm, const ProjectiveSubspace& line) {
  CVec coords = pencil_coords(pm.source, line);
  CVec out = pm.mat * coords;
  if (out.norm() < 1e-12) fail(errc::numerical_failure, "pencil map annihilated a line");
  return pencil_line(pm.target, out);
}

inline bool is_pencil_isometry(const PencilMap& pm, double tolr = 1e-9) {
  Eigen::Index k = pm.mat.rows();
  CMat W = pm.mat / (pm.mat.norm() / std::sqrt(static_cast<double>(k)));
  return (W * W.adjoint() - CMat::Identity(k, k)).norm() < tolr * std::sqrt(static_cast<double>(k));
}

inline PencilMap identity_pencil_map(const Pencil& pencil) {
  return PencilMap{pencil, pencil, CMat::Identity(pencil.quotient_dim(), pencil.quotient_dim())};
}

// The star operation: plain composition when nu lands where mu starts;
// otherwise the line is transported through p_mu^perp before applying mu.
inline PencilMap star_compose(const HermitianContext& ctx, const PencilMap& mu,
                              const PencilMap& nu, double coincident = 1e-9) {
  if (mu.source.base.dim_n != nu.target.base.dim_n)
    fail(errc::pencil_mismatch, "star: ambient dimensions differ");
  const ProjectivePoint& p = mu.source.base;
  const ProjectivePoint& q = nu.target.base;
  CMat X;
  if (fs_distance(p, q) < coincident) {
    X = mu.source.frame.adjoint() * nu.target.frame;
  } else {
    cplx denom = herm(ctx, q.coords, p.coords);
    if (std::abs(denom) < 1e-12)
      fail(errc::pencil_mismatch, "star: transport through the polar is degenerate");
    CMat T = CMat::Identity(ctx.N(), ctx.N()) -
             (q.coords * (p.coords.adjoint() * ctx.H)) / denom;
    CMat proj = CMat::Identity(ctx.N(), ctx.N()) - p.coords * p.coords.adjoint();
    X = mu.source.frame.adjoint() * proj * T * nu.target.frame;
  }
  CMat M = mu.mat * X * nu.mat;
  return PencilMap{nu.source, mu.target, normalize_pencil_matrix(std::move(M))};
}

// --- limit pairs --------------------------------------------------------------

struct LimitPair {
  PseudoProjectiveMap tau;
  PseudoProjectiveMap theta;
  PencilMap phi;  // pencil at Im(theta) -> pencil at Im(tau)

  ProjectivePoint attracting() const { return normalize_point(tau.image.frame.col(0)); }
  ProjectivePoint repelling() const { return normalize_point(theta.image.frame.col(0)); }
};

inline LimitPair limit_pair_from_k(const HermitianContext& ctx, const CMat& kappa1,
                                   const CMat& kappa2) {
  int N = ctx.N();
  CMat E11 = CMat::Zero(N, N);
  E11(0, 0) = 1.0;
  CMat Enn = CMat::Zero(N, N);
  Enn(N - 1, N - 1) = 1.0;
  PseudoProjectiveMap tau = pp_from_matrix(kappa1 * E11 * kappa2);
  PseudoProjectiveMap theta = pp_from_matrix(kappa2.adjoint() * Enn * kappa1.adjoint());
  ProjectivePoint im_tau = normalize_point(tau.image.frame.col(0));
  ProjectivePoint im_theta = normalize_point(theta.image.frame.col(0));
  double d1 = subspace_distance(polar(ctx, im_tau), theta.kernel);
  double d2 = subspace_distance(polar(ctx, im_theta), tau.kernel);
  if (d1 > 1e-6 || d2 > 1e-6)
    fail(errc::numerical_failure, "limit pair subspace identities violated");
  Pencil src = make_pencil(ctx, im_theta);
  Pencil dst = make_pencil(ctx, im_tau);
  CMat G = kappa1 * ctx.H * kappa2;
  PencilMap phi = pencil_map_from_linear(ctx, G, src, dst);
  return LimitPair{std::move(tau), std::move(theta), std::move(phi)};
}

inline LimitPair limit_pair(const HermitianContext& ctx, const std::vector<GroupElement>& seq) {
  auto diag = tends_simply(ctx, seq);
  if (!diag.converging_k_factors || !diag.lambda_divergent)
    fail(errc::not_tending_simply, "sequence does not tend simply to infinity");
  return limit_pair_from_k(ctx, *diag.k1_limit, *diag.k2_limit);
}

struct DsetPrediction {
  bool is_point = false;
  ProjectivePoint point;    // valid when is_point
  ProjectiveSubspace line;  // valid otherwise
};

inline DsetPrediction dset_predict(const HermitianContext& ctx, const LimitPair& lp,
                                   const ProjectivePoint& x, double hyperplane_tol = 1e-8) {
  ProjectivePoint rep = lp.repelling();
  if (fs_distance(x, rep) < 1e-9)
    fail(errc::dset_undefined, "D-set is undefined at the repelling point");
  if (dist_to_tangent_hyperplane(ctx, x, rep) > hyperplane_tol)
    return DsetPrediction{true, lp.attracting(), {}};
  ProjectiveSubspace l = line_through(rep, x);
  return DsetPrediction{false, {}, apply_pencil_map(lp.phi, l)};
}

// Samples sequences x_m -> x inside shrinking balls and collects the images
// under the tail of the sequence: a stochastic stand-in for the D-set.
inline std::vector<ProjectivePoint> dset_estimate(
    const HermitianContext& ctx, const std::vector<CMat>& seq, const ProjectivePoint& x,
    int trials = defaults::trials,
    const std::function<double(int)>& radius_schedule = [](int m) { return 1.0 / m; },
    unsigned seed = defaults::seed, int tail_window = 5) {
  if (seq.empty() || trials < 1) fail(errc::bad_config, "dset_estimate needs a sequence and trials >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<ProjectivePoint> cloud;
  int M = static_cast<int>(seq.size());
  int lo = std::max(0, M - tail_window);
  for (int t = 0; t < trials; ++t) {
    for (int m = lo; m < M; ++m) {
      CVec dir(x.coords.size());
      for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = cplx(gauss(rng), gauss(rng));
      dir.normalize();
      double r = unif(rng) * radius_schedule(m + 1);
      if (t == 0) r = 0.0;  // include the constant sequence x_m = x
      CVec xm = x.coords + r * dir;
      CVec img = seq[static_cast<size_t>(m)] * xm;
      if (img.norm() < tol::zero_vector) continue;
      cloud.push_back(normalize_point(img));
    }
  }
  return cloud;
}

// --- Cartan extensions ---------------------------------------------------------

struct CartanExtension {
  GroupElement kplus;
  GroupElement kminus;
  CMat action;  // second compound of kplus * H * kminus, canonical
};

inline CartanExtension cartan_extension(const HermitianContext& ctx, const GroupElement& kplus,
                                        const GroupElement& kminus,
                                        double tolr = tol::membership) {
  if (!is_in_k(ctx, kplus.lift, tolr) || !is_in_k(ctx, kminus.lift, tolr))
    fail(errc::not_in_k, "Cartan extension factors must lie in K");
  CMat action = canonical_matrix(second_compound(kplus.lift * ctx.H * kminus.lift));
  return CartanExtension{kplus, kminus, std::move(action)};
}

inline LinePoint apply_extension(const CartanExtension& ext, const LinePoint& lp) {
  return LinePoint{normalize_point(ext.action * lp.plucker.coords), lp.dim_n};
}

// --- section-7 boundary maps ---------------------------------------------------

// M_z = v v^* + (z_n z̄_0) I on the middle coordinates, v = (z_1,...,z_{n-1}).
inline CMat mz_matrix(const HermitianContext& ctx, const ProjectivePoint& z,
                      double boundary_tol = 1e-6, double degenerate_tol = 1e-9) {
  if (!is_boundary(ctx, z, boundary_tol)) fail(errc::not_boundary, "M_z needs a boundary point");
  int n = ctx.n;
  const CVec& c = z.coords;
  if (std::abs(c(0)) < degenerate_tol || std::abs(c(n)) < degenerate_tol)
    fail(errc::degenerate_z, "z coincides with a corner fixed point");
  CVec v = c.segment(1, n - 1);
  CMat M = v * v.adjoint();
  M += (c(n) * std::conj(c(0))) * CMat::Identity(n - 1, n - 1);
  return M;
}

inline ProjectivePoint middle_point(const HermitianContext& ctx, const CVec& middle_coords) {
  CVec w = CVec::Zero(ctx.N());
  w.segment(1, ctx.n - 1) = middle_coords;
  return normalize_point(w);
}

// The span/meet chain behind M_z, evaluated geometrically. Kept independent
// of the matrix formula so the two routes can be checked against each other.
inline ProjectivePoint phi_z_geometric(const HermitianContext& ctx, const ProjectivePoint& z,
                                       const ProjectivePoint& w,
                                       double transverse = tol::chain_transverse) {
  int n = ctx.n;
  const CVec& zc = z.coords;
  if (!is_boundary(ctx, z, 1e-6)) fail(errc::not_boundary, "phi_z needs a boundary point");
  if (std::abs(zc(0)) < 1e-9 || std::abs(zc(n)) < 1e-9)
    fail(errc::degenerate_z, "z coincides with a corner fixed point");
  if (std::abs(w.coords(0)) > 1e-9 || std::abs(w.coords(n)) > 1e-9)
    fail(errc::bad_config, "phi_z argument must lie in the middle coordinate subspace");
  if (std::abs(zc(0)) < transverse || std::abs(zc(n)) < transverse)
    fail(errc::chain_degenerate, "span/meet chain is nearly tangent");
  ProjectivePoint e_first = basis_point(n, 0);
  ProjectivePoint e_last = basis_point(n, n);
  ProjectiveSubspace step1 = meet(line_through(w, e_last), polar(ctx, z));
  if (step1.proj_dim() != 0) fail(errc::chain_degenerate, "first meet is not a point");
  ProjectivePoint w1 = normalize_point(step1.frame.col(0));
  ProjectiveSubspace step2 = meet(line_through(w1, z), polar(ctx, e_first));
  if (step2.proj_dim() != 0) fail(errc::chain_degenerate, "second meet is not a point");
  ProjectivePoint w2 = normalize_point(step2.frame.col(0));
  ProjectiveSubspace step3 = meet(line_through(w2, e_first), polar(ctx, e_last));
  if (step3.proj_dim() != 0) fail(errc::chain_degenerate, "third meet is not a point");
  return normalize_point(step3.frame.col(0));
}

// phi_{xyz} as the composite of the three form-based projection steps,
// restricted to the invariant subspace x^perp cap z^perp.
struct TripleMap {
  CMat chain;       // (n+1)x(n+1) composite
  CMat basis;       // orthonormal basis of x^perp cap z^perp, (n+1)x(n-1)
  CMat restricted;  // (n-1)x(n-1) action in `basis`
  PencilMap pencil_map;  // induced self-map of the pencil at z
};

inline TripleMap phi_xyz(const HermitianContext& ctx, const ProjectivePoint& x,
                         const ProjectivePoint& y, const ProjectivePoint& z,
                         double boundary_tol = 1e-6,
                         double transverse = tol::chain_transverse) {
  for (const auto* p : {&x, &y, &z})
    if (!is_boundary(ctx, *p, boundary_tol)) fail(errc::not_boundary, "phi_xyz needs boundary points");
  cplx zy = herm(ctx, z.coords, y.coords);
  cplx yx = herm(ctx, y.coords, x.coords);
  cplx xz = herm(ctx, x.coords, z.coords);
  if (std::abs(zy) < transverse || std::abs(yx) < transverse || std::abs(xz) < transverse)
    fail(errc::degenerate_triple, "triple is degenerate at tolerance");
  int N = ctx.N();
  CMat I = CMat::Identity(N, N);
  CMat L1 = I - (z.coords * (y.coords.adjoint() * ctx.H)) / zy;
  CMat L2 = I - (y.coords * (x.coords.adjoint() * ctx.H)) / yx;
  CMat L3 = I - (x.coords * (z.coords.adjoint() * ctx.H)) / xz;
  CMat chain = L3 * L2 * L1;

  // basis of the invariant subspace {w : <w,x> = <w,z> = 0}
  CMat rows(2, N);
  rows.row(0) = x.coords.adjoint() * ctx.H;
  rows.row(1) = z.coords.adjoint() * ctx.H;
  CMat S = detail::null_space(rows);
  CMat basis = detail::canonical_basis_from_projector(S * S.adjoint(), N - 2);
  CMat restricted = basis.adjoint() * chain * basis;

  Pencil at_z = make_pencil(ctx, z);
  cplx zx = herm(ctx, z.coords, x.coords);
  CMat L0 = I - (z.coords * (x.coords.adjoint() * ctx.H)) / zx;
  CMat proj = I - z.coords * z.coords.adjoint();
  CMat pmat = at_z.frame.adjoint() * proj * chain * L0 * at_z.frame;
  PencilMap pm{at_z, at_z, normalize_pencil_matrix(std::move(pmat))};
  return TripleMap{std::move(chain), std::move(basis), std::move(restricted), std::move(pm)};
}

// gamma in PU(1,n) with gamma(x) = [e_first], gamma(z) = [e_last] and the
// image of y phase- and middle-rotated to a canonical position.
inline GroupElement normalize_triple(const HermitianContext& ctx, const ProjectivePoint& x,
                                     const ProjectivePoint& y, const ProjectivePoint& z,
                                     double boundary_tol = 1e-6) {
  for (const auto* p : {&x, &y, &z})
    if (!is_boundary(ctx, *p, boundary_tol)) fail(errc::not_boundary, "normalize_triple needs boundary points");
  if (fs_distance(x, y) < 1e-10 || fs_distance(y, z) < 1e-10 || fs_distance(z, x) < 1e-10)
    fail(errc::degenerate_triple, "triple points coincide");
  int N = ctx.N();
  int n = ctx.n;
  cplx s = herm(ctx, x.coords, z.coords);
  if (std::abs(s) < 1e-12) fail(errc::degenerate_triple, "x and z pair to zero");
  CVec ztil = z.coords / std::conj(s);

  CMat rows(2, N);
  rows.row(0) = x.coords.adjoint() * ctx.H;
  rows.row(1) = ztil.adjoint() * ctx.H;
  CMat F = detail::null_space(rows);
  if (F.cols() != n - 1) fail(errc::degenerate_triple, "middle space has unexpected dimension");
  CMat G = F.adjoint() * ctx.H * F;
  Eigen::SelfAdjointEigenSolver<CMat> es((G + G.adjoint()) / 2.0);
  if (es.eigenvalues().minCoeff() < 1e-10) fail(errc::degenerate_triple, "middle form not positive");
  CMat Ginvsqrt = es.eigenvectors() *
                  es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                  es.eigenvectors().adjoint();
  CMat B = F * Ginvsqrt;

  CMat C(N, N);
  C.col(0) = x.coords;
  if (n > 1) C.middleCols(1, n - 1) = B;
  C.col(N - 1) = ztil;
  CMat gamma0 = ctx.H * C.adjoint() * ctx.H;  // C^{-1} for form-compatible C

  CVec w = gamma0 * y.coords;
  if (std::abs(w(0)) < 1e-12 || std::abs(w(N - 1)) < 1e-12)
    fail(errc::degenerate_triple, "normalized y lost its corner coordinates");
  cplx a = std::conj(w(0)) / std::abs(w(0));
  CMat D = CMat::Identity(N, N);
  D(0, 0) = a;
  D(N - 1, N - 1) = 1.0 / std::conj(a);
  if (n > 2) {
    CVec m = w.segment(1, n - 1);
    double mn = m.norm();
    if (mn > 1e-12) {
      CVec target = CVec::Zero(n - 1);
      target(0) = mn;
      CVec u = m - target * (m(0) == cplx(0) ? cplx(1) : m(0) / std::abs(m(0)));
      CMat V = CMat::Identity(n - 1, n - 1);
      if (u.norm() > 1e-12) {
        V -= (2.0 / u.squaredNorm()) * (u * u.adjoint());
        CVec vm = V * m;
        cplx ph = vm(0) / std::abs(vm(0));
        V.row(0) *= std::conj(ph);
      }
      D.block(1, 1, n - 1, n - 1) = V;
    }
  }
  return make_element(ctx, D * gamma0, {}, 1e-7);
}

enum class FuchsianVerdict { CFuchsianLike, RFuchsianLike, Generic };

struct FuchsianReport {
  std::vector<double> invariants;
  int n_complex_line = 0;
  int n_lagrangian = 0;
  int n_generic = 0;
  FuchsianVerdict verdict = FuchsianVerdict::Generic;
};

inline FuchsianReport fuchsian_classify(
    const HermitianContext& ctx,
    const std::vector<std::array<ProjectivePoint, 3>>& triples, double class_tol = 1e-4,
    double boundary_tol = 1e-6) {
  if (triples.size() < 10) fail(errc::bad_config, "fuchsian_classify needs at least 10 triples");
  FuchsianReport rep;
  for (const auto& t : triples) {
    double A = cartan_invariant(ctx, t[0], t[1], t[2], boundary_tol);
    rep.invariants.push_back(A);
    if (std::abs(2 * A - M_PI) < class_tol || std::abs(2 * A + M_PI) < class_tol)
      ++rep.n_complex_line;
    else if (std::abs(A) < class_tol)
      ++rep.n_lagrangian;
    else
      ++rep.n_generic;
  }
  int total = static_cast<int>(triples.size());
  rep.verdict = rep.n_complex_line == total ? FuchsianVerdict::CFuchsianLike
              : rep.n_lagrangian == total   ? FuchsianVerdict::RFuchsianLike
                                            : FuchsianVerdict::Generic;
  return rep;
}

}  // namespace chg
