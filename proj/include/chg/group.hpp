#pragma once

// The group U(1,n): membership tests, random sampling, the KAK (Cartan)
// decomposition, pseudo-projective maps and limits of matrix sequences.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "chg/config.hpp"
#include "chg/errors.hpp"
#include "chg/hermitian.hpp"
#include "chg/projective.hpp"

namespace chg {

inline double u1n_residual(const HermitianContext& ctx, const CMat& M) {
  return (M * ctx.H * M.adjoint() - ctx.H).norm() / ctx.H.norm();
}

inline bool is_in_u1n(const HermitianContext& ctx, const CMat& M, double tolr = tol::membership) {
  if (M.rows() != ctx.N() || M.cols() != ctx.N())
    fail(errc::dimension_mismatch, "is_in_u1n: matrix size mismatch");
  return u1n_residual(ctx, M) < tolr;
}

inline double unitary_residual(const CMat& M) {
  Eigen::Index N = M.rows();
  return (M * M.adjoint() - CMat::Identity(N, N)).norm() / std::sqrt(double(N));
}

inline bool is_in_k(const HermitianContext& ctx, const CMat& M, double tolr = tol::membership) {
  if (M.rows() != M.cols()) return false;
  if (M.rows() != ctx.N()) return false;
  return unitary_residual(M) < tolr && is_in_u1n(ctx, M, tolr);
}

// Frobenius-norm-1, phase-canonical representative of the projective class.
inline CMat canonical_matrix(const CMat& M) {
  double nrm = M.norm();
  if (!(nrm > tol::zero_vector)) fail(errc::zero_matrix, "zero matrix has no canonical form");
  CMat C = M / nrm;
  Eigen::Map<CVec> flat(C.data(), C.size());
  canonicalize_phase(flat);
  return C;
}

// Residual between projective classes: Frobenius distance of canonical forms
// after optimal phase alignment.
inline double projective_residual(const CMat& A, const CMat& B) {
  CMat a = A / A.norm(), b = B / B.norm();
  cplx overlap = (a.conjugate().cwiseProduct(b)).sum();
  double ph = std::abs(overlap);
  if (ph > 0) a *= overlap / ph;
  return (a - b).norm();
}

struct GroupElement {
  CMat lift;              // representative in U(1,n)
  std::vector<int> word;  // signed generator indices, +i / -i for g_i / g_i^{-1}
  CMat canonical;         // deterministic projective representative

  int N() const { return static_cast<int>(lift.rows()); }
};

inline GroupElement make_element(const HermitianContext& ctx, const CMat& lift,
                                 std::vector<int> word = {}, double tolr = tol::membership) {
  if (!is_in_u1n(ctx, lift, tolr))
    fail(errc::not_in_group, "lift fails the form-preservation test, residual " +
                                 std::to_string(u1n_residual(ctx, lift)));
  return GroupElement{lift, std::move(word), canonical_matrix(lift)};
}

inline GroupElement identity_element(const HermitianContext& ctx) {
  return make_element(ctx, CMat::Identity(ctx.N(), ctx.N()));
}

// g^{-1} = H g^* H, exact for form-preserving g.
inline CMat u1n_inverse(const HermitianContext& ctx, const CMat& g) {
  return ctx.H * g.adjoint() * ctx.H;
}

inline GroupElement mul(const HermitianContext& ctx, const GroupElement& a, const GroupElement& b) {
  std::vector<int> w = a.word;
  w.insert(w.end(), b.word.begin(), b.word.end());
  CMat m = a.lift * b.lift;
  return GroupElement{m, std::move(w), canonical_matrix(m)};
}

inline GroupElement inverse(const HermitianContext& ctx, const GroupElement& a) {
  std::vector<int> w(a.word.rbegin(), a.word.rend());
  for (int& s : w) s = -s;
  CMat m = u1n_inverse(ctx, a.lift);
  return GroupElement{m, std::move(w), canonical_matrix(m)};
}

inline ProjectivePoint apply(const GroupElement& g, const ProjectivePoint& p) {
  return normalize_point(g.lift * p.coords);
}

// exp(X) for X = Y H with Y skew-Hermitian: then X H + H X^* = 0, so the
// exponential preserves the form. Entries of Y are O(scale).
inline GroupElement random_group_element(unsigned seed, int n, double scale) {
  HermitianContext ctx = make_context(n);
  int N = ctx.N();
  if (scale == 0.0) return identity_element(ctx);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  CMat B(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) B(i, j) = cplx(g(rng), g(rng));
  CMat Y = (B - B.adjoint()) / 2.0;
  CMat X = Y * ctx.H;
  return make_element(ctx, X.exp());
}

// Random element of K = U(n+1) cap U(1,n): unitary block mixing inside the
// +1/-1 eigenspaces of H.
inline GroupElement random_k_element(unsigned seed, int n) {
  HermitianContext ctx = make_context(n);
  int N = ctx.N();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  // eigenbasis of H: (e_0+e_n)/sqrt2, e_1..e_{n-1}  (+1), (e_0-e_n)/sqrt2 (-1)
  CMat P = CMat::Zero(N, N);
  P(0, 0) = P(n, 0) = 1.0 / std::sqrt(2.0);
  for (int j = 1; j < n; ++j) P(j, j) = 1.0;
  P(0, N - 1) = 1.0 / std::sqrt(2.0);
  P(n, N - 1) = -1.0 / std::sqrt(2.0);
  CMat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMat> qr(A);
  CMat U = qr.householderQ() * CMat::Identity(n, n);
  std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
  CMat D = CMat::Zero(N, N);
  D.topLeftCorner(n, n) = U;
  D(N - 1, N - 1) = std::polar(1.0, ang(rng));
  return make_element(ctx, P * D * P.adjoint());
}

struct CartanDecomposition {
  GroupElement k1;
  CMat a;  // diag(e^lambda, 1, ..., 1, e^-lambda)
  double lambda = 0.0;
  GroupElement k2;

  CMat reconstruct() const { return k1.lift * a * k2.lift; }
};

namespace detail {

// Deterministic orthonormal basis of the column space of an orthonormal
// frame, built from pivoted projections of the standard basis. Stable under
// perturbations of the subspace, unlike the raw SVD basis of a degenerate
// singular cluster.
inline CMat canonical_subspace_basis(const CMat& U) {
  Eigen::Index N = U.rows(), k = U.cols();
  if (k == 0) return U;
  std::vector<CVec> cols;
  std::vector<CVec> cands(static_cast<size_t>(N));
  for (Eigen::Index j = 0; j < N; ++j) cands[static_cast<size_t>(j)] = U * (U.adjoint().col(j));
  for (Eigen::Index step = 0; step < k; ++step) {
    size_t best = 0;
    double best_norm = -1.0;
    for (size_t j = 0; j < cands.size(); ++j) {
      double nn = cands[j].norm();
      if (nn > best_norm + 1e-15) { best_norm = nn; best = j; }
    }
    CVec v = cands[best] / best_norm;
    canonicalize_phase(v);
    cols.push_back(v);
    for (auto& c : cands) c -= v * (v.dot(c));
  }
  CMat B(N, k);
  for (Eigen::Index j = 0; j < k; ++j) B.col(j) = cols[static_cast<size_t>(j)];
  return B;
}

}  // namespace detail

// KAK decomposition g = k1 a k2 with k_i in K and a = diag(e^l, 1,.., e^-l).
//
// Elements of U(1,n) have singular values (e^l, 1, ..., 1, e^-l), so lambda
// is read off the SVD of a determinant-normalized lift. The left singular
// basis matches k1 up to a gauge (phases on the extreme vectors, a unitary
// mixing of the middle cluster); the gauge is fixed deterministically by
// re-basing the middle singular subspace with pivoted projections of the
// standard basis and absorbing the corner phase of U^* H U into the top
// column. k2 = a^{-1} k1^{-1} g is then unitary by construction.
inline CartanDecomposition cartan_decompose(const HermitianContext& ctx, const GroupElement& g,
                                            double residual_tol = tol::decomposition,
                                            double near_elliptic = tol::near_elliptic) {
  int N = ctx.N();
  cplx det = g.lift.determinant();
  double dmag = std::abs(det);
  if (!(dmag > tol::zero_vector)) fail(errc::numerical_failure, "singular lift");
  CMat gn = g.lift / std::pow(dmag, 1.0 / N);

  Eigen::JacobiSVD<CMat> svd(gn, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv(0);

  if (smax - 1.0 < near_elliptic) {
    // already (numerically) in K
    CartanDecomposition d;
    d.k1 = make_element(ctx, gn, g.word, residual_tol * 10);
    d.a = CMat::Identity(N, N);
    d.lambda = 0.0;
    d.k2 = identity_element(ctx);
    return d;
  }

  double lambda = std::log(smax);
  CVec utop = svd.matrixU().col(0);
  canonicalize_phase(utop);
  CVec ubot = svd.matrixU().col(N - 1);
  canonicalize_phase(ubot);

  CMat U(N, N);
  U.col(0) = utop;
  if (N > 2) U.middleCols(1, N - 2) =
      detail::canonical_subspace_basis(svd.matrixU().middleCols(1, N - 2));
  U.col(N - 1) = ubot;

  // gauge between the SVD basis and the canonical one, forced exactly block
  // diagonal so no cross-block rounding gets amplified by e^{2 lambda}
  CMat W = svd.matrixU().adjoint() * U;
  CMat Wb = CMat::Zero(N, N);
  Wb(0, 0) = W(0, 0) / std::abs(W(0, 0));
  Wb(N - 1, N - 1) = W(N - 1, N - 1) / std::abs(W(N - 1, N - 1));
  if (N > 2) {
    Eigen::JacobiSVD<CMat> ms(W.block(1, 1, N - 2, N - 2),
                              Eigen::ComputeFullU | Eigen::ComputeFullV);
    Wb.block(1, 1, N - 2, N - 2) = ms.matrixU() * ms.matrixV().adjoint();
  }
  U = svd.matrixU() * Wb;

  CMat Hp = U.adjoint() * ctx.H * U;
  cplx s0 = Hp(0, N - 1);
  if (std::abs(s0) < 0.5)
    fail(errc::numerical_failure, "gauge correction failed: corner entry " +
                                      std::to_string(std::abs(s0)));
  cplx s = s0 / std::abs(s0);
  U.col(0) *= s;

  CMat a = CMat::Identity(N, N);
  a(0, 0) = std::exp(lambda);
  a(N - 1, N - 1) = std::exp(-lambda);

  // k2 = (P a)^{-1} Wb^H Sigma V^H with the diagonal evaluated in relative
  // terms: sigma_last * e^{lambda} = sigma_last * sigma_max avoids overflow
  // of intermediate rounding for large lambda
  CVec dleft(N);
  dleft(0) = std::conj(s) * (sv(0) / smax);
  for (int j = 1; j < N - 1; ++j) dleft(j) = sv(j);
  dleft(N - 1) = sv(N - 1) * smax;
  CMat k2m = dleft.asDiagonal() * Wb.adjoint() * svd.matrixV().adjoint();

  double r1 = std::max(unitary_residual(U), u1n_residual(ctx, U));
  double r2 = std::max(unitary_residual(k2m), u1n_residual(ctx, k2m));
  double rec = projective_residual(U * a * k2m, g.lift);
  if (r1 > residual_tol || r2 > residual_tol || rec > residual_tol)
    fail(errc::numerical_failure,
         "KAK residuals k1=" + std::to_string(r1) + " k2=" + std::to_string(r2) +
             " rec=" + std::to_string(rec));

  CartanDecomposition d;
  d.k1 = GroupElement{U, {}, canonical_matrix(U)};
  d.a = a;
  d.lambda = lambda;
  d.k2 = GroupElement{k2m, {}, canonical_matrix(k2m)};
  return d;
}

inline double lambda_of(const HermitianContext& ctx, const GroupElement& g) {
  cplx det = g.lift.determinant();
  CMat gn = g.lift / std::pow(std::abs(det), 1.0 / ctx.N());
  Eigen::JacobiSVD<CMat> svd(gn);
  return std::log(svd.singularValues()(0));
}

// --- pseudo-projective maps --------------------------------------------------

struct PseudoProjectiveMap {
  CMat matrix;  // Frobenius norm 1, canonical phase
  ProjectiveSubspace kernel;
  ProjectiveSubspace image;

  int rank() const { return static_cast<int>(image.frame.cols()); }
};

inline PseudoProjectiveMap pp_from_matrix(const CMat& M, double rank_rel = tol::rank_rel) {
  if (M.rows() != M.cols()) fail(errc::dimension_mismatch, "pseudo-projective maps are square");
  double nrm = M.norm();
  if (!(nrm > tol::zero_vector)) fail(errc::zero_matrix, "zero matrix");
  CMat C = canonical_matrix(M);
  int n = static_cast<int>(M.rows()) - 1;
  Eigen::JacobiSVD<CMat> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cutoff = sv(0) * rank_rel;
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;
  ProjectiveSubspace image{svd.matrixU().leftCols(r), n};
  ProjectiveSubspace kernel{svd.matrixV().rightCols(sv.size() - r), n};
  return PseudoProjectiveMap{std::move(C), std::move(kernel), std::move(image)};
}

inline ProjectivePoint pp_apply(const PseudoProjectiveMap& t, const ProjectivePoint& p,
                                double kernel_tol = tol::kernel_residual) {
  CVec image = t.matrix * p.coords;
  if (image.norm() < kernel_tol) fail(errc::in_kernel, "point is in the kernel");
  return normalize_point(image);
}

struct PpLimitDiagnosis {
  bool converged = false;
  double gap = 0.0;  // achieved Cauchy gap over the tail window
  std::optional<PseudoProjectiveMap> limit;
};

inline PpLimitDiagnosis pp_limit_diagnose(const std::vector<CMat>& seq,
                                          double cauchy = tol::cauchy,
                                          int window = tol::cauchy_window) {
  if (seq.size() < 2) fail(errc::bad_config, "pp_limit needs at least two matrices");
  std::vector<CMat> canon;
  canon.reserve(seq.size());
  for (const auto& m : seq) canon.push_back(canonical_matrix(m));
  size_t w = std::min<size_t>(static_cast<size_t>(window), canon.size() - 1);
  double gap = 0.0;
  for (size_t i = canon.size() - 1 - w; i + 1 < canon.size(); ++i)
    gap = std::max(gap, (canon[i] - canon.back()).norm());
  PpLimitDiagnosis d;
  d.gap = gap;
  d.converged = gap < cauchy;
  if (d.converged) d.limit = pp_from_matrix(canon.back());
  return d;
}

inline PseudoProjectiveMap pp_limit(const std::vector<CMat>& seq, double cauchy = tol::cauchy,
                                    int window = tol::cauchy_window) {
  auto d = pp_limit_diagnose(seq, cauchy, window);
  if (!d.converged)
    fail(errc::not_converged, "Cauchy gap " + std::to_string(d.gap) + " above tolerance");
  return *d.limit;
}

// --- sequences tending simply to infinity ------------------------------------

struct TendsSimplyDiagnosis {
  bool converging_k_factors = false;
  bool lambda_divergent = false;
  std::optional<CMat> k1_limit, k2_limit;
  std::vector<double> alpha_sequence;
};

inline TendsSimplyDiagnosis tends_simply(const HermitianContext& ctx,
                                         const std::vector<GroupElement>& seq,
                                         double k_cauchy = 1e-8,
                                         double lambda_growth = tol::lambda_divergence,
                                         int window = tol::cauchy_window) {
  TendsSimplyDiagnosis d;
  if (seq.size() < 2) return d;
  std::vector<CMat> k1s, k2s;
  for (const auto& g : seq) {
    auto dec = cartan_decompose(ctx, g);
    k1s.push_back(dec.k1.lift);
    k2s.push_back(dec.k2.lift);
    d.alpha_sequence.push_back(dec.lambda);
  }
  size_t w = std::min<size_t>(static_cast<size_t>(window), seq.size() - 1);
  double gap = 0.0;
  for (size_t i = seq.size() - 1 - w; i + 1 < seq.size(); ++i) {
    gap = std::max(gap, (k1s[i] - k1s.back()).norm());
    gap = std::max(gap, (k2s[i] - k2s.back()).norm());
  }
  d.converging_k_factors = gap < k_cauchy;
  bool monotone = true;
  for (size_t i = seq.size() - 1 - w; i + 1 < seq.size(); ++i)
    if (d.alpha_sequence[i + 1] < d.alpha_sequence[i] - 1e-9) monotone = false;
  double growth = d.alpha_sequence.back() - d.alpha_sequence[seq.size() - 1 - w];
  d.lambda_divergent = monotone && growth > lambda_growth * 1e-2 &&
                       d.alpha_sequence.back() > lambda_growth;
  if (d.converging_k_factors) {
    d.k1_limit = k1s.back();
    d.k2_limit = k2s.back();
  }
  return d;
}

}  // namespace chg
