#pragma once

// Limit-set computations: Chen-Greenberg estimation by orbit enumeration,
// the Kulkarni limit set as a union of tangent hyperplanes, equicontinuity
// probes, and the desk-scale verification of the main theorem.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "chg/config.hpp"
#include "chg/control.hpp"
#include "chg/errors.hpp"
#include "chg/group.hpp"
#include "chg/hermitian.hpp"
#include "chg/orbit.hpp"
#include "chg/projective.hpp"

namespace chg {

struct LimitSetEstimate {
  std::vector<ProjectivePoint> boundary_samples;
  std::vector<int> word_lengths;
  double delta = defaults::delta;
  int depth_requested = 0;
  int depth_effective = 0;  // deepest fully enumerated level actually used
  long orbit_count = 0;
};

// Orbit points that are delta-close to the boundary, keeping only word
// lengths in the upper half of the effective depth. When the budget
// truncates the enumeration the window is taken on the completed depth.
inline LimitSetEstimate chen_greenberg_estimate(const HermitianContext& ctx,
                                                const GroupPresentation& G, int depth,
                                                double delta = defaults::delta,
                                                long budget = defaults::budget,
                                                const ProjectivePoint* base = nullptr,
                                                int threads = 1) {
  ProjectivePoint o = base ? *base : default_base_point(ctx);
  OrbitCloud cloud = orbit_bfs(ctx, G, depth, budget, o, threads);
  int d_eff = std::min(depth, cloud.depth_complete);
  int min_len = (d_eff + 1) / 2;
  LimitSetEstimate est;
  est.delta = delta;
  est.depth_requested = depth;
  est.depth_effective = d_eff;
  est.orbit_count = cloud.dedup_count;
  for (const auto& pt : cloud.points) {
    if (pt.word_length < min_len || pt.word_length > d_eff) continue;
    if (std::abs(pt.ball_value) > delta) continue;
    est.boundary_samples.push_back(ProjectivePoint{pt.coords, ctx.n});
    est.word_lengths.push_back(pt.word_length);
  }
  return est;
}

inline int cluster_count(const std::vector<ProjectivePoint>& samples,
                         double resolution = defaults::cluster_resolution) {
  std::vector<ProjectivePoint> reps;
  for (const auto& p : samples) {
    bool fresh = true;
    for (const auto& r : reps)
      if (fs_distance(p, r) < resolution) { fresh = false; break; }
    if (fresh) reps.push_back(p);
  }
  return static_cast<int>(reps.size());
}

struct HyperplaneFamily {
  std::vector<ProjectivePoint> bases;  // each base p denotes the hyperplane p^perp
  double resolution = defaults::family_resolution;
  CMat normals;  // column j = H * base_j (unit), for fast distance queries

  int size() const { return static_cast<int>(bases.size()); }
};

inline HyperplaneFamily kulkarni_from_cg(const HermitianContext& ctx,
                                         const LimitSetEstimate& est,
                                         double resolution = defaults::family_resolution) {
  if (est.boundary_samples.empty()) fail(errc::empty_estimate, "no boundary samples");
  HyperplaneFamily fam;
  fam.resolution = resolution;
  for (const auto& p : est.boundary_samples) {
    bool fresh = true;
    for (const auto& b : fam.bases)
      if (fs_distance(p, b) < resolution) { fresh = false; break; }
    if (fresh) fam.bases.push_back(p);
  }
  fam.normals.resize(ctx.N(), fam.size());
  for (int j = 0; j < fam.size(); ++j) fam.normals.col(j) = ctx.H * fam.bases[static_cast<size_t>(j)].coords;
  return fam;
}

// sin of the distance to the nearest hyperplane of the family; cheap inner
// loop used by the streaming estimators.
inline double family_distance_sin(const HyperplaneFamily& fam, const CVec& unit_q) {
  double best = 1.0;
  for (Eigen::Index j = 0; j < fam.normals.cols(); ++j) {
    double s = std::abs(fam.normals.col(j).dot(unit_q));
    if (s < best) best = s;
  }
  return best;
}

inline double family_distance(const HyperplaneFamily& fam, const ProjectivePoint& q) {
  return std::asin(std::clamp(family_distance_sin(fam, q.coords), 0.0, 1.0));
}

// Attracting and repelling fixed points of the loxodromic elements found by
// a shallow enumeration. Eigenvector-accurate, so they sit on the boundary
// to machine precision.
inline std::vector<ProjectivePoint> loxodromic_fixed_points(const HermitianContext& ctx,
                                                            const GroupPresentation& G, int depth,
                                                            long budget, double lambda_min = 0.1,
                                                            size_t max_points = 64) {
  std::vector<ProjectivePoint> out;
  enumerate_group(ctx, G, depth, budget, [&](const CMat& lift, int len) {
    if (len == 0 || out.size() >= max_points) return;
    Eigen::JacobiSVD<CMat> svd(lift);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (std::log(smax / smin) / 2 < lambda_min) return;
    Eigen::ComplexEigenSolver<CMat> es(lift);
    Eigen::Index imax = 0, imin = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(imax))) imax = i;
      if (std::abs(es.eigenvalues()(i)) < std::abs(es.eigenvalues()(imin))) imin = i;
    }
    for (Eigen::Index i : {imax, imin}) {
      ProjectivePoint p = normalize_point(es.eigenvectors().col(i));
      if (std::abs(herm(ctx, p.coords, p.coords).real()) > 1e-8) continue;
      bool fresh = true;
      for (const auto& q : out)
        if (fs_distance(p, q) < 1e-8) { fresh = false; break; }
      if (fresh && out.size() < max_points) out.push_back(std::move(p));
    }
  });
  return out;
}

struct DirectKulkarniEstimate {
  std::vector<OrbitPoint> cloud;  // subsampled cluster candidates
  std::vector<ProjectivePoint> l0_points;  // heuristic: fixed points of long words
  double max_dist_to_family = 0.0;
  long images_total = 0;
  int len_lo = 0, len_hi = 0;
  int depth_requested = 0;
  int depth_effective = 0;
};

// Images of the compact samples under all enumerated elements with word
// length in the upper half of the effective depth. Distances to the family
// are tracked streaming; the returned cloud is a deterministic subsample.
inline DirectKulkarniEstimate kulkarni_direct_estimate(
    const HermitianContext& ctx, const GroupPresentation& G, const HyperplaneFamily& family,
    const std::vector<ProjectivePoint>& samples, int depth, double margin = defaults::margin,
    long budget = defaults::budget, int threads = 1, size_t cloud_cap = 20000) {
  if (samples.empty()) fail(errc::bad_config, "no compact samples");
  if (!(margin > 0)) fail(errc::margin_violated, "margin must be positive");
  for (const auto& s : samples)
    if (family_distance(family, s) < margin)
      fail(errc::margin_violated, "compact sample within margin of the hyperplane family");

  ElementLevels levels = enumerate_levels(ctx, G, depth, budget, threads);
  DirectKulkarniEstimate est;
  est.depth_requested = depth;
  int d_eff = std::min(depth, levels.stats.complete_depth);
  est.depth_effective = d_eff;
  est.len_lo = (d_eff + 1) / 2;
  est.len_hi = d_eff;
  long in_window = 0;
  for (int len = est.len_lo; len <= est.len_hi; ++len)
    in_window += static_cast<long>(levels.levels[static_cast<size_t>(len)].size());
  if (in_window == 0) { est.len_lo = 0; }  // identity-only groups

  long total_images = 0;
  for (int len = est.len_lo; len <= est.len_hi; ++len)
    total_images += static_cast<long>(levels.levels[static_cast<size_t>(len)].size()) *
                    static_cast<long>(samples.size());
  size_t stride = std::max<size_t>(1, static_cast<size_t>(total_images) / std::max<size_t>(1, cloud_cap));

  // Streaming max of min-distance-to-family. Images of one element cluster
  // in one cylinder, so the hyperplane that was nearest to the previous
  // image usually certifies the next one below the running max; the full
  // scan runs only when the short-cut fails, keeping the result exact.
  double worst_sin = 0.0;
  long counter = 0;
  Eigen::Index hint = 0;
  for (int len = est.len_lo; len <= est.len_hi; ++len) {
    for (const CMat& g : levels.levels[static_cast<size_t>(len)]) {
      for (const auto& s : samples) {
        CVec img = g * s.coords;
        double nrm = img.norm();
        if (!(nrm > tol::zero_vector)) continue;
        img /= nrm;
        double hinted = std::abs(family.normals.col(hint).dot(img));
        if (hinted >= worst_sin) {
          double best = hinted;
          for (Eigen::Index j = 0; j < family.normals.cols(); ++j) {
            double v = std::abs(family.normals.col(j).dot(img));
            if (v < best) { best = v; hint = j; }
          }
          if (best > worst_sin) worst_sin = best;
        }
        if (static_cast<size_t>(counter) % stride == 0) {
          double value = herm(ctx, img, img).real();
          est.cloud.push_back(OrbitPoint{std::move(img), len, value});
        }
        ++counter;
      }
    }
  }
  est.images_total = counter;
  est.max_dist_to_family = std::asin(std::clamp(worst_sin, 0.0, 1.0));

  // L0 proxy: attracting fixed points of non-elliptic words in the window.
  size_t budget_l0 = 48;
  for (int len = est.len_hi; len >= est.len_lo && est.l0_points.size() < budget_l0; --len) {
    const auto& lv = levels.levels[static_cast<size_t>(len)];
    size_t step = std::max<size_t>(1, lv.size() / 16);
    for (size_t i = 0; i < lv.size() && est.l0_points.size() < budget_l0; i += step) {
      Eigen::ComplexEigenSolver<CMat> es(lv[i]);
      Eigen::Index imax = 0;
      for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
        if (std::abs(es.eigenvalues()(j)) > std::abs(es.eigenvalues()(imax))) imax = j;
      double lam = lambda_of(ctx, GroupElement{lv[i], {}, lv[i]});
      if (lam < 0.1) continue;
      ProjectivePoint p = normalize_point(es.eigenvectors().col(imax));
      bool fresh = true;
      for (const auto& q : est.l0_points)
        if (fs_distance(p, q) < 1e-6) { fresh = false; break; }
      if (fresh) est.l0_points.push_back(std::move(p));
    }
  }
  return est;
}

struct EquicontinuityOptions {
  int ball_depth = 7;
  long ball_budget = 20000;
  int words_per_length = 8;
  int directions = 4;
  unsigned seed = defaults::seed;
};

// Max expansion factor d(gx, gx_eps)/d(x, x_eps) over a depth-parameterized
// element sample: a BFS ball, all generator powers up to `depth`, and seeded
// random reduced words of every length up to `depth`. Full balls are
// infeasible for free groups at the depths of interest, so the long-word
// regime is sampled.
inline double equicontinuity_modulus(const HermitianContext& ctx, const GroupPresentation& G,
                                     const ProjectivePoint& x, int depth, double probe,
                                     const EquicontinuityOptions& opts = {}) {
  if (!(probe > 0) || probe > 1e-3) fail(errc::bad_config, "probe must lie in (0, 1e-3]");
  std::vector<CMat> steps;
  for (const CMat& g : G.generators) {
    steps.push_back(g);
    steps.push_back(u1n_inverse(ctx, g));
  }
  // Long powers and long words are pushed without canonical dedup: strongly
  // contracting elements collide at the 6-decimal key resolution even when
  // their expansion data still differs.
  std::vector<CMat> sample;
  enumerate_group(ctx, G, std::min(depth, opts.ball_depth), opts.ball_budget,
                  [&](const CMat& lift, int) { sample.push_back(lift); });
  for (const CMat& s : steps) {
    CMat p = CMat::Identity(ctx.N(), ctx.N());
    for (int k = 1; k <= depth; ++k) {
      p = p * s;
      if (k > opts.ball_depth) sample.push_back(p);
    }
  }
  if (!steps.empty()) {
    for (int len = opts.ball_depth + 1; len <= depth; ++len) {
      std::mt19937_64 rng(opts.seed ^ (0x9e3779b97f4a7c15ull * static_cast<unsigned>(len)));
      std::uniform_int_distribution<size_t> pick(0, steps.size() - 1);
      for (int w = 0; w < opts.words_per_length; ++w) {
        CMat m = CMat::Identity(ctx.N(), ctx.N());
        size_t prev = steps.size();  // sentinel
        for (int l = 0; l < len; ++l) {
          size_t s;
          do { s = pick(rng); } while (steps.size() > 1 && prev < steps.size() && s == (prev ^ 1));
          m = m * steps[s];
          prev = s;
        }
        sample.push_back(m);
      }
    }
  }

  std::mt19937_64 rng(opts.seed ^ 0xabcdef1234567ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<CVec> perturbed;
  std::vector<double> base_dist;
  for (int d = 0; d < opts.directions; ++d) {
    CVec v(ctx.N());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(gauss(rng), gauss(rng));
    v -= x.coords * x.coords.dot(v);
    v.normalize();
    CVec xe = x.coords + probe * v;
    xe.normalize();
    ProjectivePoint pe{xe, ctx.n};
    perturbed.push_back(xe);
    base_dist.push_back(fs_distance(x, pe));
  }

  double modulus = 0.0;
  for (const CMat& g : sample) {
    CVec gx = g * x.coords;
    double gn = gx.norm();
    if (!(gn > tol::zero_vector)) continue;
    gx /= gn;
    ProjectivePoint pgx{gx, ctx.n};
    for (size_t d = 0; d < perturbed.size(); ++d) {
      CVec ge = g * perturbed[d];
      double en = ge.norm();
      if (!(en > tol::zero_vector)) continue;
      ge /= en;
      double num = fs_distance(pgx, ProjectivePoint{ge, ctx.n});
      if (base_dist[d] > 0) modulus = std::max(modulus, num / base_dist[d]);
    }
  }
  return modulus;
}

inline double hausdorff_distance(const std::vector<ProjectivePoint>& A,
                                 const std::vector<ProjectivePoint>& B) {
  if (A.empty() || B.empty()) fail(errc::empty_cloud, "hausdorff_distance of an empty cloud");
  auto directed = [](const std::vector<ProjectivePoint>& from,
                     const std::vector<ProjectivePoint>& to) {
    double worst = 0.0;
    for (const auto& a : from) {
      double best = M_PI;
      for (const auto& b : to) best = std::min(best, fs_distance(a, b));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(A, B), directed(B, A));
}

// --- catalog -------------------------------------------------------------------

inline std::vector<std::string> catalog_names() {
  return {"cyclic-loxodromic", "elementary-two-point", "elementary-one-point",
          "c-fuchsian-schottky", "r-fuchsian", "generic-schottky"};
}

namespace detail {

inline CMat embed_line_block(const CMat& two, int n, cplx middle_phase = 1.0) {
  CMat g = CMat::Identity(n + 1, n + 1);
  for (int j = 1; j < n; ++j) g(j, j) = middle_phase;
  g(0, 0) = two(0, 0);
  g(0, n) = two(0, 1);
  g(n, 0) = two(1, 0);
  g(n, n) = two(1, 1);
  return g;
}

}  // namespace detail

// Built-in group presentations with fixed, reproducible constants.
inline GroupPresentation catalog(const std::string& name, int n = 0) {
  GroupPresentation G;
  G.name = name;
  if (name == "cyclic-loxodromic") {
    if (n == 0) n = 2;
    G.n = n;
    CMat g = CMat::Identity(n + 1, n + 1);
    g(0, 0) = 2.0;
    g(n, n) = 0.5;
    G.generators.push_back(g);
    G.labels = {"a"};
    G.description = "cyclic group of a loxodromic with axis e1-e_last";
  } else if (name == "elementary-two-point") {
    if (n == 0) n = 2;
    G.n = n;
    std::mt19937_64 rng(7u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMat A(n - 1, n - 1);
    for (int i = 0; i < n - 1; ++i)
      for (int j = 0; j < n - 1; ++j) A(i, j) = cplx(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<CMat> qr(A);
    CMat U = qr.householderQ() * CMat::Identity(n - 1, n - 1);
    cplx c = std::sqrt(U.determinant());
    double r = 2.0;
    CMat g = CMat::Zero(n + 1, n + 1);
    g(0, 0) = r * c;
    g.block(1, 1, n - 1, n - 1) = U;
    g(n, n) = c / r;
    G.generators.push_back(g);
    G.labels = {"a"};
    G.description = "two fixed boundary points, unitary middle block";
  } else if (name == "elementary-one-point") {
    if (n == 0) n = 2;
    G.n = n;
    // translation large enough that the orbit clusters at one point within
    // the default cluster resolution by depth ~30
    CVec v(n - 1);
    for (int j = 0; j < n - 1; ++j) v(j) = cplx(4.0, 0.8) / std::sqrt(double(n - 1));
    double t = 1.0;
    CMat g = CMat::Identity(n + 1, n + 1);
    g.block(0, 1, 1, n - 1) = -v.adjoint();
    g(0, n) = cplx(-0.5 * v.squaredNorm(), t);
    g.block(1, n, n - 1, 1) = v;
    G.generators.push_back(g);
    G.labels = {"t"};
    G.description = "parabolic translation fixing [e1]";
  } else if (name == "c-fuchsian-schottky") {
    if (n == 0) n = 2;
    if (n != 2) fail(errc::bad_config, "c-fuchsian-schottky is built in PU(1,2)");
    G.n = 2;
    double t = 1.1, s = 1.0;
    Eigen::Matrix2cd C;
    C << 1, 1, 1, -1;
    C /= std::sqrt(2.0);
    Eigen::Matrix2cd g1d;
    g1d << std::cosh(t), std::sinh(t), std::sinh(t), std::cosh(t);
    Eigen::Matrix2cd m;
    m << std::cosh(s), cplx(0, std::sinh(s)), cplx(0, -std::sinh(s)), std::cosh(s);
    Eigen::Matrix2cd g2d = m * g1d * m.inverse();
    G.generators.push_back(detail::embed_line_block(C * g1d * C, 2));
    G.generators.push_back(detail::embed_line_block(C * g2d * C, 2));
    G.labels = {"a", "b"};
    G.description = "two loxodromics preserving the complex line span(e1, e_last)";
  } else if (name == "r-fuchsian") {
    if (n == 0) n = 2;
    if (n != 2) fail(errc::bad_config, "r-fuchsian is built in PU(1,2)");
    G.n = 2;
    HermitianContext ctx = make_context(2);
    CMat g1 = CMat::Identity(3, 3);
    g1(0, 0) = std::exp(1.1);
    g1(2, 2) = std::exp(-1.1);
    Eigen::Matrix3d Y;
    Y << 0, 0.9, 0.4, -0.9, 0, 0.7, -0.4, -0.7, 0;
    Eigen::Matrix3d YH = Y * ctx.H.real();
    Eigen::Matrix3d R = YH.exp();
    CMat Rc = R.cast<cplx>();
    G.generators.push_back(g1);
    G.generators.push_back(Rc * g1 * ctx.H * Rc.adjoint() * ctx.H);
    G.labels = {"a", "b"};
    G.description = "all-real subgroup preserving a Lagrangian";
  } else if (name == "generic-schottky") {
    if (n == 0) n = 2;
    if (n != 2 && n != 3) fail(errc::bad_config, "generic-schottky is built for n = 2 or 3");
    G.n = n;
    CMat g1 = CMat::Identity(n + 1, n + 1);
    g1(0, 0) = std::exp(1.05);
    g1(n, n) = std::exp(-1.05);
    HermitianContext ctx = make_context(n);
    GroupElement k = random_k_element(n == 2 ? 12021u : 12031u, n);
    G.generators.push_back(g1);
    G.generators.push_back(k.lift * g1 * u1n_inverse(ctx, k.lift));
    G.labels = {"a", "b"};
    G.description = "two loxodromics with generically placed axes";
  } else {
    fail(errc::unknown_name, "unknown catalog group '" + name + "'");
  }
  return G;
}

// --- main-theorem verification ---------------------------------------------------

struct VerifyParams {
  std::vector<int> direct_depths = {10, 20, 30};
  int cg_depth = 30;
  int equi_depth_lo = 20;
  int equi_depth_hi = 40;
  int n_compact = 50;
  double margin = defaults::margin;
  int n_omega = 20;
  int n_tangent = 20;
  double omega_margin = 0.2;
  double probe = 1e-12;
  double delta = defaults::delta;
  long budget = defaults::budget;
  unsigned seed = defaults::seed;
  int threads = 1;
  double family_resolution = defaults::family_resolution;
  double crit_i_tol = 1e-2;
  double equi_stable_ratio = 2.0;
  double equi_growth_ratio = 10.0;
};

struct EquiRow {
  int tangent = 0;  // 0 = claimed discontinuity region, 1 = tangent hyperplane
  double mod_lo = 0.0;
  double mod_hi = 0.0;
  double ratio = 0.0;
};

struct VerificationReport {
  std::string group_name;
  int n = 0;
  std::vector<int> depths;
  std::vector<double> max_cluster_to_hyperplane;
  bool crit_i_pass = false;
  double min_cluster_gap_in_omega = 0.0;
  std::vector<long> returns_by_length;
  int last_return_length = -1;
  bool crit_ii_pass = false;
  std::vector<EquiRow> equicontinuity_table;
  double omega_worst_ratio = 0.0;
  double tangent_min_growth = 0.0;
  bool crit_iii_pass = false;
  int family_size = 0;
  int clusters = 0;
  bool overall_pass = false;
  VerifyParams params;
};

namespace detail {

inline ProjectivePoint random_projective_point(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec v(n + 1);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(gauss(rng), gauss(rng));
  return normalize_point(v);
}

inline std::vector<ProjectivePoint> sample_margin_points(const HermitianContext& ctx,
                                                         const HyperplaneFamily& fam, int count,
                                                         double margin, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<ProjectivePoint> out;
  int guard = 0;
  while (static_cast<int>(out.size()) < count && guard < count * 10000) {
    ++guard;
    ProjectivePoint p = random_projective_point(rng, ctx.n);
    if (family_distance(fam, p) >= margin) out.push_back(std::move(p));
  }
  if (static_cast<int>(out.size()) < count)
    fail(errc::margin_violated, "could not sample points at the requested margin");
  return out;
}

}  // namespace detail

inline VerificationReport verify_main_theorem(const HermitianContext& ctx,
                                              const GroupPresentation& G,
                                              const VerifyParams& params = {}) {
  VerificationReport rep;
  rep.group_name = G.name;
  rep.n = ctx.n;
  rep.params = params;

  LimitSetEstimate cg =
      chen_greenberg_estimate(ctx, G, params.cg_depth, params.delta, params.budget, nullptr,
                              params.threads);
  HyperplaneFamily fam = kulkarni_from_cg(ctx, cg, params.family_resolution);
  rep.family_size = fam.size();
  rep.clusters = cluster_count(cg.boundary_samples);

  std::vector<ProjectivePoint> compact =
      detail::sample_margin_points(ctx, fam, params.n_compact, params.margin, params.seed);

  for (int depth : params.direct_depths) {
    DirectKulkarniEstimate est = kulkarni_direct_estimate(
        ctx, G, fam, compact, depth, params.margin, params.budget, params.threads);
    rep.depths.push_back(depth);
    rep.max_cluster_to_hyperplane.push_back(est.max_dist_to_family);
    if (depth == params.direct_depths.back()) {
      double gap = M_PI;
      for (const auto& pt : est.cloud) {
        ProjectivePoint q{pt.coords, ctx.n};
        for (const auto& s : compact) gap = std::min(gap, fs_distance(q, s));
      }
      rep.min_cluster_gap_in_omega = gap;
    }
  }
  rep.crit_i_pass = !rep.max_cluster_to_hyperplane.empty() &&
                    rep.max_cluster_to_hyperplane.back() < params.crit_i_tol &&
                    rep.max_cluster_to_hyperplane.back() <= rep.max_cluster_to_hyperplane.front();

  // returns table: elements whose image of the compact re-enters it
  {
    int scan_depth = std::min(params.direct_depths.back(), 8);
    ElementLevels levels = enumerate_levels(ctx, G, scan_depth, 30000, params.threads);
    rep.returns_by_length.assign(static_cast<size_t>(levels.stats.complete_depth) + 1, 0);
    for (int len = 0; len <= levels.stats.complete_depth; ++len) {
      for (const CMat& g : levels.levels[static_cast<size_t>(len)]) {
        bool returns = false;
        for (const auto& s : compact) {
          CVec img = (g * s.coords).normalized();
          ProjectivePoint q{img, ctx.n};
          for (const auto& s2 : compact)
            if (fs_distance(q, s2) < params.margin / 2) { returns = true; break; }
          if (returns) break;
        }
        if (returns) {
          ++rep.returns_by_length[static_cast<size_t>(len)];
          rep.last_return_length = std::max(rep.last_return_length, len);
        }
      }
    }
    rep.crit_ii_pass = rep.min_cluster_gap_in_omega >= params.margin / 2;
  }

  // equicontinuity contrast
  std::vector<ProjectivePoint> omega_pts = detail::sample_margin_points(
      ctx, fam, params.n_omega, params.omega_margin, params.seed ^ 0x5151u);
  // hyperplane bases from generator fixed points when available: these are
  // eigenvector-exact, so the growth probe is not capped by base error
  std::vector<ProjectivePoint> tangent_bases = loxodromic_fixed_points(ctx, G, 1, 64, 0.05);
  if (tangent_bases.empty()) tangent_bases = fam.bases;
  std::mt19937_64 rng(params.seed ^ 0x7777u);
  std::vector<ProjectivePoint> tangent_pts;
  for (int i = 0; i < params.n_tangent; ++i) {
    const ProjectivePoint& b = tangent_bases[static_cast<size_t>(i) % tangent_bases.size()];
    ProjectiveSubspace hp = polar(ctx, b);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVec coeff(hp.frame.cols());
    for (Eigen::Index j = 0; j < coeff.size(); ++j) coeff(j) = cplx(gauss(rng), gauss(rng));
    tangent_pts.push_back(normalize_point(hp.frame * coeff));
  }

  EquicontinuityOptions eopts;
  eopts.seed = params.seed ^ 0x2468u;
  double worst_ratio = 0.0;
  double min_growth = std::numeric_limits<double>::infinity();
  for (const auto& p : omega_pts) {
    double lo = equicontinuity_modulus(ctx, G, p, params.equi_depth_lo, params.probe, eopts);
    double hi = equicontinuity_modulus(ctx, G, p, params.equi_depth_hi, params.probe, eopts);
    double ratio = lo > 0 ? hi / lo : 0.0;
    rep.equicontinuity_table.push_back(EquiRow{0, lo, hi, ratio});
    worst_ratio = std::max(worst_ratio, ratio);
  }
  for (const auto& p : tangent_pts) {
    double lo = equicontinuity_modulus(ctx, G, p, params.equi_depth_lo, params.probe, eopts);
    double hi = equicontinuity_modulus(ctx, G, p, params.equi_depth_hi, params.probe, eopts);
    double ratio = lo > 0 ? hi / lo : 0.0;
    rep.equicontinuity_table.push_back(EquiRow{1, lo, hi, ratio});
    min_growth = std::min(min_growth, ratio);
  }
  rep.omega_worst_ratio = worst_ratio;
  rep.tangent_min_growth = tangent_pts.empty() ? 0.0 : min_growth;
  rep.crit_iii_pass = worst_ratio < params.equi_stable_ratio &&
                      rep.tangent_min_growth >= params.equi_growth_ratio;

  rep.overall_pass = rep.crit_i_pass && rep.crit_ii_pass && rep.crit_iii_pass;
  return rep;
}

}  // namespace chg
