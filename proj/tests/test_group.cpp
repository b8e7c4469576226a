#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "chg/group.hpp"
#include "test_support.hpp"

using namespace chg;
using namespace chg::testsupport;
using Catch::Approx;

namespace {

CMat cyclic_matrix(int n) {
  CMat g = CMat::Identity(n + 1, n + 1);
  g(0, 0) = 2.0;
  g(n, n) = 0.5;
  return g;
}

}  // namespace

TEST_CASE("membership in U(1,n)") {
  auto ctx = make_context(2);
  REQUIRE(is_in_u1n(ctx, ctx.H));  // H H H^* = H since H^2 = I and H = H^*
  REQUIRE(is_in_u1n(ctx, cyclic_matrix(2)));
  CMat bad = CMat::Identity(3, 3);
  bad(0, 0) = 2.0;
  REQUIRE_FALSE(is_in_u1n(ctx, bad));
  REQUIRE_THROWS_AS(is_in_u1n(ctx, CMat::Identity(2, 2)), Error);
}

TEST_CASE("membership in K") {
  auto ctx = make_context(3);
  REQUIRE(is_in_k(ctx, CMat::Identity(4, 4)));
  std::mt19937_64 rng(2);
  CMat mid = random_unitary(rng, 2);
  CMat d = CMat::Zero(4, 4);
  d(0, 0) = std::polar(1.0, 0.8);
  d.block(1, 1, 2, 2) = mid;
  d(3, 3) = std::polar(1.0, 0.8);
  REQUIRE(is_in_k(ctx, d));  // corner phases equal: a * conj(d) = 1
  REQUIRE_FALSE(is_in_k(make_context(2), cyclic_matrix(2)));
}

TEST_CASE("random group elements preserve the form") {
  REQUIRE((random_group_element(1, 2, 0.0).lift - CMat::Identity(3, 3)).norm() == 0.0);
  for (int n : {2, 3, 4, 5}) {
    auto ctx = make_context(n);
    for (unsigned seed = 0; seed < 25; ++seed) {
      GroupElement g = random_group_element(seed, n, 0.7);
      REQUIRE(u1n_residual(ctx, g.lift) < 1e-9);
    }
  }
  // determinism
  REQUIRE((random_group_element(42, 3, 0.5).lift - random_group_element(42, 3, 0.5).lift)
              .norm() == 0.0);
  // K sampler
  for (unsigned seed = 0; seed < 20; ++seed) {
    auto ctx = make_context(3);
    REQUIRE(is_in_k(ctx, random_k_element(seed, 3).lift, 1e-10));
  }
}

TEST_CASE("group closure under product and inverse") {
  auto ctx = make_context(3);
  for (unsigned seed = 0; seed < 20; ++seed) {
    GroupElement a = random_group_element(seed * 2 + 1, 3, 0.8);
    GroupElement b = random_group_element(seed * 2 + 2, 3, 0.8);
    REQUIRE(u1n_residual(ctx, mul(ctx, a, b).lift) < 1e-8);
    REQUIRE(u1n_residual(ctx, inverse(ctx, a).lift) < 1e-8);
    REQUIRE((mul(ctx, a, inverse(ctx, a)).lift - CMat::Identity(4, 4)).norm() < 1e-10);
  }
}

TEST_CASE("KAK decomposition of the diagonal loxodromic") {
  auto ctx = make_context(3);
  GroupElement g = make_element(ctx, cyclic_matrix(3));
  CartanDecomposition d = cartan_decompose(ctx, g);
  REQUIRE(d.lambda == Approx(std::log(2.0)).margin(1e-12));
  REQUIRE((d.k1.lift - CMat::Identity(4, 4)).norm() < 1e-9);
  REQUIRE((d.k2.lift - CMat::Identity(4, 4)).norm() < 1e-9);
  REQUIRE(projective_residual(d.reconstruct(), g.lift) < 1e-10);
}

TEST_CASE("KAK of the identity and near-elliptic elements") {
  auto ctx = make_context(2);
  CartanDecomposition d = cartan_decompose(ctx, identity_element(ctx));
  REQUIRE(d.lambda == 0.0);
  REQUIRE((d.a - CMat::Identity(3, 3)).norm() == 0.0);
  GroupElement k = random_k_element(9, 2);
  CartanDecomposition dk = cartan_decompose(ctx, k);
  REQUIRE(dk.lambda == 0.0);
  REQUIRE(is_in_k(ctx, dk.k1.lift, 1e-8));
}

TEST_CASE("KAK round trip with known factors") {
  for (int n : {2, 3, 4}) {
    auto ctx = make_context(n);
    for (unsigned seed = 0; seed < 15; ++seed) {
      GroupElement k1 = random_k_element(seed * 3 + 1, n);
      GroupElement k2 = random_k_element(seed * 3 + 2, n);
      CMat a = CMat::Identity(n + 1, n + 1);
      a(0, 0) = std::exp(0.7);
      a(n, n) = std::exp(-0.7);
      GroupElement g = make_element(ctx, k1.lift * a * k2.lift, {}, 1e-7);
      CartanDecomposition d = cartan_decompose(ctx, g);
      REQUIRE(d.lambda == Approx(0.7).margin(1e-10));
      REQUIRE(projective_residual(d.reconstruct(), g.lift) < 1e-9);
      REQUIRE(is_in_k(ctx, d.k1.lift, 1e-8));
      REQUIRE(is_in_k(ctx, d.k2.lift, 1e-8));
    }
  }
}

TEST_CASE("lambda is a class function under K") {
  auto ctx = make_context(3);
  for (unsigned seed = 0; seed < 20; ++seed) {
    GroupElement g = random_group_element(seed + 100, 3, 0.9);
    GroupElement u = random_k_element(seed + 200, 3);
    double l = lambda_of(ctx, g);
    REQUIRE(lambda_of(ctx, mul(ctx, u, g)) == Approx(l).margin(1e-10));
    REQUIRE(lambda_of(ctx, mul(ctx, g, u)) == Approx(l).margin(1e-10));
  }
}

TEST_CASE("random KAK round trips") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> nfac(1, 4);
  for (int n : {2, 3, 4, 5}) {
    auto ctx = make_context(n);
    for (unsigned seed = 0; seed < 50; ++seed) {
      GroupElement g = random_group_element(seed * 7 + 11 * n, n, 0.8);
      int extra = nfac(rng);
      for (int j = 0; j < extra; ++j)
        g = mul(ctx, g, random_group_element(seed * 31 + j, n, 0.8));
      CartanDecomposition d = cartan_decompose(ctx, g);
      REQUIRE(projective_residual(d.reconstruct(), g.lift) < 1e-9);
      REQUIRE(is_in_k(ctx, d.k1.lift, 1e-8));
      REQUIRE(is_in_k(ctx, d.k2.lift, 1e-8));
    }
  }
}

TEST_CASE("pseudo-projective maps from matrices") {
  CMat D = CMat::Zero(3, 3);
  D(0, 0) = 1.0;
  auto t = pp_from_matrix(D);
  REQUIRE(t.rank() == 1);
  REQUIRE(fs_distance(normalize_point(t.image.frame.col(0)), basis_point(2, 0)) < 1e-12);
  REQUIRE(subspace_distance(t.kernel, span({basis_point(2, 1), basis_point(2, 2)})) < 1e-12);

  std::mt19937_64 rng(19);
  CMat M = CMat::Random(3, 3);
  auto inv = pp_from_matrix(M + 3.0 * CMat::Identity(3, 3));
  REQUIRE(inv.kernel.is_empty());

  auto a = pp_from_matrix(M);
  auto b = pp_from_matrix(cplx(0, 5) * M);
  REQUIRE((a.matrix - b.matrix).norm() < 1e-12);

  REQUIRE_THROWS_AS(pp_from_matrix(CMat::Zero(3, 3)), Error);
}

TEST_CASE("pseudo-projective application") {
  CMat D = CMat::Zero(3, 3);
  D(0, 0) = 1.0;
  auto t = pp_from_matrix(D);
  auto img = pp_apply(t, normalize_point(cv({1, 1, 1})));
  REQUIRE(fs_distance(img, basis_point(2, 0)) < 1e-12);
  REQUIRE_THROWS_AS(pp_apply(t, normalize_point(cv({0, 1, 1}))), Error);
}

TEST_CASE("pseudo-projective limits of loxodromic powers") {
  auto ctx = make_context(2);
  CMat g = cyclic_matrix(2);
  std::vector<CMat> seq, seq_inv;
  CMat p = CMat::Identity(3, 3), q = CMat::Identity(3, 3);
  CMat ginv = u1n_inverse(ctx, g);
  for (int m = 1; m <= 40; ++m) {
    p = p * g;
    q = q * ginv;
    seq.push_back(p);
    seq_inv.push_back(q);
  }
  auto tau = pp_limit(seq);
  REQUIRE(tau.rank() == 1);
  REQUIRE(fs_distance(normalize_point(tau.image.frame.col(0)), basis_point(2, 0)) < 1e-10);
  REQUIRE(subspace_distance(tau.kernel, span({basis_point(2, 1), basis_point(2, 2)})) < 1e-10);

  auto theta = pp_limit(seq_inv);
  REQUIRE(fs_distance(normalize_point(theta.image.frame.col(0)), basis_point(2, 2)) < 1e-10);
  // Im(tau)^perp = Ker(theta) and Im(theta)^perp = Ker(tau)
  REQUIRE(subspace_distance(polar(ctx, normalize_point(tau.image.frame.col(0))), theta.kernel) <
          1e-10);
  REQUIRE(subspace_distance(polar(ctx, normalize_point(theta.image.frame.col(0))), tau.kernel) <
          1e-10);

  // a constant sequence converges to itself
  GroupElement r = random_group_element(5, 2, 0.5);
  std::vector<CMat> cst(10, r.lift);
  REQUIRE(projective_residual(pp_limit(cst).matrix, r.lift) < 1e-12);

  // an oscillating sequence does not converge
  std::vector<CMat> osc;
  for (int m = 0; m < 12; ++m) osc.push_back(m % 2 ? g : ginv);
  REQUIRE_THROWS_AS(pp_limit(osc), Error);
  auto diag = pp_limit_diagnose(osc);
  REQUIRE_FALSE(diag.converged);
  REQUIRE(diag.gap > 0.1);
}

TEST_CASE("uniform convergence off the kernel is monotone") {
  // sup over a grid with margin 0.2 from Ker(tau) of d(gamma^m x, tau x)
  auto ctx = make_context(2);
  CMat g = cyclic_matrix(2);
  std::vector<ProjectivePoint> grid;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      double a = -2.0 + 4.0 * i / 19.0, b = -2.0 + 4.0 * j / 19.0;
      auto p = normalize_point(cv({1.0, a, b}));
      grid.push_back(p);
    }
  auto e1 = basis_point(2, 0);
  CMat pw = CMat::Identity(3, 3);
  double prev = M_PI;
  for (int m = 1; m <= 40; ++m) {
    pw = pw * g;
    double sup = 0.0;
    for (const auto& x : grid) sup = std::max(sup, fs_distance(normalize_point(pw * x.coords), e1));
    if (m >= 5) {
      REQUIRE(sup < prev);
      prev = sup;
    } else {
      prev = std::min(prev, sup);
    }
    if (m == 40) REQUIRE(sup < 1e-6);
  }
}

TEST_CASE("tends simply to infinity diagnosis") {
  auto ctx = make_context(2);
  CMat g = cyclic_matrix(2);
  std::vector<GroupElement> seq;
  CMat p = CMat::Identity(3, 3);
  for (int m = 1; m <= 25; ++m) {
    p = p * g;
    seq.push_back(make_element(ctx, p));
  }
  auto d = tends_simply(ctx, seq);
  REQUIRE(d.converging_k_factors);
  REQUIRE(d.lambda_divergent);
  REQUIRE((*d.k1_limit - CMat::Identity(3, 3)).norm() < 1e-9);
  for (size_t m = 0; m < seq.size(); ++m)
    REQUIRE(d.alpha_sequence[m] == Approx((m + 1) * std::log(2.0)).margin(1e-10));

  // left K factor is absorbed into k1: the attracting point moves with k
  GroupElement k = random_k_element(3, 2);
  std::vector<GroupElement> kseq;
  for (const auto& e : seq) kseq.push_back(mul(ctx, k, e));
  auto dk = tends_simply(ctx, kseq);
  REQUIRE(dk.converging_k_factors);
  REQUIRE(dk.lambda_divergent);
  auto attract = normalize_point(*dk.k1_limit * basis_point(2, 0).coords);
  REQUIRE(fs_distance(attract, normalize_point(k.lift * basis_point(2, 0).coords)) < 1e-9);

  // constant elliptic sequence: lambda stays put
  GroupElement u = random_k_element(8, 2);
  std::vector<GroupElement> cst(12, u);
  auto dc = tends_simply(ctx, cst);
  REQUIRE_FALSE(dc.lambda_divergent);
}
