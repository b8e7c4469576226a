#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "chg/hermitian.hpp"
#include "chg/projective.hpp"

using namespace chg;
using Catch::Approx;

namespace {

CVec cv(std::initializer_list<cplx> entries) {
  CVec v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (cplx c : entries) v(i++) = c;
  return v;
}

CMat random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

}  // namespace

TEST_CASE("normalize_point canonicalizes scale and phase") {
  auto p = normalize_point(cv({0, 0, 5}));
  REQUIRE(p.coords(2).real() == Approx(1.0));
  REQUIRE(std::abs(p.coords(0)) == 0.0);

  auto q = normalize_point(cv({cplx(0, 2), 0, 0}));
  REQUIRE(q.coords(0).real() == Approx(1.0));
  REQUIRE(q.coords(0).imag() == Approx(0.0));

  REQUIRE_THROWS_AS(normalize_point(cv({0, 0, 0})), Error);
}

TEST_CASE("normalize_point is scaling invariant and idempotent") {
  std::mt19937_64 rng(11);
  CVec base = cv({1, 1, cplx(1, 1)});
  auto ref = normalize_point(base);
  for (int k = 0; k < 100; ++k) {
    double theta = 2 * M_PI * k / 100.0;
    auto p = normalize_point(base * std::polar(3.7, theta));
    REQUIRE((p.coords - ref.coords).norm() < 1e-12);
  }
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < 10000; ++k) {
    CVec v(4);
    for (int i = 0; i < 4; ++i) v(i) = cplx(g(rng), g(rng));
    auto once = normalize_point(v);
    auto twice = normalize_point(once.coords);
    REQUIRE((once.coords - twice.coords).norm() < 1e-13);
  }
}

TEST_CASE("span computes dimension by rank") {
  auto e1 = basis_point(2, 0), e2 = basis_point(2, 1);
  auto line = span({e1, e2});
  REQUIRE(line.proj_dim() == 1);
  REQUIRE(subspace_contains(line, normalize_point(cv({1, 1, 0}))));

  auto pt = span({e1, e1});
  REQUIRE(pt.proj_dim() == 0);

  auto degen = span({e1, e2, normalize_point(cv({1, 1, 0}))});
  REQUIRE(degen.proj_dim() == 1);
}

TEST_CASE("meet of coordinate subspaces") {
  auto e1 = basis_point(3, 0), e2 = basis_point(3, 1), e3 = basis_point(3, 2),
       e4 = basis_point(3, 3);
  auto m = meet(span({e1, e2}), span({e2, e3}));
  REQUIRE(m.proj_dim() == 0);
  REQUIRE(fs_distance(normalize_point(m.frame.col(0)), e2) < 1e-12);

  auto empty = meet(span({e1, e2}), span({e3, e4}));
  REQUIRE(empty.is_empty());
}

TEST_CASE("meet of a hyperplane with a line, solved directly") {
  // oracle: points of span(a,b) are s*a + t*b; the hyperplane {v3 = 0} picks
  // out the unique solution of the linear condition on (s,t)
  auto e1 = basis_point(2, 0), e2 = basis_point(2, 1), e3 = basis_point(2, 2);
  auto w = normalize_point(cv({1, 1, 1}));
  auto hyper = span({e1, e2});  // {v3 = 0}

  // line through e3 and (1,1,1): s*e3 + t*(1,1,1) has v3 = 0 iff s = -t,
  // giving the point (1,1,0)
  auto m1 = meet(hyper, line_through(e3, w));
  REQUIRE(m1.proj_dim() == 0);
  REQUIRE(fs_distance(normalize_point(m1.frame.col(0)), normalize_point(cv({1, 1, 0}))) < 1e-12);

  // line through e1 and (1,1,1): s*e1 + t*(1,1,1) has v3 = 0 iff t = 0,
  // giving e1 itself
  auto m2 = meet(hyper, line_through(e1, w));
  REQUIRE(m2.proj_dim() == 0);
  REQUIRE(fs_distance(normalize_point(m2.frame.col(0)), e1) < 1e-12);
}

TEST_CASE("line_through rejects coincident points") {
  auto e1 = basis_point(2, 0), e2 = basis_point(2, 1);
  auto l = line_through(e1, normalize_point(cv({1, 1, 0})));
  REQUIRE(subspace_distance(l, span({e1, e2})) < 1e-12);
  REQUIRE_THROWS_AS(line_through(e1, e1), Error);
}

TEST_CASE("fs_distance values and metric properties") {
  auto e1 = basis_point(2, 0), e2 = basis_point(2, 1);
  REQUIRE(fs_distance(e1, e1) == Approx(0.0).margin(1e-15));
  REQUIRE(fs_distance(e1, e2) == Approx(M_PI / 2));
  REQUIRE(fs_distance(e1, normalize_point(cv({1, 1, 0}))) == Approx(M_PI / 4));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  auto rnd = [&] {
    CVec v(3);
    for (int i = 0; i < 3; ++i) v(i) = cplx(g(rng), g(rng));
    return normalize_point(v);
  };
  for (int k = 0; k < 500; ++k) {
    auto a = rnd(), b = rnd(), c = rnd();
    REQUIRE(fs_distance(a, b) == Approx(fs_distance(b, a)).margin(1e-12));
    REQUIRE(fs_distance(a, c) <= fs_distance(a, b) + fs_distance(b, c) + 1e-9);
  }
}

TEST_CASE("fs_distance is invariant under standard unitaries") {
  std::mt19937_64 rng(17);
  CMat A = random_matrix(rng, 4, 4);
  Eigen::HouseholderQR<CMat> qr(A);
  CMat U = qr.householderQ() * CMat::Identity(4, 4);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    CVec v = random_matrix(rng, 4, 1), w = random_matrix(rng, 4, 1);
    auto p = normalize_point(v), q = normalize_point(w);
    auto up = normalize_point(U * v), uq = normalize_point(U * w);
    REQUIRE(fs_distance(up, uq) == Approx(fs_distance(p, q)).margin(1e-10));
  }
}

TEST_CASE("second compound on diagonal and identity") {
  REQUIRE((second_compound(CMat::Identity(3, 3)) - CMat::Identity(3, 3)).norm() < 1e-15);
  CMat D = CMat::Zero(3, 3);
  D(0, 0) = cplx(2, 1);
  D(1, 1) = 3.0;
  D(2, 2) = cplx(0, -1);
  CMat C = second_compound(D);
  REQUIRE(std::abs(C(0, 0) - D(0, 0) * D(1, 1)) < 1e-15);
  REQUIRE(std::abs(C(1, 1) - D(0, 0) * D(2, 2)) < 1e-15);
  REQUIRE(std::abs(C(2, 2) - D(1, 1) * D(2, 2)) < 1e-15);
  REQUIRE((C - C.diagonal().asDiagonal().toDenseMatrix()).norm() < 1e-15);
}

TEST_CASE("second compound is functorial") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 50; ++k) {
    CMat A = random_matrix(rng, 3, 3), B = random_matrix(rng, 3, 3);
    CMat lhs = second_compound(A * B);
    CMat rhs = second_compound(A) * second_compound(B);
    REQUIRE((lhs - rhs).norm() / rhs.norm() < 1e-9);
  }
}

TEST_CASE("plucker point of a line is generator independent") {
  auto e1 = basis_point(3, 0);
  auto p = normalize_point(cv({1, 1, cplx(0, 1), 0}));
  auto l = line_through(e1, p);
  auto q = normalize_point(cv({2, 1, cplx(0, 1), 0}));  // another point of the same line
  REQUIRE(subspace_contains(l, q, 1e-10));
  auto lp1 = plucker_of_line(l);
  auto lp2 = plucker_of_line(line_through(p, q));
  REQUIRE(fs_distance(lp1.plucker, lp2.plucker) < 1e-10);
}

TEST_CASE("plucker embedding separates random lines") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  auto rnd_line = [&] {
    CVec v(4), w(4);
    for (int i = 0; i < 4; ++i) { v(i) = cplx(g(rng), g(rng)); w(i) = cplx(g(rng), g(rng)); }
    return line_through(normalize_point(v), normalize_point(w));
  };
  for (int k = 0; k < 100; ++k) {
    auto l1 = rnd_line(), l2 = rnd_line();
    if (subspace_distance(l1, l2) < 1e-3) continue;  // same line sampled twice
    REQUIRE(fs_distance(plucker_of_line(l1).plucker, plucker_of_line(l2).plucker) > 1e-6);
  }
}

TEST_CASE("span/meet duality through the polar") {
  auto ctx = make_context(3);
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g(0.0, 1.0);
  auto rnd_pt = [&] {
    CVec v(4);
    for (int i = 0; i < 4; ++i) v(i) = cplx(g(rng), g(rng));
    return normalize_point(v);
  };
  for (int k = 0; k < 40; ++k) {
    auto a = span({rnd_pt(), rnd_pt()});
    auto b = span({rnd_pt(), rnd_pt()});
    auto lhs = meet(a, b);
    auto rhs = polar(ctx, span2(polar(ctx, a), polar(ctx, b)));
    REQUIRE(subspace_distance(lhs, rhs) < 1e-9);
  }
}
