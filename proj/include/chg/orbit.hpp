#pragma once

// Breadth-first group enumeration with canonical-form dedup, and the orbit
// clouds built on top of it. Deterministic for fixed inputs in any thread
// mode: candidates may be computed in parallel but are committed in order.

#include <cstdint>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "chg/config.hpp"
#include "chg/errors.hpp"
#include "chg/group.hpp"
#include "chg/hermitian.hpp"

namespace chg {

struct GroupPresentation {
  int n = 0;
  std::vector<CMat> generators;
  std::vector<std::string> labels;
  std::string name;
  std::string description;
};

inline void validate_presentation(const HermitianContext& ctx, const GroupPresentation& G,
                                  double tolr = tol::membership) {
  for (size_t i = 0; i < G.generators.size(); ++i) {
    const CMat& g = G.generators[i];
    if (g.rows() != ctx.N() || g.cols() != ctx.N())
      fail(errc::dimension_mismatch, "generator " + std::to_string(i) + " has wrong size");
    double r = u1n_residual(ctx, g);
    if (r >= tolr)
      fail(errc::not_in_group,
           "generator " + std::to_string(i) + " residual " + std::to_string(r));
  }
}

// Hash of the canonical (Frobenius-1, phase-fixed) form with entries rounded
// to 6 decimals. Projective classes collide only below that resolution.
inline std::uint64_t canonical_key(const CMat& M) {
  CMat C = canonical_matrix(M);
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](long long v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(v & 0xff);
      h *= 1099511628211ull;
      v >>= 8;
    }
  };
  const cplx* d = C.data();
  for (Eigen::Index i = 0; i < C.size(); ++i) {
    mix(std::llround(d[i].real() * 1e6));
    mix(std::llround(d[i].imag() * 1e6));
  }
  return h;
}

struct EnumerationStats {
  long count = 0;
  int complete_depth = 0;  // deepest fully enumerated word length
  bool truncated = false;
  int threads = 1;
};

// Visits every distinct element of word length <= depth, identity first,
// stopping at `budget` elements. visit(lift, word_length).
template <typename Visit>
EnumerationStats enumerate_group(const HermitianContext& ctx, const GroupPresentation& G,
                                 int depth, long budget, Visit&& visit, int threads = 1) {
  if (depth < 0 || budget < 1) fail(errc::bad_config, "enumerate_group: depth >= 0, budget >= 1");
  validate_presentation(ctx, G);

  std::vector<CMat> steps;
  for (const CMat& g : G.generators) {
    steps.push_back(g);
    steps.push_back(u1n_inverse(ctx, g));
  }

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<size_t>(std::min<long>(budget, 1 << 22)));
  EnumerationStats st;
  st.threads = threads;

  CMat id = CMat::Identity(ctx.N(), ctx.N());
  seen.insert(canonical_key(id));
  visit(id, 0);
  st.count = 1;
  if (depth == 0 || steps.empty()) {
    st.complete_depth = 0;
    return st;
  }

  std::vector<CMat> frontier{id};
  for (int level = 1; level <= depth; ++level) {
    std::vector<CMat> next;
    const size_t S = steps.size();
    const size_t total = frontier.size() * S;
    std::vector<std::pair<CMat, std::uint64_t>> cand(total);
    auto compute = [&](size_t lo, size_t hi) {
      for (size_t idx = lo; idx < hi; ++idx) {
        const CMat& f = frontier[idx / S];
        cand[idx].first = f * steps[idx % S];
        cand[idx].second = canonical_key(cand[idx].first);
      }
    };
    if (threads > 1 && total > 1024) {
      std::vector<std::thread> pool;
      size_t chunk = (total + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        size_t lo = t * chunk, hi = std::min(total, lo + chunk);
        if (lo < hi) pool.emplace_back(compute, lo, hi);
      }
      for (auto& th : pool) th.join();
    } else {
      compute(0, total);
    }
    bool level_complete = true;
    for (size_t idx = 0; idx < total; ++idx) {
      if (st.count >= budget) {
        st.truncated = true;
        level_complete = false;
        break;
      }
      if (seen.insert(cand[idx].second).second) {
        visit(cand[idx].first, level);
        next.push_back(std::move(cand[idx].first));
        ++st.count;
      }
    }
    if (!level_complete) {
      st.complete_depth = level - 1;
      return st;
    }
    st.complete_depth = level;
    if (next.empty()) break;  // group exhausted
    frontier = std::move(next);
  }
  return st;
}

// Materialized enumeration grouped by word length.
struct ElementLevels {
  std::vector<std::vector<CMat>> levels;
  EnumerationStats stats;
};

inline ElementLevels enumerate_levels(const HermitianContext& ctx, const GroupPresentation& G,
                                      int depth, long budget, int threads = 1) {
  ElementLevels out;
  out.levels.resize(static_cast<size_t>(depth) + 1);
  out.stats = enumerate_group(
      ctx, G, depth, budget,
      [&](const CMat& lift, int len) { out.levels[static_cast<size_t>(len)].push_back(lift); },
      threads);
  return out;
}

struct OrbitPoint {
  CVec coords;
  int word_length = 0;
  double ball_value = 0.0;
};

struct OrbitCloud {
  std::vector<OrbitPoint> points;
  int depth_requested = 0;
  int depth_complete = 0;
  bool truncated = false;
  long dedup_count = 0;
  int threads = 1;
};

inline OrbitCloud orbit_bfs(const HermitianContext& ctx, const GroupPresentation& G, int depth,
                            long budget, const ProjectivePoint& base, int threads = 1) {
  if (ball_position(ctx, base).classification != Region::Interior)
    fail(errc::non_interior_base, "orbit base point must be interior");
  OrbitCloud cloud;
  cloud.depth_requested = depth;
  cloud.threads = threads;
  auto stats = enumerate_group(
      ctx, G, depth, budget,
      [&](const CMat& lift, int len) {
        ProjectivePoint p = normalize_point(lift * base.coords);
        double value = herm(ctx, p.coords, p.coords).real();
        cloud.points.push_back(OrbitPoint{std::move(p.coords), len, value});
      },
      threads);
  cloud.depth_complete = stats.complete_depth;
  cloud.truncated = stats.truncated;
  cloud.dedup_count = stats.count;
  return cloud;
}

inline ProjectivePoint default_base_point(const HermitianContext& ctx) {
  CVec o = CVec::Zero(ctx.N());
  o(0) = 1.0;
  o(ctx.N() - 1) = -1.0;
  return normalize_point(o);
}

}  // namespace chg
