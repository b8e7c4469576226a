#pragma once

#include <complex>

#include <Eigen/Dense>

namespace chg {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

// Default numerical tolerances. Every operation that takes a tolerance
// parameter defaults to the value listed here; callers may override.
namespace tol {
inline constexpr double zero_vector = 1e-14;       // minimum norm for a representative
inline constexpr double phase_tie = 1e-12;         // tie band for phase canonicalization
inline constexpr double frame_orthonormal = 1e-10; // frame pairwise orthonormality
inline constexpr double rank_rel = 1e-9;           // singular values below rank_rel*sigma_max are zero
inline constexpr double boundary = 1e-9;           // on <w,w>/|w|^2
inline constexpr double coincident = 1e-10;        // points closer than this coincide
inline constexpr double triple_class = 1e-6;       // radians, complex-line / Lagrangian classification
inline constexpr double membership = 1e-9;         // form-preservation residual (relative Frobenius)
inline constexpr double cauchy = 1e-10;            // pseudo-projective limit Cauchy gap
inline constexpr int cauchy_window = 5;
inline constexpr double kernel_residual = 1e-9;    // pseudo-projective kernel membership
inline constexpr double chain_transverse = 1e-7;   // smallest allowed principal angle in span/meet chains
inline constexpr double decomposition = 1e-8;      // KAK reconstruction / K-membership residual
inline constexpr double near_elliptic = 1e-12;     // sigma_max - 1 below this counts as elliptic
inline constexpr double subspace_match = 1e-8;
inline constexpr double lambda_divergence = 1.0;   // tail growth needed to call lambda divergent
}  // namespace tol

namespace defaults {
inline constexpr double delta = 1e-3;              // boundary filter for limit-set estimates
inline constexpr double family_resolution = 1e-2;  // dedup angle for tangent-hyperplane bases
inline constexpr double cluster_resolution = 5e-2; // cluster counting angle
inline constexpr double margin = 0.1;              // compact-set margin from the hyperplane family
inline constexpr int depth = 30;
inline constexpr long budget = 400000;
inline constexpr int trials = 100;                 // D-set sampler
inline constexpr unsigned seed = 20240901u;
}  // namespace defaults

}  // namespace chg
