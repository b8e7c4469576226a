#pragma once

#include <stdexcept>
#include <string>

namespace chg {

enum class errc {
  zero_vector,
  coincident_points,
  dimension_mismatch,
  not_boundary,
  not_in_pencil,
  in_kernel,
  zero_matrix,
  not_converged,
  numerical_failure,
  not_tending_simply,
  pencil_mismatch,
  not_in_k,
  degenerate_z,
  chain_degenerate,
  degenerate_triple,
  dset_undefined,
  unknown_name,
  parse_error,
  not_in_group,
  empty_estimate,
  margin_violated,
  empty_cloud,
  non_interior_base,
  bad_config,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::zero_vector: return "ZeroVector";
    case errc::coincident_points: return "CoincidentPoints";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::not_boundary: return "NotBoundary";
    case errc::not_in_pencil: return "NotInPencil";
    case errc::in_kernel: return "InKernel";
    case errc::zero_matrix: return "ZeroMatrix";
    case errc::not_converged: return "NotConverged";
    case errc::numerical_failure: return "NumericalFailure";
    case errc::not_tending_simply: return "NotTendingSimply";
    case errc::pencil_mismatch: return "PencilMismatch";
    case errc::not_in_k: return "NotInK";
    case errc::degenerate_z: return "DegenerateZ";
    case errc::chain_degenerate: return "ChainDegenerate";
    case errc::degenerate_triple: return "DegenerateTriple";
    case errc::dset_undefined: return "Undefined";
    case errc::unknown_name: return "UnknownName";
    case errc::parse_error: return "ParseError";
    case errc::not_in_group: return "NotInGroup";
    case errc::empty_estimate: return "EmptyEstimate";
    case errc::margin_violated: return "MarginViolated";
    case errc::empty_cloud: return "EmptyCloud";
    case errc::non_interior_base: return "NonInteriorBase";
    case errc::bad_config: return "BadConfig";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace chg
