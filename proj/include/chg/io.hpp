#pragma once

// File formats and CLI support: JSON group presentations, CSV point clouds,
// JSON reports with config echo, and complex-number parsing for flags.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chg/config.hpp"
#include "chg/errors.hpp"
#include "chg/group.hpp"
#include "chg/hermitian.hpp"
#include "chg/limitset.hpp"
#include "chg/orbit.hpp"

namespace chg {

using json = nlohmann::json;

// log level from CHG_LOG: quiet (default) | info | debug
inline int log_level() {
  static int level = [] {
    const char* env = std::getenv("CHG_LOG");
    if (!env) return 0;
    std::string s(env);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
  }();
  return level;
}

inline void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[chg] " << msg << "\n";
}

struct RunConfig {
  double boundary_tol = tol::boundary;
  double rank_tol = tol::rank_rel;
  double convergence_tol = tol::cauchy;
  int depth = defaults::depth;
  long budget = defaults::budget;
  double delta = defaults::delta;
  double tolerance = tol::membership;
  unsigned seed = defaults::seed;
  int threads = 1;
  std::string out_path;
  std::string format = "csv";

  void validate() const {
    if (depth < 1 || budget < 1) fail(errc::bad_config, "depth and budget must be >= 1");
    if (!(boundary_tol > 0) || !(rank_tol > 0) || !(convergence_tol > 0) || !(delta > 0) ||
        !(tolerance > 0))
      fail(errc::bad_config, "tolerances must be positive");
    if (threads < 1) fail(errc::bad_config, "threads must be >= 1");
    if (format != "csv" && format != "json") fail(errc::bad_config, "format must be csv or json");
  }

  json echo() const {
    return json{{"depth", depth},       {"budget", budget}, {"delta", delta},
                {"tol", tolerance},     {"seed", seed},     {"threads", threads},
                {"boundary_tol", boundary_tol}, {"rank_tol", rank_tol},
                {"convergence_tol", convergence_tol}, {"format", format}};
  }
};

// --- complex / point parsing -------------------------------------------------

// accepts forms like 1, -2.5, i, -i, 2i, 1+2i, 3.5e-2-1e-1i
inline cplx parse_complex(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) fail(errc::parse_error, "empty complex literal");
  auto parse_real = [](const std::string& t) -> double {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    size_t pos = 0;
    double v;
    try {
      v = std::stod(t, &pos);
    } catch (const std::exception&) {
      fail(errc::parse_error, "malformed complex entry '" + t + "'");
    }
    if (pos != t.size()) fail(errc::parse_error, "malformed complex entry '" + t + "'");
    return v;
  };
  if (s.back() == 'i' || s.back() == 'I') {
    std::string body = s.substr(0, s.size() - 1);
    // split off a leading real part if one exists: scan for a +/- that is not
    // at position 0 and not part of an exponent
    for (size_t k = body.size(); k-- > 1;) {
      char c = body[k];
      if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
        return cplx(parse_real(body.substr(0, k)), parse_real(body.substr(k)));
      }
    }
    return cplx(0.0, parse_real(body));
  }
  return cplx(parse_real(s), 0.0);
}

inline CVec parse_vector(const std::string& s) {
  std::vector<cplx> entries;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) entries.push_back(parse_complex(tok));
  if (entries.empty()) fail(errc::parse_error, "empty vector literal");
  CVec v(static_cast<Eigen::Index>(entries.size()));
  for (size_t i = 0; i < entries.size(); ++i) v(static_cast<Eigen::Index>(i)) = entries[i];
  return v;
}

inline std::vector<CVec> parse_points(const std::string& s) {
  std::vector<CVec> pts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, '|')) pts.push_back(parse_vector(tok));
  return pts;
}

// --- group files ---------------------------------------------------------------

inline json matrix_to_json(const CMat& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      row.push_back(json::array({M(i, j).real(), M(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMat matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) fail(errc::parse_error, "matrix must be a non-empty array");
  size_t nr = rows.size();
  size_t nc = 0;
  CMat M;
  for (size_t i = 0; i < nr; ++i) {
    const json& row = rows[i];
    if (!row.is_array()) fail(errc::parse_error, "matrix row " + std::to_string(i) + " is not an array");
    if (i == 0) {
      nc = row.size();
      M.resize(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc));
    }
    if (row.size() != nc) fail(errc::parse_error, "ragged matrix rows");
    for (size_t j = 0; j < nc; ++j) {
      const json& e = row[j];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        fail(errc::parse_error, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") must be a [re, im] pair");
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return M;
}

inline json group_to_json(const GroupPresentation& G) {
  json j;
  j["name"] = G.name;
  j["n"] = G.n;
  json gens = json::array();
  for (const CMat& g : G.generators) gens.push_back(matrix_to_json(g));
  j["generators"] = std::move(gens);
  if (!G.labels.empty()) j["labels"] = G.labels;
  if (!G.description.empty()) j["description"] = G.description;
  return j;
}

inline GroupPresentation group_from_json(const json& j) {
  if (!j.contains("n") || !j["n"].is_number_integer())
    fail(errc::parse_error, "group file needs an integer field 'n'");
  if (!j.contains("generators") || !j["generators"].is_array())
    fail(errc::parse_error, "group file needs a 'generators' array");
  GroupPresentation G;
  G.n = j["n"].get<int>();
  G.name = j.value("name", "");
  G.description = j.value("description", "");
  if (j.contains("labels")) G.labels = j["labels"].get<std::vector<std::string>>();
  for (const auto& gj : j["generators"]) {
    CMat g = matrix_from_json(gj);
    if (g.rows() != G.n + 1 || g.cols() != g.rows())
      fail(errc::parse_error, "generator size does not match n");
    G.generators.push_back(std::move(g));
  }
  return G;
}

inline GroupPresentation load_group(const std::string& path,
                                    double membership_tol = tol::membership) {
  std::ifstream in(path);
  if (!in) fail(errc::parse_error, "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(errc::parse_error, std::string(e.what()));
  }
  GroupPresentation G = group_from_json(j);
  HermitianContext ctx = make_context(G.n);
  validate_presentation(ctx, G, membership_tol);  // throws NotInGroup with index
  log_info("loaded group '" + G.name + "' with " + std::to_string(G.generators.size()) +
           " generators, n = " + std::to_string(G.n));
  return G;
}

inline void save_group(const GroupPresentation& G, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::parse_error, "cannot write '" + path + "'");
  out << group_to_json(G).dump(2) << "\n";
}

// --- CSV clouds ----------------------------------------------------------------

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_cloud_csv(std::ostream& out, const std::vector<OrbitPoint>& points, int n) {
  for (int j = 0; j <= n; ++j) out << (j ? "," : "") << "re_" << j << ",im_" << j;
  out << ",word_length,ball_value\n";
  for (const auto& p : points) {
    for (int j = 0; j <= n; ++j) {
      if (j) out << ",";
      out << fmt_double(p.coords(j).real()) << "," << fmt_double(p.coords(j).imag());
    }
    out << "," << p.word_length << "," << fmt_double(p.ball_value) << "\n";
  }
}

inline std::vector<OrbitPoint> estimate_as_points(const HermitianContext& ctx,
                                                  const LimitSetEstimate& est) {
  std::vector<OrbitPoint> pts;
  pts.reserve(est.boundary_samples.size());
  for (size_t i = 0; i < est.boundary_samples.size(); ++i) {
    const auto& p = est.boundary_samples[i];
    pts.push_back(OrbitPoint{p.coords, est.word_lengths[i], herm(ctx, p.coords, p.coords).real()});
  }
  return pts;
}

inline json cloud_to_json(const std::vector<OrbitPoint>& points, int n) {
  json arr = json::array();
  for (const auto& p : points) {
    json row;
    json coords = json::array();
    for (int j = 0; j <= n; ++j) coords.push_back(json::array({p.coords(j).real(), p.coords(j).imag()}));
    row["coords"] = std::move(coords);
    row["word_length"] = p.word_length;
    row["ball_value"] = p.ball_value;
    arr.push_back(std::move(row));
  }
  return arr;
}

// --- reports ---------------------------------------------------------------------

inline json family_to_json(const HyperplaneFamily& fam) {
  json j;
  j["resolution"] = fam.resolution;
  json bases = json::array();
  for (const auto& b : fam.bases) {
    json coords = json::array();
    for (Eigen::Index i = 0; i < b.coords.size(); ++i)
      coords.push_back(json::array({b.coords(i).real(), b.coords(i).imag()}));
    bases.push_back(std::move(coords));
  }
  j["bases"] = std::move(bases);
  return j;
}

inline json report_to_json(const VerificationReport& rep) {
  json j;
  j["group"] = rep.group_name;
  j["n"] = rep.n;
  j["family_size"] = rep.family_size;
  j["clusters"] = rep.clusters;
  j["criterion_i"] = {{"depths", rep.depths},
                      {"max_cluster_to_hyperplane", rep.max_cluster_to_hyperplane},
                      {"pass", rep.crit_i_pass}};
  j["criterion_ii"] = {{"min_cluster_gap_in_omega", rep.min_cluster_gap_in_omega},
                       {"returns_by_length", rep.returns_by_length},
                       {"last_return_length", rep.last_return_length},
                       {"pass", rep.crit_ii_pass}};
  json table = json::array();
  for (const auto& row : rep.equicontinuity_table)
    table.push_back({{"tangent", row.tangent},
                     {"modulus_lo", row.mod_lo},
                     {"modulus_hi", row.mod_hi},
                     {"ratio", row.ratio}});
  j["criterion_iii"] = {{"table", table},
                        {"omega_worst_ratio", rep.omega_worst_ratio},
                        {"tangent_min_growth", rep.tangent_min_growth},
                        {"pass", rep.crit_iii_pass}};
  j["overall_pass"] = rep.overall_pass;
  j["config"] = {{"cg_depth", rep.params.cg_depth},
                 {"direct_depths", rep.params.direct_depths},
                 {"equi_depths", {rep.params.equi_depth_lo, rep.params.equi_depth_hi}},
                 {"n_compact", rep.params.n_compact},
                 {"margin", rep.params.margin},
                 {"omega_margin", rep.params.omega_margin},
                 {"probe", rep.params.probe},
                 {"delta", rep.params.delta},
                 {"budget", rep.params.budget},
                 {"seed", rep.params.seed},
                 {"threads", rep.params.threads},
                 {"family_resolution", rep.params.family_resolution},
                 {"crit_i_tol", rep.params.crit_i_tol},
                 {"equi_stable_ratio", rep.params.equi_stable_ratio},
                 {"equi_growth_ratio", rep.params.equi_growth_ratio}};
  return j;
}

}  // namespace chg
