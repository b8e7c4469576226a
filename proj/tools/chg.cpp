// chg: command-line front end for the complex hyperbolic group toolkit.
//
// Exit codes: 0 success, 1 usage / input error, 2 numerical failure,
// 3 verification failed.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chg/control.hpp"
#include "chg/group.hpp"
#include "chg/hermitian.hpp"
#include "chg/io.hpp"
#include "chg/limitset.hpp"
#include "chg/orbit.hpp"

using namespace chg;

namespace {

struct GroupArgs {
  std::string group_path;
  std::string catalog_name;
  int n = 0;
};

void add_group_flags(CLI::App* cmd, GroupArgs& args) {
  auto* g = cmd->add_option("--group", args.group_path, "path to a JSON group file");
  auto* c = cmd->add_option("--catalog", args.catalog_name, "built-in group name");
  cmd->add_option("--n", args.n, "ambient dimension override for catalog groups");
  g->excludes(c);
}

GroupPresentation resolve_group(const GroupArgs& args, const RunConfig& cfg) {
  if (!args.group_path.empty()) return load_group(args.group_path, cfg.tolerance);
  if (!args.catalog_name.empty()) return catalog(args.catalog_name, args.n);
  fail(errc::bad_config, "one of --group or --catalog is required");
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out_path);
    if (!out) fail(errc::parse_error, "cannot write '" + cfg.out_path + "'");
    out << text;
  }
}

int usage_exit_code(const Error& e) {
  switch (e.code()) {
    case errc::parse_error:
    case errc::not_in_group:
    case errc::unknown_name:
    case errc::bad_config:
    case errc::dimension_mismatch:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"complex hyperbolic group limit sets"};
  app.require_subcommand(1);

  RunConfig cfg;
  app.add_option("--depth", cfg.depth, "word-length depth");
  app.add_option("--budget", cfg.budget, "element budget for enumeration");
  app.add_option("--delta", cfg.delta, "boundary filter for limit-set estimates");
  app.add_option("--tol", cfg.tolerance, "generic tolerance override");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--threads", cfg.threads, "worker threads (1 = deterministic reference)");
  app.add_option("--out", cfg.out_path, "output path (default stdout)");
  app.add_option("--format", cfg.format, "csv or json");

  // decompose
  auto* cmd_dec = app.add_subcommand("decompose", "KAK decomposition of a matrix");
  std::string matrix_path;
  cmd_dec->add_option("--matrix", matrix_path, "JSON matrix file (rows of [re,im] pairs)")
      ->required();

  // invariant
  auto* cmd_inv = app.add_subcommand("invariant", "Cartan angular invariant of a point triple");
  std::string points_arg;
  cmd_inv->add_option("--points", points_arg, "three points 'a1,a2,..|b1,..|c1,..'")->required();

  // pencil
  auto* cmd_pen = app.add_subcommand("pencil", "boundary-point pencil map data (M_z, phi_z)");
  std::string z_arg, w_arg;
  cmd_pen->add_option("--z", z_arg, "boundary point")->required();
  cmd_pen->add_option("--w", w_arg, "middle-subspace point to push through phi_z");

  // orbit
  GroupArgs orbit_args;
  auto* cmd_orb = app.add_subcommand("orbit", "breadth-first orbit enumeration");
  add_group_flags(cmd_orb, orbit_args);
  std::string base_arg;
  cmd_orb->add_option("--base", base_arg, "interior base point (default [1,0,...,0,-1])");

  // limitset
  GroupArgs ls_args;
  auto* cmd_ls = app.add_subcommand("limitset", "Chen-Greenberg estimate + tangent hyperplanes");
  add_group_flags(cmd_ls, ls_args);

  // dset
  GroupArgs dset_args;
  auto* cmd_ds = app.add_subcommand("dset", "D-set prediction vs sampled estimate");
  add_group_flags(cmd_ds, dset_args);
  std::string x_arg;
  int dset_m = 40, dset_trials = defaults::trials, dset_gen = 0;
  cmd_ds->add_option("--x", x_arg, "test point")->required();
  cmd_ds->add_option("--m", dset_m, "sequence prefix length");
  cmd_ds->add_option("--trials", dset_trials, "sampler trials");
  cmd_ds->add_option("--gen", dset_gen, "generator index for the power sequence");

  // verify
  GroupArgs ver_args;
  auto* cmd_ver = app.add_subcommand("verify", "main-theorem verification report");
  add_group_flags(cmd_ver, ver_args);

  // catalog
  auto* cmd_cat = app.add_subcommand("catalog", "list or emit built-in groups");
  std::string cat_name;
  int cat_n = 0;
  cmd_cat->add_option("--name", cat_name, "catalog entry to emit");
  cmd_cat->add_option("--catalog-n", cat_n, "dimension for the emitted entry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    cfg.validate();

    if (cmd_dec->parsed()) {
      std::ifstream in(matrix_path);
      if (!in) fail(errc::parse_error, "cannot open '" + matrix_path + "'");
      json mj;
      try {
        mj = json::parse(in);
      } catch (const json::parse_error& e) {
        fail(errc::parse_error, e.what());
      }
      CMat M = matrix_from_json(mj);
      if (M.rows() != M.cols() || M.rows() < 2)
        fail(errc::bad_config, "decompose needs a square matrix of size >= 2");
      HermitianContext ctx = make_context(static_cast<int>(M.rows()) - 1);
      GroupElement g = make_element(ctx, M, {}, cfg.tolerance);
      CartanDecomposition d = cartan_decompose(ctx, g);
      json out;
      out["lambda"] = d.lambda;
      out["k1"] = matrix_to_json(d.k1.lift);
      out["a"] = matrix_to_json(d.a);
      out["k2"] = matrix_to_json(d.k2.lift);
      out["reconstruction_residual"] = projective_residual(d.reconstruct(), g.lift);
      out["config"] = cfg.echo();
      emit(cfg, out.dump(2) + "\n");
    }

    if (cmd_inv->parsed()) {
      auto pts = parse_points(points_arg);
      if (pts.size() != 3) fail(errc::bad_config, "--points needs exactly three points");
      int n = static_cast<int>(pts[0].size()) - 1;
      HermitianContext ctx = make_context(n);
      auto x = normalize_point(pts[0]), y = normalize_point(pts[1]), z = normalize_point(pts[2]);
      double A = cartan_invariant(ctx, x, y, z, std::max(cfg.boundary_tol, cfg.tolerance));
      TripleClass cls = triple_class(ctx, x, y, z, tol::triple_class,
                                     std::max(cfg.boundary_tol, cfg.tolerance));
      const char* cname = cls == TripleClass::ComplexLine ? "complex-line"
                        : cls == TripleClass::Lagrangian  ? "lagrangian"
                                                          : "generic";
      std::ostringstream os;
      os.precision(15);
      os << "cartan_invariant " << A << "\nclass " << cname << "\n";
      emit(cfg, os.str());
    }

    if (cmd_pen->parsed()) {
      CVec zv = parse_vector(z_arg);
      int n = static_cast<int>(zv.size()) - 1;
      HermitianContext ctx = make_context(n);
      ProjectivePoint z = normalize_point(zv);
      CMat M = mz_matrix(ctx, z);
      json out;
      out["M_z"] = matrix_to_json(M);
      CMat gram = M * M.adjoint();
      double scale = std::norm(z.coords(0)) * std::norm(z.coords(n));
      out["unitary_up_to_scale_residual"] =
          (gram - scale * CMat::Identity(n - 1, n - 1)).norm();
      double A = cartan_invariant(ctx, basis_point(n, 0), z, basis_point(n, n),
                                  std::max(cfg.boundary_tol, cfg.tolerance));
      out["cartan_invariant_e1_z_elast"] = A;
      out["eigenvalue_arg_link"] = std::arg(-z.coords(0) * std::conj(z.coords(n)));
      if (!w_arg.empty()) {
        ProjectivePoint w = normalize_point(parse_vector(w_arg));
        ProjectivePoint geo = phi_z_geometric(ctx, z, w);
        ProjectivePoint alg = normalize_point(
            [&] { CVec img = CVec::Zero(n + 1); img.segment(1, n - 1) = M * w.coords.segment(1, n - 1); return img; }());
        json coords = json::array();
        for (Eigen::Index i = 0; i < geo.coords.size(); ++i)
          coords.push_back(json::array({geo.coords(i).real(), geo.coords(i).imag()}));
        out["phi_z_w"] = std::move(coords);
        out["geometric_vs_matrix"] = fs_distance(geo, alg);
      }
      out["config"] = cfg.echo();
      emit(cfg, out.dump(2) + "\n");
    }

    if (cmd_orb->parsed()) {
      GroupPresentation G = resolve_group(orbit_args, cfg);
      HermitianContext ctx = make_context(G.n);
      ProjectivePoint base =
          base_arg.empty() ? default_base_point(ctx) : normalize_point(parse_vector(base_arg));
      OrbitCloud cloud = orbit_bfs(ctx, G, cfg.depth, cfg.budget, base, cfg.threads);
      log_info("orbit: " + std::to_string(cloud.dedup_count) + " elements, complete depth " +
               std::to_string(cloud.depth_complete));
      if (cfg.format == "csv") {
        std::ostringstream os;
        write_cloud_csv(os, cloud.points, ctx.n);
        emit(cfg, os.str());
      } else {
        json out;
        out["points"] = cloud_to_json(cloud.points, ctx.n);
        out["dedup_count"] = cloud.dedup_count;
        out["depth_complete"] = cloud.depth_complete;
        out["truncated"] = cloud.truncated;
        out["config"] = cfg.echo();
        emit(cfg, out.dump(2) + "\n");
      }
    }

    if (cmd_ls->parsed()) {
      GroupPresentation G = resolve_group(ls_args, cfg);
      HermitianContext ctx = make_context(G.n);
      LimitSetEstimate est =
          chen_greenberg_estimate(ctx, G, cfg.depth, cfg.delta, cfg.budget, nullptr, cfg.threads);
      HyperplaneFamily fam = kulkarni_from_cg(ctx, est);
      if (cfg.format == "csv") {
        std::ostringstream os;
        write_cloud_csv(os, estimate_as_points(ctx, est), ctx.n);
        emit(cfg, os.str());
        json summary;
        summary["samples"] = est.boundary_samples.size();
        summary["clusters"] = cluster_count(est.boundary_samples);
        summary["family"] = family_to_json(fam);
        summary["depth_effective"] = est.depth_effective;
        summary["config"] = cfg.echo();
        if (!cfg.out_path.empty()) std::cout << summary.dump(2) << "\n";
      } else {
        json out;
        out["samples"] = cloud_to_json(estimate_as_points(ctx, est), ctx.n);
        out["clusters"] = cluster_count(est.boundary_samples);
        out["family"] = family_to_json(fam);
        out["depth_effective"] = est.depth_effective;
        out["config"] = cfg.echo();
        emit(cfg, out.dump(2) + "\n");
      }
    }

    if (cmd_ds->parsed()) {
      GroupPresentation G = resolve_group(dset_args, cfg);
      HermitianContext ctx = make_context(G.n);
      if (dset_gen < 0 || dset_gen >= static_cast<int>(G.generators.size()))
        fail(errc::bad_config, "generator index out of range");
      GroupElement g = make_element(ctx, G.generators[static_cast<size_t>(dset_gen)], {},
                                    cfg.tolerance);
      std::vector<GroupElement> seq;
      std::vector<CMat> lifts;
      GroupElement p = g;
      for (int m = 1; m <= dset_m; ++m) {
        seq.push_back(p);
        lifts.push_back(p.lift);
        p = mul(ctx, p, g);
      }
      LimitPair lp = limit_pair(ctx, seq);
      ProjectivePoint x = normalize_point(parse_vector(x_arg));
      DsetPrediction pred = dset_predict(ctx, lp, x);
      auto cloud = dset_estimate(ctx, lifts, x, dset_trials,
                                 [](int m) { return 1.0 / m; }, cfg.seed);
      double worst = 0.0;
      for (const auto& q : cloud) {
        double d = pred.is_point ? fs_distance(q, pred.point) : point_to_subspace(q, pred.line);
        worst = std::max(worst, d);
      }
      json out;
      out["prediction"] = pred.is_point ? "point" : "line";
      out["cloud_size"] = cloud.size();
      out["max_cloud_distance_to_prediction"] = worst;
      out["config"] = cfg.echo();
      emit(cfg, out.dump(2) + "\n");
    }

    if (cmd_ver->parsed()) {
      GroupPresentation G = resolve_group(ver_args, cfg);
      HermitianContext ctx = make_context(G.n);
      VerifyParams params;
      params.budget = cfg.budget;
      params.delta = cfg.delta;
      params.seed = cfg.seed;
      params.threads = cfg.threads;
      if (cfg.depth != defaults::depth) {
        params.cg_depth = cfg.depth;
        params.direct_depths = {std::max(1, cfg.depth / 3), std::max(1, 2 * cfg.depth / 3),
                                cfg.depth};
      }
      VerificationReport rep = verify_main_theorem(ctx, G, params);
      emit(cfg, report_to_json(rep).dump(2) + "\n");
      if (!rep.overall_pass) return 3;
    }

    if (cmd_cat->parsed()) {
      if (cat_name.empty()) {
        std::ostringstream os;
        for (const auto& name : catalog_names()) os << name << "\n";
        emit(cfg, os.str());
      } else {
        GroupPresentation G = catalog(cat_name, cat_n);
        emit(cfg, group_to_json(G).dump(2) + "\n");
      }
    }
  } catch (const Error& e) {
    std::cerr << "{\"error\": \"" << e.what() << "\"}\n";
    return usage_exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "{\"error\": \"" << e.what() << "\"}\n";
    return 2;
  }
  return 0;
}
