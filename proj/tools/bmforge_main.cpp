// Command-line front end: constructs family instances, forges adversarial
// cost matrices, certifies candidate points, checks minimal secancy, runs the
// descent demonstrator, and reproduces the hardcoded fixture end to end.
#include "bmforge/families.hpp"
#include "bmforge/forge.hpp"
#include "bmforge/jsonio.hpp"
#include "bmforge/minsecant.hpp"
#include "bmforge/optimize.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace bmforge;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string profile = "default";
  std::uint64_t seed = kDefaultSeed;

  Tolerances tols() const { return Tolerances::from_profile(profile); }
  Meta meta() const { return Meta{seed, tols()}; }
};

void emit(const std::string& path, Json body, const Common& common) {
  body["meta"] = meta_to_json(common.meta());
  save_json(path, body);
}

GroundTruth truth_from_pair(const SdpInstance& inst, const PairData& pair,
                            const Tolerances& tols) {
  if (pair.n != inst.n)
    throw Error("pair file order " + std::to_string(pair.n) +
                " does not match instance order " + std::to_string(inst.n));
  return make_ground_truth(inst, pair.U0, tols);
}

int run_family(const Common& common, const std::string& kind, int n, int p,
               int S, int d, int m, const std::vector<int>& dims, bool w1u,
               const std::vector<std::string>& emit_paths,
               const std::string& cost_path) {
  SdpInstance inst;
  BadPair pair;
  std::optional<CostMatrix> cost;
  if (kind == "maxcut") {
    inst = maxcut_instance(n);
    pair = maxcut_bad_pair(n, p);
  } else if (kind == "orthocut") {
    inst = orthocut_instance(S, d);
    int attempts = 0;
    pair = orthocut_bad_pair(S, d, p, common.seed, 100, &attempts);
    if (d >= 3)
      std::cout << "sampled construction accepted after " << attempts
                << " attempt(s)\n";
  } else if (kind == "spheres") {
    inst = spheres_instance(dims);
    pair = spheres_bad_pair(dims, p);
  } else if (kind == "appendix-b") {
    AppendixBFixture fx = appendix_b_counterexample(n, m, w1u, common.seed);
    inst = fx.instance;
    pair = {fx.truth, fx.point};
  } else if (kind == "appendix-c") {
    AppendixCFixture fx = appendix_c_fixture();
    inst = fx.instance;
    pair = {fx.truth, fx.point};
    cost = fx.C;
  } else {
    throw Error("unknown family kind '" + kind + "'");
  }

  std::cout << "family " << kind << ": n = " << inst.n << ", m = " << inst.m
            << ", r = " << pair.truth.r << ", p = " << pair.point.p
            << ", feasibility residual = " << pair.point.feasibility_residual
            << "\n";
  if (!emit_paths.empty()) {
    emit(emit_paths[0], instance_to_json(inst), common);
    emit(emit_paths[1], pair_to_json(pair.truth, pair.point), common);
  }
  if (!cost_path.empty()) {
    if (!cost) throw Error("family '" + kind + "' carries no cost matrix");
    emit(cost_path, cost_to_json(*cost), common);
  }
  return kExitOk;
}

int run_forge(const Common& common, const std::string& instance_path,
              const std::string& pair_path, double lambda_margin,
              double t_margin, const std::string& out_path) {
  const Tolerances tols = common.tols();
  const SdpInstance inst = instance_from_json(load_json(instance_path));
  const PairData pair = pair_from_json(load_json(pair_path));
  const GroundTruth truth = truth_from_pair(inst, pair, tols);
  const ForgeResult res =
      forge(inst, truth, pair.V, ForgeMargins{lambda_margin, t_margin}, tols);
  std::cout << "forged cost: kkt " << verdict_name(res.kkt.verdict)
            << ", first-order residual " << res.first_order.residual_C2V
            << ", min Hessian eigenvalue "
            << (res.second_order.eigenvalues.size() > 0
                    ? res.second_order.eigenvalues(0)
                    : 0.0)
            << ", gap " << res.gap << "\n";
  if (!out_path.empty()) emit(out_path, forge_result_to_json(res), common);
  return kExitOk;
}

int run_certify(const Common& common, const std::string& instance_path,
                const std::string& cost_path, const std::string& pair_path,
                const std::string& out_path) {
  const Tolerances tols = common.tols();
  const SdpInstance inst = instance_from_json(load_json(instance_path));
  const CostMatrix cost = cost_from_json(load_json(cost_path));
  const PairData pair = pair_from_json(load_json(pair_path));
  const GroundTruth truth = truth_from_pair(inst, pair, tols);
  const Matrix& C = cost.C.mat;

  Json body;
  body["regularity"] = regularity_to_json(check_p_regular(inst, pair.V, tols));
  body["feasibility_X0"] = feasibility_to_json(
      check_feasible(inst, truth.X0.mat, tols.feas_tol));
  body["feasibility_VVt"] = feasibility_to_json(
      check_feasible(inst, pair.V * pair.V.transpose(), tols.feas_tol));
  const KktCertificate kkt = kkt_certificate(inst, C, truth, {}, tols);
  body["kkt"] = kkt_to_json(kkt);
  const FirstOrderCertificate fo =
      first_order_certificate(inst, C, pair.V, tols);
  body["first_order"] = first_order_to_json(fo);
  bool second_order_ok = false;
  if (fo.is_critical) {
    const SecondOrderReport so = second_order_report(inst, C, pair.V, tols);
    body["second_order"] = second_order_to_json(so);
    second_order_ok = so.is_second_order;
  }
  body["min_secant"] =
      min_secant_to_json(check_min_secant(inst, truth, pair.V, tols));
  body["gap"] = optimality_gap(inst, C, truth, pair.V);

  std::cout << "kkt " << verdict_name(kkt.verdict) << " (strict "
            << (kkt.strict ? "yes" : "no") << "), first-order "
            << (fo.is_critical ? "critical" : "not critical")
            << ", second-order " << (second_order_ok ? "pass" : "fail")
            << ", gap " << body["gap"].get<double>() << "\n";
  if (!out_path.empty()) emit(out_path, std::move(body), common);
  return kkt.verdict == Verdict::INVALID ? kExitInvalid : kExitOk;
}

int run_minsec(const Common& common, const std::string& instance_path,
               const std::string& pair_path, const std::string& out_path) {
  const Tolerances tols = common.tols();
  const SdpInstance inst = instance_from_json(load_json(instance_path));
  const PairData pair = pair_from_json(load_json(pair_path));
  const GroundTruth truth = truth_from_pair(inst, pair, tols);
  const MinSecantReport ms = check_min_secant(inst, truth, pair.V, tols);
  const DimensionForecast fc =
      dimension_predictor(inst.n, inst.m, pair.p, truth.r);
  std::cout << "minimally secant: " << (ms.verdict ? "yes" : "no")
            << " (properties " << ms.property1 << ms.property2 << ms.property3
            << "), slack = " << fc.slack << "\n";
  if (!out_path.empty()) {
    Json body = min_secant_to_json(ms);
    body["predictor"] = Json{{"feasible", fc.feasible}, {"slack", fc.slack}};
    emit(out_path, std::move(body), common);
  }
  return kExitOk;
}

int run_optimize(const Common& common, const std::string& instance_path,
                 const std::string& cost_path, const std::string& pair_path,
                 int max_iter, const std::string& out_path) {
  const Tolerances tols = common.tols();
  const SdpInstance inst = instance_from_json(load_json(instance_path));
  const CostMatrix cost = cost_from_json(load_json(cost_path));
  const PairData pair = pair_from_json(load_json(pair_path));
  DescentOptions opts;
  opts.max_iter = max_iter;
  opts.rng_seed = common.seed;
  const DescentTrace trace = descend(inst, cost.C.mat, pair.V, opts, tols);
  std::cout << "descent: " << (trace.converged ? "converged" : "stopped")
            << " at objective " << trace.terminal_objective << " after "
            << trace.grad_steps << " gradient + " << trace.escape_steps
            << " escape steps\n";
  if (!out_path.empty()) emit(out_path, descent_trace_to_json(trace), common);
  return kExitOk;
}

int run_basin(const Common& common, const std::string& instance_path,
              const std::string& cost_path, const std::string& pair_path,
              int p_opt, int seeds, const std::string& out_path) {
  const Tolerances tols = common.tols();
  const SdpInstance inst = instance_from_json(load_json(instance_path));
  const CostMatrix cost = cost_from_json(load_json(cost_path));
  std::optional<GroundTruth> truth;
  std::optional<Matrix> spurious;
  int p = p_opt;
  if (!pair_path.empty()) {
    const PairData pair = pair_from_json(load_json(pair_path));
    truth = truth_from_pair(inst, pair, tols);
    spurious = pair.V;
    p = pair.p;
  }
  if (p <= 0) throw Error("basin: provide --p or a pair file");
  const BasinSummary summary = basin_experiment(
      inst, cost.C.mat, truth, spurious, p, seeds, common.seed, {}, tols);
  std::cout << "basin over " << seeds << " seeds: global "
            << summary.fraction_global << ", trapped "
            << summary.fraction_trapped << ", certified "
            << summary.fraction_certified << ", other "
            << summary.fraction_other << "\n";
  if (!out_path.empty()) emit(out_path, basin_summary_to_json(summary), common);
  return kExitOk;
}

int run_reproduce(const Common& common, const std::string& what,
                  const std::string& out_path) {
  if (what != "appendix-c")
    throw Error("unknown reproduce target '" + what + "'");
  const Tolerances tols = common.tols();
  const AppendixCFixture fx = appendix_c_fixture();
  const Matrix& C = fx.C.C.mat;
  const Matrix& V = fx.point.V;

  struct Row {
    std::string label;
    bool pass;
    double value;
  };
  std::vector<Row> rows;

  const FirstOrderCertificate fo =
      first_order_certificate(fx.instance, C, V, tols);
  const double c2_scale = std::max(fo.C2.mat.norm(), 1e-300);
  rows.push_back({"C2 V = 0 (residual / ||C2||)",
                  fo.residual_C2V <= 1e-10 * c2_scale,
                  fo.residual_C2V / c2_scale});

  const KktCertificate kkt =
      kkt_certificate(fx.instance, C, fx.truth, fx.g1, tols);
  rows.push_back({"C1 PSD (min eigenvalue)",
                  kkt.min_eig_C1 >= -tols.psd_rel * std::max(1.0, C.norm()),
                  kkt.min_eig_C1});
  rows.push_back({"rank(C1) = n - r = 4", kkt.rank_C1 == 4,
                  static_cast<double>(kkt.rank_C1)});
  const double gap_scale = std::max(1.0, std::abs(objective(C, fx.truth.X0.mat)));
  rows.push_back({"duality gap", kkt.duality_gap <= 1e-9 * gap_scale,
                  kkt.duality_gap});

  const SecondOrderReport so = second_order_report(fx.instance, C, V, tols);
  const double lam_max = so.eigenvalues(so.eigenvalues.size() - 1);
  const int zeros =
      static_cast<int>((so.eigenvalues.cwiseAbs().array() <= 1e-7 * lam_max)
                           .count());
  const int positives = static_cast<int>(
      (so.eigenvalues.array() > 1e-7 * lam_max).count());
  rows.push_back({"restricted Hessian: exactly 1 zero eigenvalue", zeros == 1,
                  static_cast<double>(zeros)});
  rows.push_back({"restricted Hessian: 5 strictly positive eigenvalues",
                  positives == 5, static_cast<double>(positives)});

  const double gap = optimality_gap(fx.instance, C, fx.truth, V);
  rows.push_back({"objective gap f(V) - <C, X0> > 0", gap > 0, gap});

  bool all = true;
  for (const Row& row : rows) {
    all = all && row.pass;
    std::printf("%-52s %s  (%.12g)\n", row.label.c_str(),
                row.pass ? "PASS" : "FAIL", row.value);
  }
  std::printf("%-52s %s\n", "overall", all ? "PASS" : "FAIL");

  if (!out_path.empty()) {
    Json body{{"target", what}, {"overall", all}};
    Json checks = Json::array();
    for (const Row& row : rows)
      checks.push_back(
          Json{{"label", row.label}, {"pass", row.pass}, {"value", row.value}});
    body["checks"] = std::move(checks);
    body["kkt"] = kkt_to_json(kkt);
    body["second_order"] = second_order_to_json(so);
    emit(out_path, std::move(body), common);
  }
  return all ? kExitOk : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"construct, certify and demonstrate spurious second-order "
               "critical points of factorized semidefinite programs"};
  app.require_subcommand(1);

  Common common;
  if (const char* env = std::getenv("BMFORGE_TOL_PROFILE"))
    common.profile = env;
  app.add_option("--tol-profile", common.profile,
                 "tolerance profile: default | strict | loose")
      ->capture_default_str();
  app.add_option("--seed", common.seed, "rng seed recorded in every output")
      ->capture_default_str();

  // family
  auto* fam = app.add_subcommand(
      "family", "construct a problem family and its planted pair");
  std::string fam_kind;
  int fam_n = 5, fam_p = 2, fam_S = 3, fam_d = 2, fam_m = 5;
  std::vector<int> fam_dims;
  bool fam_w1u = false;
  std::vector<std::string> fam_emit;
  std::string fam_cost;
  fam->add_option("kind", fam_kind,
                  "maxcut | orthocut | spheres | appendix-b | appendix-c")
      ->required();
  fam->add_option("--n", fam_n, "order (maxcut, appendix-b)");
  fam->add_option("--p", fam_p, "factor width");
  fam->add_option("--S", fam_S, "number of blocks (orthocut)");
  fam->add_option("--d", fam_d, "block size (orthocut)");
  fam->add_option("--m", fam_m, "constraint count (appendix-b)");
  fam->add_option("--dims", fam_dims, "block sizes (spheres)");
  fam->add_flag("--w1-equals-u", fam_w1u, "appendix-b degenerate variant");
  fam->add_option("--emit", fam_emit, "instance.json pair.json")
      ->expected(2);
  fam->add_option("--cost", fam_cost, "cost output path (appendix-c only)");

  // forge
  auto* forge_cmd = app.add_subcommand(
      "forge", "forge a cost matrix with a spurious second-order point");
  std::string forge_inst, forge_pair, forge_out;
  double forge_lambda = 1.0, forge_t = 1.0;
  forge_cmd->add_option("--instance", forge_inst)->required();
  forge_cmd->add_option("--pair", forge_pair)->required();
  forge_cmd->add_option("--lambda-margin", forge_lambda)->capture_default_str();
  forge_cmd->add_option("--t-margin", forge_t)->capture_default_str();
  forge_cmd->add_option("--out", forge_out, "result JSON path");

  // certify
  auto* cert_cmd = app.add_subcommand(
      "certify", "run every certificate on an (instance, C, X0, V) bundle");
  std::string cert_inst, cert_cost, cert_pair, cert_out;
  cert_cmd->add_option("--instance", cert_inst)->required();
  cert_cmd->add_option("--cost", cert_cost)->required();
  cert_cmd->add_option("--pair", cert_pair)->required();
  cert_cmd->add_option("--out", cert_out);

  // minsec
  auto* ms_cmd = app.add_subcommand(
      "minsec", "check minimal secancy and the dimension predictor");
  std::string ms_inst, ms_pair, ms_out;
  ms_cmd->add_option("--instance", ms_inst)->required();
  ms_cmd->add_option("--pair", ms_pair)->required();
  ms_cmd->add_option("--out", ms_out);

  // optimize
  auto* opt_cmd = app.add_subcommand(
      "optimize", "run descent from the pair's factor point");
  std::string opt_inst, opt_cost, opt_pair, opt_out;
  int opt_max_iter = 20000;
  opt_cmd->add_option("--instance", opt_inst)->required();
  opt_cmd->add_option("--cost", opt_cost)->required();
  opt_cmd->add_option("--pair", opt_pair)->required();
  opt_cmd->add_option("--max-iter", opt_max_iter)->capture_default_str();
  opt_cmd->add_option("--out", opt_out);

  // basin
  auto* basin_cmd = app.add_subcommand(
      "basin", "descent from random starts with terminal classification");
  std::string basin_inst, basin_cost, basin_pair, basin_out;
  int basin_p = 0, basin_seeds = 10;
  basin_cmd->add_option("--instance", basin_inst)->required();
  basin_cmd->add_option("--cost", basin_cost)->required();
  basin_cmd->add_option("--pair", basin_pair,
                        "optional pair enabling global/trap classification");
  basin_cmd->add_option("--p", basin_p, "factor width (when no pair given)");
  basin_cmd->add_option("--seeds", basin_seeds)->capture_default_str();
  basin_cmd->add_option("--out", basin_out);

  // reproduce
  auto* rep_cmd = app.add_subcommand(
      "reproduce", "re-run a hardcoded fixture through the certificate suite");
  std::string rep_what, rep_out;
  rep_cmd->add_option("target", rep_what, "appendix-c")->required();
  rep_cmd->add_option("--out", rep_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fam)
      return run_family(common, fam_kind, fam_n, fam_p, fam_S, fam_d, fam_m,
                        fam_dims, fam_w1u, fam_emit, fam_cost);
    if (*forge_cmd)
      return run_forge(common, forge_inst, forge_pair, forge_lambda, forge_t,
                       forge_out);
    if (*cert_cmd)
      return run_certify(common, cert_inst, cert_cost, cert_pair, cert_out);
    if (*ms_cmd) return run_minsec(common, ms_inst, ms_pair, ms_out);
    if (*opt_cmd)
      return run_optimize(common, opt_inst, opt_cost, opt_pair, opt_max_iter,
                          opt_out);
    if (*basin_cmd)
      return run_basin(common, basin_inst, basin_cost, basin_pair, basin_p,
                       basin_seeds, basin_out);
    if (*rep_cmd) return run_reproduce(common, rep_what, rep_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
