#include "bmforge/jsonio.hpp"

#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace bmforge {

namespace {

const Json& field(const Json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end())
    throw Error(std::string("missing field '") + name + "'");
  return *it;
}

Vector vector_from_json(const Json& arr) {
  if (!arr.is_array()) throw Error("expected a numeric array");
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  return v;
}

Json vector_to_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace

Json tolerances_to_json(const Tolerances& t) {
  return Json{{"regularity_rel", t.regularity_rel},
              {"rank_rel", t.rank_rel},
              {"basis_rank_rel", t.basis_rank_rel},
              {"eig_zero_rel", t.eig_zero_rel},
              {"psd_rel", t.psd_rel},
              {"crit_rel", t.crit_rel},
              {"pinv_rel", t.pinv_rel},
              {"solve_rel", t.solve_rel},
              {"feas_tol", t.feas_tol},
              {"linesearch_rel", t.linesearch_rel}};
}

Json meta_to_json(const Meta& meta) {
  return Json{{"tool", kToolName},
              {"version", kVersion},
              {"seed", meta.seed},
              {"tolerances", tolerances_to_json(meta.tols)}};
}

Json sym_to_json(const Matrix& M) {
  const int n = static_cast<int>(M.rows());
  Json tri = Json::array();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) tri.push_back(M(i, j));
  return Json{{"order", n}, {"tri", std::move(tri)}};
}

Matrix sym_from_json(const Json& j) {
  const int n = field(j, "order").get<int>();
  const Json& tri = field(j, "tri");
  if (n < 0 || tri.size() != static_cast<std::size_t>(n * (n + 1) / 2))
    throw Error("triangle length does not match order " + std::to_string(n));
  Matrix M(n, n);
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= i; ++k) {
      const double v = tri[idx++].get<double>();
      M(i, k) = v;
      M(k, i) = v;
    }
  return M;
}

Json mat_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix mat_from_json(const Json& rows) {
  if (!rows.is_array() || rows.empty())
    throw Error("expected a non-empty array of rows");
  const std::size_t cols = rows[0].size();
  Matrix M(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw Error("ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j].get<double>();
  }
  return M;
}

Json instance_to_json(const SdpInstance& inst) {
  Json A = Json::array();
  for (int i = 0; i < inst.m; ++i) A.push_back(sym_to_json(inst.Ai(i)));
  return Json{{"n", inst.n},
              {"m", inst.m},
              {"family", family_name(inst.family)},
              {"block_dims", inst.block_dims},
              {"b", vector_to_json(inst.b)},
              {"A", std::move(A)}};
}

SdpInstance instance_from_json(const Json& j) {
  const Json& A_json = field(j, "A");
  std::vector<Matrix> A;
  A.reserve(A_json.size());
  for (const Json& a : A_json) A.push_back(sym_from_json(a));
  const Vector b = vector_from_json(field(j, "b"));
  const Family family = family_from_name(field(j, "family").get<std::string>());
  std::vector<int> block_dims;
  if (j.contains("block_dims"))
    block_dims = j["block_dims"].get<std::vector<int>>();
  return make_instance(A, b, family, block_dims);
}

Json pair_to_json(const GroundTruth& truth, const FactorPoint& point) {
  return Json{{"n", static_cast<int>(truth.U0.rows())},
              {"r", truth.r},
              {"p", point.p},
              {"U0", mat_to_json(truth.U0)},
              {"V", mat_to_json(point.V)}};
}

PairData pair_from_json(const Json& j) {
  PairData d;
  d.n = field(j, "n").get<int>();
  d.r = field(j, "r").get<int>();
  d.p = field(j, "p").get<int>();
  d.U0 = mat_from_json(field(j, "U0"));
  d.V = mat_from_json(field(j, "V"));
  if (d.U0.rows() != d.n || d.U0.cols() != d.r || d.V.rows() != d.n ||
      d.V.cols() != d.p)
    throw Error("pair matrices do not match the declared n, r, p");
  return d;
}

Json cost_to_json(const CostMatrix& C) {
  return Json{{"C", sym_to_json(C.C.mat)},
              {"provenance", C.provenance},
              {"params", C.params}};
}

CostMatrix cost_from_json(const Json& j) {
  const Json& c = field(j, "C");
  // A result file embeds a whole cost object under "C"; unwrap it.
  if (c.is_object() && !c.contains("tri")) return cost_from_json(c);
  CostMatrix out;
  out.C = SymMatrix::from(sym_from_json(c));
  if (j.contains("provenance"))
    out.provenance = j["provenance"].get<std::string>();
  if (j.contains("params"))
    out.params = j["params"].get<std::map<std::string, double>>();
  return out;
}

Json regularity_to_json(const RegularityReport& r) {
  return Json{{"is_regular", r.is_regular},
              {"sigma_max", r.sigma_max},
              {"tolerance", r.tolerance},
              {"jacobian_singular_values",
               vector_to_json(r.jacobian_singular_values)}};
}

Json feasibility_to_json(const FeasibilityReport& r) {
  return Json{{"feasible", r.feasible},
              {"constraint_residual", r.constraint_residual},
              {"min_eigenvalue", r.min_eigenvalue},
              {"tolerance", r.tol}};
}

Json kkt_to_json(const KktCertificate& c) {
  return Json{{"verdict", verdict_name(c.verdict)},
              {"g1", vector_to_json(c.g1)},
              {"C1", sym_to_json(c.C1.mat)},
              {"min_eig_C1", c.min_eig_C1},
              {"rank_C1", c.rank_C1},
              {"compl_residual", c.compl_residual},
              {"strict", c.strict},
              {"duality_gap", c.duality_gap},
              {"candidate_supplied", c.candidate_supplied},
              {"solve_residual", c.solve_residual},
              {"uniqueness_certified", c.uniqueness_certified}};
}

Json first_order_to_json(const FirstOrderCertificate& c) {
  return Json{{"g2", vector_to_json(c.g2)},
              {"C2", sym_to_json(c.C2.mat)},
              {"residual_C2V", c.residual_C2V},
              {"is_critical", c.is_critical},
              {"tol_used", c.tol_used}};
}

Json second_order_to_json(const SecondOrderReport& r) {
  return Json{{"eigenvalues", vector_to_json(r.eigenvalues)},
              {"zero_dim", r.zero_dim},
              {"is_second_order", r.is_second_order},
              {"is_nondegenerate", r.is_nondegenerate},
              {"expected_kernel_dim", r.expected_kernel_dim},
              {"zero_tol", r.zero_tol},
              {"psd_tol", r.psd_tol},
              {"first_order", first_order_to_json(r.first_order)}};
}

Json min_secant_to_json(const MinSecantReport& r) {
  return Json{{"rank_V", r.rank_V},
              {"joint_rank", r.joint_rank},
              {"tangent_dim", r.tangent_dim},
              {"range_constrained_dim", r.range_constrained_dim},
              {"target_dim", r.target_dim},
              {"property1", r.property1},
              {"property2", r.property2},
              {"property3", r.property3},
              {"verdict", r.verdict},
              {"tolerance", r.tolerance}};
}

Json forge_result_to_json(const ForgeResult& r) {
  const ForgeIntermediates& im = r.intermediates;
  Json intermediates{{"G", mat_to_json(im.G)},
                     {"cond_G", im.cond_G},
                     {"solve_residual", im.solve_residual},
                     {"G1", mat_to_json(im.G1)},
                     {"G2", mat_to_json(im.G2)},
                     {"G3", mat_to_json(im.G3)},
                     {"G4", mat_to_json(im.G4)},
                     {"G5", mat_to_json(im.G5)},
                     {"R1", mat_to_json(im.R1)},
                     {"R2", mat_to_json(im.R2)},
                     {"D1", sym_to_json(im.D1)},
                     {"lambda", im.lambda},
                     {"F1", mat_to_json(im.F1)},
                     {"F2", mat_to_json(im.F2)},
                     {"F3", mat_to_json(im.F3)},
                     {"t", im.t},
                     {"C1_transformed", sym_to_json(im.C1_t)},
                     {"C2_transformed", sym_to_json(im.C2_t)},
                     {"C1_shifted", sym_to_json(im.C1_mod_t)},
                     {"C2_shifted", sym_to_json(im.C2_mod_t)},
                     {"g2_transformed", vector_to_json(im.g2_transformed)}};
  return Json{{"C", cost_to_json(r.C)},
              {"C1", sym_to_json(r.C1)},
              {"g1", vector_to_json(r.g1)},
              {"g2", vector_to_json(r.g2)},
              {"gap", r.gap},
              {"kkt", kkt_to_json(r.kkt)},
              {"first_order", first_order_to_json(r.first_order)},
              {"second_order", second_order_to_json(r.second_order)},
              {"min_secant", min_secant_to_json(r.min_secant)},
              {"intermediates", std::move(intermediates)}};
}

Json descent_trace_to_json(const DescentTrace& t) {
  Json steps = Json::array();
  for (const DescentStep& s : t.steps)
    steps.push_back(Json{{"iter", s.iter},
                         {"objective", s.objective},
                         {"grad_norm", s.grad_norm},
                         {"step", s.step},
                         {"event", std::string(1, s.event)}});
  Json j{{"rng_seed", t.rng_seed},
         {"grad_steps", t.grad_steps},
         {"escape_steps", t.escape_steps},
         {"polish_steps", t.polish_steps},
         {"converged", t.converged},
         {"max_iter_exceeded", t.max_iter_exceeded},
         {"terminal_objective", t.terminal_objective},
         {"terminal_grad_norm", t.terminal_grad_norm},
         {"terminal_V", mat_to_json(t.terminal_V)},
         {"steps", std::move(steps)}};
  if (t.terminal_report)
    j["terminal_report"] = second_order_to_json(*t.terminal_report);
  return j;
}

Json basin_summary_to_json(const BasinSummary& s) {
  Json per_seed = Json::array();
  for (const BasinSeedResult& r : s.per_seed)
    per_seed.push_back(Json{{"seed_index", r.seed_index},
                            {"objective", r.objective},
                            {"reached_global", r.reached_global},
                            {"trapped", r.trapped},
                            {"certified_global", r.certified_global},
                            {"rel_duality_gap", r.rel_duality_gap},
                            {"procrustes_dist", r.procrustes_dist},
                            {"second_order_ok", r.second_order_ok},
                            {"iterations", r.iterations}});
  return Json{{"num_seeds", s.num_seeds},
              {"rng_seed", s.rng_seed},
              {"fraction_global", s.fraction_global},
              {"fraction_trapped", s.fraction_trapped},
              {"fraction_certified", s.fraction_certified},
              {"fraction_other", s.fraction_other},
              {"per_seed", std::move(per_seed)}};
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error("malformed JSON in '" + path + "': " + e.what());
  }
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace bmforge
