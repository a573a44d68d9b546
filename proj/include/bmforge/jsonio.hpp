// JSON (de)serialization for instances, pairs, costs, certificates, reports
// and experiment outputs. Symmetric matrices travel as row-major lower
// triangles (diagonal included); full matrices as row arrays. Serialization
// is byte-deterministic for identical inputs.
#pragma once

#include "bmforge/certify.hpp"
#include "bmforge/forge.hpp"
#include "bmforge/manifold.hpp"
#include "bmforge/minsecant.hpp"
#include "bmforge/optimize.hpp"
#include "bmforge/sdp.hpp"
#include "bmforge/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace bmforge {

using Json = nlohmann::json;

// Run provenance embedded in every emitted file.
struct Meta {
  std::uint64_t seed = kDefaultSeed;
  Tolerances tols;
};

Json meta_to_json(const Meta& meta);

// Lower-triangle (row-major, diagonal included) encoding of a symmetric
// matrix and its inverse.
Json sym_to_json(const Matrix& M);
Matrix sym_from_json(const Json& tri);

// Full matrix as an array of row arrays.
Json mat_to_json(const Matrix& M);
Matrix mat_from_json(const Json& rows);

Json instance_to_json(const SdpInstance& inst);
SdpInstance instance_from_json(const Json& j);

// (U0, V) pair file: {"n", "r", "p", "U0", "V"} with full row-major matrices.
struct PairData {
  int n = 0, r = 0, p = 0;
  Matrix U0;
  Matrix V;
};

Json pair_to_json(const GroundTruth& truth, const FactorPoint& point);
PairData pair_from_json(const Json& j);

Json cost_to_json(const CostMatrix& C);
// Accepts either a cost file ({"C": tri}) or any result file embedding "C".
CostMatrix cost_from_json(const Json& j);

Json regularity_to_json(const RegularityReport& r);
Json feasibility_to_json(const FeasibilityReport& r);
Json kkt_to_json(const KktCertificate& c);
Json first_order_to_json(const FirstOrderCertificate& c);
Json second_order_to_json(const SecondOrderReport& r);
Json min_secant_to_json(const MinSecantReport& r);
Json forge_result_to_json(const ForgeResult& r);
Json descent_trace_to_json(const DescentTrace& t);
Json basin_summary_to_json(const BasinSummary& s);
Json tolerances_to_json(const Tolerances& t);

// File helpers; errors mention the path (and field, on schema violations).
Json load_json(const std::string& path);
void save_json(const std::string& path, const Json& j);

}  // namespace bmforge
