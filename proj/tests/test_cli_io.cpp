// Unit suite for JSON serialization round-trips and the command-line
// interface: schemas, deterministic emission, exit codes, and the
// fixture-reproduction report.
#include "bmforge/families.hpp"
#include "bmforge/forge.hpp"
#include "bmforge/jsonio.hpp"
#include "bmforge/sdp.hpp"
#include "bmforge/types.hpp"

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oracles.hpp"

using namespace bmforge;

namespace {

std::string temp_dir() {
  static int counter = 0;
  std::string dir = "bmforge_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++);
  std::string full = std::string("/tmp/") + dir;
  std::filesystem::create_directories(full);
  return full;
}

std::string cli_path() {
  const char* p = std::getenv("BMFORGE_CLI_PATH");
  return p ? std::string(p) : std::string();
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli_io") {
  TEST_CASE("symmetric triangle layout is row-major with diagonal") {
    Matrix M(3, 3);
    M << 1, 2, 4, 2, 3, 5, 4, 5, 6;
    const Json tri = sym_to_json(M);
    REQUIRE(tri.contains("order"));
    REQUIRE(tri.contains("tri"));
    CHECK(tri["order"] == 3);
    const std::vector<double> expect{1, 2, 3, 4, 5, 6};
    CHECK(tri["tri"].get<std::vector<double>>() == expect);
    CHECK((sym_from_json(tri) - M).norm() == doctest::Approx(0.0));
  }

  TEST_CASE("full matrices round-trip as row arrays") {
    Rng rng(2);
    const Matrix M = rng.gaussian_matrix(4, 3);
    const Json j = mat_to_json(M);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 4);
    CHECK(j[0].size() == 3);
    CHECK((mat_from_json(j) - M).norm() == doctest::Approx(0.0));
  }

  TEST_CASE("instances round-trip losslessly") {
    const SdpInstance inst = orthocut_instance(3, 2);
    const Json j = instance_to_json(inst);
    const SdpInstance back = instance_from_json(j);
    CHECK(back.n == inst.n);
    CHECK(back.m == inst.m);
    CHECK(back.family == inst.family);
    CHECK(back.block_dims == inst.block_dims);
    CHECK((back.b - inst.b).norm() == doctest::Approx(0.0));
    for (int i = 0; i < inst.m; ++i)
      CHECK((back.Ai(i) - inst.Ai(i)).norm() == doctest::Approx(0.0));
  }

  TEST_CASE("pairs and costs round-trip") {
    const SdpInstance inst = maxcut_instance(5);
    const BadPair pair = maxcut_bad_pair(5, 2);
    const Json pj = pair_to_json(pair.truth, pair.point);
    const PairData pd = pair_from_json(pj);
    CHECK(pd.n == 5);
    CHECK(pd.r == 1);
    CHECK(pd.p == 2);
    CHECK((pd.U0 - pair.truth.U0).norm() == doctest::Approx(0.0));
    CHECK((pd.V - pair.point.V).norm() == doctest::Approx(0.0));

    const GroundTruth truth = make_ground_truth(inst, Matrix::Ones(5, 1));
    const ForgeResult res = forge(inst, truth, pair.point.V);
    const Json cj = cost_to_json(res.C);
    const CostMatrix back = cost_from_json(cj);
    CHECK(back.provenance == "forged");
    CHECK((back.C.mat - res.C.C.mat).norm() == doctest::Approx(0.0));
    CHECK(back.params.at("lambda") == doctest::Approx(res.C.params.at("lambda")));

    // A full forge-result file also deserializes as a cost.
    const Json rj = forge_result_to_json(res);
    const CostMatrix from_result = cost_from_json(rj);
    CHECK((from_result.C.mat - res.C.C.mat).norm() == doctest::Approx(0.0));
  }

  TEST_CASE("forge result serialization carries the certificates") {
    const SdpInstance inst = maxcut_instance(5);
    const GroundTruth truth = make_ground_truth(inst, Matrix::Ones(5, 1));
    const ForgeResult res = forge(inst, truth, maxcut_bad_pair(5, 2).point.V);
    const Json j = forge_result_to_json(res);
    CHECK(j["kkt"]["verdict"] == "VALID");
    CHECK(j["kkt"]["rank_C1"] == 4);
    CHECK(j["gap"].get<double>() == doctest::Approx(2.0));
    CHECK(j["second_order"]["is_nondegenerate"] == true);
    CHECK(j["intermediates"]["lambda"].get<double>() ==
          doctest::Approx(8.0 / 7.0));
    CHECK(j["intermediates"]["t"].get<double>() == doctest::Approx(1.0));
    CHECK(j["min_secant"]["verdict"] == true);
  }

  TEST_CASE("file helpers report paths in their errors") {
    const std::string dir = temp_dir();
    try {
      (void)load_json(dir + "/missing.json");
      FAIL("expected a load error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("missing.json") != std::string::npos);
    }
    std::ofstream(dir + "/bad.json") << "{ not json";
    try {
      (void)load_json(dir + "/bad.json");
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
    }
    const Json j = {{"x", 1}};
    save_json(dir + "/out.json", j);
    CHECK(load_json(dir + "/out.json") == j);
    CHECK_THROWS_AS(save_json(dir + "/nodir/out.json", j), Error);
  }

  TEST_CASE("schema violations name the offending field") {
    Json j;
    j["n"] = 3;  // missing everything else
    CHECK_THROWS_AS((void)instance_from_json(j), Error);
    Json p;
    p["n"] = 5;
    p["r"] = 1;
    p["p"] = 2;
    p["U0"] = mat_to_json(Matrix::Ones(5, 1));
    p["V"] = mat_to_json(Matrix::Ones(4, 2));  // wrong row count
    CHECK_THROWS_AS((void)pair_from_json(p), Error);
  }

  TEST_CASE("cli: family emit embeds meta and is byte-deterministic") {
    REQUIRE(!cli_path().empty());
    const std::string dir = temp_dir();
    const std::string inst = dir + "/inst.json";
    const std::string pair = dir + "/pair.json";
    CHECK(run_cli("family maxcut --n 5 --p 2 --emit " + inst + " " + pair) ==
          0);
    const Json ij = load_json(inst);
    CHECK(ij["meta"]["tool"] == "bmforge");
    CHECK(ij["meta"].contains("version"));
    CHECK(ij["meta"].contains("seed"));
    CHECK(ij["meta"]["tolerances"].contains("psd_rel"));
    CHECK(ij["n"] == 5);
    const Json pj = load_json(pair);
    CHECK(pj["p"] == 2);

    // Re-running produces byte-identical files.
    const std::string inst2 = dir + "/inst2.json";
    const std::string pair2 = dir + "/pair2.json";
    CHECK(run_cli("family maxcut --n 5 --p 2 --emit " + inst2 + " " + pair2) ==
          0);
    CHECK(slurp(inst) == slurp(inst2));
    CHECK(slurp(pair) == slurp(pair2));
  }

  TEST_CASE("cli: forge-certify round-trip and exit codes") {
    REQUIRE(!cli_path().empty());
    const std::string dir = temp_dir();
    const std::string inst = dir + "/inst.json";
    const std::string pair = dir + "/pair.json";
    const std::string forged = dir + "/forged.json";
    const std::string cert = dir + "/cert.json";
    REQUIRE(run_cli("family maxcut --n 6 --p 2 --emit " + inst + " " + pair) ==
            0);
    CHECK(run_cli("forge --instance " + inst + " --pair " + pair + " --out " +
                  forged) == 0);
    CHECK(run_cli("certify --instance " + inst + " --cost " + forged +
                  " --pair " + pair + " --out " + cert) == 0);
    const Json cj = load_json(cert);
    CHECK(cj["kkt"]["verdict"] == "VALID");
    CHECK(cj["second_order"]["is_second_order"] == true);
    CHECK(cj["gap"].get<double>() > 0.0);

    // Below the counting threshold the forge refuses with exit code 2.
    const std::string inst4 = dir + "/inst4.json";
    const std::string pair4 = dir + "/pair4.json";
    // n = 4 cannot host a p = 2 pair; build the files by hand.
    save_json(inst4, instance_to_json(maxcut_instance(4)));
    Matrix V(4, 2);
    const double s2 = 1.0 / std::sqrt(2.0);
    V << 1, 0, -1, 0, s2, s2, 1, 0;
    const GroundTruth t4 =
        make_ground_truth(maxcut_instance(4), Matrix::Ones(4, 1));
    save_json(pair4, pair_to_json(t4, make_factor_point(maxcut_instance(4), V)));
    CHECK(run_cli("forge --instance " + inst4 + " --pair " + pair4 +
                  " --out " + dir + "/never.json") == 2);
  }

  TEST_CASE("cli: reproduce subcommand succeeds") {
    REQUIRE(!cli_path().empty());
    const std::string dir = temp_dir();
    CHECK(run_cli("reproduce appendix-c --out " + dir + "/rep.json") == 0);
    const Json j = load_json(dir + "/rep.json");
    CHECK(j["overall"] == true);
    REQUIRE(j["checks"].is_array());
    CHECK(j["checks"].size() == 7);
    for (const Json& row : j["checks"]) CHECK(row["pass"] == true);
  }

  TEST_CASE("cli: usage errors exit with code 2") {
    REQUIRE(!cli_path().empty());
    CHECK(run_cli("family nosuchfamily --n 5") == 2);
    CHECK(run_cli("forge --instance /nonexistent.json --pair /also.json "
                  "--out /tmp/x.json") == 2);
    CHECK(run_cli("") == 2);
  }
}
