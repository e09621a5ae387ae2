#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "convexkit/cli.hpp"
#include "support.hpp"

using namespace cktest;
namespace fs = std::filesystem;
using ck::io::json;

namespace {

const fs::path kData = CONVEXKIT_DATA_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "convexkit");
  std::ostringstream out, err;
  const int code = ck::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempFile {
 public:
  explicit TempFile(const std::string& content, const std::string& name = "input.json") {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("convexkit_cli_test_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter++) + "_" + name);
    std::ofstream(path_, std::ios::binary) << content;
  }
  ~TempFile() { fs::remove(path_); }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

std::string data(const std::string& name) { return (kData / name).string(); }

const json* find_check(const json& rep, const std::string& name) {
  for (const auto& c : rep["checks"])
    if (c["name"] == name) return &c;
  return nullptr;
}

}  // namespace

TEST(Cli, MixedVolumesOnOrthogonalSegments) {
  const auto r = cli({"mixed-volumes", data("orthogonal_segments.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = r.report();
  EXPECT_EQ(rep["command"], "mixed-volumes");
  EXPECT_EQ(rep["exit_status"], 0);
  EXPECT_EQ(rep["inputs_digest"].get<std::string>().rfind("sha256:", 0), 0u);
  bool found = false;
  for (const auto& e : rep["results"]["table"]["entries"])
    if (e["I"] == json({1, 1})) {
      found = true;
      EXPECT_EQ(e["value"], "1/2");
    }
  EXPECT_TRUE(found);
}

TEST(Cli, BmiOnUnitSquaresIsEquality) {
  const auto r = cli({"bmi", data("unit_squares.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = r.report();
  const json* root = find_check(rep, "brunn-minkowski root form");
  ASSERT_NE(root, nullptr);
  EXPECT_EQ((*root)["status"], "PASS");
  EXPECT_EQ((*root)["margin"], "0");
  EXPECT_EQ((*find_check(rep, "homothety equality"))["status"], "PASS");
}

TEST(Cli, AfCheckOnSquareSegmentTable) {
  const auto r = cli({"af-check", data("square_segment_table.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = r.report();
  std::size_t midpoints = 0;
  for (const auto& c : rep["checks"]) {
    EXPECT_EQ(c["status"], "PASS") << c.dump();
    if (c["name"].get<std::string>().rfind("midpoint", 0) == 0) ++midpoints;
  }
  EXPECT_EQ(midpoints, 1u);
}

TEST(Cli, EverySampleRunsWithExpectedStatus) {
  const std::vector<std::tuple<std::string, std::string, int>> cases{
      {"mixed-volumes", "square_triangle_bodies.json", 0}, {"af-check", "square_triangle_bodies.json", 0},
      {"logconcavity", "square_triangle_profile.json", 0}, {"momentum-image", "square_momentum_image.json", 0},
      {"stratify", "square_strata.json", 0},               {"reach-target", "square_targets.json", 1},
      {"conjugate", "conjugate_registry.json", 0},         {"moment-solve", "bernoulli_measure.json", 1},
      {"integrate-form", "lse_square.json", 0},            {"bridge-check", "square_triangle_bodies.json", 0},
  };
  for (const auto& [cmd, file, code] : cases) {
    const auto r = cli({cmd, data(file)});
    EXPECT_EQ(r.code, code) << cmd << " " << file << "\n" << r.out << r.err;
    EXPECT_EQ(r.report()["exit_status"], code);
  }
}

TEST(Cli, BoundaryTargetReportsErrorKind) {
  const auto r = cli({"moment-solve", data("bernoulli_measure.json")});
  ASSERT_EQ(r.code, 1);
  bool saw = false;
  const json rep = r.report();
  for (const auto& c : rep["checks"])
    if (c["status"] == "FAIL") {
      saw = true;
      EXPECT_EQ(c["details"]["error"], "TargetOnBoundaryOrOutside") << c.dump();
    }
  EXPECT_TRUE(saw);
}

TEST(Cli, SameSeedGivesIdenticalBytes) {
  for (const std::string cmd : {"momentum-image", "conjugate"}) {
    const std::string file = cmd == "conjugate" ? "conjugate_registry.json" : "square_momentum_image.json";
    const auto a = cli({cmd, data(file), "--seed", "7"});
    const auto b = cli({cmd, data(file), "--seed", "7"});
    EXPECT_EQ(a.out, b.out);
  }
  // Conjugate probes are drawn from the seed and reported individually.
  EXPECT_NE(cli({"conjugate", data("conjugate_registry.json"), "--seed", "7"}).out,
            cli({"conjugate", data("conjugate_registry.json"), "--seed", "8"}).out);
}

TEST(Cli, WorkersDoNotChangeTheReport) {
  const auto a = cli({"mixed-volumes", data("square_triangle_bodies.json"), "--workers", "1"});
  const auto b = cli({"mixed-volumes", data("square_triangle_bodies.json"), "--workers", "3"});
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, TolOverrideCanFailACheck) {
  // Quadrature of the square potential is accurate to far better than 1e-2 but not to 1e-15.
  const auto loose = cli({"integrate-form", data("lse_square.json")});
  EXPECT_EQ(loose.code, 0) << loose.out;
  const auto tight = cli({"integrate-form", data("lse_square.json"), "--tol", "1e-15"});
  EXPECT_EQ(tight.code, 1);
}

TEST(Cli, CsvOutputAndSidecar) {
  const auto r = cli({"mixed-volumes", data("orthogonal_segments.json"), "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "i1,i2,value");
  EXPECT_NE(r.out.find("1,1,1/2"), std::string::npos);

  TempFile side("", "table.csv");
  const auto j = cli({"mixed-volumes", data("orthogonal_segments.json"), "--csv", side.str()});
  ASSERT_EQ(j.code, 0);
  std::ifstream in(side.str());
  const std::string content((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(content, r.out);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"no-such-command", data("unit_squares.json")}).code, 2);
  EXPECT_EQ(cli({"bmi", (kData / "missing.json").string()}).code, 2);
  EXPECT_EQ(cli({"bmi", data("unit_squares.json"), "--format", "xml"}).code, 2);
  EXPECT_EQ(cli({"bmi", data("unit_squares.json"), "--tol", "-1"}).code, 2);
  EXPECT_EQ(cli({"bmi", data("unit_squares.json"), "--seed", "abc"}).code, 2);
}

TEST(Cli, ParseErrorReportsLineAndColumn) {
  TempFile f("{\n  \"bodies\": [\n    {\"dim\": 2,, \"vertices\": []}\n  ]\n}\n");
  const auto r = cli({"bmi", f.str()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(f.str() + ":3:15:"), std::string::npos) << r.err;
}

TEST(Cli, SchemaErrorPointsAtTheOffendingValue) {
  TempFile f("{\n  \"bodies\": [\n    {\"dim\": 2, \"vertices\": [[\"0\", \"0\"]]},\n"
             "    {\"dim\": 2, \"vertices\": [[\"0\", \"x\"]]}\n  ]\n}\n");
  const auto r = cli({"bmi", f.str()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":4:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("/bodies/1/vertices/0/1"), std::string::npos) << r.err;

  TempFile unknown("{\"bodies\": [], \"extra\": 1}");
  const auto u = cli({"mixed-volumes", unknown.str()});
  EXPECT_EQ(u.code, 2);
  EXPECT_NE(u.err.find("extra"), std::string::npos) << u.err;
}

TEST(Cli, ResourceGuardExitsThree) {
  json bodies = json::array();
  for (int j = 0; j < 7; ++j) bodies.push_back({{"dim", 6}, {"vertices", {std::vector<std::string>(6, "0")}}});
  TempFile f(json{{"bodies", bodies}}.dump());
  EXPECT_EQ(cli({"mixed-volumes", f.str()}).code, 3);

  std::vector<std::vector<long long>> w;
  for (int j = 0; j < 13; ++j) w.push_back({j});
  TempFile g(json{{"weights", {{"rank", 1}, {"weights", w}}}}.dump());
  EXPECT_EQ(cli({"stratify", g.str()}).code, 3);
}

TEST(Cli, DomainErrorBecomesFailCheck) {
  TempFile f(R"({"potential": {"family": "pdquad", "A": [["1"]], "b": ["0"]}})");
  const auto r = cli({"integrate-form", f.str()});
  EXPECT_EQ(r.code, 1);
  const json rep = r.report();
  EXPECT_EQ(rep["checks"].back()["status"], "FAIL");
  EXPECT_EQ(rep["checks"].back()["details"]["error"], "UnboundedGradientImage");
}

TEST(Io, PolytopeRoundTrip) {
  Rng rng(81);
  for (int i = 0; i < 20; ++i) {
    const Polytope P = ck::hull(random_points(rng, 6, 1 + i % 3), 1 + i % 3);
    const json j = ck::io::write_polytope(P);
    EXPECT_EQ(ck::io::read_polytope(ck::io::Node(json::parse(j.dump()))), P);
  }
}

TEST(Io, MeasureRoundTrip) {
  const ck::AtomicMeasure mu(2, {{rv({Rational(1, 3), 0}), 0.1}, {rv({2, -1}), 2.0 / 3.0}});
  const json j = ck::io::write_measure(mu);
  const auto back = ck::io::read_measure(ck::io::Node(json::parse(j.dump())));
  ASSERT_EQ(back.size(), mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    EXPECT_EQ(back.atoms()[i].alpha, mu.atoms()[i].alpha);
    EXPECT_EQ(back.atoms()[i].weight, mu.atoms()[i].weight);
  }
  EXPECT_EQ(ck::io::write_measure(back), j);
}

TEST(Io, PotentialRoundTrip) {
  const auto f = ck::ConvexPotential::combination(
      {0.25, 1.0 / 3.0},
      {ck::ConvexPotential::quadratic({rv({2, 1}), rv({1, 2})}, rv({Rational(1, 7), -1})),
       ck::ConvexPotential::log_sum_exp(ck::AtomicMeasure(2, {{rv({0, 0}), 1.0}, {rv({1, 2}), 0.3}}), 1.5)});
  const json j = ck::io::write_potential(f);
  const auto back = ck::io::read_potential(ck::io::Node(json::parse(j.dump())));
  EXPECT_EQ(ck::io::write_potential(back), j);
  const Vec x = to_vec({0.2, -0.7});
  EXPECT_EQ(back.value(x), f.value(x));
}

TEST(Io, WeightsVectorTableRoundTrip) {
  const ck::TorusWeightSystem W(2, {{0, 1}, {-2, 3}, {0, 1}});
  EXPECT_EQ(ck::io::read_weights(ck::io::Node(ck::io::write_weights(W))).weights(), W.weights());

  const ck::ProjectiveVector v({Complex(0.1, -2.5), Complex(0, 0), Complex(1.0 / 3.0, 1e-17)});
  const auto vb = ck::io::read_vector(ck::io::Node(json::parse(ck::io::write_vector(v).dump())));
  EXPECT_EQ(vb.amplitudes(), v.amplitudes());

  const auto t = ck::mixed_volumes({box(2), standard_simplex(2), segment(2, 1)});
  EXPECT_EQ(ck::io::read_table(ck::io::Node(json::parse(ck::io::write_table(t).dump()))), t);
}

TEST(Report, StatusAndDigest) {
  ck::VerificationReport rep("demo", ck::inputs_digest(json{{"a", 1}}));
  rep.add_margin("ok", Rational(1, 3));
  rep.add_vacuous("nothing to check", json::object());
  EXPECT_EQ(rep.exit_status(), 0);
  rep.add_margin("bad", Rational(-1, 8));
  EXPECT_EQ(rep.exit_status(), 1);
  const json j = rep.to_json();
  EXPECT_EQ(j["checks"][1]["status"], "VACUOUS");
  EXPECT_EQ(j["checks"][2]["margin"], "-0.125");
  EXPECT_EQ(j["checks"][2]["details"]["margin_exact"], "-1/8");
  // SHA-256 of the empty string.
  EXPECT_EQ(ck::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
