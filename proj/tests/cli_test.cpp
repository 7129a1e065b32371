#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "mbal/cli.hpp"
#include "mbal/dataset.hpp"
#include "test_util.hpp"

using namespace mbal;

TEST_SUITE_BEGIN("cli");

namespace {

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"mbal"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string make_toy_csv(testutil::TempFile& f) {
  Sample s = testutil::random_sample(40, 3, 404);
  write_csv(s, f.path());
  return f.path();
}

}  // namespace

TEST_CASE("weights on a pre-balanced toy file reports uniform weights") {
  testutil::TempFile csv("balanced");
  csv.write(
      "x1,x2,treatment\n"
      "-1,-2,1\n1,2,1\n-3,-4,0\n3,4,0\n");
  testutil::TempFile wout("w");
  testutil::TempFile rout("r");
  int rc = run({"weights", "--input", csv.path(), "--treatment", "treatment",
                "--weights-out", wout.path(), "--report-out", rout.path()});
  CHECK(rc == 0);
  std::string weights = wout.read();
  CHECK(weights.find("id,treatment,weight") == 0);
  CHECK(weights.find("0,1,0.5") != std::string::npos);
  std::string report = rout.read();
  CHECK(report.find("\"schema_version\": 1") != std::string::npos);
  CHECK(report.find("\"at_origin\": true") != std::string::npos);
}

TEST_CASE("malformed csv exits 2 and writes nothing") {
  testutil::TempFile csv("bad");
  csv.write("x1,treatment\n0.5,1\nbroken_row\n");
  testutil::TempFile rout("r2");
  int rc = run({"weights", "--input", csv.path(), "--treatment", "treatment",
                "--report-out", rout.path()});
  CHECK(rc == 2);
  CHECK(rout.read().empty());
}

TEST_CASE("missing input file exits 4") {
  int rc = run({"weights", "--input", "/nonexistent/path.csv", "--treatment",
                "t"});
  CHECK(rc == 4);
}

TEST_CASE("ate with uniform weights equals the group-mean difference") {
  testutil::TempFile csv("ate");
  make_toy_csv(csv);
  testutil::TempFile rout("r3");
  int rc = run({"ate", "--input", csv.path(), "--treatment", "treatment",
                "--outcome", "outcome", "--uniform-weights", "--report-out",
                rout.path()});
  CHECK(rc == 0);
  Sample s = load_csv(csv.path(), "treatment", std::string("outcome"));
  GroupView g1 = group_view(s, 1), g0 = group_view(s, 0);
  double m1 = 0, m0 = 0;
  for (Index i : g1.indices) m1 += (*s.outcome)[i] / double(g1.size());
  for (Index i : g0.indices) m0 += (*s.outcome)[i] / double(g0.size());
  char expect[64];
  std::snprintf(expect, sizeof(expect), "\"point\": %.17g", m1 - m0);
  CHECK(rout.read().find(expect) != std::string::npos);
}

TEST_CASE("ate without an outcome column exits 2") {
  testutil::TempFile csv("noy");
  csv.write("x1,treatment\n0.5,1\n1.5,1\n2.5,0\n3.5,0\n");
  int rc = run({"ate", "--input", csv.path(), "--treatment", "treatment"});
  CHECK(rc == 2);
}

TEST_CASE("tune emits one record per grid point") {
  testutil::TempFile csv("tune");
  make_toy_csv(csv);
  testutil::TempFile tout("t");
  testutil::TempFile cout_("c");
  int rc = run({"tune", "--input", csv.path(), "--treatment", "treatment",
                "--outcome", "outcome", "--trace-out", tout.path(),
                "--curve-out", cout_.path()});
  CHECK(rc == 0);
  std::string curve = cout_.read();
  // Header + 7 treated + 7 control rows.
  CHECK(std::count(curve.begin(), curve.end(), '\n') == 15);
  std::string trace = tout.read();
  CHECK(trace.find("\"chosen_delta\"") != std::string::npos);
}

TEST_CASE("simulate writes a summary and is byte-identical across runs") {
  testutil::TempFile s1("s1"), s2("s2"), r1("r1"), r2("r2");
  int rc1 = run({"simulate", "--scenario", "A", "--reps", "20", "--seed", "7",
                 "--method", "mb", "--delta", "fixed:1e-4", "--threads", "1",
                 "--summary-out", s1.path(), "--reps-out", r1.path()});
  int rc2 = run({"simulate", "--scenario", "A", "--reps", "20", "--seed", "7",
                 "--method", "mb", "--delta", "fixed:1e-4", "--threads", "3",
                 "--summary-out", s2.path(), "--reps-out", r2.path()});
  CHECK(rc1 == 0);
  CHECK(rc2 == 0);
  CHECK(s1.read() == s2.read());
  CHECK(r1.read() == r2.read());
  CHECK(!s1.read().empty());
}

TEST_CASE("simulate rejects unknown scenarios and tiny rep counts") {
  CHECK(run({"simulate", "--scenario", "Z", "--reps", "10"}) == 2);
  CHECK(run({"simulate", "--scenario", "A", "--reps", "1"}) == 2);
}

TEST_CASE("weights via scenario draw exports the sample") {
  testutil::TempFile exp("exp"), rout("r4");
  int rc = run({"weights", "--scenario", "C", "--seed", "3", "--report-out",
                rout.path(), "--export-sample", exp.path()});
  CHECK(rc == 0);
  Sample s = load_csv(exp.path(), "treatment", std::string("outcome"));
  CHECK(s.n() == 200);
  CHECK(s.p() == 10);
}

TEST_CASE("exactly one of --input/--scenario is required") {
  CHECK(run({"weights", "--treatment", "t"}) == 2);
}

TEST_SUITE_END();
