#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "chl/baseline.hpp"
#include "chl/io.hpp"
#include "chl/model_io.hpp"
#include "cli.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chl;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result chlx(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path work_dir() {
  const char* env = std::getenv("CHL_TEST_TMP");
  fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "chl-cli-tests";
  fs::create_directories(dir);
  return dir;
}

std::string p(const std::string& name) { return (work_dir() / name).string(); }

}  // namespace

TEST_CASE("usage errors exit 2, help exits 0") {
  CHECK(chlx({}).code == cli::kExitUsage);
  CHECK(chlx({"frobnicate"}).code == cli::kExitUsage);
  const Result r = chlx({"split", "--bogus", "1"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.rfind("error: UsageError:", 0) == 0);
  CHECK(chlx({"split"}).code == cli::kExitUsage);
  const Result help = chlx({"--help"});
  CHECK(help.code == cli::kExitOk);
  CHECK(help.out.find("bench-synth") != std::string::npos);
}

TEST_CASE("domain errors exit 1 with the error kind") {
  const Result r = chlx({"split", "--in", p("does-not-exist.csv")});
  CHECK(r.code == cli::kExitDomain);
  CHECK(r.err.rfind("error: IoError:", 0) == 0);

  write_file(p("bad.csv"), "a,b\n1,2\n");
  const Result s = chlx({"split", "--in", p("bad.csv")});
  CHECK(s.code == cli::kExitDomain);
  CHECK(s.err.rfind("error: SchemaError:", 0) == 0);
}

TEST_CASE("split writes both tables and a summary") {
  write_file(p("table.csv"), write_table(test::random_table(1000, 1)));
  const Result r = chlx({"split", "--in", p("table.csv"), "--train-frac", "0.05", "--test-frac",
                         "0.01", "--seed", "42"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("status=ok command=split n_train=50 n_test=10 seed=42") == 0);
  CHECK(read_table(read_file(p("table.train.csv"))).size() == 50);
  CHECK(read_table(read_file(p("table.test.csv"))).size() == 10);
  CHECK(chlx({"split", "--in", p("table.csv"), "--train-frac", "0.9", "--test-frac", "0.2"}).code == 1);

  write_file(p("day1.csv"), write_table(test::random_table(600, 11)));
  write_file(p("day2.csv"), write_table(test::random_table(400, 12)));
  const Result pooled = chlx({"split", "--in", p("day1.csv"), p("day2.csv"), "--train-frac", "0.05",
                              "--test-frac", "0.01"});
  REQUIRE(pooled.code == 0);
  CHECK(pooled.out.find("n_train=50 n_test=10") != std::string::npos);
  CHECK(read_table(read_file(p("day1.train.csv"))).size() == 50);
}

TEST_CASE("compare writes an eight-row report") {
  write_file(p("train.csv"), write_table(test::random_table(200, 2)));
  write_file(p("test.csv"), write_table(test::random_table(50, 3)));
  const Result r = chlx({"compare", "--train", p("train.csv"), "--test", p("test.csv"), "--specs",
                         "all-defaults", "--out", p("report.csv"), "--text-out", p("report.txt"),
                         "--predictions-out", p("pred.csv")});
  REQUIRE(r.code == 0);
  const NumericCsv pred = read_numeric_csv(read_file(p("pred.csv")));
  CHECK(pred.header.size() == 9);
  CHECK(pred.rows.size() == 50);
  const std::string report = read_file(p("report.csv"));
  CHECK(report.rfind("model,mae,accuracy,n_test\nlinear,", 0) == 0);
  CHECK(std::count(report.begin(), report.end(), '\n') == 9);

  const Result subset = chlx({"compare", "--train", p("train.csv"), "--test", p("test.csv"),
                              "--specs", "tree,knn", "--out", p("report2.csv")});
  REQUIRE(subset.code == 0);
  CHECK(subset.out.find("models=2") != std::string::npos);
  CHECK(chlx({"compare", "--train", p("train.csv"), "--test", p("test.csv"), "--specs", "gbm"}).code == 1);
}

TEST_CASE("train, then predict-grid, diff-grid, composite, render") {
  write_file(p("train2.csv"), write_table(test::random_table(150, 4)));
  const Result t = chlx({"train", "--in", p("train2.csv"), "--model", "forest", "--n-estimators", "20",
                         "--max-depth", "8", "--out", p("forest.json")});
  REQUIRE(t.code == 0);
  CHECK(t.out.find("oob_mae=") != std::string::npos);
  const FittedModel m = load_model(read_file(p("forest.json")));
  CHECK(m.spec.ensemble.n_estimators == 20);
  CHECK(m.spec.tree.max_depth == 8);

  GridStack stack = test::random_stack(4, 5, 5);
  write_file(p("stack.ocg"), write_grid(stack));
  REQUIRE(chlx({"predict-grid", "--model", p("forest.json"), "--in", p("stack.ocg"), "--out", p("pred.ocg")}).code == 0);
  const GridStack pred = read_grid(read_file(p("pred.ocg")));
  REQUIRE(pred.chl.has_value());
  CHECK(pred.chl->values[7] == test::f32(predict_grid(m, stack).values[7]));

  REQUIRE(chlx({"diff-grid", "--pred", p("pred.ocg"), "--truth", p("pred.ocg"), "--out", p("diff.ocg")}).code == 0);
  const GridStack diff = read_grid(read_file(p("diff.ocg")));
  for (double v : diff.chl->values) CHECK(v == 0.0);

  const Result c = chlx({"composite", "--in", p("pred.ocg"), p("pred.ocg"), "--out", p("comp.ocg")});
  REQUIRE(c.code == 0);
  CHECK(c.out.find("max_count=2") != std::string::npos);
  CHECK(read_grid(read_file(p("comp.ocg"))).chl == pred.chl);

  REQUIRE(chlx({"render", "--in", p("pred.ocg"), "--out", p("pred.ppm")}).code == 0);
  CHECK(read_file(p("pred.ppm")).rfind("P6\n5 4\n255\n", 0) == 0);
  CHECK(chlx({"render", "--in", p("pred.ocg"), "--out", p("x.ppm"), "--band", "443"}).code == 1);
}

TEST_CASE("train accepts a spec file and rejects bad flags") {
  write_file(p("train3.csv"), write_table(test::random_table(60, 6)));
  write_file(p("spec.json"), R"({"model_type":"knn","k":3,"aggregation":"median"})");
  REQUIRE(chlx({"train", "--in", p("train3.csv"), "--spec-file", p("spec.json"), "--out", p("knn.json")}).code == 0);
  const FittedModel m = load_model(read_file(p("knn.json")));
  CHECK(m.spec.knn.k == 3);
  CHECK(m.spec.knn.aggregation == Aggregation::median);
  CHECK(chlx({"train", "--in", p("train3.csv"), "--model", "svr", "--gamma", "abc", "--out", p("x.json")}).code == 1);
  CHECK(chlx({"train", "--in", p("train3.csv"), "--out", p("x.json")}).code == 1);
}

TEST_CASE("oc4 writes the baseline grid") {
  GridStack stack = test::random_stack(3, 3, 7);
  write_file(p("oc4in.ocg"), write_grid(stack));
  const Result r = chlx({"oc4", "--in", p("oc4in.ocg"), "--coeffs", "paper", "--out", p("oc4.ocg")});
  REQUIRE(r.code == 0);
  const GridStack out = read_grid(read_file(p("oc4.ocg")));
  CHECK(out.chl->values[4] == test::f32(baseline_grid(stack, BandRatioCoeffs::paper()).values[4]));
  write_file(p("coeffs.json"), BandRatioCoeffs::canonical().to_json());
  CHECK(chlx({"oc4", "--in", p("oc4in.ocg"), "--coeffs", p("coeffs.json"), "--out", p("oc4b.ocg")}).code == 0);
}

TEST_CASE("ingest converts pixel CSV to a grid and back to a table") {
  std::string csv = "row,col,rrs_412,rrs_443,rrs_490,rrs_510,rrs_555,rrs_670,chl_a\n";
  csv += "0,0,0.01,0.02,0.01,0.01,0.01,0.002,1.5\n";
  csv += "1,1,0.01,0.01,0.01,0.01,0.01,0.002,\n";
  write_file(p("pixels.csv"), csv);
  const Result g = chlx({"ingest", "--in", p("pixels.csv"), "--out", p("pixels.ocg"), "--rows", "2",
                         "--cols", "2", "--lat-north", "30", "--lat-south", "6", "--lon-west", "-34",
                         "--lon-east", "-8", "--time-start", "2019-01-01"});
  REQUIRE(g.code == 0);
  const GridStack stack = read_grid(read_file(p("pixels.ocg")));
  CHECK(stack.time_start == "2019-01-01");
  CHECK(stack.chl->at(0, 0) == 1.5);

  const Result t = chlx({"ingest", "--in", p("pixels.ocg"), "--out", p("pixels-table.csv"),
                         "--index-out", p("pixels-index.csv")});
  REQUIRE(t.code == 0);
  const SampleTable table = read_table(read_file(p("pixels-table.csv")));
  CHECK(table.size() == 1);
  CHECK(read_file(p("pixels-index.csv")) == "row,col\n0,0\n");

  CHECK(chlx({"ingest", "--in", p("pixels.csv"), "--out", p("x.ocg"), "--rows", "1", "--cols", "1",
              "--lat-north", "30", "--lat-south", "6", "--lon-west", "-34", "--lon-east", "-8"}).code == 1);
}

TEST_CASE("kde writes a density curve") {
  write_file(p("kde-in.csv"), write_table(test::random_table(100, 8)));
  const Result r = chlx({"kde", "--in", p("kde-in.csv"), "--out", p("kde.csv"), "--points", "64"});
  REQUIRE(r.code == 0);
  const NumericCsv c = read_numeric_csv(read_file(p("kde.csv")));
  CHECK(c.rows.size() == 64);
  CHECK(c.header == std::vector<std::string>{"x", "density"});
}

TEST_CASE("bench-synth is byte-for-byte reproducible") {
  const std::vector<std::string> base{"bench-synth", "--n", "1500", "--noise", "0.02", "--seed", "5"};
  auto with_dir = [&](const std::string& d) {
    auto a = base;
    a.insert(a.end(), {"--out-dir", p(d)});
    return a;
  };
  const Result a = chlx(with_dir("bench-a"));
  const Result b = chlx(with_dir("bench-b"));
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  for (const char* f : {"train.csv", "test.csv", "report.csv", "report.txt"}) {
    CHECK(read_file(p("bench-a") + "/" + f) == read_file(p("bench-b") + "/" + f));
  }
  CHECK(read_file(p("bench-a") + "/report.csv").find("\noc4_baseline,") != std::string::npos);
}
