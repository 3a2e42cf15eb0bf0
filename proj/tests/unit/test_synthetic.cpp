#include <cmath>

#include "chl/baseline.hpp"
#include "chl/error.hpp"
#include "chl/io.hpp"
#include "chl/synthetic.hpp"
#include "doctest.h"

using namespace chl;

TEST_SUITE("synthetic") {

TEST_CASE("generator picks the intended numerator band") {
  SyntheticConfig cfg;
  cfg.n = 3000;
  cfg.noise = 0.0;
  const SampleTable t = generate_synthetic(cfg);
  for (const Sample& s : t.rows) {
    const double r = max_band_ratio(s.rrs, cfg.coeffs);
    CHECK(r >= kSyntheticRMin - 1e-12);
    CHECK(r <= kSyntheticRMax + 1e-12);
    CHECK(s.rrs[4] == kSyntheticR555);
    const std::size_t want = r >= 0.45 ? 1 : r >= 0.15 ? 2 : 3;
    CHECK(s.rrs[want] == doctest::Approx(kSyntheticR555 * std::pow(10.0, r)));
    CHECK(*s.chl == band_ratio_chl(s.rrs, cfg.coeffs));
  }
}

TEST_CASE("noise-free benchmark: baseline is exact and rank failures are recorded") {
  SyntheticConfig cfg;
  cfg.n = 2000;
  cfg.noise = 0.0;
  const SyntheticBenchmark b = run_synthetic_benchmark(cfg);
  CHECK(b.baseline_mae == 0.0);
  REQUIRE(b.skipped.size() == 1);
  CHECK(b.skipped[0].first == "linear");
  CHECK(b.comparison.report.rows.size() == 7);
}

TEST_CASE("benchmark is deterministic for a seed") {
  SyntheticConfig cfg;
  cfg.n = 1500;
  cfg.seed = 3;
  const SyntheticBenchmark a = run_synthetic_benchmark(cfg);
  const SyntheticBenchmark b = run_synthetic_benchmark(cfg);
  CHECK(write_table(a.split.train) == write_table(b.split.train));
  CHECK(a.comparison.report.to_csv() == b.comparison.report.to_csv());
  CHECK(a.comparison.report.rows.size() == 8);
}

TEST_CASE("generator argument checks") {
  SyntheticConfig cfg;
  cfg.n = 10;
  CHECK_THROWS_AS(generate_synthetic(cfg), ArgumentError);
  cfg.n = 1000;
  cfg.noise = -1.0;
  CHECK_THROWS_AS(generate_synthetic(cfg), ArgumentError);
}

}
