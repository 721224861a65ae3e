#include <gtest/gtest.h>

#include "test_support.hpp"
#include "ttj/exec.hpp"
#include "ttj/workloads.hpp"

namespace ttj {
namespace {

// Pinned from the calibration sweep below (small-scale max 3.73).
constexpr double kWitness = 4.0;

const std::vector<TtjOptions> kAllOpts{{false, false}, {true, false}, {false, true}, {true, true}};

double worst_ratio(const Workload& w) {
  const auto p = compile_plan(w.query, std::span<const AtomIndex>(w.order));
  double worst = 0;
  for (const auto& o : kAllOpts) {
    CountSink sink;
    const auto s = run_ttj(p, w.db, sink, o);
    const double bound = static_cast<double>(s.output_count + s.input_count + p.size());
    worst = std::max(worst, static_cast<double>(s.step_entries) / bound);
  }
  return worst;
}

TEST(LinearWitnessTest, CalibrationAtSmallScale) {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    for (double f : {0.0, 0.3, 0.7}) {
      worst = std::max(worst, worst_ratio(gen_random_acyclic({Family::random_acyclic, 1 + seed % 64, seed, f})));
    }
  }
  for (std::size_t n = 1; n <= 8; ++n) {
    worst = std::max(worst, worst_ratio(gen_example1(n)));
    worst = std::max(worst, worst_ratio(gen_star({Family::star, n, n, 0.5})));
  }
  RecordProperty("small_scale_max", std::to_string(worst));
  EXPECT_LE(worst, kWitness);
  EXPECT_GT(worst, kWitness - 1) << "pinned constant is looser than the calibration";
}

TEST(LinearWitnessTest, HoldsAtLargerScale) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    for (double f : {0.0, 0.3, 0.7}) {
      auto w = gen_random_acyclic({Family::random_acyclic, 500 + seed * 17, seed + 100000, f});
      EXPECT_LE(worst_ratio(w), kWitness) << seed << " " << f;
    }
  }
  for (std::size_t n : {1000, 10000}) {
    EXPECT_LE(worst_ratio(gen_example1(n)), kWitness) << n;
    EXPECT_LE(worst_ratio(gen_star({Family::star, n, 7, 0.5})), kWitness) << n;
  }
}

}  // namespace
}  // namespace ttj
