#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "darwinism/fragment_stats.hpp"

namespace darwinism {
namespace {

EnvironmentSpec worked() { return {2, 4, 0.0, 1.0, 0.5}; }

// Reference scan: first fragment size whose exact average reaches the target.
std::int64_t scan_fragment_size(const EnvironmentSpec& s, double delta) {
  const double target = (1.0 - delta) * binary_entropy(s.p0);
  for (std::int64_t f = 1; f <= s.n_total(); ++f) {
    if (avg_holevo_exact(s, f) >= target - 1e-12) return f;
  }
  return -1;
}

TEST(PAllBad, Examples) {
  EXPECT_NEAR(p_all_bad(worked(), 2), 0.4, 1e-15);
  EXPECT_NEAR(p_all_bad(worked(), 3), 0.2, 1e-15);
  EXPECT_NEAR(p_all_bad(worked(), 4), 1.0 / 15.0, 1e-15);
  EXPECT_EQ(p_all_bad(worked(), 5), 0.0);
  EXPECT_EQ(p_all_bad({3, 7}, 0), 1.0);
  EXPECT_THROW(p_all_bad(worked(), 7), std::invalid_argument);
}

TEST(PAllBad, ProductFormAtScale) {
  EnvironmentSpec s{1000, 999'999'000};
  double log_product = 0.0;
  for (int i = 0; i < 2000; ++i) {
    log_product += std::log1p(-1000.0 / static_cast<double>(s.n_total() - i));
  }
  EXPECT_NEAR(p_all_bad(s, 2000) / std::exp(log_product), 1.0, 1e-10);
}

TEST(AvgHolevo, WorkedExample) {
  EXPECT_NEAR(avg_holevo_exact(worked(), 2), 0.6, 1e-14);
  EXPECT_EQ(avg_holevo_exact(worked(), 0), 0.0);
}

TEST(AvgHolevo, PerfectClosedForm) {
  for (double p0 : {0.5, 0.3}) {
    EnvironmentSpec s{3, 40, 0.0, 1.0, p0};
    for (std::int64_t f = 0; f <= s.n_total(); ++f) {
      EXPECT_NEAR(avg_holevo_exact(s, f), binary_entropy(p0) * (1.0 - p_all_bad(s, f)), 1e-13);
    }
  }
}

TEST(AvgHolevo, MonotoneAndBounded) {
  for (auto s : {EnvironmentSpec{5, 30, 0.3, 0.9, 0.4}, EnvironmentSpec{50, 50, 0.2, 1.0}}) {
    double previous = 0.0;
    const double h_s = binary_entropy(s.p0);
    for (std::int64_t f = 0; f <= s.n_total(); ++f) {
      const double a = avg_holevo_exact(s, f);
      EXPECT_GE(a, previous - 1e-14);
      EXPECT_LE(a, h_s + 1e-14);
      previous = a;
    }
  }
}

TEST(AvgHolevo, AgreesWithMonteCarloAlongCurve) {
  const EnvironmentSpec s{50, 50, 0.2, 1.0, 0.5};
  const auto exact = exact_curve(s, 1, s.n_total());
  const auto mc = monte_carlo_curve(s, 1, s.n_total(), 100000, 11);
  ASSERT_EQ(exact.size(), mc.size());
  for (std::size_t i = 0; i < exact.size(); ++i) {
    // near saturation the sample spread falls below the exact sum's rounding
    const double se = std::max(*mc[i].stderr_estimate, 1e-12);
    EXPECT_LE(std::abs(mc[i].avg_info - exact[i].avg_info), 4.0 * se)
        << "F=" << exact[i].fragment_size;
  }
}

TEST(FindFragmentSize, WorkedExample) {
  const auto r = find_fragment_size(worked(), DeficitSpec(0.1));
  EXPECT_EQ(r.f_delta, 4);
  EXPECT_GT(r.interpolated, 3.0);
  EXPECT_LE(r.interpolated, 4.0);
}

TEST(FindFragmentSize, NoGoodSpins) {
  EXPECT_THROW(find_fragment_size({0, 8}, DeficitSpec(0.5)), DeficitUnreachable);
}

TEST(FindFragmentSize, MatchesLinearScan) {
  for (auto s : {EnvironmentSpec{4, 96}, EnvironmentSpec{10, 990}, EnvironmentSpec{50, 50, 0.2},
                 EnvironmentSpec{3, 60, 0.4, 0.95, 0.3}}) {
    for (double d : {0.05, 0.1, 0.3}) {
      EXPECT_EQ(find_fragment_size(s, DeficitSpec(d)).f_delta, scan_fragment_size(s, d));
    }
  }
}

TEST(FindFragmentSize, ModeratePoolFallsShortOfStirling) {
  // Exact size for (4, 96) is 44, 20% below the large-pool estimate 55.26.
  const EnvironmentSpec s{4, 96};
  const DeficitSpec d(0.1);
  EXPECT_EQ(find_fragment_size(s, d).f_delta, 44);
  EXPECT_NEAR(stirling_fragment_size(s, d), 55.26, 0.01);
}

TEST(FindFragmentSize, PointerProbability) {
  const DeficitSpec d(0.1);
  // perfect records: the curve is H_S (1 - P_B), so the size ignores p0
  EXPECT_EQ(find_fragment_size({4, 96, 0.0, 1.0, 0.5}, d).f_delta,
            find_fragment_size({4, 96, 0.0, 1.0, 0.2}, d).f_delta);
  // imperfect records: the Holevo shape changes with p0
  EXPECT_NE(find_fragment_size({20, 200, 0.3, 0.9, 0.5}, d).f_delta,
            find_fragment_size({20, 200, 0.3, 0.9, 0.1}, d).f_delta);
}

TEST(FindFragmentSize, TrivialDeficit) {
  EXPECT_EQ(find_fragment_size({0, 8}, DeficitSpec(1.0)).f_delta, 1);
}

TEST(RedundancyAvg, Examples) {
  EXPECT_DOUBLE_EQ(*redundancy_avg(worked(), DeficitSpec(0.1)).r_avg, 1.5);
  EXPECT_DOUBLE_EQ(*redundancy_avg({7, 93, 0.5, 0.9}, DeficitSpec(1.0)).r_avg, 100.0);
  const auto r = redundancy_avg({10, 990}, DeficitSpec(std::exp(-2.0)));
  EXPECT_EQ(*r.f_delta, 181);
  EXPECT_NEAR(*r.r_avg, 1000.0 / 181.0, 1e-12);
  EXPECT_NEAR(*r.r_avg, 5.0, 0.75);
}

TEST(RedundancyMax, PerfectModelGivesGoodCount) {
  for (double d : {0.01, 0.1, 0.5}) {
    EXPECT_DOUBLE_EQ(*redundancy_max({7, 1000}, DeficitSpec(d)).r_max, 7.0);
  }
}

TEST(RedundancyMax, ImperfectRecords) {
  const EnvironmentSpec s{50, 50, 0.2, 1.0, 0.5};
  const DeficitSpec d(0.1);
  // one good spin holds 0.85 bits, two hold 0.97
  EXPECT_LT(holevo_from_overlap(0.2, 0.5), 0.9);
  EXPECT_GE(holevo_from_overlap(0.04, 0.5), 0.9);
  EXPECT_EQ(min_good_spins(s, d), 2);
  const auto r = redundancy_max(s, d);
  EXPECT_DOUBLE_EQ(*r.r_max, 25.0);
  EXPECT_TRUE(r.flags.test(ValidityFlag::kMaxFormulaValid));
  EXPECT_NEAR(std::log(0.1) / std::log(0.2), 1.43, 0.01);
}

TEST(RedundancyMax, TrivialDeficitAndUnreachable) {
  EXPECT_DOUBLE_EQ(*redundancy_max({3, 9, 0.5}, DeficitSpec(1.0)).r_max, 12.0);
  EXPECT_THROW(redundancy_max({0, 9, 0.5, 0.5}, DeficitSpec(0.1)), DeficitUnreachable);
  EXPECT_FALSE(redundancy_max({4, 9, 0.05}, DeficitSpec(0.1)).flags.test(ValidityFlag::kMaxFormulaValid));
}

TEST(MonteCarlo, NoRecordsGiveExactZero) {
  const auto mc = mc_avg_holevo({5, 5, 1.0, 1.0}, 4, 1000, 3);
  EXPECT_EQ(mc.estimate, 0.0);
  EXPECT_EQ(mc.stderr_estimate, 0.0);
}

TEST(MonteCarlo, FullInterceptionGivesPointerEntropy) {
  const EnvironmentSpec s{2, 9, 0.0, 1.0, 0.3};
  const auto mc = mc_avg_holevo(s, s.n_total(), 500, 9);
  EXPECT_EQ(mc.estimate, binary_entropy(0.3));
  EXPECT_EQ(mc.stderr_estimate, 0.0);
}

TEST(MonteCarlo, SeedsWithinFourStandardErrors) {
  const EnvironmentSpec s{3, 9, 0.2, 0.9, 0.5};
  for (std::int64_t f : {2, 5, 8}) {
    const double exact = avg_holevo_exact(s, f);
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto mc = mc_avg_holevo(s, f, 2000, seed);
      if (std::abs(mc.estimate - exact) <= 4.0 * mc.stderr_estimate) ++hits;
    }
    EXPECT_GE(hits, 19) << "F=" << f;
  }
}

TEST(MonteCarlo, DeterministicAndValidated) {
  const EnvironmentSpec s{3, 9, 0.2, 0.9, 0.5};
  const auto a = mc_avg_holevo(s, 5, 1000, 42);
  const auto b = mc_avg_holevo(s, 5, 1000, 42);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.stderr_estimate, b.stderr_estimate);
  EXPECT_THROW(mc_avg_holevo(s, 5, 1, 42), std::invalid_argument);
}

TEST(Stirling, Examples) {
  EXPECT_NEAR(stirling_fragment_size({4, 96}, DeficitSpec(0.1)), 96.0 * std::log(10.0) / 4.0, 1e-12);
  EXPECT_NEAR(stirling_fragment_size({20, 20}, DeficitSpec(1.0 / std::numbers::e)), 1.0, 1e-12);
  EXPECT_THROW(stirling_fragment_size({0, 20}, DeficitSpec(0.1)), std::invalid_argument);
}

TEST(Stirling, RelativeErrorSettlesToConstant) {
  // The large-pool estimate overshoots the exact size by a fixed fraction
  // once F_delta is a finite share of the bad pool: it tends to
  // ln(1/delta) / (n_good (1 - delta^(1/n_good))) - 1 = 0.3153 here.
  const DeficitSpec d(0.1);
  const double limit = std::log(10.0) / (4.0 * (1.0 - std::pow(0.1, 0.25))) - 1.0;
  double previous_gap = INFINITY;
  for (std::int64_t n_bad : {100, 1000, 10000}) {
    const EnvironmentSpec s{4, n_bad};
    const double exact = static_cast<double>(find_fragment_size(s, d).f_delta);
    const double rel = stirling_fragment_size(s, d) / exact - 1.0;
    const double gap = std::abs(rel - limit);
    EXPECT_LT(gap, previous_gap);
    previous_gap = gap;
  }
  EXPECT_LT(previous_gap, 2e-3);
}

TEST(RedundancyAvg, ApproachesAsymptoteWhenGoodSpinsAreMany) {
  // needs n_good >> ln(1/delta) so the fragment stays a small share of the pool
  const DeficitSpec d(0.1);
  for (std::int64_t n_bad : {10000, 100000}) {
    const double ratio = *redundancy_avg({100, n_bad}, d).r_avg * std::log(10.0) / 100.0;
    EXPECT_GE(ratio, 0.8);
    EXPECT_LE(ratio, 1.25);
  }
}

TEST(Curves, ExactCurveShapeAndErrors) {
  const auto c = exact_curve(worked(), 0, 6);
  ASSERT_EQ(c.size(), 7u);
  EXPECT_EQ(c.front().fragment_size, 0);
  EXPECT_NEAR(c[2].avg_info, 0.6, 1e-14);
  EXPECT_NEAR(c.back().avg_info, 1.0, 1e-14);
  EXPECT_THROW(exact_curve(worked(), 3, 2), std::invalid_argument);
  EXPECT_THROW(exact_curve(worked(), 0, 7), std::invalid_argument);
}

TEST(Flags, Names) {
  ValidityFlags f;
  EXPECT_TRUE(f.names().empty());
  f.set(ValidityFlag::kDeficitUnreachable);
  f.set(ValidityFlag::kQcbValid);
  ASSERT_EQ(f.names().size(), 2u);
  EXPECT_EQ(f.names()[0], "qcb_valid");
  f.clear(ValidityFlag::kQcbValid);
  EXPECT_EQ(f.names()[0], "deficit_unreachable");
  EXPECT_EQ(to_string(CurveMethod::kMonteCarlo), "monte-carlo");
}

}  // namespace
}  // namespace darwinism
