#include "ifm/verify.hpp"

#include <gtest/gtest.h>

namespace {

using namespace ifm::verify;

TEST(Verify, DefaultSuitePasses) {
  const auto results = run_suite();
  ASSERT_FALSE(results.empty());
  for (const auto& r : results) EXPECT_TRUE(r.passed()) << r.name << " " << r.residual;
  EXPECT_TRUE(all_passed(results));
}

TEST(Verify, FullSubspaceExposesTruncation) {
  VerifyOptions o;
  o.subspace = ifm::fock::Subspace::full;
  EXPECT_FALSE(all_passed(fock_checks(o)));
}

TEST(Verify, SmallerCapStillPasses) {
  VerifyOptions o;
  o.n_max = 3;
  o.random_samples = 50;
  EXPECT_TRUE(all_passed(run_suite(o)));
}

TEST(Verify, AllPassedOnEmptyAndFailing) {
  EXPECT_TRUE(all_passed({}));
  EXPECT_FALSE(all_passed({{"x", 1.0, 0.5}}));
  EXPECT_FALSE(CheckResult({"edge", 0.5, 0.5}).passed());
}

}  // namespace
