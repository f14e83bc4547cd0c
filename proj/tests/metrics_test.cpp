#include <gtest/gtest.h>

#include <random>

#include "oracles.h"
#include "tickerlab/error.h"
#include "tickerlab/metrics.h"

namespace {

using namespace tickerlab;
using namespace tickerlab::metrics;

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no tickerlab::Error thrown";
    return ErrorCode::kInvalidConfig;
}

const std::vector<double> kPred{1, 2, 3};
const std::vector<double> kActual{1, 2, 5};

TEST(Rmse, Examples) {
    EXPECT_EQ(rmse(kActual, kActual), 0.0);
    EXPECT_NEAR(rmse(kPred, kActual), std::sqrt(4.0 / 3.0), 1e-15);
    EXPECT_NEAR(rmse(kPred, kActual), 1.154700, 1e-6);
    EXPECT_EQ(code_of([] { rmse(std::vector<double>(3), std::vector<double>(4)); }),
              ErrorCode::kLengthMismatch);
    EXPECT_EQ(code_of([] { rmse(std::vector<double>{}, std::vector<double>{}); }), ErrorCode::kEmpty);
}

TEST(Mae, Examples) {
    EXPECT_EQ(mae(kActual, kActual), 0.0);
    EXPECT_NEAR(mae(kPred, kActual), 2.0 / 3.0, 1e-15);
    std::vector<double> shifted = kActual;
    for (double& v : shifted) v -= 2.5;
    EXPECT_NEAR(mae(shifted, kActual), 2.5, 1e-15);
}

TEST(RSquared, Examples) {
    EXPECT_EQ(r_squared(kActual, kActual), 1.0);
    const double mean = (1.0 + 2.0 + 5.0) / 3.0;
    EXPECT_NEAR(r_squared(std::vector<double>(3, mean), kActual), 0.0, 1e-15);
    EXPECT_EQ(r_squared(std::vector<double>{2, 2}, std::vector<double>{1, 3}), 0.0);
    EXPECT_EQ(code_of([] { r_squared(std::vector<double>{1, 2}, std::vector<double>{4, 4}); }),
              ErrorCode::kConstantActuals);
}

TEST(Metrics, MatchBruteForceOracle) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> scale(0.01, 1000.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng() % 200;
        const double s = scale(rng);
        const auto actual = oracle::random_vector(rng, n, -s, s);
        auto pred = actual;
        const double noise = scale(rng) / 1000.0;
        for (double& v : pred) {
            v += std::uniform_real_distribution<double>(-noise * s, noise * s)(rng);
        }
        const auto expected = oracle::brute_force_metrics(pred, actual);
        const auto r = evaluate(pred, actual);
        EXPECT_EQ(r.n, n);
        EXPECT_NEAR(r.rmse, static_cast<double>(expected.rmse), 1e-10 * (1.0 + static_cast<double>(expected.rmse)));
        EXPECT_NEAR(r.mae, static_cast<double>(expected.mae), 1e-10 * (1.0 + static_cast<double>(expected.mae)));
        EXPECT_NEAR(r.r_squared, static_cast<double>(expected.r_squared), 1e-10);
        EXPECT_GE(r.rmse, r.mae);
    }
}

}  // namespace
