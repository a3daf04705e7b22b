#include "armax/margins.hpp"
#include "armax/random.hpp"
#include "armax/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace armax;

namespace {

/// Hands out a fixed sequence of uniforms.
struct FixedUniforms {
    std::vector<double> values;
    std::size_t next = 0;
    double uniform() { return values.at(next++); }
};

std::vector<MarginSpec> all_specs() {
    return {MarginSpec::frechet(1.0),     MarginSpec::frechet(2.5),       MarginSpec::exponential(1.0),
            MarginSpec::exponential(3.0), MarginSpec::uniform01(),        MarginSpec::gpd(0.5, 2.0),
            MarginSpec::gpd(0.0, 1.0),    MarginSpec::gpd(-0.25, 1.0),    MarginSpec::weibull_min(0.7),
            MarginSpec::weibull_min(2.0)};
}

}  // namespace

TEST(MarginCdf, FrechetAtOne) { EXPECT_NEAR(margin_cdf(MarginSpec::frechet(1.0), 1.0), std::exp(-1.0), 1e-15); }

TEST(MarginCdf, UniformIdentity) { EXPECT_DOUBLE_EQ(margin_cdf(MarginSpec::uniform01(), 0.5), 0.5); }

TEST(MarginCdf, ExponentialMedian) {
    EXPECT_NEAR(margin_cdf(MarginSpec::exponential(1.0), std::numbers::ln2), 0.5, 1e-15);
}

TEST(MarginCdf, EndpointsAndMonotone) {
    for (const auto& m : all_specs()) {
        const double end = right_endpoint(m);
        EXPECT_EQ(margin_cdf(m, -1.0), 0.0) << kind_name(m);
        if (std::isfinite(end)) {
            EXPECT_EQ(margin_cdf(m, end + 1.0), 1.0) << kind_name(m);
        }
        double prev = 0.0;
        for (double x = -2.0; x < 50.0; x += 0.01) {
            const double f = margin_cdf(m, x);
            ASSERT_GE(f, prev) << kind_name(m) << " x=" << x;
            ASSERT_LE(f, 1.0);
            prev = f;
        }
    }
}

TEST(MarginCdf, NegLogAgreesWithCdf) {
    for (const auto& m : all_specs()) {
        for (double p = 0.01; p < 0.99; p += 0.07) {
            const double x = margin_quantile(m, p);
            EXPECT_NEAR(std::exp(-margin_neg_log_cdf(m, x)), margin_cdf(m, x), 1e-13) << kind_name(m);
        }
    }
}

TEST(MarginQuantile, Examples) {
    EXPECT_NEAR(margin_quantile(MarginSpec::frechet(1.0), std::exp(-1.0)), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(margin_quantile(MarginSpec::uniform01(), 0.25), 0.25);
    EXPECT_NEAR(margin_quantile(MarginSpec::exponential(1.0), 0.5), std::numbers::ln2, 1e-15);
}

TEST(MarginQuantile, RejectsOutsideOpenUnit) {
    const auto m = MarginSpec::frechet(1.0);
    EXPECT_THROW(margin_quantile(m, 0.0), DomainError);
    EXPECT_THROW(margin_quantile(m, 1.0), DomainError);
    EXPECT_THROW(margin_quantile(m, -0.1), DomainError);
    EXPECT_THROW(margin_quantile(m, std::nan("")), DomainError);
}

TEST(MarginQuantile, RoundTripGrid) {
    for (const auto& m : all_specs()) {
        for (int i = 0; i < 1000; ++i) {
            const double p = 0.001 + 0.998 * i / 999.0;
            ASSERT_NEAR(margin_cdf(m, margin_quantile(m, p)), p, 1e-12) << kind_name(m) << " p=" << p;
        }
    }
}

TEST(MarginSample, InverseTransform) {
    for (const auto& m : all_specs()) {
        FixedUniforms u{{0.3}};
        EXPECT_EQ(margin_sample(m, u), margin_quantile(m, 0.3));
    }
    FixedUniforms u{{std::exp(-1.0)}};
    EXPECT_NEAR(margin_sample(MarginSpec::frechet(1.0), u), 1.0, 1e-15);
}

TEST(MarginSample, UniformMean) {
    RandomStream rng(5);
    double s = 0.0;
    for (int i = 0; i < 100000; ++i) s += margin_sample(MarginSpec::uniform01(), rng);
    EXPECT_NEAR(s / 1e5, 0.5, 0.01);
}

TEST(MarginSample, KolmogorovSmirnov) {
    for (const auto& m : all_specs()) {
        RandomStream rng(17);
        std::vector<double> x(100000);
        for (auto& v : x) v = margin_sample(m, rng);
        const double d = stats::ks_distance(x, [&](double v) { return margin_cdf(m, v); });
        EXPECT_GT(stats::kolmogorov_pvalue(d, 1e5), 0.01) << kind_name(m) << " D=" << d;
    }
}

TEST(AttractionDomain, Classification) {
    EXPECT_EQ(attraction_domain(MarginSpec::frechet(2.0)), AttractionDomain::frechet(2.0));
    EXPECT_EQ(attraction_domain(MarginSpec::exponential(1.0)).type, Attractor::gumbel);
    EXPECT_EQ(attraction_domain(MarginSpec::uniform01()).type, Attractor::weibull);
    EXPECT_EQ(attraction_domain(MarginSpec::gpd(0.5, 1.0)), AttractionDomain::frechet(2.0));
    EXPECT_EQ(attraction_domain(MarginSpec::gpd(0.0, 1.0)).type, Attractor::gumbel);
    EXPECT_EQ(attraction_domain(MarginSpec::gpd(-0.5, 1.0)).type, Attractor::weibull);
    EXPECT_EQ(attraction_domain(MarginSpec::weibull_min(2.0)).type, Attractor::gumbel);
}

TEST(AttractionDomain, FrechetAlphaExact) {
    for (double a : {0.3, 1.0, 1.7, 2.0, 10.0}) EXPECT_EQ(attraction_domain(MarginSpec::frechet(a)).alpha, a);
}

TEST(AttractionDomain, ExponentialBlockMaximaAreGumbel) {
    // Centred block maxima of Exp(1) follow exp(-exp(-x)).
    RandomStream rng(3);
    const auto m = MarginSpec::exponential(1.0);
    std::vector<double> maxima(4000);
    for (auto& v : maxima) {
        double best = 0.0;
        for (int i = 0; i < 1000; ++i) best = std::max(best, margin_sample(m, rng));
        v = best - std::log(1000.0);
    }
    const double d = stats::ks_distance(maxima, [](double x) { return std::exp(-std::exp(-x)); });
    EXPECT_LT(d, 0.03);
}

TEST(MarginSpec, RejectsBadParameters) {
    EXPECT_THROW(MarginSpec::frechet(0.0), DomainError);
    EXPECT_THROW(MarginSpec::frechet(-1.0), DomainError);
    EXPECT_THROW(MarginSpec::exponential(0.0), DomainError);
    EXPECT_THROW(MarginSpec::gpd(0.1, 0.0), DomainError);
    EXPECT_THROW(MarginSpec::weibull_min(-2.0), DomainError);
    EXPECT_THROW(MarginSpec::frechet(std::nan("")), DomainError);
}

TEST(RightEndpoint, Values) {
    EXPECT_TRUE(std::isinf(right_endpoint(MarginSpec::frechet(1.0))));
    EXPECT_TRUE(std::isinf(right_endpoint(MarginSpec::exponential(1.0))));
    EXPECT_TRUE(std::isinf(right_endpoint(MarginSpec::gpd(0.0, 1.0))));
    EXPECT_EQ(right_endpoint(MarginSpec::uniform01()), 1.0);
    EXPECT_EQ(right_endpoint(MarginSpec::gpd(-0.5, 2.0)), 4.0);
    EXPECT_EQ(right_endpoint(MarginSpec::gpd(-0.5, 2.0, -5.0)), -1.0);
}

TEST(Gpd, ExponentialBandMatchesExponential) {
    const auto g = MarginSpec::gpd(1e-13, 1.0);
    const auto e = MarginSpec::exponential(1.0);
    for (double x : {0.1, 1.0, 5.0}) EXPECT_NEAR(margin_cdf(g, x), margin_cdf(e, x), 1e-15);
}
