#include "armax/copulas.hpp"
#include "armax/random.hpp"
#include "armax/stats.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

using namespace armax;

namespace {

std::vector<CopulaSpec> base_specs() {
    return {CopulaSpec::independence(), CopulaSpec::comonotone(), CopulaSpec::gumbel(1.0),
            CopulaSpec::gumbel(1.5),    CopulaSpec::gumbel(2.0),  CopulaSpec::gumbel(5.0)};
}

}  // namespace

TEST(CopulaEval, Examples) {
    const std::array<double, 2> half{0.5, 0.5};
    EXPECT_NEAR(copula_eval(CopulaSpec::gumbel(1.0), half), 0.25, 1e-15);
    const std::array<double, 2> e{std::exp(-1.0), std::exp(-1.0)};
    EXPECT_NEAR(copula_eval(CopulaSpec::gumbel(2.0), e), std::exp(-std::sqrt(2.0)), 1e-15);
    const std::array<double, 3> u{0.3, 0.8, 0.5};
    EXPECT_DOUBLE_EQ(copula_eval(CopulaSpec::comonotone(), u), 0.3);
}

TEST(CopulaEval, EmptyArgumentRejected) {
    EXPECT_THROW(copula_eval(CopulaSpec::independence(), std::vector<double>{}), DomainError);
}

TEST(CopulaEval, GumbelOneIsIndependence) {
    RandomStream rng(1);
    for (int i = 0; i < 1000; ++i) {
        const std::array<double, 3> u{rng.uniform(), rng.uniform(), rng.uniform()};
        EXPECT_EQ(copula_eval(CopulaSpec::gumbel(1.0), u), copula_eval(CopulaSpec::independence(), u));
    }
}

TEST(CopulaEval, UniformMarginsAndMonotone) {
    RandomStream rng(2);
    for (const auto& c : base_specs()) {
        for (int i = 0; i < 200; ++i) {
            const double v = rng.uniform();
            const std::array<double, 3> u{1.0, v, 1.0};
            EXPECT_NEAR(copula_eval(c, u), v, 1e-12) << kind_name(c);
            const std::array<double, 3> a{rng.uniform(), rng.uniform(), rng.uniform()};
            std::array<double, 3> b = a;
            b[i % 3] = std::min(1.0, b[i % 3] + 0.1 * rng.uniform());
            EXPECT_LE(copula_eval(c, a), copula_eval(c, b) + 1e-15);
        }
    }
}

TEST(CopulaEval, FrechetHoeffdingRandomGrid) {
    RandomStream rng(4);
    for (const auto& c : base_specs()) {
        for (int i = 0; i < 10000; ++i) {
            const std::array<double, 3> u{rng.uniform(), rng.uniform(), rng.uniform()};
            const double v = copula_eval(c, u);
            EXPECT_GE(v, std::max(u[0] + u[1] + u[2] - 2.0, 0.0) - 1e-15);
            EXPECT_LE(v, std::min({u[0], u[1], u[2]}) + 1e-15);
        }
    }
}

TEST(CopulaEval, TinyArgumentsStayFinite) {
    const std::array<double, 2> u{1e-300, 0.5};
    const double v = copula_eval(CopulaSpec::gumbel(3.0), u);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1e-300);
}

TEST(CopulaSample, ComonotoneEqualCoordinates) {
    RandomStream rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto u = copula_sample(CopulaSpec::comonotone(), 4, rng);
        for (double v : u) EXPECT_EQ(v, u[0]);
    }
}

TEST(CopulaSample, IndependenceKendallTau) {
    RandomStream rng(6);
    std::vector<double> a(10000), b(10000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto u = copula_sample(CopulaSpec::independence(), 2, rng);
        a[i] = u[0];
        b[i] = u[1];
    }
    EXPECT_NEAR(stats::kendall_tau(a, b), 0.0, 0.03);
}

TEST(CopulaSample, GumbelEmpiricalCopulaGrid) {
    for (double gamma : {1.5, 2.0, 5.0}) {
        const auto spec = CopulaSpec::gumbel(gamma);
        RandomStream rng(7);
        const std::size_t n = 100000;
        std::vector<std::array<double, 2>> draws(n);
        for (auto& d : draws) {
            const auto u = copula_sample(spec, 2, rng);
            d = {u[0], u[1]};
        }
        double worst = 0.0;
        for (int i = 1; i <= 9; ++i) {
            for (int k = 1; k <= 9; ++k) {
                const std::array<double, 2> g{i / 10.0, k / 10.0};
                std::size_t count = 0;
                for (const auto& d : draws) count += d[0] <= g[0] && d[1] <= g[1];
                worst = std::max(worst, std::abs(static_cast<double>(count) / n - copula_eval(spec, g)));
            }
        }
        EXPECT_LT(worst, 0.02) << "gamma=" << gamma;
    }
}

TEST(CopulaSample, GumbelAtHalfHalf) {
    RandomStream rng(8);
    const auto spec = CopulaSpec::gumbel(2.0);
    std::size_t count = 0;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
        const auto u = copula_sample(spec, 2, rng);
        count += u[0] <= 0.5 && u[1] <= 0.5;
    }
    const std::array<double, 2> half{0.5, 0.5};
    EXPECT_NEAR(static_cast<double>(count) / n, copula_eval(spec, half), 0.02);
}

TEST(CopulaSample, GumbelMarginsUniform) {
    RandomStream rng(9);
    std::vector<double> a(50000);
    for (auto& v : a) v = copula_sample(CopulaSpec::gumbel(3.0), 3, rng)[2];
    const double d = stats::ks_distance(a, [](double x) { return std::clamp(x, 0.0, 1.0); });
    EXPECT_GT(stats::kolmogorov_pvalue(d, 5e4), 0.01);
}

TEST(DerivedCopula, ThetaOneIdentity) {
    const DerivedCopula dc(CopulaSpec::gumbel(2.0), {1.0, 1.0});
    const std::array<double, 2> u{0.5, 0.7};
    EXPECT_NEAR(derived_copula_eval(dc, u), copula_eval(CopulaSpec::gumbel(2.0), u), 1e-15);
}

TEST(DerivedCopula, EqualThetaIdentity) {
    const DerivedCopula dc(CopulaSpec::gumbel(2.0), {0.5, 0.5});
    const std::array<double, 2> u{0.5, 0.5};
    EXPECT_NEAR(derived_copula_eval(dc, u), copula_eval(CopulaSpec::gumbel(2.0), u), 1e-12);
    RandomStream rng(10);
    for (int i = 0; i < 500; ++i) {
        const double t = 0.05 + 0.95 * rng.uniform();
        const DerivedCopula eq(CopulaSpec::gumbel(1.0 + 4.0 * rng.uniform()), {t, t, t});
        const std::array<double, 3> v{rng.uniform(), rng.uniform(), rng.uniform()};
        EXPECT_NEAR(derived_copula_eval(eq, v), copula_eval(eq.base(), v), 1e-12);
    }
}

TEST(DerivedCopula, IndependenceBaseIdentity) {
    const DerivedCopula dc(CopulaSpec::independence(), {0.3, 0.9});
    const std::array<double, 2> u{0.4, 0.6};
    EXPECT_NEAR(derived_copula_eval(dc, u), 0.24, 1e-15);
}

TEST(DerivedCopula, ExtendedPrecisionOracle) {
    const std::array<long double, 2> theta{1.0L, 0.5L};
    const DerivedCopula dc(CopulaSpec::gumbel(2.0), {1.0, 0.5});
    RandomStream rng(11);
    for (int i = 0; i < 200; ++i) {
        const std::array<double, 2> u = i == 0 ? std::array<double, 2>{0.5, 0.5}
                                                : std::array<double, 2>{rng.uniform(), rng.uniform()};
        const std::array<long double, 2> ul{u[0], u[1]};
        const long double expect = oracle::derived_gumbel_ld(2.0L, theta, ul);
        EXPECT_NEAR(derived_copula_eval(dc, u), static_cast<double>(expect), 1e-13);
    }
}

TEST(DerivedCopula, ZeroArgumentAndLengthMismatch) {
    const DerivedCopula dc(CopulaSpec::gumbel(2.0), {0.5, 1.0});
    const std::array<double, 2> u{0.0, 0.5};
    EXPECT_EQ(derived_copula_eval(dc, u), 0.0);
    const std::array<double, 3> w{0.5, 0.5, 0.5};
    EXPECT_THROW(derived_copula_eval(dc, w), DomainError);
    EXPECT_THROW(DerivedCopula(CopulaSpec::gumbel(2.0), {0.0, 0.5}), DomainError);
    EXPECT_THROW(DerivedCopula(CopulaSpec::gumbel(2.0), {1.5}), DomainError);
}

TEST(DerivedCopula, MaxStabilityForAnyTheta) {
    // Max-stability is structural (l* is 1-homogeneous), so it holds even
    // where the ratio rule fails to produce a copula.
    const std::array<double, 3> powers{2.0, 3.0, 7.0};
    RandomStream rng(12);
    for (int i = 0; i < 50; ++i) {
        const DerivedCopula dc(CopulaSpec::gumbel(1.0 + 4.0 * rng.uniform()),
                               {0.05 + 0.95 * rng.uniform(), 0.05 + 0.95 * rng.uniform()});
        EXPECT_TRUE(max_stability_grid(AnyCopula{dc}, powers, 15).passed);
    }
}

TEST(DerivedCopula, ValidInstancesPassGridChecks) {
    for (double gamma : {1.0, 1.5, 2.0, 5.0}) {
        for (const std::vector<double>& theta : {std::vector<double>{1.0, 1.0}, std::vector<double>{0.4, 0.4},
                                                std::vector<double>{0.9, 0.9}}) {
            const AnyCopula c{DerivedCopula(CopulaSpec::gumbel(gamma), theta)};
            EXPECT_TRUE(two_increasing_grid(c, 40).passed);
            EXPECT_TRUE(frechet_hoeffding_grid(c, 40).passed);
        }
    }
    // independence base: the ratio rule returns the product copula for any theta
    const AnyCopula ind{DerivedCopula(CopulaSpec::independence(), {0.2, 0.7})};
    EXPECT_TRUE(two_increasing_grid(ind, 40).passed);
}

TEST(DerivedCopula, UnequalThetaCanBreakValidity) {
    // l*(1, 0.1) < 1 violates the upper Frechet bound C(u,v) <= min(u,v).
    const DerivedCopula dc(CopulaSpec::gumbel(2.0), {0.5, 0.1});
    const std::array<double, 2> x{1.0, 0.1};
    EXPECT_LT(stdf(dc, x), 1.0);
    EXPECT_FALSE(frechet_hoeffding_grid(AnyCopula{dc}, 40).passed);
}

TEST(RectangleMass, RandomRectanglesBaseCopulas) {
    RandomStream rng(13);
    for (const auto& c : base_specs()) {
        const AnyCopula any{c};
        for (int i = 0; i < 2000; ++i) {
            double a1 = rng.uniform(), b1 = rng.uniform(), a2 = rng.uniform(), b2 = rng.uniform();
            if (a1 > b1) std::swap(a1, b1);
            if (a2 > b2) std::swap(a2, b2);
            EXPECT_GE(rectangle_mass(any, a1, b1, a2, b2), -1e-12) << kind_name(c);
        }
    }
}

TEST(ExtremalCoefficient, Examples) {
    EXPECT_NEAR(extremal_coefficient(2.0, 2), std::sqrt(2.0), 1e-15);
    EXPECT_EQ(extremal_coefficient(3.7, 1), 1.0);
    EXPECT_NEAR(extremal_coefficient(1.0, 3), 3.0, 1e-15);
    const std::array<double, 2> ones{1.0, 1.0};
    EXPECT_NEAR(extremal_coefficient_derived(2.0, ones), std::sqrt(2.0), 1e-15);
    const std::array<double, 2> halves{0.5, 0.5};
    EXPECT_NEAR(extremal_coefficient_derived(2.0, halves), std::sqrt(2.0), 1e-12);
    const std::array<double, 2> mixed{1.0, 0.5};
    EXPECT_NEAR(extremal_coefficient_derived(1.0, mixed), 2.0, 1e-15);
}

TEST(ExtremalCoefficient, RangeAndAgreementWithStdf) {
    RandomStream rng(14);
    for (int i = 0; i < 200; ++i) {
        const double gamma = 1.0 + 9.0 * rng.uniform();
        const std::size_t m = 1 + static_cast<std::size_t>(5 * rng.uniform());
        const double e = extremal_coefficient(gamma, m);
        EXPECT_GE(e, 1.0 - 1e-15);
        EXPECT_LE(e, static_cast<double>(m) + 1e-12);
        std::vector<std::size_t> all(m);
        for (std::size_t j = 0; j < m; ++j) all[j] = j;
        EXPECT_NEAR(extremal_coefficient(AnyCopula{CopulaSpec::gumbel(gamma)}, m, all), e, 1e-12);
        const std::vector<double> theta(m, 1.0);
        EXPECT_NEAR(extremal_coefficient_derived(gamma, theta), e, 1e-12);
    }
}

TEST(ExtremalCoefficient, DerivedMatchesGenericStdf) {
    const DerivedCopula dc(CopulaSpec::gumbel(3.0), {0.7, 0.4, 0.9});
    const std::array<std::size_t, 2> subset{0, 2};
    const std::array<double, 2> theta{0.7, 0.9};
    EXPECT_NEAR(extremal_coefficient(AnyCopula{dc}, 3, subset), extremal_coefficient_derived(3.0, theta), 1e-12);
}

TEST(CopulaSpec, RejectsGammaBelowOne) {
    EXPECT_THROW(CopulaSpec::gumbel(0.9), DomainError);
    EXPECT_THROW(CopulaSpec::gumbel(std::nan("")), DomainError);
}
