#include "armax/extremal.hpp"
#include "armax/process.hpp"
#include "armax/random.hpp"
#include "armax/stats.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

using namespace armax;

namespace {

const AttractionDomain kFrechet1 = AttractionDomain::frechet(1.0);

}  // namespace

TEST(MarginalExtremalIndex, Examples) {
    EXPECT_NEAR(marginal_extremal_index(0.8, kFrechet1), 0.2, 1e-15);
    EXPECT_EQ(marginal_extremal_index(0.8, AttractionDomain::gumbel()), 1.0);
    EXPECT_EQ(marginal_extremal_index(0.3, AttractionDomain::weibull(1.0)), 1.0);
    EXPECT_NEAR(marginal_extremal_index(0.5, AttractionDomain::frechet(2.0)), 0.75, 1e-15);
}

TEST(MvExtremalIndex, EmptyIndexSetGivesOne) {
    const std::vector<AttractionDomain> doms{AttractionDomain::gumbel(), AttractionDomain::weibull(1.0)};
    const std::array<double, 2> c{0.9, 0.9}, tau{1.0, 3.0};
    const auto r = theoretical_mv_extremal_index(AnyCopula{CopulaSpec::gumbel(2.0)}, doms, c, tau);
    EXPECT_EQ(r.theta, 1.0);
    EXPECT_TRUE(r.index_set.empty());
}

TEST(MvExtremalIndex, GumbelTwoLightTailedMargins) {
    const std::vector<AttractionDomain> doms{AttractionDomain::gumbel(), AttractionDomain::gumbel(), kFrechet1};
    const std::array<double, 3> c{0.3, 0.6, 0.5}, tau{1.0, 1.0, 1.0};
    const auto r = theoretical_mv_extremal_index(AnyCopula{CopulaSpec::gumbel(1.0)}, doms, c, tau);
    EXPECT_NEAR(r.theta, 1.0 - 0.5 / 3.0, 1e-12);
    EXPECT_EQ(r.index_set, (std::vector<std::size_t>{2}));
    EXPECT_EQ(r.marginal_thetas, (std::vector<double>{1.0, 1.0, 0.5}));
}

TEST(MvExtremalIndex, GumbelClosedFormRandomGrid) {
    RandomStream rng(1);
    const std::vector<AttractionDomain> doms{AttractionDomain::gumbel(), AttractionDomain::weibull(1.0), kFrechet1,
                                             kFrechet1};
    for (int i = 0; i < 1000; ++i) {
        const double gamma = 1.0 + 9.0 * rng.uniform();
        std::array<double, 4> c{}, tau{};
        for (int j = 0; j < 4; ++j) {
            c[j] = 0.01 + 0.98 * rng.uniform();
            tau[j] = 0.01 + 5.0 * rng.uniform();
        }
        double num = 0.0, den = 0.0;
        for (int j = 0; j < 4; ++j) {
            den += std::pow(tau[j], gamma);
            if (j >= 2) num += std::pow(tau[j] * c[j], gamma);
        }
        const double expect = 1.0 - std::pow(num, 1.0 / gamma) / std::pow(den, 1.0 / gamma);
        const auto r = theoretical_mv_extremal_index(AnyCopula{CopulaSpec::gumbel(gamma)}, doms, c, tau);
        ASSERT_NEAR(r.theta, expect, 1e-10);
    }
}

TEST(MvExtremalIndex, ComonotoneFrechet) {
    const std::vector<AttractionDomain> doms{kFrechet1, kFrechet1};
    const std::array<double, 2> c{0.8, 0.1}, tau{1.0, 1.0};
    EXPECT_NEAR(theoretical_mv_extremal_index(AnyCopula{CopulaSpec::comonotone()}, doms, c, tau).theta, 0.2, 1e-15);
}

TEST(MvExtremalIndex, ComonotoneMonotoneInC) {
    const std::vector<AttractionDomain> doms{kFrechet1, kFrechet1};
    const std::array<double, 2> tau{1.0, 2.0};
    for (double c2 = 0.05; c2 < 1.0; c2 += 0.1) {
        double prev = 2.0;
        for (double c1 = 0.05; c1 < 1.0; c1 += 0.05) {
            const std::array<double, 2> c{c1, c2};
            const double th = theoretical_mv_extremal_index(AnyCopula{CopulaSpec::comonotone()}, doms, c, tau).theta;
            EXPECT_LE(th, prev + 1e-15);
            prev = th;
        }
    }
}

TEST(MvExtremalIndex, HomogeneityAndBounds) {
    RandomStream rng(2);
    for (int i = 0; i < 200; ++i) {
        const double alpha = 0.5 + 2.0 * rng.uniform();
        const std::vector<AttractionDomain> doms{AttractionDomain::frechet(alpha), AttractionDomain::frechet(alpha),
                                                 AttractionDomain::frechet(alpha)};
        const std::array<double, 3> c{rng.uniform(), rng.uniform(), rng.uniform()};
        const std::array<double, 3> tau{rng.uniform(), rng.uniform(), rng.uniform()};
        const AnyCopula cop = i % 2 ? AnyCopula{CopulaSpec::gumbel(1.0 + 4.0 * rng.uniform())}
                                    : AnyCopula{DerivedCopula(CopulaSpec::gumbel(2.0), {0.5, 0.5, 0.5})};
        const double th = theoretical_mv_extremal_index(cop, doms, c, tau).theta;
        EXPECT_GT(th, 0.0);
        EXPECT_LE(th, 1.0);
        for (double s : {2.0, 10.0}) {
            const std::array<double, 3> st{s * tau[0], s * tau[1], s * tau[2]};
            EXPECT_NEAR(theoretical_mv_extremal_index(cop, doms, c, st).theta, th, 1e-10);
        }
    }
}

TEST(MvExtremalIndex, MarginalConsistency) {
    const std::vector<AttractionDomain> doms{kFrechet1, AttractionDomain::frechet(2.0), AttractionDomain::gumbel()};
    const std::array<double, 3> c{0.7, 0.4, 0.9};
    for (std::size_t j = 0; j < 3; ++j) {
        std::array<double, 3> tau{0.0, 0.0, 0.0};
        tau[j] = 2.5;
        const double th = theoretical_mv_extremal_index(AnyCopula{CopulaSpec::gumbel(3.0)}, doms, c, tau).theta;
        EXPECT_NEAR(th, marginal_extremal_index(c[j], doms[j]), 1e-10);
    }
}

TEST(MvExtremalIndex, Errors) {
    const std::vector<AttractionDomain> doms{kFrechet1, kFrechet1};
    const std::array<double, 2> c{0.5, 0.5}, zero{0.0, 0.0};
    EXPECT_THROW(theoretical_mv_extremal_index(AnyCopula{CopulaSpec::comonotone()}, doms, c, zero), DomainError);
    const std::array<double, 3> tau3{1.0, 1.0, 1.0};
    EXPECT_THROW(theoretical_mv_extremal_index(AnyCopula{CopulaSpec::comonotone()}, doms, c, tau3), DomainError);
}

TEST(RunsEstimator, TrivialCases) {
    const std::vector<double> isolated{0, 5, 0, 0, 5, 0, 5, 0};
    EXPECT_EQ(empirical_extremal_index_runs(isolated, 1.0), 1.0);
    const std::vector<double> block{0, 5, 5, 5, 5, 0, 0};
    EXPECT_EQ(empirical_extremal_index_runs(block, 1.0), 0.25);
    EXPECT_THROW(empirical_extremal_index_runs(block, 10.0), UndefinedResult);
    // with run_gap 2 the two exceedances separated by a single gap merge
    const std::vector<double> near{5, 0, 5, 0, 0, 5};
    EXPECT_EQ(empirical_extremal_index_runs(near, 1.0, 1), 1.0);
    EXPECT_NEAR(empirical_extremal_index_runs(near, 1.0, 2), 2.0 / 3.0, 1e-15);
}

TEST(RunsEstimator, ComonotoneDuplicatedColumns) {
    const std::vector<MarginSpec> m(2, MarginSpec::frechet(1.0));
    const auto p = simulate_path(ProcessConfig({0.6, 0.6}, m, CopulaSpec::comonotone()), 20000, 3);
    const auto a = p.column(0), b = p.column(1);
    const double ua = stats::empirical_quantile(a, 0.99), ub = stats::empirical_quantile(b, 0.99);
    EXPECT_EQ(empirical_extremal_index_runs(a, ua), empirical_extremal_index_runs(b, ub));
}

TEST(RunsEstimator, SimulatedFrechetPath) {
    const auto p = simulate_path(ProcessConfig({0.8}, {MarginSpec::frechet(1.0)}, CopulaSpec::independence()),
                                 100000, 4);
    const auto x = p.column(0);
    const double u = stats::empirical_quantile(x, 0.995);
    EXPECT_NEAR(empirical_extremal_index_runs(x, u, 5), 0.2, 0.05);
}

TEST(EmpiricalStdf, UnivariateReduction) {
    const auto p = simulate_path(ProcessConfig({0.6}, {MarginSpec::frechet(1.0)}, CopulaSpec::independence()),
                                 100000, 5);
    const std::vector<AttractionDomain> doms{kFrechet1};
    const std::array<double, 1> c{0.6}, tau{1.0};
    EXPECT_NEAR(empirical_mv_extremal_index(p, doms, c, default_stdf_k(p.n), tau), 0.4, 0.05);
    const EmpiricalStdf ell(p, 300);
    const std::array<double, 1> one{1.0}, half{0.5};
    EXPECT_NEAR(ell(one), 1.0, 1e-12);
    EXPECT_NEAR(ell(half), 0.5, 1e-12);
}

TEST(EmpiricalStdf, EmptyIndexSetGivesOne) {
    std::vector<std::vector<double>> cols(2, std::vector<double>(2000));
    RandomStream rng(6);
    for (auto& col : cols) {
        for (auto& v : col) v = rng.exponential();
    }
    const auto p = SamplePath::from_columns(cols);
    const std::vector<AttractionDomain> doms{AttractionDomain::gumbel(), AttractionDomain::gumbel()};
    const std::array<double, 2> c{0.5, 0.5}, tau{1.0, 1.0};
    EXPECT_EQ(empirical_mv_extremal_index(p, doms, c, 50, tau), 1.0);
}

TEST(EmpiricalStdf, MaxLinearOracle) {
    // Comonotone innovations do not make the stationary law comonotone; the
    // exact value is the max-linear series oracle.
    const std::vector<MarginSpec> m(2, MarginSpec::frechet(1.0));
    const std::vector<AttractionDomain> doms{kFrechet1, kFrechet1};
    const std::array<double, 2> tau{1.0, 1.0};

    const std::array<double, 2> same{0.8, 0.8};
    const auto p1 = simulate_path(ProcessConfig({0.8, 0.8}, m, CopulaSpec::comonotone()), 100000, 7);
    EXPECT_NEAR(empirical_mv_extremal_index(p1, doms, same, default_stdf_k(p1.n), tau), 0.2, 0.05);
    EXPECT_NEAR(oracle::comonotone_armax_theta(0.8, 0.8, 1.0, 1.0), 0.2, 1e-12);

    const std::array<double, 2> mixed{0.8, 0.1};
    const auto p2 = simulate_path(ProcessConfig({0.8, 0.1}, m, CopulaSpec::comonotone()), 100000, 8);
    const double oracle_theta = oracle::comonotone_armax_theta(0.8, 0.1, 1.0, 1.0);
    EXPECT_NEAR(oracle_theta, 9.0 / 17.0, 1e-12);
    EXPECT_NEAR(empirical_mv_extremal_index(p2, doms, mixed, default_stdf_k(p2.n), tau), oracle_theta, 0.05);
}

TEST(EmpiricalStdf, Errors) {
    const auto p = simulate_path(ProcessConfig({0.5}, {MarginSpec::frechet(1.0)}, CopulaSpec::independence()),
                                 100, 9);
    EXPECT_THROW(EmpiricalStdf(p, 0), DomainError);
    EXPECT_THROW(EmpiricalStdf(p, 100), DomainError);
    const std::vector<AttractionDomain> doms{kFrechet1};
    const std::array<double, 1> c{0.5}, zero{0.0}, tiny{1e-6};
    EXPECT_THROW(empirical_mv_extremal_index(p, doms, c, 10, zero), DomainError);
    EXPECT_THROW(empirical_mv_extremal_index(p, doms, c, 10, tiny), UndefinedResult);
}
