#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include "hofa/weighted.hpp"
#include "hofa/rng.hpp"
#include "oracles.hpp"

using namespace hofa;
using boost::multiprecision::cpp_int;

namespace {

cpp_int big_binom(std::int64_t x, int i) {
    cpp_int num = 1, den = 1;
    for (int k = 0; k < i; ++k) {
        num *= x - k;
        den *= k + 1;
    }
    return num / den;
}

// alpha + sum a_i prod binom(x_t, i_t) computed over the integers, then reduced.
TorusValue reference_eval(const WeightedPoly& f, const std::vector<std::int64_t>& x) {
    TorusValue acc = f.alpha();
    for (const auto& [i, a] : f.terms()) {
        cpp_int b = 1;
        for (int t = 0; t < f.m(); ++t) b *= big_binom(x[t], i[t]);
        const cpp_int M = cpp_int(ipow(f.p(), a.exp()));
        cpp_int r = b % M;
        if (r < 0) r += M;
        acc = acc + torus_scale(r.convert_to<std::int64_t>(), a);
    }
    return acc;
}

WeightedPoly random_poly(int p, const std::vector<int>& D, int d, SplitMix64& rng) {
    WeightedPoly f(p, D);
    f.add_term(std::vector<int>(D.size(), 0), TorusValue(p, rng.below(ipow(p, 2)), 2));
    const int m = static_cast<int>(D.size());
    std::vector<int> i(static_cast<std::size_t>(m), 0);
    std::function<void(int, int)> rec = [&](int t, int used) {
        if (t == m) {
            if (std::all_of(i.begin(), i.end(), [](int v) { return v == 0; })) return;
            for (int r = 0; used + r * (p - 1) <= d; ++r)
                if (rng.below(2)) f.add_term(i, TorusValue(p, rng.below(ipow(p, r + 1)), r + 1));
            return;
        }
        for (int v = 0; used + v * D[t] <= d; ++v) {
            i[t] = v;
            rec(t + 1, used + v * D[t]);
        }
        i[t] = 0;
    };
    rec(0, 0);
    return f;
}

WeightedPoly single(int p, std::vector<int> D, std::vector<int> i, std::uint64_t c, int exp) {
    WeightedPoly f(p, std::move(D));
    f.add_term(i, TorusValue(p, c, exp));
    return f;
}

NCPoly S(const Space& V, int k) { return NCPoly(V, 1, oracle::symmetric(V, k)); }

Factor ppp_factor(const Space& V) {
    Factor F;
    F.p = 2;
    F.D = {2, 3};
    const NCPoly P10 = S(V, 2);
    F.chains = {{P10, pth_root(P10)}, {S(V, 3)}};
    return F;
}

}  // namespace

TEST(Weighted, BinomModPrimePowerMatchesIntegers) {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const int p = std::array{2, 3, 5, 7}[rng.below(4)];
        const int e = static_cast<int>(rng.below(6));
        const int i = static_cast<int>(rng.below(12));
        const auto x = static_cast<std::int64_t>(rng.below(400)) - 200;
        const cpp_int M = cpp_int(ipow(p, e));
        cpp_int want = big_binom(x, i) % M;
        if (want < 0) want += M;
        ASSERT_EQ(cpp_int(binom_mod_prime_power(x, i, p, e)), want) << x << " " << i << " " << p << "^" << e;
    }
}

TEST(Weighted, BinomialOfPrimePowerDivisibility) {
    for (int p : {2, 3, 5})
        for (int k = 1; k <= 4; ++k) {
            const auto pk = static_cast<std::int64_t>(ipow(p, k));
            for (std::int64_t l = 1; l <= pk; ++l) {
                int t = 0;
                for (std::int64_t v = l; v % p == 0; v /= p) ++t;
                const cpp_int b = big_binom(pk, static_cast<int>(l));
                EXPECT_EQ(b % cpp_int(ipow(p, k - t)), 0) << p << "^" << k << " choose " << l;
            }
        }
}

TEST(Weighted, DegreeExamples) {
    EXPECT_EQ(weighted_degree(WeightedPoly(2, {1})), kNegInfDegree);
    WeightedPoly c(2, {1});
    c.add_term({0}, TorusValue(2, 1, 3));
    EXPECT_EQ(weighted_degree(c), 0);
    EXPECT_EQ(weighted_degree(PeriodicTable::from_poly(c)), 0);

    const WeightedPoly quarter = single(2, {1}, {1}, 1, 2);
    EXPECT_EQ(weighted_degree(quarter), 2);
    EXPECT_EQ(weighted_degree(PeriodicTable::from_poly(quarter)), 2);

    const WeightedPoly half_binom = single(2, {1}, {2}, 1, 1);
    EXPECT_EQ(weighted_degree(half_binom), 2);
    EXPECT_EQ(weighted_degree(PeriodicTable::from_poly(half_binom)), 2);

    for (std::int64_t a = -9; a < 9; ++a) {
        EXPECT_EQ(quarter({a}), TorusValue::from_residue(2, a, 2));
        EXPECT_EQ(half_binom({a}), TorusValue::from_residue(2, a * (a - 1) / 2, 1));
    }
}

TEST(Weighted, SampledTables) {
    const auto fn = [](const std::vector<std::int64_t>& x) { return TorusValue::from_residue(2, x[0], 2); };
    const PeriodicTable T = PeriodicTable::sample(2, {1}, {2}, 2, fn);
    EXPECT_EQ(weighted_degree(T), 2);
    EXPECT_THROW(PeriodicTable::sample(2, {1}, {1}, 2, fn), Error);
    const auto wide = [](const std::vector<std::int64_t>& x) { return TorusValue::from_residue(2, x[0], 3); };
    EXPECT_THROW(PeriodicTable::sample(2, {1}, {3}, 2, wide), Error);
}

TEST(Weighted, ExpandExamples) {
    WeightedPoly c(3, {2});
    c.add_term({0}, TorusValue(3, 2, 2));
    const WeightedPoly ec = binomial_expand(PeriodicTable::from_poly(c), 0);
    EXPECT_EQ(ec, c);
    EXPECT_TRUE(ec.terms().empty());

    const WeightedPoly quarter = single(2, {1}, {1}, 1, 2);
    const WeightedPoly e = binomial_expand(PeriodicTable::from_poly(quarter), 2);
    ASSERT_EQ(e.terms().size(), 1u);
    EXPECT_EQ(e.terms().begin()->first, std::vector<int>{1});
    EXPECT_EQ(e.terms().begin()->second, TorusValue(2, 1, 2));
    EXPECT_THROW(binomial_expand(PeriodicTable::from_poly(quarter), 1), Error);
}

TEST(Weighted, RandomRoundTrips) {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const int p = rng.below(2) ? 2 : 3;
        const int m = 1 + static_cast<int>(rng.below(2));
        std::vector<int> D;
        for (int t = 0; t < m; ++t) D.push_back(1 + static_cast<int>(rng.below(2)));
        const int d = static_cast<int>(rng.below(6));
        const WeightedPoly f = random_poly(p, D, d, rng);
        ASSERT_LE(weighted_degree(f), d);
        const PeriodicTable T = PeriodicTable::from_poly(f);
        for (std::uint64_t c = 0; c < T.size(); ++c) ASSERT_EQ(T(T.point(c)), reference_eval(f, T.point(c)));
        ASSERT_EQ(binomial_expand(T, d), f) << "trial " << trial;
        ASSERT_EQ(weighted_degree(T), weighted_degree(f)) << "trial " << trial;
    }
}

TEST(Weighted, SingleTermDegreeMatchesDerivatives) {
    for (int p : {2, 3})
        for (int D1 = 1; D1 <= 2; ++D1)
            for (int D2 = 1; D2 <= 2; ++D2)
                for (int i1 = 0; i1 <= 2; ++i1)
                    for (int i2 = 0; i2 <= 2; ++i2)
                        for (int r = 0; r <= 2; ++r) {
                            if (i1 == 0 && i2 == 0) continue;
                            const WeightedPoly f = single(p, {D1, D2}, {i1, i2}, p - 1, r + 1);
                            const int want = D1 * i1 + D2 * i2 + r * (p - 1);
                            if (want > 6) continue;
                            EXPECT_EQ(weighted_degree(PeriodicTable::from_poly(f)), want)
                                << p << " D=(" << D1 << "," << D2 << ") i=(" << i1 << "," << i2 << ") r=" << r;
                        }
}

TEST(Weighted, RootExamples) {
    EXPECT_EQ(weighted_pth_root(WeightedPoly(2, {1})), WeightedPoly(2, {1}));
    const WeightedPoly half = single(2, {1}, {1}, 1, 1);
    const WeightedPoly g = weighted_pth_root(half);
    EXPECT_EQ(g, single(2, {1}, {1}, 1, 2));
    EXPECT_EQ(scale(2, g), half);
    EXPECT_EQ(weighted_degree(PeriodicTable::from_poly(half)), 1);
    EXPECT_EQ(weighted_degree(PeriodicTable::from_poly(g)), 2);
}

TEST(Weighted, RandomRoots) {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = rng.below(2) ? 2 : 3;
        const int m = 1 + static_cast<int>(rng.below(2));
        std::vector<int> D;
        for (int t = 0; t < m; ++t) D.push_back(1 + static_cast<int>(rng.below(2)));
        const WeightedPoly f = random_poly(p, D, 4, rng);
        const WeightedPoly g = weighted_pth_root(f);
        const PeriodicTable Tg = PeriodicTable::from_poly(g);
        for (std::uint64_t c = 0; c < Tg.size(); ++c) {
            const auto x = Tg.point(c);
            ASSERT_EQ(torus_scale(p, g(x)), f(x));
        }
        const int df = weighted_degree(PeriodicTable::from_poly(f));
        ASSERT_LE(weighted_degree(Tg), std::max(df, 0) + p - 1);
    }
}

TEST(Weighted, RootAfterScaleIsIdentityModClassical) {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int p = rng.below(2) ? 2 : 3;
        const WeightedPoly f = random_poly(p, {1, 2}, 5, rng);
        const WeightedPoly diff = weighted_pth_root(scale(p, f)) + scale(-1, f);
        EXPECT_TRUE(scale(p, diff).is_zero());
        EXPECT_EQ(scale(p, weighted_pth_root(f)), f);
    }
}

TEST(Weighted, PeriodicityExamples) {
    const WeightedPoly quarter = single(2, {1}, {1}, 1, 2);
    const PeriodicityReport rep = periodicity_check(quarter, 2);
    ASSERT_EQ(rep.periods.size(), 1u);
    EXPECT_EQ(rep.periods[0].j, 2);
    EXPECT_EQ(rep.periods[0].period, 4u);
    EXPECT_TRUE(rep.periods[0].holds);
    ASSERT_EQ(rep.tops.size(), 1u);
    EXPECT_EQ(rep.tops[0].j, 1);
    EXPECT_TRUE(rep.tops[0].constant);
    EXPECT_EQ(rep.tops[0].c, 1);
    EXPECT_TRUE(rep.pass());
    for (std::int64_t a = -8; a < 8; ++a) EXPECT_EQ(quarter({a + 8}), quarter({a}));

    WeightedPoly c(3, {1, 2});
    c.add_term({0, 0}, TorusValue(3, 4, 2));
    const PeriodicityReport rc = periodicity_check(c, 0);
    EXPECT_TRUE(rc.pass());
    for (const auto& q : rc.periods) EXPECT_EQ(q.period, 1u);

    EXPECT_FALSE(periodicity_check(quarter, 1).pass());
}

TEST(Weighted, RandomPeriodicity) {
    SplitMix64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const int p = rng.below(2) ? 2 : 3;
        const std::vector<int> D{1 + static_cast<int>(rng.below(2)), 1 + static_cast<int>(rng.below(3))};
        const int d = 1 + static_cast<int>(rng.below(4));
        const WeightedPoly f = random_poly(p, D, d, rng);
        EXPECT_TRUE(periodicity_check(f, d).pass()) << "trial " << trial;
    }
}

TEST(Weighted, FactorExtendAndRetract) {
    const Space V(2, 4);
    const Factor F = ppp_factor(V);
    EXPECT_TRUE(verify_factor(F).pass());
    EXPECT_EQ(F.degree(), 3);

    const Factor same = factor_depth_extend(F, {1, 0});
    EXPECT_EQ(same.chains, F.chains);

    const Factor G = factor_depth_extend(F, {2, 1});
    ASSERT_EQ(G.chains[0].size() + G.chains[1].size(), 5u);
    for (int i = 0; i < 2; ++i)
        for (int j = 1; j <= G.depth(i); ++j)
            for (std::uint64_t x = 0; x < V.size(); ++x)
                ASSERT_EQ(torus_scale(2, G.chains[i][j](x)), G.chains[i][j - 1](x));
    EXPECT_EQ(G.chains[0][0], F.chains[0][0]);
    EXPECT_EQ(G.chains[0][1], F.chains[0][1]);
    EXPECT_EQ(G.chains[1][0], F.chains[1][0]);
    EXPECT_TRUE(verify_factor(G).pass());
    EXPECT_EQ(G.degree(), 4);
    for (int i = 0; i < 2; ++i) EXPECT_TRUE(scale(ipow(2, G.depth(i) + 1), G.chains[i].back()).is_zero());

    const Factor R = factor_retract(G, 3);
    EXPECT_EQ(R.D, F.D);
    EXPECT_EQ(R.chains, F.chains);
    EXPECT_EQ(factor_retract(G, 10).chains, G.chains);
    EXPECT_EQ(factor_retract(G, 1).dimension(), 0);
    EXPECT_THROW(factor_depth_extend(F, {0, 0}), Error);
    EXPECT_THROW(factor_depth_extend(F, {70, 0}), BudgetExceeded);
}

TEST(Weighted, VerifyFactorReportsBrokenChain) {
    const Space V(2, 3);
    Factor F = ppp_factor(V);
    F.chains[0][1] = S(V, 2);
    const FactorCheck c = verify_factor(F);
    EXPECT_FALSE(c.chain);
    EXPECT_FALSE(c.pass());
    F = ppp_factor(V);
    F.D[0] = 1;
    EXPECT_FALSE(verify_factor(F).initial_degrees);
}

TEST(Weighted, PullbackDegreeBound) {
    const Space V(2, 4);
    const Factor G = factor_depth_extend(ppp_factor(V), {2, 1});
    const NCPoly lift = factor_pullback(G, single(2, G.D, {1, 0}, 1, 3));
    EXPECT_EQ(lift, G.chains[0][2]);

    SplitMix64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const WeightedPoly f = random_poly(2, G.D, G.degree(), rng);
        const NCPoly Q = factor_pullback(G, f);
        EXPECT_LE(degree(Q), weighted_degree(f)) << "trial " << trial;
    }
    EXPECT_THROW(factor_pullback(G, single(2, G.D, {1, 0}, 1, 5)), Error);
}
