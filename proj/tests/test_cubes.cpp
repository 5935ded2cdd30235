#include <complex>
#include <numbers>
#include <gtest/gtest.h>

#include <set>

#include "hofa/cubes.hpp"
#include "hofa/rng.hpp"
#include "oracles.hpp"

using namespace hofa;

namespace {

using u64 = std::uint64_t;

// HK^k(G) straight from its definition: the subgroup of G^{2^k} generated by
// g placed on a face of codimension i, g in G_i. Cubes are packed base |G|.
std::vector<char> hk_by_generators(const FilteredAbelianGroup& G, int k) {
    const u64 N = u64{1} << k;
    u64 total = 1;
    for (u64 w = 0; w < N; ++w) total *= G.size();
    auto pack = [&](const std::vector<u64>& c) {
        u64 code = 0;
        for (u64 w = N; w-- > 0;) code = code * G.size() + c[w];
        return code;
    };
    auto unpack = [&](u64 code) {
        std::vector<u64> c(N);
        for (u64 w = 0; w < N; ++w) {
            c[w] = code % G.size();
            code /= G.size();
        }
        return c;
    };
    std::vector<std::vector<u64>> gens;
    for (u64 fixed_mask = 0; fixed_mask < N; ++fixed_mask)
        for (u64 fixed_val = fixed_mask;; fixed_val = (fixed_val - 1) & fixed_mask) {
            const int codim = __builtin_popcountll(fixed_mask);
            for (u64 g : G.generators(codim)) {
                std::vector<u64> c(N, 0);
                for (u64 w = 0; w < N; ++w)
                    if ((w & fixed_mask) == fixed_val) c[w] = g;
                gens.push_back(c);
            }
            if (fixed_val == 0) break;
        }
    std::vector<char> seen(total, 0);
    std::vector<u64> queue{0};
    seen[0] = 1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
        const auto c = unpack(queue[q]);
        for (const auto& g : gens) {
            std::vector<u64> s(N);
            for (u64 w = 0; w < N; ++w) s[w] = G.add(c[w], g[w]);
            const u64 code = pack(s);
            if (!seen[code]) {
                seen[code] = 1;
                queue.push_back(code);
            }
        }
    }
    return seen;
}

CubePoint unpack_cube(const FilteredAbelianGroup& G, int k, u64 code) {
    CubePoint c{k, std::vector<u64>(u64{1} << k)};
    for (auto& v : c.entries) {
        v = code % G.size();
        code /= G.size();
    }
    return c;
}

std::vector<std::vector<u64>> abelian_orders_upto_16() {
    return {{2},    {3},    {4},       {2, 2},    {5},       {6},          {7},       {8},         {2, 4},
            {2, 2, 2}, {9}, {3, 3},    {10},      {11},      {12},         {2, 6},    {13},        {14},
            {15},   {16},   {2, 8},    {4, 4},    {2, 2, 4}, {2, 2, 2, 2}};
}

// A chain of subgroups built top-down from random elements.
FilteredAbelianGroup random_filtration(const std::vector<u64>& orders, int s, SplitMix64& rng) {
    u64 size = 1;
    for (u64 n : orders) size *= n;
    std::vector<std::vector<u64>> levels(static_cast<std::size_t>(s + 1));
    std::vector<u64> acc;
    for (int i = s; i >= 0; --i) {
        const int extra = static_cast<int>(rng.below(2)) + (i == 0 ? 1 : 0);
        for (int e = 0; e < extra; ++e) acc.push_back(rng.below(size));
        levels[i] = acc;
    }
    return FilteredAbelianGroup(orders, levels);
}

std::vector<FilteredAbelianGroup> filtrations_of(const std::vector<u64>& orders, SplitMix64& rng) {
    std::vector<FilteredAbelianGroup> out;
    for (int k = 0; k <= 2; ++k) out.push_back(FilteredAbelianGroup::maximal(orders, k));
    for (int p : {2, 3})
        if (std::all_of(orders.begin(), orders.end(), [p](u64 n) { return ipow(p, 8) % n == 0; }))
            out.push_back(FilteredAbelianGroup::p_adic(orders, p));
    for (int t = 0; t < 3; ++t) out.push_back(random_filtration(orders, 1 + static_cast<int>(rng.below(3)), rng));
    return out;
}

NCPoly S(const Space& V, int k) { return NCPoly(V, 1, oracle::symmetric(V, k)); }

}  // namespace

TEST(Cubes, FilteredGroupBasics) {
    const auto G = FilteredAbelianGroup(std::vector<u64>{4}, {{1}, {1}, {2}});
    EXPECT_EQ(G.degree(), 2);
    EXPECT_EQ(G.level(2), (std::vector<u64>{0, 2}));
    EXPECT_EQ(G.level(3), (std::vector<u64>{0}));
    EXPECT_TRUE(G.contains(1, 3));
    EXPECT_FALSE(G.contains(2, 1));
    EXPECT_THROW(FilteredAbelianGroup(std::vector<u64>{4}, {{2}, {1}}), Error);

    EXPECT_THROW(FilteredAbelianGroup::p_adic({6}, 2), Error);
    const auto P = FilteredAbelianGroup::p_adic({8}, 2);
    EXPECT_EQ(P.degree(), 3);
    EXPECT_EQ(P.level(3), (std::vector<u64>{0, 4}));

    const auto W = FilteredAbelianGroup::weighted(2, {2, 3}, {1, 0});
    EXPECT_EQ(W.size(), 8u);
    EXPECT_EQ(W.degree(), 3);
    // Level 3 holds 2 e_1 (weight 2 + 1) and e_2 (weight 3).
    EXPECT_EQ(W.level(3).size(), 4u);
    EXPECT_EQ(W.level(2).size(), 8u);
}

TEST(Cubes, MembershipExamples) {
    const auto G1 = FilteredAbelianGroup::maximal({2}, 1);
    EXPECT_TRUE(hk_membership({2, {1, 1, 1, 1}}, G1));
    EXPECT_FALSE(hk_membership({2, {0, 1, 1, 1}}, G1));
    EXPECT_TRUE(hk_membership({2, {0, 1, 1, 0}}, G1));

    const auto Z4 = FilteredAbelianGroup(std::vector<u64>{4}, {{1}, {1}, {2}});
    const CubePoint c{2, {3, (3 + 1) % 4, (3 + 2) % 4, (3 + 1 + 2 + 2) % 4}};
    const TaylorResult t = hk_taylor(c, Z4);
    ASSERT_TRUE(t.member);
    EXPECT_EQ(t.coeffs, (std::vector<u64>{3, 1, 2, 2}));
    EXPECT_EQ(taylor_expand(t.coeffs, 2, Z4).entries, c.entries);
    EXPECT_TRUE(hk_membership(c, Z4));

    const CubePoint bad{2, {0, 1, 1, 1}};
    const TaylorResult tb = hk_taylor(bad, Z4);
    EXPECT_FALSE(tb.member);
    EXPECT_EQ(tb.offending, 3u);
    EXPECT_FALSE(hk_membership(bad, Z4));

    const CubePoint constant{3, std::vector<u64>(8, 3)};
    const TaylorResult tc = hk_taylor(constant, Z4);
    EXPECT_TRUE(tc.member);
    EXPECT_EQ(tc.coeffs, (std::vector<u64>{3, 0, 0, 0, 0, 0, 0, 0}));
}

TEST(Cubes, BothDescriptionsMatchTheGeneratedGroup) {
    SplitMix64 rng(3);
    for (const auto& orders : std::vector<std::vector<u64>>{{2}, {3}, {4}, {2, 2}, {5}, {6}, {8}, {2, 4}})
        for (const auto& G : filtrations_of(orders, rng))
            for (int k = 0; k <= 2 + (G.size() <= 4 ? 1 : 0); ++k) {
                const auto gen = hk_by_generators(G, k);
                std::uint64_t count = 0;
                for (u64 code = 0; code < gen.size(); ++code) {
                    const CubePoint c = unpack_cube(G, k, code);
                    const bool m = hk_membership(c, G);
                    ASSERT_EQ(m, static_cast<bool>(gen[code])) << G.str() << " k=" << k;
                    ASSERT_EQ(hk_taylor(c, G).member, m) << G.str() << " k=" << k;
                    count += m;
                }
                EXPECT_EQ(count, hk_size(G, k)) << G.str() << " k=" << k;
            }
}

TEST(Cubes, ExhaustiveEquivalenceUpTo16) {
    SplitMix64 rng(17);
    int scanned = 0, by_index = 0;
    for (const auto& orders : abelian_orders_upto_16())
        for (const auto& G : filtrations_of(orders, rng))
            for (int k = 0; k <= 3; ++k) {
                try {
                    const HkScan s = hk_equivalence_scan(G, k, u64{1} << 24);
                    EXPECT_EQ(s.disagreements, 0u) << G.str() << " k=" << k;
                    EXPECT_EQ(s.members, hk_size(G, k)) << G.str() << " k=" << k;
                    EXPECT_DOUBLE_EQ(s.cubes, std::pow(static_cast<double>(G.size()), 1 << k));
                    ++scanned;
                } catch (const BudgetExceeded&) {
                    const HkIndexCheck ix = hk_equivalence_by_index(G, k, u64{1} << 24);
                    EXPECT_TRUE(ix.equal) << G.str() << " k=" << k;
                    ++by_index;
                }
            }
    EXPECT_GT(scanned, 500);
    EXPECT_GT(by_index, 0);
}

TEST(Cubes, IndexCountMatchesScan) {
    SplitMix64 rng(12);
    for (const auto& orders : abelian_orders_upto_16()) {
        u64 size = 1;
        for (u64 n : orders) size *= n;
        if (size > 8) continue;
        for (const auto& G : filtrations_of(orders, rng))
            for (int k = 0; k <= 2; ++k) {
                const HkScan s = hk_equivalence_scan(G, k);
                const HkIndexCheck ix = hk_equivalence_by_index(G, k);
                EXPECT_TRUE(ix.taylor_in_faces);
                EXPECT_EQ(ix.face_members, s.members) << G.str() << " k=" << k;
                EXPECT_TRUE(ix.equal);
            }
    }
}

TEST(Cubes, CubeGroupIsClosedUnderAddition) {
    SplitMix64 rng(4);
    for (const auto& orders : std::vector<std::vector<u64>>{{4}, {2, 2}, {6}, {8}})
        for (const auto& G : filtrations_of(orders, rng)) {
            std::vector<CubePoint> cubes;
            enumerate_hk(G, 2, [&](const CubePoint& c) {
                cubes.push_back(c);
                return true;
            });
            for (std::size_t a = 0; a < cubes.size(); a += 3)
                for (std::size_t b = 0; b < cubes.size(); b += 5) {
                    CubePoint s{2, std::vector<u64>(4)};
                    for (int w = 0; w < 4; ++w) s.entries[w] = G.add(cubes[a].entries[w], cubes[b].entries[w]);
                    ASSERT_TRUE(hk_membership(s, G));
                }
        }
}

TEST(Cubes, TaylorCoefficientsAreUnique) {
    for (const auto& orders : std::vector<std::vector<u64>>{{2}, {4}, {2, 2}, {8}, {2, 4}}) {
        const auto G = FilteredAbelianGroup::maximal(orders, 0);
        for (int k = 0; k <= 2; ++k) {
            const u64 N = u64{1} << k;
            u64 total = 1;
            for (u64 w = 0; w < N; ++w) total *= G.size();
            std::set<std::vector<u64>> images;
            for (u64 code = 0; code < total; ++code) {
                const CubePoint coeffs = unpack_cube(G, k, code);
                images.insert(taylor_expand(coeffs.entries, k, G).entries);
            }
            EXPECT_EQ(images.size(), total);
        }
    }
}

TEST(Cubes, PolynomialMapExamples) {
    const auto H = FilteredAbelianGroup::maximal({2, 2, 2}, 1);
    const auto G = FilteredAbelianGroup::maximal({4}, 1);
    GroupMap hom(8);
    for (u64 x = 0; x < 8; ++x) hom[x] = 2 * ((x & 1) ^ (x >> 2 & 1));
    EXPECT_TRUE(is_polynomial_map(hom, H, G));
    EXPECT_TRUE(cube_preservation_check(hom, H, G, 3).preserved);

    const auto Z4 = FilteredAbelianGroup(std::vector<u64>{4}, {{1}, {1}, {2}});
    for (u64 g = 0; g < 4; ++g) {
        GroupMap shift(4);
        for (u64 x = 0; x < 4; ++x) shift[x] = Z4.add(x, g);
        EXPECT_TRUE(is_polynomial_map(shift, Z4, Z4));
        EXPECT_TRUE(cube_preservation_check(shift, Z4, Z4, 3).preserved);
    }
    GroupMap id(4);
    for (u64 x = 0; x < 4; ++x) id[x] = x;
    EXPECT_TRUE(cube_preservation_check(id, Z4, Z4, 3).preserved);

    // Mother Q on F_2 into (1/4)Z/Z of degree <= 2.
    const auto F2 = FilteredAbelianGroup::maximal({2}, 1);
    const auto T4 = FilteredAbelianGroup::maximal({4}, 2);
    const GroupMap Q{0, 1};
    EXPECT_TRUE(is_polynomial_map(Q, F2, T4));
    const CubePreservation cq = cube_preservation_check(Q, F2, T4, 3);
    EXPECT_TRUE(cq.preserved);
    EXPECT_EQ(cq.cubes_checked, 2u + 4u + 8u + 16u);
    EXPECT_FALSE(is_polynomial_map(Q, F2, FilteredAbelianGroup::maximal({4}, 1)));

    // iota(x_1) into a degree-0 filtration.
    const GroupMap iota{0, 1};
    const auto T2 = FilteredAbelianGroup::maximal({2}, 0);
    EXPECT_FALSE(is_polynomial_map(iota, F2, T2));
    const CubePreservation ci = cube_preservation_check(iota, F2, T2, 3);
    EXPECT_FALSE(ci.preserved);
    EXPECT_EQ(ci.failing_k, 1);
}

TEST(Cubes, NCPolyIsPolynomialMapIffDegreeBounded) {
    SplitMix64 rng(21);
    for (const auto& [p, n, d] : std::vector<std::tuple<int, int, int>>{{2, 3, 4}, {3, 2, 3}}) {
        const Space V(p, n);
        PolyFamily fam(V, d, false, u64{1} << 40);
        const auto H = FilteredAbelianGroup::maximal(std::vector<u64>(static_cast<std::size_t>(n), static_cast<u64>(p)), 1);
        for (int trial = 0; trial < 150; ++trial) {
            const NCPoly P = fam.poly(rng.below(fam.count()));
            const int K = std::max(P.exponent(), 1);
            GroupMap phi(V.size());
            for (u64 x = 0; x < V.size(); ++x) phi[x] = P.residue(x, K);
            for (int k = 0; k <= d + 1; ++k) {
                const auto G = FilteredAbelianGroup::maximal({ipow(p, K)}, k);
                EXPECT_EQ(is_polynomial_map(phi, H, G), degree(P) <= k) << "trial " << trial << " k=" << k;
            }
        }
    }
}

TEST(Cubes, PolynomialIffCubePreservingOnThousandsOfMaps) {
    struct Pair {
        FilteredAbelianGroup H, G;
    };
    const std::vector<Pair> pairs = {
        {FilteredAbelianGroup::maximal({2, 2}, 1), FilteredAbelianGroup::maximal({2}, 1)},
        {FilteredAbelianGroup::maximal({2, 2}, 1), FilteredAbelianGroup::maximal({4}, 2)},
        {FilteredAbelianGroup::maximal({4}, 1), FilteredAbelianGroup::maximal({4}, 1)},
        {FilteredAbelianGroup::maximal({4}, 1), FilteredAbelianGroup::maximal({4}, 2)},
        {FilteredAbelianGroup::maximal({2, 2, 2}, 1), FilteredAbelianGroup::maximal({2}, 2)},
        {FilteredAbelianGroup::maximal({3}, 1), FilteredAbelianGroup::maximal({3}, 1)},
        {FilteredAbelianGroup::maximal({3}, 1), FilteredAbelianGroup::maximal({3, 3}, 2)},
        {FilteredAbelianGroup(std::vector<u64>{4}, {{1}, {1}, {2}}), FilteredAbelianGroup::maximal({4}, 2)},
        {FilteredAbelianGroup(std::vector<u64>{4}, {{1}, {1}, {2}}), FilteredAbelianGroup(std::vector<u64>{4}, {{1}, {1}, {2}})},
        {FilteredAbelianGroup::p_adic({8}, 2), FilteredAbelianGroup::maximal({2}, 2)},
        {FilteredAbelianGroup::maximal({2}, 1), FilteredAbelianGroup::maximal({8}, 2)},
        {FilteredAbelianGroup::maximal({6}, 1), FilteredAbelianGroup::maximal({2}, 1)},
        {FilteredAbelianGroup::maximal({8}, 1), FilteredAbelianGroup::p_adic({4}, 2)},
    };
    SplitMix64 rng(1000);
    std::uint64_t maps = 0, polynomial = 0;
    for (const auto& [H, G] : pairs) {
        ASSERT_LE(G.degree() + 1, 3);
        double count = 1;
        for (u64 x = 0; x < H.size(); ++x) count *= static_cast<double>(G.size());
        const bool exhaustive = count <= 4096;
        const u64 runs = exhaustive ? static_cast<u64>(count) : 400;
        for (u64 r = 0; r < runs; ++r) {
            GroupMap phi(H.size());
            u64 code = r;
            for (auto& v : phi) {
                if (exhaustive) {
                    v = code % G.size();
                    code /= G.size();
                } else {
                    v = rng.below(G.size());
                }
            }
            const bool poly = is_polynomial_map(phi, H, G);
            ASSERT_EQ(cube_preservation_check(phi, H, G, 3).preserved, poly) << H.str() << " -> " << G.str();
            ++maps;
            polynomial += poly;
        }
    }
    EXPECT_GE(maps, 1000u);
    EXPECT_GT(polynomial, 50u);
}

TEST(Cubes, GeneratorCheckingMatchesAllElements) {
    SplitMix64 rng(9);
    for (const auto& orders : std::vector<std::vector<u64>>{{4}, {2, 2}, {8}, {9}, {3, 3}, {2, 4}})
        for (const auto& H : filtrations_of(orders, rng)) {
            const auto G = rng.below(2) ? FilteredAbelianGroup::maximal({4}, 2) : FilteredAbelianGroup::p_adic({4}, 2);
            for (int trial = 0; trial < 40; ++trial) {
                GroupMap phi(H.size());
                // Half the maps are homomorphisms plus a random constant.
                const bool affine = trial % 2 == 0;
                const u64 c = rng.below(G.size());
                std::vector<u64> images;
                for (std::size_t t = 0; t < orders.size(); ++t) images.push_back(rng.below(G.size()));
                for (u64 x = 0; x < H.size(); ++x) {
                    if (!affine) {
                        phi[x] = rng.below(G.size());
                        continue;
                    }
                    u64 v = c;
                    const auto digits = H.decode(x);
                    for (std::size_t t = 0; t < digits.size(); ++t)
                        v = G.add(v, G.mul(static_cast<std::int64_t>(digits[t]), images[t]));
                    phi[x] = v;
                }
                EXPECT_EQ(is_polynomial_map(phi, H, G, GeneratorMode::Generators),
                          is_polynomial_map(phi, H, G, GeneratorMode::AllElements))
                    << H.str();
            }
        }
}

TEST(Cubes, WeightedFiltrationMatchesWeightedDegree) {
    const auto H = FilteredAbelianGroup::weighted(2, {1}, {1});
    for (u64 code = 0; code < 256; ++code) {
        GroupMap phi(4);
        std::vector<u64> residues(4);
        for (u64 x = 0; x < 4; ++x) phi[x] = residues[x] = code >> (2 * x) & 3;
        const int wd = weighted_degree(PeriodicTable(2, {1}, {2}, 2, residues));
        for (int d = 0; d <= 4; ++d)
            EXPECT_EQ(is_polynomial_map(phi, H, FilteredAbelianGroup::maximal({4}, d)), wd <= d) << code << " d=" << d;
    }
}

TEST(Cubes, EquidistributionExamples) {
    const EquidistributionReport id = equidistribution_report({0, 1, 2, 3, 4}, {5});
    EXPECT_TRUE(id.bias_zero);
    EXPECT_EQ(id.max_deviation, Rational(0));
    EXPECT_NEAR(id.max_bias, 0, 1e-12);
    EXPECT_TRUE(id.weyl_consistent);

    const EquidistributionReport c = equidistribution_report({2, 2, 2}, {4});
    EXPECT_NEAR(c.max_bias, 1, 1e-12);
    EXPECT_FALSE(c.bias_zero);
    EXPECT_EQ(c.max_deviation, Rational(3, 4));
    EXPECT_TRUE(c.weyl_consistent);
}

TEST(Cubes, WeylCriterionExhaustive) {
    for (int a : {1, 2, 4, 8}) {
        u64 maps = 1;
        for (int t = 0; t < a; ++t) maps *= 4;
        for (u64 code = 0; code < maps; ++code) {
            std::vector<u64> values(static_cast<std::size_t>(a));
            for (int t = 0; t < a; ++t) values[t] = code >> (2 * t) & 3;
            const EquidistributionReport r = equidistribution_report(values, {4});
            ASSERT_TRUE(r.weyl_consistent);
            bool uniform = true;
            for (u64 h : r.histogram) uniform = uniform && h * 4 == static_cast<u64>(a);
            ASSERT_EQ(r.bias_zero, uniform);
            double best = 0;
            for (u64 xi = 1; xi < 4; ++xi) {
                Complex s = 0;
                for (u64 v : values) s += std::polar(1.0, 2 * M_PI * static_cast<double>(xi * v) / 4);
                best = std::max(best, std::abs(s) / a);
            }
            ASSERT_NEAR(r.max_bias, best, 1e-12);
        }
    }
}

TEST(Cubes, MixedOrderCharacters) {
    // Z/2 x Z/3: the map a -> (a mod 2, a mod 3) on Z/6 is a bijection.
    std::vector<u64> values;
    for (u64 a = 0; a < 6; ++a) values.push_back(a % 2 + 2 * (a % 3));
    const EquidistributionReport r = equidistribution_report(values, {2, 3});
    EXPECT_TRUE(r.bias_zero);
    values.push_back(0);
    const EquidistributionReport s = equidistribution_report(values, {2, 3});
    EXPECT_FALSE(s.bias_zero);
    EXPECT_TRUE(s.weyl_consistent);
}

TEST(Cubes, JointEquidistribution) {
    const Space V(2, 3);
    MultilinearTable lin(2, 3, 1);
    lin.set({0}, 1);
    lin.set({2}, 1);
    const EquidistributionReport one = joint_equidistribution_report(V, 1, {{lin, {0}}});
    EXPECT_TRUE(one.bias_zero);

    const EquidistributionReport twice = joint_equidistribution_report(V, 1, {{lin, {0}}, {lin, {0}}});
    EXPECT_EQ(twice.histogram, (std::vector<u64>{4, 0, 0, 4}));
    EXPECT_NEAR(twice.max_bias, 1, 1e-12);
    EXPECT_EQ(twice.max_deviation, Rational(1, 4));

    // B = d^2 S_2 on F_2^5 on the three pairs of (h_1, h_2, h_3).
    const Space W(2, 5);
    const MultilinearTable B = dk_extract(S(W, 2), 2);
    const EquidistributionReport pairs = joint_equidistribution_report(W, 3, {{B, {0, 1}}, {B, {0, 2}}, {B, {1, 2}}});
    EXPECT_EQ(pairs.total, 32768u);
    std::vector<u64> want(8, 0);
    for (u64 h1 = 0; h1 < 32; ++h1)
        for (u64 h2 = 0; h2 < 32; ++h2)
            for (u64 h3 = 0; h3 < 32; ++h3) {
                auto b = [](u64 x, u64 y) { return static_cast<u64>(__builtin_popcountll(x) * __builtin_popcountll(y) - __builtin_popcountll(x & y)) & 1; };
                ++want[b(h1, h2) + 2 * b(h1, h3) + 4 * b(h2, h3)];
            }
    EXPECT_EQ(pairs.histogram, want);
    EXPECT_TRUE(pairs.weyl_consistent);
    EXPECT_FALSE(pairs.bias_zero);
}

TEST(Cubes, ChainFactorBiasesOnF2_6) {
    const Space V(2, 6);
    Factor F;
    F.p = 2;
    F.D = {2, 3};
    F.chains = {{S(V, 2), pth_root(S(V, 2))}, {S(V, 3)}};
    const Factor G = factor_depth_extend(F, {2, 1});
    const auto [orders, values] = factor_map(G);
    EXPECT_EQ(orders, (std::vector<u64>{8, 4}));
    const EquidistributionReport r = equidistribution_report(values, orders);
    EXPECT_TRUE(r.weyl_consistent);
    EXPECT_FALSE(r.bias_zero);
    std::uint64_t sum = 0;
    for (u64 h : r.histogram) sum += h;
    EXPECT_EQ(sum, 64u);
    double oracle = 0;
    for (u64 xi0 = 0; xi0 < 8; ++xi0)
        for (u64 xi1 = 0; xi1 < 4; ++xi1) {
            if (xi0 == 0 && xi1 == 0) continue;
            std::complex<double> acc = 0;
            for (u64 v : values) {
                const double t = static_cast<double>(xi0 * (v % 8)) / 8 + static_cast<double>(xi1 * (v / 8)) / 4;
                acc += std::polar(1.0, 2 * std::numbers::pi * t);
            }
            oracle = std::max(oracle, std::abs(acc) / 64);
        }
    EXPECT_NEAR(r.max_bias, oracle, 1e-12);
    EXPECT_NEAR(r.max_bias, 0.760564697213, 1e-9);
    EXPECT_EQ(r.max_deviation, Rational(9, 32));
}
