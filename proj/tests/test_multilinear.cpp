#include <gtest/gtest.h>

#include <algorithm>
#include <complex>
#include <map>
#include <numeric>
#include <tuple>

#include "hofa/multilinear.hpp"
#include "hofa/parallel.hpp"
#include "hofa/rng.hpp"
#include "oracles.hpp"

using namespace hofa;

namespace {

NCPoly S(const Space& V, int k) { return NCPoly(V, 1, oracle::symmetric(V, k)); }

// Slots (depth j, monomial i) with 0 < |i| <= d - j(p-1) and every digit of i below p.
std::vector<Term> slots(const Space& V, int d) {
    std::vector<Term> out;
    for (int j = 0; d - j * (V.p() - 1) >= 1; ++j)
        for (std::uint64_t mono = 1; mono < V.size(); ++mono)
            if (V.digit_sum(mono) <= d - j * (V.p() - 1)) out.push_back(Term{mono, j, 1});
    return out;
}

NCPoly random_poly(const Space& V, int d, SplitMix64& rng, bool classical = false) {
    CanonicalForm f{TorusValue::zero(V.p()), {}};
    for (auto s : slots(V, d))
        if ((!classical || s.depth == 0) && rng.below(2)) {
            s.coeff = 1 + static_cast<int>(rng.below(V.p() - 1));
            f.terms.push_back(s);
        }
    return NCPoly::from_form(V, normalize_form(V, f));
}

NCPoly random_classical(const Space& V, int d, SplitMix64& rng) { return random_poly(V, d, rng, true); }

CSMForm random_form(int p, int n, int k, SplitMix64& rng) {
    CSMForm T(p, n, k);
    for (const auto& A : multisets(n, k, p)) T.set(A, static_cast<int>(rng.below(p)));
    return T;
}

std::vector<std::uint64_t> random_args(const Space& V, int k, SplitMix64& rng) {
    std::vector<std::uint64_t> h(static_cast<std::size_t>(k));
    for (auto& v : h) v = rng.below(V.size());
    return h;
}

// Sum over all orderings of each multiset, with no symmetry shortcuts.
int reference_eval(const CSMForm& T, const Space& V, const std::vector<std::uint64_t>& h) {
    long acc = 0;
    for (const auto& [A, c] : T.coeffs()) {
        std::vector<int> ord = A;
        do {
            long prod = c;
            for (std::size_t t = 0; t < ord.size(); ++t) prod *= V.digit(h[t], ord[t]);
            acc += prod;
        } while (std::next_permutation(ord.begin(), ord.end()));
    }
    return static_cast<int>(acc % T.p());
}

// E_{h in V^k} e(T(h)/p) by direct summation over V^k.
std::complex<double> naive_bias(const MultilinearTable& T) {
    const Space V(T.p(), T.n());
    const int k = T.arity();
    const std::uint64_t total = ipow(V.size(), k);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(T.p()), 0);
    std::vector<std::uint64_t> h(static_cast<std::size_t>(k));
    for (std::uint64_t c = 0; c < total; ++c) {
        std::uint64_t rest = c;
        for (auto& v : h) {
            v = rest % V.size();
            rest /= V.size();
        }
        ++counts[static_cast<std::size_t>(T(V, h))];
    }
    std::complex<double> s = 0;
    for (int j = 0; j < T.p(); ++j) s += static_cast<double>(counts[j]) * std::polar(1.0, 2 * M_PI * j / T.p());
    return s / static_cast<double>(total);
}

double as_double(const Rational& r) { return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()); }

std::vector<std::vector<std::uint64_t>> all_classical(const Space& V, int d) {
    std::vector<Term> monos;
    for (const auto& s : slots(V, d))
        if (s.depth == 0) monos.push_back(s);
    std::vector<std::vector<std::uint64_t>> out;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << monos.size()); ++mask) {
        CanonicalForm f{TorusValue::zero(2), {}};
        for (std::size_t i = 0; i < monos.size(); ++i)
            if (mask >> i & 1) f.terms.push_back(monos[i]);
        std::vector<std::uint64_t> t;
        tabulate_form(V, normalize_form(V, f), 1, t);
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

TEST(Multilinear, SecondDerivativeOfS2) {
    const Space V(2, 5);
    const CSMForm B = dk_extract_csm(S(V, 2), 2);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) EXPECT_EQ(B.table().at({i, j}), i != j ? 1 : 0);
    EXPECT_EQ(B.coeffs().size(), 10u);
}

TEST(Multilinear, LinearExtraction) {
    const Space V(3, 3);
    const NCPoly x1 = NCPoly::classical(V, [&](std::uint64_t x) { return V.digit(x, 0); });
    const CSMForm T = dk_extract_csm(x1, 1);
    SplitMix64 rng(1);
    for (int t = 0; t < 20; ++t) {
        const auto h = random_args(V, 1, rng);
        EXPECT_EQ(T(V, h), V.digit(h[0], 0));
    }
}

TEST(Multilinear, FourthDerivativeOfS4IsSymSquare) {
    const Space V(2, 4);
    const CSMForm B = dk_extract_csm(S(V, 2), 2);
    EXPECT_EQ(dk_extract_csm(S(V, 4), 4), sym_power(B, 2));
    EXPECT_EQ(dk_extract(S(V, 4), 4), sym_power(B, 2).table());
}

TEST(Multilinear, ExtractionRejectsHighDegree) {
    const Space V(2, 4);
    EXPECT_THROW(dk_extract(S(V, 3), 2), Error);
    const NCPoly raw(V, 1, oracle::symmetric(V, 3));
    EXPECT_THROW(dk_extract(raw, 2), Error);
}

TEST(Multilinear, ExtractionMatchesDerivativesEverywhere) {
    SplitMix64 rng(2);
    for (int p : {2, 3}) {
        const Space V(p, 3);
        for (int trial = 0; trial < 20; ++trial) {
            const int k = 2 + static_cast<int>(rng.below(3));
            const NCPoly P = random_poly(V, k, rng);
            const MultilinearTable T = dk_extract(P, k);
            EXPECT_TRUE(T.is_symmetric());
            for (int t = 0; t < 10; ++t) {
                const auto h = random_args(V, k, rng);
                const std::uint64_t x = rng.below(V.size());
                EXPECT_EQ(TorusValue::iota(p, T(V, h)), iterated_derivative(P, h, x));
            }
        }
    }
}

TEST(Multilinear, ClassicalPolynomialsGiveClassicalForms) {
    SplitMix64 rng(3);
    for (int p : {2, 3, 5}) {
        const Space V(p, 3);
        for (int trial = 0; trial < 30; ++trial) {
            const int k = 1 + static_cast<int>(rng.below(4));
            const NCPoly P = random_classical(V, k, rng);
            EXPECT_TRUE(dk_extract(P, k).is_classical()) << "p=" << p << " k=" << k;
        }
    }
}

TEST(Multilinear, EvaluationMatchesOrderingSum) {
    SplitMix64 rng(4);
    for (int p : {2, 3, 5}) {
        const Space V(p, 3);
        for (int k = 1; k <= 4; ++k) {
            const CSMForm T = random_form(p, 3, k, rng);
            for (int t = 0; t < 20; ++t) {
                const auto h = random_args(V, k, rng);
                EXPECT_EQ(T(V, h), reference_eval(T, V, h));
            }
        }
    }
}

TEST(Multilinear, FormsAreSymmetricUnderAllPermutations) {
    SplitMix64 rng(5);
    for (int p : {2, 3}) {
        const Space V(p, 3);
        std::vector<CSMForm> forms;
        for (int k = 1; k <= 4; ++k) forms.push_back(random_form(p, 3, k, rng));
        forms.push_back(concat(forms[0], forms[2]));
        forms.push_back(sym_power(forms[1], 2));
        for (const auto& T : forms) {
            for (int t = 0; t < 5; ++t) {
                const auto h = random_args(V, T.arity(), rng);
                std::vector<std::size_t> perm(h.size());
                std::iota(perm.begin(), perm.end(), 0);
                const int base = T(V, h);
                do {
                    std::vector<std::uint64_t> g;
                    for (auto i : perm) g.push_back(h[i]);
                    EXPECT_EQ(T(V, g), base);
                } while (std::next_permutation(perm.begin(), perm.end()));
            }
        }
    }
}

TEST(Multilinear, ConcatSixTermExpansion) {
    SplitMix64 rng(6);
    const Space V(3, 3);
    const CSMForm Sf = random_form(3, 3, 2, rng), Tf = random_form(3, 3, 2, rng);
    const CSMForm C = concat(Sf, Tf);
    for (int t = 0; t < 50; ++t) {
        const auto h = random_args(V, 4, rng);
        const auto a = h[0], b = h[1], c = h[2], d = h[3];
        const int expect = Sf(V, {a, b}) * Tf(V, {c, d}) + Sf(V, {a, c}) * Tf(V, {b, d}) + Sf(V, {a, d}) * Tf(V, {b, c}) +
                           Sf(V, {b, c}) * Tf(V, {a, d}) + Sf(V, {b, d}) * Tf(V, {a, c}) + Sf(V, {c, d}) * Tf(V, {a, b});
        EXPECT_EQ(C(V, h), expect % 3);
    }
    EXPECT_TRUE(concat(Sf, CSMForm(3, 3, 3)).coeffs().empty());
}

TEST(Multilinear, ConcatProductRuleExample) {
    const Space V(2, 4);
    const NCPoly prod = multiply_classical(S(V, 1), S(V, 2));
    EXPECT_EQ(dk_extract_csm(prod, 3), concat(dk_extract_csm(S(V, 1), 1), dk_extract_csm(S(V, 2), 2)));
}

TEST(Multilinear, ConcatIsBilinearCommutativeAssociative) {
    SplitMix64 rng(7);
    for (int p : {2, 3, 5}) {
        for (int trial = 0; trial < 5; ++trial) {
            const CSMForm A = random_form(p, 3, 1, rng), A2 = random_form(p, 3, 1, rng);
            const CSMForm B = random_form(p, 3, 2, rng), C = random_form(p, 3, 2, rng);
            EXPECT_EQ(concat(A, B), concat(B, A));
            EXPECT_EQ(concat(concat(A, B), C), concat(A, concat(B, C)));
            CSMForm sum(p, 3, 1);
            for (const auto& m : multisets(3, 1, p)) sum.set(m, A.coeff(m) + A2.coeff(m));
            CSMForm expect(p, 3, 3);
            const CSMForm l = concat(A, B), r = concat(A2, B);
            for (const auto& m : multisets(3, 3, p)) expect.set(m, l.coeff(m) + r.coeff(m));
            EXPECT_EQ(concat(sum, B), expect);
        }
    }
}

TEST(Multilinear, ProductRuleExhaustiveOnF2Cubed) {
    const Space V(2, 3);
    std::vector<std::vector<std::vector<std::uint64_t>>> by_degree(4);
    for (int d = 1; d <= 3; ++d) by_degree[d] = all_classical(V, d);
    int checked = 0;
    for (int k = 1; k <= 3; ++k)
        for (int l = 1; k + l <= 4; ++l)
            for (const auto& tp : by_degree[k])
                for (const auto& tq : by_degree[l]) {
                    const NCPoly P(V, 1, tp), Q(V, 1, tq);
                    const CSMForm lhs = dk_extract_csm(multiply_classical(P, Q), k + l);
                    ASSERT_EQ(lhs, concat(dk_extract_csm(P, k), dk_extract_csm(Q, l)));
                    ++checked;
                }
    EXPECT_GT(checked, 4000);
}

TEST(Multilinear, SymPowerExamples) {
    SplitMix64 rng(8);
    const Space V(3, 3);
    const CSMForm T = random_form(3, 3, 2, rng);
    EXPECT_EQ(sym_power(T, 1), T);
    const CSMForm S2 = sym_power(T, 2);
    for (int t = 0; t < 50; ++t) {
        const auto h = random_args(V, 4, rng);
        const auto a = h[0], b = h[1], c = h[2], d = h[3];
        const int expect = T(V, {a, b}) * T(V, {c, d}) + T(V, {a, c}) * T(V, {b, d}) + T(V, {a, d}) * T(V, {b, c});
        EXPECT_EQ(S2(V, h), expect % 3);
    }
    EXPECT_THROW(sym_power(random_form(3, 3, 1, rng), 2), Error);
    EXPECT_THROW(sym_power(T, 0), Error);
}

TEST(Multilinear, FactorialSymPowerIsIteratedConcat) {
    SplitMix64 rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        const CSMForm T = random_form(5, 3, 2, rng);
        const CSMForm lhs = sym_power(T, 2), rhs = concat(T, T);
        for (const auto& m : multisets(3, 4, 5)) EXPECT_EQ(2 * lhs.coeff(m) % 5, rhs.coeff(m));
    }
    const CSMForm T = random_form(7, 3, 2, rng);
    const CSMForm lhs = sym_power(T, 3), rhs = concat(concat(T, T), T);
    for (const auto& m : multisets(3, 6, 7)) EXPECT_EQ(6 * lhs.coeff(m) % 7, rhs.coeff(m));
}

TEST(Multilinear, AntiderivativeExamples) {
    EXPECT_TRUE(antiderivative(CSMForm(3, 2, 2)).is_zero());
    CSMForm lin(3, 2, 1);
    lin.set({0}, 1);
    const Space V(3, 2);
    EXPECT_EQ(antiderivative(lin), NCPoly::classical(V, [&](std::uint64_t x) { return V.digit(x, 0); }));

    const Space W(2, 4);
    const CSMForm B = dk_extract_csm(S(W, 2), 2);
    const NCPoly P = antiderivative(B);
    EXPECT_EQ(dk_extract_csm(P, 2), B);
    EXPECT_LE(degree(P - S(W, 2)), 1);
}

TEST(Multilinear, AntiderivativeRoundTrip) {
    SplitMix64 rng(10);
    for (auto [p, n, k] : {std::tuple{2, 4, 3}, {3, 3, 3}, {3, 3, 4}, {5, 2, 4}, {7, 2, 3}}) {
        for (int trial = 0; trial < 10; ++trial) {
            const CSMForm T = random_form(p, n, k, rng);
            const NCPoly P = antiderivative(T);
            EXPECT_TRUE(P.is_classical());
            EXPECT_LE(degree(P), k);
            EXPECT_EQ(dk_extract_csm(P, k), T);
        }
    }
}

TEST(Multilinear, LucasBinomials) {
    for (int p : {2, 3, 5, 7})
        for (std::uint64_t n = 0; n < 60; ++n)
            for (std::uint64_t m = 0; m <= n + 2; ++m)
                EXPECT_EQ(binom_mod_p(n, m, p), oracle::binom(static_cast<long>(n), static_cast<long>(m)) % p);
}

TEST(Multilinear, BinomialLiftOfS2) {
    const Space V(2, 5);
    const NCPoly Q = binomial_lift_power(S(V, 2), 2, 2);
    EXPECT_TRUE(Q.is_classical());
    const CSMForm B = dk_extract_csm(S(V, 2), 2);
    EXPECT_EQ(dk_extract_csm(Q, 4), sym_power(B, 2));
    EXPECT_LE(degree(Q - S(V, 4)), 3);
    EXPECT_EQ(binomial_lift_power(S(V, 2), 2, 1), S(V, 2));
    EXPECT_THROW(binomial_lift_power(NCPoly(V, 2, oracle::table(V, 2, [&](std::uint64_t x) { return V.digit_sum(x); })), 2, 2),
                 Error);
}

TEST(Multilinear, BinomialLiftSymPowers) {
    SplitMix64 rng(11);
    for (auto [p, n, k, m] : {std::tuple{3, 2, 2, 3}, {3, 3, 2, 3}, {3, 3, 2, 2}, {2, 6, 2, 3}, {5, 3, 2, 2}, {2, 4, 2, 2}}) {
        for (int trial = 0; trial < 3; ++trial) {
            const Space V(p, n);
            const NCPoly P = random_classical(V, k, rng);
            const NCPoly Q = binomial_lift_power(P, k, m);
            EXPECT_TRUE(Q.is_classical());
            EXPECT_EQ(dk_extract_csm(Q, m * k), sym_power(dk_extract_csm(P, k), m)) << p << " " << n << " " << m;
        }
    }
}

TEST(Multilinear, BiasExamples) {
    EXPECT_EQ(bias(CSMForm(2, 4, 3)).value, Rational(1));
    for (int n = 1; n <= 8; ++n) {
        CSMForm dot(2, n, 2);
        EXPECT_THROW(dot.set({0, 0}, 1), Error);
        MultilinearTable T(2, n, 2);
        for (int i = 0; i < n; ++i) T.set({i, i}, 1);
        EXPECT_EQ(bias(T).value, Rational(1, 1 << n));
    }
    MultilinearTable T3(3, 3, 2);
    for (int i = 0; i < 3; ++i) T3.set({i, i}, 1);
    EXPECT_EQ(bias(T3).value, Rational(1, 27));
}

TEST(Multilinear, BiasOfD4S4) {
    const Space V4(2, 4);
    const MultilinearTable T = dk_extract(S(V4, 4), 4);
    const BiasResult fast = bias(T);
    EXPECT_NEAR(as_double(fast.value), naive_bias(T).real(), 1e-12);
    EXPECT_NEAR(naive_bias(T).imag(), 0, 1e-12);
    EXPECT_EQ(fast.value, Rational(197, 512));
    std::vector<Rational> seq;
    for (int n = 4; n <= 9; ++n) seq.push_back(bias(dk_extract(S(Space(2, n), 4), 4)).value);
    for (std::size_t i = 0; i + 1 < seq.size(); i += 2) EXPECT_EQ(seq[i], seq[i + 1]);
    for (std::size_t i = 2; i < seq.size(); i += 2)
        EXPECT_LT(abs(seq[i] - Rational(1, 8)), abs(seq[i - 2] - Rational(1, 8)));
    EXPECT_GT(seq.back(), Rational(1, 8));
    EXPECT_THROW(bias(dk_extract(S(Space(2, 9), 4), 4), 1 << 20), BudgetExceeded);
}

TEST(Multilinear, BiasFastPathMatchesNaiveExhaustively) {
    for (int p : {2, 3}) {
        for (int n = 1; n <= 3; ++n) {
            for (int k = 1; k <= 3; ++k) {
                const auto keys = multisets(n, k, k + 1);
                const std::uint64_t count = ipow(p, static_cast<int>(keys.size()));
                const bool exhaustive = count * ipow(ipow(p, n), k) <= (std::uint64_t{1} << 26);
                SplitMix64 rng(static_cast<std::uint64_t>(100 * p + 10 * n + k));
                const std::uint64_t iterations = exhaustive ? count : 200;
                for (std::uint64_t c = 0; c < iterations; ++c) {
                    std::uint64_t code = exhaustive ? c : rng.below(count);
                    std::map<Multiset, int> vals;
                    for (const auto& A : keys) {
                        vals[A] = static_cast<int>(code % p);
                        code /= p;
                    }
                    MultilinearTable T(p, n, k);
                    for (std::uint64_t o = 0; o < T.size(); ++o) {
                        std::vector<int> idx(static_cast<std::size_t>(k));
                        std::uint64_t rest = o;
                        for (int t = k - 1; t >= 0; --t) {
                            idx[t] = static_cast<int>(rest % n);
                            rest /= n;
                        }
                        std::sort(idx.begin(), idx.end());
                        T.data()[o] = static_cast<std::uint8_t>(vals[idx]);
                    }
                    const auto naive = naive_bias(T);
                    ASSERT_NEAR(as_double(bias(T).value), naive.real(), 1e-12) << p << " " << n << " " << k;
                    ASSERT_NEAR(naive.imag(), 0, 1e-12);
                }
            }
        }
    }
}

TEST(Multilinear, BiasIsThreadCountInvariant) {
    const MultilinearTable T = dk_extract(S(Space(2, 6), 4), 4);
    const unsigned before = thread_count();
    set_thread_count(1);
    const auto a = bias(T);
    set_thread_count(4);
    const auto b = bias(T);
    set_thread_count(before);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.zero_count, b.zero_count);
}

TEST(Multilinear, BiasRespectsBudget) {
    const MultilinearTable T(2, 6, 3);
    EXPECT_THROW(bias(T, 1000), BudgetExceeded);
    EXPECT_EQ(bias(T, 1 << 20).value, Rational(1));
}

TEST(Multilinear, DkpIdentity) {
    const Space V(2, 3);
    const NCPoly L8(V, 3, oracle::table(V, 3, [&](std::uint64_t x) { return V.digit_sum(x); }));
    const DkpReport rep = check_dkp(L8, 3);
    EXPECT_EQ(rep.checked, 64u);
    EXPECT_TRUE(rep.pass());

    SplitMix64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const NCPoly P = random_poly(V, 4, rng);
        EXPECT_TRUE(check_dkp(P, 4).pass());
    }
    const Space W(3, 2);
    for (int trial = 0; trial < 10; ++trial) {
        const NCPoly P = random_poly(W, 4, rng);
        EXPECT_TRUE(check_dkp(P, 4).pass());
        EXPECT_TRUE(check_dkp(P, 4, 200, 5).pass());
    }
    for (int trial = 0; trial < 10; ++trial) {
        const NCPoly P = random_classical(V, 3, rng);
        for (std::uint64_t h = 0; h < V.size(); ++h)
            EXPECT_TRUE(iterated_derivative(P, {h, h, rng.below(V.size())}).is_zero());
        EXPECT_TRUE(check_dkp(P, 3).pass());
    }
    EXPECT_THROW(check_dkp(L8, 1), Error);
}

TEST(Multilinear, DkpSymmetryConstraint) {
    SplitMix64 rng(13);
    for (int p : {2, 3}) {
        const Space V(p, 3);
        const int k = p + 2;
        for (int trial = 0; trial < 10; ++trial) {
            const NCPoly P = random_poly(V, k, rng);
            for (int t = 0; t < 20; ++t) {
                const auto a = rng.below(V.size()), b = rng.below(V.size());
                std::vector<std::uint64_t> h1(p, a), h2{a};
                h1.push_back(b);
                for (int i = 0; i < p; ++i) h2.push_back(b);
                while (static_cast<int>(h1.size()) < k) {
                    const auto c = rng.below(V.size());
                    h1.push_back(c);
                    h2.push_back(c);
                }
                EXPECT_EQ(iterated_derivative(P, h1), iterated_derivative(P, h2));
            }
        }
    }
}
