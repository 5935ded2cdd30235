#include "hofa/weighted.hpp"

#include <algorithm>

namespace hofa {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 inverse_mod(u64 a, u64 m) {
    __int128 t = 0, nt = 1, r = m, nr = a % m;
    while (nr != 0) {
        const __int128 q = r / nr;
        t -= q * nt;
        std::swap(t, nt);
        r -= q * nr;
        std::swap(r, nr);
    }
    if (r != 1) throw Error("not invertible");
    if (t < 0) t += m;
    return static_cast<u64>(t);
}

// Strips factors of p from |v|, returning the valuation; v becomes the unit part.
int strip(u64& v, u64 p) {
    int k = 0;
    while (v % p == 0) {
        v /= p;
        ++k;
    }
    return k;
}

void require_initial_degrees(const std::vector<int>& D) {
    for (int d : D)
        if (d < 1) throw Error("initial degrees must be >= 1");
}

}  // namespace

u64 binom_mod_prime_power(std::int64_t x, int i, int p, int e) {
    const u64 M = ipow(static_cast<u64>(p), e);
    if (M == 1 || i < 0) return 0;
    if (i == 0) return 1;
    bool negative = false;
    if (x < 0) {
        x = static_cast<std::int64_t>(i) - x - 1;
        negative = i % 2 == 1;
    }
    if (x < i) return 0;
    int v = 0;
    u64 num = 1, den = 1;
    const auto pp = static_cast<u64>(p);
    for (int k = 0; k < i; ++k) {
        u64 a = static_cast<u64>(x - k), b = static_cast<u64>(k + 1);
        v += strip(a, pp);
        v -= strip(b, pp);
        num = mulmod(num, a % M, M);
        den = mulmod(den, b % M, M);
    }
    if (v >= e) return 0;
    u64 r = mulmod(mulmod(num, inverse_mod(den, M), M), ipow(pp, v), M);
    if (negative && r != 0) r = M - r;
    return r;
}

// ---------------------------------------------------------------------------

WeightedPoly::WeightedPoly(int p, std::vector<int> D) : p_(p), D_(std::move(D)), alpha_(TorusValue::zero(p)) {
    (void)PrimeField(p);
    require_initial_degrees(D_);
}

WeightedPoly::WeightedPoly(int p, std::vector<int> D, TorusValue alpha, const std::map<std::vector<int>, TorusValue>& terms)
    : WeightedPoly(p, std::move(D)) {
    if (alpha.p() != p) throw DimensionMismatch("alpha has a different prime");
    alpha_ = alpha;
    for (const auto& [i, a] : terms) add_term(i, a);
}

void WeightedPoly::add_term(const std::vector<int>& i, const TorusValue& a) {
    if (static_cast<int>(i.size()) != m()) throw DimensionMismatch("term index has wrong dimension");
    if (a.p() != p_) throw DimensionMismatch("coefficient has a different prime");
    for (int v : i)
        if (v < 0) throw Error("term index must be nonnegative");
    if (std::all_of(i.begin(), i.end(), [](int v) { return v == 0; })) {
        alpha_ = alpha_ + a;
        return;
    }
    const TorusValue sum = terms_.count(i) ? terms_.at(i) + a : a;
    if (sum.is_zero())
        terms_.erase(i);
    else
        terms_[i] = sum;
}

TorusValue WeightedPoly::operator()(const std::vector<std::int64_t>& x) const {
    if (static_cast<int>(x.size()) != m()) throw DimensionMismatch("point has wrong dimension");
    TorusValue acc = alpha_;
    for (const auto& [i, a] : terms_) {
        const u64 M = ipow(static_cast<u64>(p_), a.exp());
        u64 b = 1;
        for (int t = 0; t < m() && b != 0; ++t) b = mulmod(b, binom_mod_prime_power(x[t], i[t], p_, a.exp()), M);
        acc = acc + torus_scale(static_cast<std::int64_t>(b), a);
    }
    return acc;
}

int WeightedPoly::term_degree(const std::vector<int>& i) const {
    const auto it = terms_.find(i);
    if (it == terms_.end()) throw Error("no such term");
    int d = (it->second.exp() - 1) * (p_ - 1);
    for (int t = 0; t < m(); ++t) d += D_[t] * i[t];
    return d;
}

WeightedPoly operator+(const WeightedPoly& f, const WeightedPoly& g) {
    if (f.p() != g.p() || f.initial_degrees() != g.initial_degrees())
        throw DimensionMismatch("weighted polynomials on different filtrations");
    WeightedPoly r = f;
    r.add_term(std::vector<int>(static_cast<std::size_t>(f.m()), 0), g.alpha());
    for (const auto& [i, a] : g.terms()) r.add_term(i, a);
    return r;
}

WeightedPoly scale(std::int64_t c, const WeightedPoly& f) {
    std::map<std::vector<int>, TorusValue> terms;
    for (const auto& [i, a] : f.terms()) terms.emplace(i, torus_scale(c, a));
    return WeightedPoly(f.p(), f.initial_degrees(), torus_scale(c, f.alpha()), terms);
}

int weighted_degree(const WeightedPoly& f) {
    if (f.is_zero()) return kNegInfDegree;
    int d = 0;
    for (const auto& [i, a] : f.terms()) d = std::max(d, f.term_degree(i));
    return d;
}

int period_exponent(int p, int D, int d) {
    if (d < D) return 0;
    return (d - D) / (p - 1) + 1;
}

// ---------------------------------------------------------------------------

PeriodicTable::PeriodicTable(int p, std::vector<int> D, std::vector<int> K, int E, std::vector<u64> residues)
    : p_(p), D_(std::move(D)), K_(std::move(K)), E_(E), table_(std::move(residues)) {
    (void)PrimeField(p);
    require_initial_degrees(D_);
    if (K_.size() != D_.size()) throw DimensionMismatch("one period exponent per coordinate");
    if (E_ < 0 || E_ > max_exponent(p)) throw Error("value exponent out of range");
    u64 size = 1;
    for (int k : K_) {
        if (k < 0) throw Error("period exponent must be >= 0");
        stride_.push_back(size);
        if (__builtin_mul_overflow(size, ipow(static_cast<u64>(p), k), &size)) throw BudgetExceeded("period box too large");
    }
    if (size > (u64{1} << 26)) throw BudgetExceeded("period box too large");
    if (table_.size() != size) throw DimensionMismatch("table size differs from the period box");
    const u64 M = ipow(static_cast<u64>(p), E_);
    for (auto& v : table_) v %= M;
}

PeriodicTable PeriodicTable::sample(int p, std::vector<int> D, std::vector<int> K, int E,
                                    const std::function<TorusValue(const std::vector<std::int64_t>&)>& fn) {
    u64 size = 1, twice = 1;
    std::vector<u64> N;
    for (int k : K) {
        N.push_back(ipow(static_cast<u64>(p), k));
        size *= N.back();
        twice *= 2 * N.back();
    }
    if (twice > (u64{1} << 24)) throw BudgetExceeded("period box too large");
    std::vector<u64> table(size);
    std::vector<std::int64_t> x(K.size());
    for (u64 c = 0; c < twice; ++c) {
        u64 rest = c, idx = 0, stride = 1;
        bool base = true;
        for (std::size_t t = 0; t < K.size(); ++t) {
            x[t] = static_cast<std::int64_t>(rest % (2 * N[t]));
            rest /= 2 * N[t];
            base = base && static_cast<u64>(x[t]) < N[t];
            idx += (static_cast<u64>(x[t]) % N[t]) * stride;
            stride *= N[t];
        }
        const TorusValue v = fn(x);
        if (v.exp() > E) throw Error("sampled value outside (1/p^E)Z/Z");
        if (base) {
            table[idx] = v.residue_at(E);
        }
    }
    PeriodicTable T(p, std::move(D), K, E, std::move(table));
    for (u64 c = 0; c < twice; ++c) {
        u64 rest = c;
        for (std::size_t t = 0; t < K.size(); ++t) {
            x[t] = static_cast<std::int64_t>(rest % (2 * N[t]));
            rest /= 2 * N[t];
        }
        if (!(fn(x) == T(x))) throw Error("non-periodic input: declared periods do not hold");
    }
    return T;
}

PeriodicTable PeriodicTable::from_poly(const WeightedPoly& f, int guard) {
    const int d = std::max(weighted_degree(f), 0);
    std::vector<int> K;
    for (int D : f.initial_degrees()) K.push_back(period_exponent(f.p(), D, d) + guard);
    int E = f.alpha().exp();
    for (const auto& [i, a] : f.terms()) E = std::max(E, a.exp());
    std::vector<u64> N;
    u64 size = 1;
    for (int k : K) {
        N.push_back(ipow(static_cast<u64>(f.p()), k));
        size *= N.back();
    }
    if (size > (u64{1} << 26)) throw BudgetExceeded("period box too large");
    std::vector<u64> table(size);
    std::vector<std::int64_t> x(K.size());
    for (u64 c = 0; c < size; ++c) {
        u64 rest = c;
        for (std::size_t t = 0; t < K.size(); ++t) {
            x[t] = static_cast<std::int64_t>(rest % N[t]);
            rest /= N[t];
        }
        table[c] = f(x).residue_at(E);
    }
    return PeriodicTable(f.p(), f.initial_degrees(), std::move(K), E, std::move(table));
}

u64 PeriodicTable::index(const std::vector<std::int64_t>& x) const {
    if (x.size() != K_.size()) throw DimensionMismatch("point has wrong dimension");
    u64 idx = 0;
    for (std::size_t t = 0; t < K_.size(); ++t) {
        const auto N = static_cast<std::int64_t>(ipow(static_cast<u64>(p_), K_[t]));
        idx += static_cast<u64>(((x[t] % N) + N) % N) * stride_[t];
    }
    return idx;
}

std::vector<std::int64_t> PeriodicTable::point(u64 index) const {
    std::vector<std::int64_t> x(K_.size());
    for (std::size_t t = 0; t < K_.size(); ++t) {
        const u64 N = ipow(static_cast<u64>(p_), K_[t]);
        x[t] = static_cast<std::int64_t>(index % N);
        index /= N;
    }
    return x;
}

PeriodicTable PeriodicTable::derivative(int i, int j) const {
    if (i < 0 || i >= m()) throw DimensionMismatch("coordinate out of range");
    const u64 N = ipow(static_cast<u64>(p_), K_[i]);
    const u64 shift = j >= K_[i] ? 0 : ipow(static_cast<u64>(p_), j);
    const u64 M = ipow(static_cast<u64>(p_), E_);
    std::vector<u64> out(table_.size());
    for (u64 c = 0; c < table_.size(); ++c) {
        const u64 digit = c / stride_[i] % N;
        const u64 target = c + (((digit + shift) % N) - digit) * stride_[i];
        out[c] = (table_[target] + M - table_[c]) % M;
    }
    return PeriodicTable(p_, D_, K_, E_, std::move(out));
}

bool PeriodicTable::is_zero() const {
    return std::all_of(table_.begin(), table_.end(), [](u64 v) { return v == 0; });
}

int weighted_degree(const PeriodicTable& f) {
    if (f.is_zero()) return kNegInfDegree;
    struct Gen {
        int i, j, deg;
    };
    std::vector<Gen> gens;
    for (int i = 0; i < f.m(); ++i)
        for (int j = 0; j < f.period_exponents()[i]; ++j)
            gens.push_back({i, j, f.initial_degrees()[i] + j * (f.p() - 1)});
    int best = 0;
    std::function<void(const PeriodicTable&, std::size_t, int, int)> search = [&](const PeriodicTable& g, std::size_t first,
                                                                                 int deg, int depth) {
        if (depth > 256) throw BudgetExceeded("weighted degree search too deep");
        for (std::size_t k = first; k < gens.size(); ++k) {
            PeriodicTable h = g.derivative(gens[k].i, gens[k].j);
            if (h.is_zero()) continue;
            best = std::max(best, deg + gens[k].deg);
            search(h, k, deg + gens[k].deg, depth + 1);
        }
    };
    search(f, 0, 0, 0);
    return best;
}

WeightedPoly binomial_expand(const PeriodicTable& f, int d) {
    const int m = f.m(), p = f.p();
    WeightedPoly out(p, f.initial_degrees());
    if (f.is_zero()) return out;
    if (d < 0) throw Error("exceeds degree bound: nonzero input with negative bound");
    std::vector<u64> B;
    u64 size = 1;
    for (int t = 0; t < m; ++t) {
        B.push_back(static_cast<u64>(d / f.initial_degrees()[t]) + 1);
        size *= B.back();
    }
    if (size > (u64{1} << 26)) throw BudgetExceeded("binomial box too large");
    const u64 M = ipow(static_cast<u64>(p), f.exponent());
    std::vector<u64> v(size);
    auto decode = [&](u64 c) {
        std::vector<std::int64_t> x(static_cast<std::size_t>(m));
        for (int t = 0; t < m; ++t) {
            x[t] = static_cast<std::int64_t>(c % B[t]);
            c /= B[t];
        }
        return x;
    };
    for (u64 c = 0; c < size; ++c) v[c] = f.residues()[f.index(decode(c))];
    u64 stride = 1;
    for (int t = 0; t < m; ++t) {
        for (u64 c = 0; c < size; ++c) {
            if (c / stride % B[t] != 0) continue;
            for (u64 k = 1; k < B[t]; ++k)
                for (u64 pos = B[t] - 1; pos >= k; --pos) {
                    u64& hi = v[c + pos * stride];
                    hi = (hi + M - v[c + (pos - 1) * stride]) % M;
                }
        }
        stride *= B[t];
    }
    for (u64 c = 0; c < size; ++c) {
        if (v[c] == 0) continue;
        const auto x = decode(c);
        out.add_term(std::vector<int>(x.begin(), x.end()), TorusValue(p, v[c], f.exponent()));
    }
    for (const auto& [i, a] : out.terms())
        if (out.term_degree(i) > d)
            throw Error("exceeds degree bound: term of weighted degree " + std::to_string(out.term_degree(i)));
    for (u64 c = 0; c < f.size(); ++c)
        if (!(out(f.point(c)) == f(f.point(c)))) throw Error("exceeds degree bound: residual nonzero");
    return out;
}

WeightedPoly weighted_pth_root(const WeightedPoly& f) {
    const int p = f.p();
    auto root = [p](const TorusValue& a) { return a.is_zero() ? a : TorusValue(p, a.num(), a.exp() + 1); };
    std::map<std::vector<int>, TorusValue> terms;
    for (const auto& [i, a] : f.terms()) terms.emplace(i, root(a));
    return WeightedPoly(p, f.initial_degrees(), root(f.alpha()), terms);
}

// ---------------------------------------------------------------------------

bool PeriodicityReport::pass() const {
    if (!remainder_periodic) return false;
    for (const auto& q : periods)
        if (!q.holds) return false;
    for (const auto& t : tops)
        if (!t.constant) return false;
    return true;
}

PeriodicityReport periodicity_check(const WeightedPoly& f, int d) {
    const int p = f.p(), m = f.m();
    std::vector<u64> N;
    u64 size = 1;
    for (int t = 0; t < m; ++t) {
        N.push_back(ipow(static_cast<u64>(p), period_exponent(p, f.initial_degrees()[t], d) + 1));
        size *= N.back();
    }
    if (size > (u64{1} << 22)) throw BudgetExceeded("periodicity domain too large");
    auto point = [&](u64 c) {
        std::vector<std::int64_t> x(static_cast<std::size_t>(m));
        for (int t = 0; t < m; ++t) {
            x[t] = static_cast<std::int64_t>(c % N[t]);
            c /= N[t];
        }
        return x;
    };
    auto has_period = [&](const std::function<TorusValue(const std::vector<std::int64_t>&)>& g, int i, u64 period) {
        for (u64 c = 0; c < size; ++c) {
            auto x = point(c);
            const TorusValue v = g(x);
            x[i] += static_cast<std::int64_t>(period);
            if (!(g(x) == v)) return false;
        }
        return true;
    };
    const auto eval = [&](const std::vector<std::int64_t>& x) { return f(x); };

    PeriodicityReport rep;
    WeightedPoly linear(p, f.initial_degrees());
    for (int i = 0; i < m; ++i) {
        const int D = f.initial_degrees()[i];
        const int j = period_exponent(p, D, d);
        const u64 period = ipow(static_cast<u64>(p), j);
        rep.periods.push_back({i, j, period, has_period(eval, i, period)});
        if (d < D || (d - D) % (p - 1) != 0) continue;
        const int ji = (d - D) / (p - 1);
        const u64 step = ipow(static_cast<u64>(p), ji);
        PeriodicityReport::Top top{i, ji, true, 0};
        std::optional<TorusValue> value;
        for (u64 c = 0; c < size && top.constant; ++c) {
            auto x = point(c);
            const TorusValue base = f(x);
            x[i] += static_cast<std::int64_t>(step);
            const TorusValue diff = f(x) - base;
            if (!value) value = diff;
            top.constant = *value == diff;
        }
        if (top.constant && value->exp() > 1) top.constant = false;
        if (top.constant) {
            top.c = static_cast<int>(value->residue_at(1));
            std::vector<int> e(static_cast<std::size_t>(m), 0);
            e[i] = 1;
            linear.add_term(e, TorusValue::from_residue(p, top.c, ji + 1));
        }
        rep.tops.push_back(top);
    }
    const WeightedPoly rest = f + scale(-1, linear);
    const auto eval_rest = [&](const std::vector<std::int64_t>& x) { return rest(x); };
    for (const auto& top : rep.tops)
        if (top.constant && !has_period(eval_rest, top.coord, ipow(static_cast<u64>(p), top.j))) rep.remainder_periodic = false;
    return rep;
}

// ---------------------------------------------------------------------------

int Factor::degree() const {
    int d = kNegInfDegree;
    for (int i = 0; i < dimension(); ++i) d = std::max(d, D[i] + depth(i) * (p - 1));
    return d;
}

FactorCheck verify_factor(const Factor& F) {
    FactorCheck c;
    if (F.D.size() != F.chains.size()) throw DimensionMismatch("one initial degree per chain");
    for (int i = 0; i < F.dimension(); ++i) {
        const std::string tag = "i=" + std::to_string(i + 1);
        if (F.D[i] < 2) {
            c.initial_degrees = false;
            c.failures.push_back(tag + ": initial degree below 2");
        }
        if (F.chains[i].empty()) throw Error("empty chain in factor");
        for (int j = 0; j <= F.depth(i); ++j) {
            const NCPoly& P = F.chains[i][j];
            if (P.p() != F.p) throw DimensionMismatch("chain polynomial has a different prime");
            const std::string at = tag + " j=" + std::to_string(j);
            const NCPoly below = j == 0 ? NCPoly::zero(P.space()) : F.chains[i][j - 1];
            require_same_space(P.space(), below.space(), "factor");
            if (!(scale(F.p, P) == below)) {
                c.chain = false;
                c.failures.push_back(at + ": p P_{i,j} != P_{i,j-1}");
            }
            if (degree(P) > F.D[i] + j * (F.p - 1)) {
                c.degrees = false;
                c.failures.push_back(at + ": degree " + degree_str(degree(P)) + " exceeds D_i + j(p-1)");
            }
            if (P.exponent() > j + 1) {
                c.value_ranges = false;
                c.failures.push_back(at + ": values outside (1/p^{j+1})Z/Z");
            }
        }
    }
    return c;
}

Factor factor_depth_extend(const Factor& F, const std::vector<int>& new_depths, int max_degree) {
    if (static_cast<int>(new_depths.size()) != F.dimension()) throw DimensionMismatch("one depth per chain");
    Factor G = F;
    for (int i = 0; i < F.dimension(); ++i) {
        if (new_depths[i] < F.depth(i)) throw Error("depth extension cannot lower a depth");
        if (F.D[i] + new_depths[i] * (F.p - 1) > max_degree) throw BudgetExceeded("depth extension exceeds the degree budget");
        while (G.depth(i) < new_depths[i]) G.chains[i].push_back(pth_root(G.chains[i].back()));
    }
    return G;
}

Factor factor_retract(const Factor& F, int d) {
    Factor G{F.p, {}, {}, F.regular_assumed};
    for (int i = 0; i < F.dimension(); ++i) {
        std::vector<NCPoly> chain;
        for (int j = 0; j <= F.depth(i); ++j)
            if (F.D[i] + j * (F.p - 1) <= d) chain.push_back(F.chains[i][j]);
        if (chain.empty()) continue;
        G.D.push_back(F.D[i]);
        G.chains.push_back(std::move(chain));
    }
    return G;
}

NCPoly factor_pullback(const Factor& F, const WeightedPoly& f) {
    if (f.p() != F.p || f.initial_degrees() != F.D) throw DimensionMismatch("weighted polynomial does not match the factor");
    if (F.dimension() == 0) throw Error("pullback through an empty factor");
    const PeriodicTable T = PeriodicTable::from_poly(f, 0);
    for (int i = 0; i < F.dimension(); ++i) {
        const int K = F.depth(i) + 1;
        if (K >= T.period_exponents()[i]) continue;
        if (!T.derivative(i, K).is_zero()) throw Error("weighted polynomial is not periodic with period p^{J_i+1} e_i");
    }
    const Space& V = F.chains[0][0].space();
    std::vector<TorusValue> values(V.size());
    std::vector<std::int64_t> a(static_cast<std::size_t>(F.dimension()));
    for (u64 x = 0; x < V.size(); ++x) {
        for (int i = 0; i < F.dimension(); ++i) a[i] = static_cast<std::int64_t>(F.chains[i].back().residue(x, F.depth(i) + 1));
        values[x] = T(a);
    }
    return NCPoly::from_values(V, values);
}

}  // namespace hofa
