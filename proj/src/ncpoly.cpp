#include "hofa/ncpoly.hpp"

#include <algorithm>
#include <array>
#include <mutex>

namespace hofa {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) {
    if ((a | b) >> 32 == 0) return a * b % m;
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

// p x p matrix stored row-major; p <= 13.
struct Matrix {
    int p = 0;
    std::array<u64, kMaxPrime * kMaxPrime> a{};
    u64& at(int r, int c) { return a[static_cast<std::size_t>(r * p + c)]; }
    u64 at(int r, int c) const { return a[static_cast<std::size_t>(r * p + c)]; }
};

// Row x, column i: x^i mod m for x, i in 0..p-1 (0^0 = 1).
Matrix monomial_matrix(int p, u64 m) {
    Matrix M;
    M.p = p;
    for (int x = 0; x < p; ++x) {
        u64 v = 1 % m;
        for (int i = 0; i < p; ++i) {
            M.at(x, i) = v;
            v = mulmod(v, static_cast<u64>(x), m);
        }
    }
    return M;
}

Matrix inverse_mod_p(Matrix A, int p) {
    const PrimeField F(p);
    Matrix I;
    I.p = p;
    for (int i = 0; i < p; ++i) I.at(i, i) = 1;
    auto swap_rows = [p](Matrix& M, int r, int s) {
        for (int c = 0; c < p; ++c) std::swap(M.at(r, c), M.at(s, c));
    };
    for (int col = 0; col < p; ++col) {
        int piv = col;
        while (A.at(piv, col) % p == 0) ++piv;
        swap_rows(A, piv, col);
        swap_rows(I, piv, col);
        const auto inv = static_cast<u64>(F.inv(static_cast<int>(A.at(col, col) % p)));
        for (int c = 0; c < p; ++c) {
            A.at(col, c) = A.at(col, c) * inv % p;
            I.at(col, c) = I.at(col, c) * inv % p;
        }
        for (int r = 0; r < p; ++r) {
            if (r == col || A.at(r, col) == 0) continue;
            const u64 f = A.at(r, col);
            for (int c = 0; c < p; ++c) {
                A.at(r, c) = (A.at(r, c) + (p - f) * A.at(col, c)) % p;
                I.at(r, c) = (I.at(r, c) + (p - f) * I.at(col, c)) % p;
            }
        }
    }
    return I;
}

const Matrix& vandermonde_inverse(int p) {
    static std::array<Matrix, kMaxPrime + 1> cache;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int q = 2; q <= kMaxPrime; ++q)
            if (is_prime(q)) cache[q] = inverse_mod_p(monomial_matrix(q, static_cast<u64>(q)), q);
    });
    return cache[p];
}

// a <- (M applied along every axis) a, entries mod m.
void transform_axes(const Space& V, std::vector<u64>& a, const Matrix& M, u64 m) {
    const int p = V.p();
    const u64 size = V.size();
    if (p == 2 && (m & (m - 1)) == 0) {
        const u64 mask = m - 1;
        const u64 m00 = M.at(0, 0), m01 = M.at(0, 1), m10 = M.at(1, 0), m11 = M.at(1, 1);
        for (int t = 0; t < V.n(); ++t) {
            const u64 bit = u64{1} << t;
            for (u64 base = 0; base < size; ++base) {
                if (base & bit) continue;
                const u64 v0 = a[base], v1 = a[base | bit];
                a[base] = (m00 * v0 + m01 * v1) & mask;
                a[base | bit] = (m10 * v0 + m11 * v1) & mask;
            }
        }
        return;
    }
    const bool narrow = m <= (u64{1} << 28);
    std::array<u64, kMaxPrime> line{};
    for (int t = 0; t < V.n(); ++t) {
        const u64 w = V.weight(t);
        for (u64 base = 0; base < size; ++base) {
            if (V.digit(base, t) != 0) continue;
            for (int i = 0; i < p; ++i) line[i] = a[base + i * w];
            for (int x = 0; x < p; ++x) {
                if (narrow) {
                    u64 s = 0;
                    for (int i = 0; i < p; ++i) s += M.at(x, i) * line[i];
                    a[base + x * w] = s % m;
                } else {
                    u128 s = 0;
                    for (int i = 0; i < p; ++i) s += static_cast<u128>(M.at(x, i)) * line[i];
                    a[base + x * w] = static_cast<u64>(s % m);
                }
            }
        }
    }
}

bool all_zero(const std::vector<u64>& a) {
    return std::all_of(a.begin(), a.end(), [](u64 v) { return v == 0; });
}

void derivative_into(const Space& V, const std::vector<u64>& in, int t, u64 m, std::vector<u64>& out) {
    out.resize(in.size());
    if (V.p() == 2) {
        const u64 bit = u64{1} << t;
        for (u64 x = 0; x < in.size(); ++x) out[x] = (in[x ^ bit] + m - in[x]) % m;
        return;
    }
    const u64 w = V.weight(t);
    const int p = V.p();
    for (u64 x = 0; x < in.size(); ++x) {
        const u64 y = V.digit(x, t) < p - 1 ? x + w : x - static_cast<u64>(p - 1) * w;
        out[x] = (in[y] + m - in[x]) % m;
    }
}

}  // namespace

std::string degree_str(int d) { return d == kNegInfDegree ? "-inf" : std::to_string(d); }

int form_degree(const Space& V, const CanonicalForm& f) {
    int d = f.alpha.is_zero() ? kNegInfDegree : 0;
    for (const auto& t : f.terms) d = std::max(d, V.digit_sum(t.mono) + t.depth * (V.p() - 1));
    return d;
}

int form_exponent(const CanonicalForm& f) {
    int K = f.alpha.exp();
    for (const auto& t : f.terms) K = std::max(K, t.depth + 1);
    return K;
}

CanonicalForm normalize_form(const Space& V, CanonicalForm f) {
    const int p = V.p();
    if (f.alpha.p() != p) {
        if (!f.alpha.is_zero()) throw Error("constant term over a different prime");
        f.alpha = TorusValue::zero(p);
    }
    std::vector<Term> terms;
    for (auto t : f.terms) {
        if (t.mono >= V.size()) throw DimensionMismatch("monomial outside the exponent box");
        if (t.depth < 0) throw Error("negative term depth");
        t.coeff = ((t.coeff % p) + p) % p;
        if (t.coeff == 0) continue;
        if (t.mono == 0) {
            f.alpha = f.alpha + TorusValue(p, static_cast<u64>(t.coeff), t.depth + 1);
            continue;
        }
        terms.push_back(t);
    }
    std::sort(terms.begin(), terms.end());
    for (std::size_t i = 1; i < terms.size(); ++i)
        if (terms[i].depth == terms[i - 1].depth && terms[i].mono == terms[i - 1].mono)
            throw Error("duplicate term in canonical form");
    f.terms = std::move(terms);
    return f;
}

void tabulate_form(const Space& V, const CanonicalForm& f, int K, std::vector<u64>& out) {
    if (K < form_exponent(f)) throw Error("tabulate_form: exponent too small");
    const u64 m = ipow(static_cast<u64>(V.p()), K);
    out.assign(V.size(), 0);
    std::array<u64, 64> scale_at_depth{};
    for (int j = 0; j < K; ++j) scale_at_depth[j] = ipow(static_cast<u64>(V.p()), K - 1 - j);
    for (const auto& t : f.terms)
        out[t.mono] = (out[t.mono] + mulmod(static_cast<u64>(t.coeff), scale_at_depth[t.depth], m)) % m;
    if (!f.terms.empty()) transform_axes(V, out, monomial_matrix(V.p(), m), m);
    const u64 a = f.alpha.residue_at(K) % m;
    if (a != 0)
        for (auto& v : out) v = (v + a) % m;
}

namespace {

// Digit arithmetic with a compile-time prime where it matters (p = 2).
template <int P>
struct Digits {
    u64 p;
    u64 mod(u64 v) const { return P ? v % P : v % p; }
    u64 div(u64 v) const { return P ? v / P : v / p; }
};

template <int P>
CanonicalForm interpolate_impl(const Space& V, const std::vector<u64>& residues, int K) {
    const int p = V.p();
    const Digits<P> dig{static_cast<u64>(p)};
    u64 m = ipow(static_cast<u64>(p), K);
    thread_local std::vector<u64> R, layer;
    R.resize(residues.size());
    layer.resize(residues.size());
    for (std::size_t x = 0; x < R.size(); ++x) R[x] = residues[x] % m;

    CanonicalForm f;
    f.alpha = TorusValue(p, R[0], K);
    const u64 a0 = R[0];
    if (a0 != 0)
        for (auto& v : R) v = (v + m - a0) % m;

    int cur = K;
    while (cur > 0) {
        while (cur > 0 && std::all_of(R.begin(), R.end(), [&](u64 v) { return dig.mod(v) == 0; })) {
            for (auto& v : R) v = dig.div(v);
            --cur;
        }
        if (cur == 0) break;
        m = ipow(static_cast<u64>(p), cur);
        for (std::size_t x = 0; x < R.size(); ++x) layer[x] = dig.mod(R[x]);
        transform_axes(V, layer, vandermonde_inverse(p), static_cast<u64>(p));
        for (u64 i = 0; i < layer.size(); ++i)
            if (layer[i] != 0) f.terms.push_back(Term{i, cur - 1, static_cast<int>(layer[i])});
        transform_axes(V, layer, monomial_matrix(p, m), m);
        if (P == 2) {
            for (std::size_t x = 0; x < R.size(); ++x) R[x] = (R[x] - layer[x]) & (m - 1);
        } else {
            for (std::size_t x = 0; x < R.size(); ++x) R[x] = (R[x] + m - layer[x]) % m;
        }
    }
    std::sort(f.terms.begin(), f.terms.end());
    return f;
}

}  // namespace

CanonicalForm interpolate(const Space& V, const std::vector<u64>& residues, int K, int d_max) {
    if (residues.size() != V.size()) throw DimensionMismatch("value table has wrong size");
    CanonicalForm f = V.p() == 2 ? interpolate_impl<2>(V, residues, K) : interpolate_impl<0>(V, residues, K);
    if (d_max >= 0 && form_degree(V, f) > d_max)
        throw NotAPolynomial("not a polynomial of degree <= " + std::to_string(d_max));
    return f;
}

namespace {

struct DerivativeSearch {
    const Space& V;
    u64 m;
    int d_max;
    int best = 0;
    std::vector<std::vector<u64>>& levels;

    // Depth-first over nondecreasing direction sequences; zero derivatives are leaves.
    void run(int level, int first) {
        best = std::max(best, level);
        if (d_max >= 0 && level > d_max) throw BudgetExceeded("degree search exceeded " + std::to_string(d_max));
        if (static_cast<int>(levels.size()) <= level + 1) levels.emplace_back(levels[0].size());
        const u64 size = levels[0].size();
        for (int t = first; t < V.n(); ++t) {
            // The recursion may grow `levels`, so re-fetch both buffers.
            const auto& in = levels[level];
            auto& out = levels[level + 1];
            u64 any = 0;
            if (V.p() == 2) {
                const u64 bit = u64{1} << t, mask = m - 1;
                for (u64 x = 0; x < size; ++x) any |= out[x] = (in[x ^ bit] - in[x]) & mask;
            } else {
                derivative_into(V, in, t, m, out);
                for (u64 x = 0; x < size; ++x) any |= out[x];
            }
            if (any != 0) run(level + 1, t);
        }
    }
};

}  // namespace

int degree_by_derivatives(const Space& V, const std::vector<u64>& residues, int K, int d_max) {
    if (residues.size() != V.size()) throw DimensionMismatch("value table has wrong size");
    if (all_zero(residues)) return kNegInfDegree;
    thread_local std::vector<std::vector<u64>> scratch;
    if (scratch.empty()) scratch.emplace_back();
    scratch[0] = residues;
    for (auto& level : scratch) level.resize(residues.size());
    DerivativeSearch search{V, ipow(static_cast<u64>(V.p()), K), d_max, 0, scratch};
    search.run(0, 0);
    return search.best;
}

// ---------------------------------------------------------------------------

NCPoly::NCPoly(Space V, int K, std::vector<u64> residues) : V_(std::move(V)), K_(K), table_(std::move(residues)) {
    if (table_.size() != V_.size()) throw DimensionMismatch("value table has wrong size");
    if (K < 0) throw Error("negative exponent");
    normalize();
}

void NCPoly::normalize() {
    const auto p = static_cast<u64>(V_.p());
    const u64 m = ipow(p, K_);
    for (auto& v : table_) v %= m;
    while (K_ > 0 && std::all_of(table_.begin(), table_.end(), [p](u64 v) { return v % p == 0; })) {
        for (auto& v : table_) v /= p;
        --K_;
    }
}

NCPoly NCPoly::zero(const Space& V) {
    NCPoly P(V, 0, std::vector<u64>(V.size(), 0));
    P.form_ = CanonicalForm{TorusValue::zero(V.p()), {}};
    return P;
}

NCPoly NCPoly::constant(const Space& V, const TorusValue& a) {
    return from_form(V, CanonicalForm{a, {}});
}

NCPoly NCPoly::from_values(const Space& V, const std::vector<TorusValue>& values) {
    if (values.size() != V.size()) throw DimensionMismatch("value table has wrong size");
    int K = 0;
    for (const auto& v : values) {
        if (v.p() != V.p() && !v.is_zero()) throw Error("value over a different prime");
        K = std::max(K, v.exp());
    }
    std::vector<u64> r(values.size());
    for (std::size_t x = 0; x < r.size(); ++x) r[x] = values[x].is_zero() ? 0 : values[x].residue_at(K);
    return NCPoly(V, K, std::move(r));
}

NCPoly NCPoly::from_form(const Space& V, CanonicalForm f) {
    f = normalize_form(V, std::move(f));
    const int K = form_exponent(f);
    std::vector<u64> r;
    tabulate_form(V, f, K, r);
    NCPoly P(V, K, std::move(r));
    P.form_ = std::move(f);
    return P;
}

NCPoly NCPoly::classical(const Space& V, const std::function<int(u64)>& F) {
    const PrimeField field(V.p());
    std::vector<u64> r(V.size());
    for (u64 x = 0; x < V.size(); ++x) r[x] = static_cast<u64>(field.reduce(F(x)));
    return NCPoly(V, 1, std::move(r));
}

NCPoly NCPoly::tabulate(const Space& V, int K, const std::function<std::int64_t(u64)>& r) {
    const auto m = static_cast<std::int64_t>(ipow(static_cast<u64>(V.p()), K));
    std::vector<u64> t(V.size());
    for (u64 x = 0; x < V.size(); ++x) {
        std::int64_t v = r(x) % m;
        t[x] = static_cast<u64>(v < 0 ? v + m : v);
    }
    return NCPoly(V, K, std::move(t));
}

TorusValue NCPoly::eval(const FVec& x) const { return (*this)(x.code(V_)); }

u64 NCPoly::residue(u64 x, int K) const {
    if (K < K_) throw Error("residue: exponent below polynomial exponent");
    return table_[x] * ipow(static_cast<u64>(V_.p()), K - K_);
}

std::vector<TorusValue> NCPoly::values() const {
    std::vector<TorusValue> v;
    v.reserve(table_.size());
    for (u64 x = 0; x < table_.size(); ++x) v.push_back((*this)(x));
    return v;
}

CanonicalForm NCPoly::canonical() const {
    if (form_) return *form_;
    return interpolate(V_, table_, K_);
}

NCPoly NCPoly::with_form() const {
    NCPoly P = *this;
    if (!P.form_) P.form_ = interpolate(V_, table_, K_);
    return P;
}

int NCPoly::field_value(u64 x) const {
    if (!is_classical()) throw Error("field_value of a non-classical polynomial");
    return static_cast<int>(K_ == 0 ? 0 : table_[x]);
}

namespace {

NCPoly combine(const NCPoly& a, const NCPoly& b, std::int64_t sb) {
    require_same_space(a.space(), b.space(), "polynomial arithmetic");
    const int K = std::max(a.exponent(), b.exponent());
    const u64 m = ipow(static_cast<u64>(a.p()), K);
    const u64 sa_lift = ipow(static_cast<u64>(a.p()), K - a.exponent());
    const u64 sb_lift = ipow(static_cast<u64>(a.p()), K - b.exponent());
    std::vector<u64> r(a.residues().size());
    for (std::size_t x = 0; x < r.size(); ++x) {
        const u64 av = mulmod(a.residues()[x], sa_lift, m);
        const u64 bv = mulmod(b.residues()[x], sb_lift, m);
        r[x] = sb > 0 ? (av + bv) % m : (av + m - bv) % m;
    }
    return NCPoly(a.space(), K, std::move(r));
}

}  // namespace

NCPoly operator+(const NCPoly& a, const NCPoly& b) { return combine(a, b, 1); }
NCPoly operator-(const NCPoly& a, const NCPoly& b) { return combine(a, b, -1); }
NCPoly operator-(const NCPoly& a) { return NCPoly::zero(a.space()) - a; }

NCPoly scale(std::int64_t c, const NCPoly& a) {
    const u64 m = ipow(static_cast<u64>(a.p()), a.exponent());
    const auto mm = static_cast<std::int64_t>(m);
    const auto cc = static_cast<u64>(((c % mm) + mm) % mm);
    std::vector<u64> r(a.residues().size());
    for (std::size_t x = 0; x < r.size(); ++x) r[x] = mulmod(a.residues()[x], cc, m);
    return NCPoly(a.space(), a.exponent(), std::move(r));
}

NCPoly shift(const NCPoly& P, u64 h) {
    const Space& V = P.space();
    if (h >= V.size()) throw DimensionMismatch("shift vector outside the space");
    std::vector<u64> r(V.size());
    for (u64 x = 0; x < V.size(); ++x) r[x] = P.residues()[V.add(x, h)];
    return NCPoly(V, P.exponent(), std::move(r));
}

NCPoly derivative(const NCPoly& P, u64 h) { return shift(P, h) - P; }

NCPoly derivative(const NCPoly& P, const FVec& h) { return derivative(P, h.code(P.space())); }

int degree(const NCPoly& P) {
    if (P.has_form()) return form_degree(P.space(), P.canonical());
    return degree_by_derivatives(P);
}

int degree_by_derivatives(const NCPoly& P, int d_max) {
    return degree_by_derivatives(P.space(), P.residues(), P.exponent(), d_max);
}

NCPoly mul_by_p(const NCPoly& P) {
    NCPoly Q = scale(P.p(), P);
    if (!P.has_form()) return Q;
    CanonicalForm f = P.canonical();
    CanonicalForm g{P.p() * f.alpha, {}};
    for (const auto& t : f.terms)
        if (t.depth > 0) g.terms.push_back(Term{t.mono, t.depth - 1, t.coeff});
    return NCPoly::from_form(P.space(), std::move(g));
}

NCPoly pth_root(const NCPoly& P) {
    const CanonicalForm f = P.canonical();
    CanonicalForm g;
    g.alpha = f.alpha.is_zero() ? f.alpha : TorusValue(P.p(), f.alpha.num(), f.alpha.exp() + 1);
    g.terms.reserve(f.terms.size());
    for (const auto& t : f.terms) g.terms.push_back(Term{t.mono, t.depth + 1, t.coeff});
    return NCPoly::from_form(P.space(), std::move(g));
}

NCPoly multiply_classical(const NCPoly& P, const NCPoly& Q) {
    require_same_space(P.space(), Q.space(), "multiply_classical");
    if (!P.is_classical() || !Q.is_classical()) throw Error("multiply_classical: non-classical input");
    const Space& V = P.space();
    const auto p = static_cast<u64>(V.p());
    std::vector<u64> r(V.size());
    for (u64 x = 0; x < V.size(); ++x)
        r[x] = static_cast<u64>(P.field_value(x)) * static_cast<u64>(Q.field_value(x)) % p;
    return NCPoly(V, 1, std::move(r));
}

std::uint64_t value_count(const NCPoly& P) {
    std::vector<u64> v = P.residues();
    std::sort(v.begin(), v.end());
    return static_cast<std::uint64_t>(std::unique(v.begin(), v.end()) - v.begin());
}

std::uint64_t value_count_bound(int p, int d) {
    if (d <= 0) return 1;
    return ipow(static_cast<u64>(p), (d - 1) / (p - 1) + 1);
}

// ---------------------------------------------------------------------------

PolyFamily::PolyFamily(const Space& V, int d, bool modulo_constants, std::uint64_t cap)
    : V_(V), d_(d), modulo_constants_(modulo_constants) {
    if (d < 0) throw Error("PolyFamily: negative degree");
    const int p = V.p();
    for (int j = 0; d - j * (p - 1) >= 1; ++j)
        for (u64 i = 1; i < V.size(); ++i) {
            const int s = V.digit_sum(i);
            if (s <= d - j * (p - 1)) slots_.push_back(Slot{i, j});
        }
    alpha_exp_ = modulo_constants ? 0 : std::max(d - 1, 0) / (p - 1) + 1;
    const int digits = static_cast<int>(slots_.size()) + alpha_exp_;
    count_ = 1;
    for (int i = 0; i < digits; ++i) {
        if (count_ > cap / static_cast<u64>(p))
            throw BudgetExceeded("polynomial family of degree " + std::to_string(d) + " on F_" + std::to_string(p) + "^" +
                                 std::to_string(V.n()) + " exceeds the enumeration cap");
        count_ *= static_cast<u64>(p);
    }
}

int PolyFamily::max_exponent() const {
    int K = alpha_exp_;
    for (const auto& s : slots_) K = std::max(K, s.depth + 1);
    return K;
}

CanonicalForm PolyFamily::form(std::uint64_t index) const {
    if (index >= count_) throw Error("PolyFamily index out of range");
    const int p = V_.p();
    const auto pp = static_cast<u64>(p);
    CanonicalForm f;
    f.terms.reserve(slots_.size());
    if (alpha_exp_ > 0) {
        const u64 am = ipow(pp, alpha_exp_);
        f.alpha = TorusValue(p, index % am, alpha_exp_);
        index /= am;
    } else {
        f.alpha = TorusValue::zero(p);
    }
    if (p == 2) {
        for (const auto& s : slots_) {
            if (index & 1) f.terms.push_back(Term{s.mono, s.depth, 1});
            index >>= 1;
        }
        return f;
    }
    for (const auto& s : slots_) {
        const auto c = static_cast<int>(index % pp);
        index /= pp;
        if (c != 0) f.terms.push_back(Term{s.mono, s.depth, c});
    }
    return f;
}

}  // namespace hofa
