#include "hofa/multilinear.hpp"

#include <algorithm>
#include <functional>

#include "hofa/parallel.hpp"
#include "hofa/rng.hpp"

namespace hofa {

namespace {

using u64 = std::uint64_t;

u64 checked_power(u64 base, int e, const char* what) {
    u64 r = 1;
    for (int i = 0; i < e; ++i)
        if (__builtin_mul_overflow(r, base, &r)) throw BudgetExceeded(std::string(what) + " overflows");
    return r;
}

std::vector<int> decode_tuple(u64 index, int n, int k) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int t = k - 1; t >= 0; --t) {
        idx[static_cast<std::size_t>(t)] = static_cast<int>(index % static_cast<u64>(n));
        index /= static_cast<u64>(n);
    }
    return idx;
}

int max_multiplicity(const std::vector<int>& sorted) {
    int best = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        best = std::max(best, static_cast<int>(j - i));
        i = j;
    }
    return best;
}

}  // namespace

MultilinearTable::MultilinearTable(int p, int n, int k) : p_(p), n_(n), k_(k) {
    PrimeField{p};
    if (n < 1 || k < 1) throw Error("multilinear table needs n >= 1 and k >= 1");
    data_.assign(checked_power(static_cast<u64>(n), k, "multilinear table size"), 0);
    if (data_.size() > (u64{1} << 28)) throw BudgetExceeded("multilinear table too large");
}

u64 MultilinearTable::offset(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != k_) throw DimensionMismatch("index tuple has wrong arity");
    u64 o = 0;
    for (int i : idx) {
        if (i < 0 || i >= n_) throw DimensionMismatch("coordinate index out of range");
        o = o * static_cast<u64>(n_) + static_cast<u64>(i);
    }
    return o;
}

void MultilinearTable::set(const std::vector<int>& idx, int v) {
    data_[offset(idx)] = static_cast<std::uint8_t>(((v % p_) + p_) % p_);
}

int MultilinearTable::operator()(const Space& V, const std::vector<u64>& h) const {
    if (V.p() != p_ || V.n() != n_ || static_cast<int>(h.size()) != k_)
        throw DimensionMismatch("multilinear evaluation: argument shape");
    std::vector<int> cur(data_.begin(), data_.end());
    for (int t = 0; t < k_; ++t) {
        const u64 block = cur.size() / static_cast<u64>(n_);
        std::vector<int> next(block, 0);
        for (int i = 0; i < n_; ++i) {
            const int hi = V.digit(h[static_cast<std::size_t>(t)], i);
            if (hi == 0) continue;
            for (u64 b = 0; b < block; ++b) next[b] = (next[b] + hi * cur[i * block + b]) % p_;
        }
        cur = std::move(next);
    }
    return cur[0];
}

bool MultilinearTable::is_symmetric() const {
    for (u64 o = 0; o < data_.size(); ++o) {
        auto idx = decode_tuple(o, n_, k_);
        std::sort(idx.begin(), idx.end());
        if (data_[o] != data_[offset(idx)]) return false;
    }
    return true;
}

bool MultilinearTable::is_classical() const {
    if (!is_symmetric()) return false;
    for (u64 o = 0; o < data_.size(); ++o) {
        if (data_[o] == 0) continue;
        auto idx = decode_tuple(o, n_, k_);
        std::sort(idx.begin(), idx.end());
        if (max_multiplicity(idx) >= p_) return false;
    }
    return true;
}

bool MultilinearTable::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v == 0; });
}

// ---------------------------------------------------------------------------

CSMForm::CSMForm(int p, int n, int k) : p_(p), n_(n), k_(k) {
    PrimeField{p};
    if (n < 1 || k < 1) throw Error("CSM form needs n >= 1 and k >= 1");
}

int CSMForm::coeff(const Multiset& A) const {
    const auto it = coeffs_.find(A);
    return it == coeffs_.end() ? 0 : it->second;
}

void CSMForm::set(Multiset A, int c) {
    if (static_cast<int>(A.size()) != k_) throw DimensionMismatch("multiset has wrong size");
    std::sort(A.begin(), A.end());
    for (int i : A)
        if (i < 0 || i >= n_) throw DimensionMismatch("multiset index out of range");
    c = ((c % p_) + p_) % p_;
    if (max_multiplicity(A) >= p_) {
        if (c != 0) throw Error("multiplicity >= p in a classical form");
        return;
    }
    if (c == 0)
        coeffs_.erase(A);
    else
        coeffs_[A] = c;
}

MultilinearTable CSMForm::table() const {
    MultilinearTable T(p_, n_, k_);
    for (u64 o = 0; o < T.size(); ++o) {
        auto idx = decode_tuple(o, n_, k_);
        std::sort(idx.begin(), idx.end());
        T.data()[o] = static_cast<std::uint8_t>(coeff(idx));
    }
    return T;
}

int CSMForm::operator()(const Space& V, const std::vector<u64>& h) const { return table()(V, h); }

CSMForm CSMForm::from_table(const MultilinearTable& T) {
    if (!T.is_classical()) throw Error("table is not a classical symmetric form");
    CSMForm S(T.p(), T.n(), T.arity());
    for (const auto& A : multisets(T.n(), T.arity(), T.p()))
        if (int c = T.at(A); c != 0) S.coeffs_[A] = c;
    return S;
}

std::vector<Multiset> multisets(int n, int k, int max_mult) {
    std::vector<Multiset> out;
    Multiset cur;
    std::function<void(int)> rec = [&](int first) {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int i = first; i < n; ++i) {
            int mult = 0;
            for (int j : cur) mult += j == i;
            if (mult + 1 >= max_mult) continue;
            cur.push_back(i);
            rec(i);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

// ---------------------------------------------------------------------------

TorusValue iterated_derivative(const NCPoly& P, const std::vector<u64>& h, u64 x) {
    const Space& V = P.space();
    const auto r = static_cast<int>(h.size());
    if (r > 30) throw BudgetExceeded("too many derivative directions");
    const u64 m = ipow(static_cast<u64>(V.p()), P.exponent());
    u64 acc = 0;
    for (u64 S = 0; S < (u64{1} << r); ++S) {
        u64 point = x;
        for (int t = 0; t < r; ++t)
            if (S >> t & 1) point = V.add(point, h[static_cast<std::size_t>(t)]);
        const u64 v = P.residues()[point];
        const bool negative = (r - __builtin_popcountll(S)) % 2 == 1;
        acc = negative ? (acc + m - v) % m : (acc + v) % m;
    }
    return TorusValue(V.p(), acc, P.exponent());
}

namespace {

void require_degree_at_most(const NCPoly& P, int k) {
    int d;
    if (P.has_form()) {
        d = degree(P);
    } else {
        try {
            d = degree_by_derivatives(P, k);
        } catch (const BudgetExceeded&) {
            d = k + 1;
        }
    }
    if (d > k) throw Error("degree exceeds " + std::to_string(k) + ": d^k P would depend on x");
}

}  // namespace

MultilinearTable dk_extract(const NCPoly& P, int k) {
    require_degree_at_most(P, k);
    const Space& V = P.space();
    MultilinearTable T(V.p(), V.n(), k);
    std::map<Multiset, int> value;
    for (const auto& A : multisets(V.n(), k, k + 1)) {
        std::vector<u64> h;
        for (int i : A) h.push_back(V.basis(i));
        const TorusValue v = iterated_derivative(P, h);
        if (v.exp() > 1) throw Error("d^k P left iota(F): " + v.str());
        value[A] = static_cast<int>(v.residue_at(1));
    }
    for (u64 o = 0; o < T.size(); ++o) {
        auto idx = decode_tuple(o, V.n(), k);
        std::sort(idx.begin(), idx.end());
        T.data()[o] = static_cast<std::uint8_t>(value[idx]);
    }
    return T;
}

CSMForm dk_extract_csm(const NCPoly& P, int k) {
    if (!P.is_classical()) throw Error("dk_extract_csm: non-classical polynomial");
    return CSMForm::from_table(dk_extract(P, k));
}

namespace {

// Calls fn(blocks) for each partition of positions {0..total-1} into blocks
// of size k, each block listed in increasing order.
void block_partitions(int total, int k, const std::function<void(const std::vector<std::vector<int>>&)>& fn) {
    std::vector<bool> used(static_cast<std::size_t>(total), false);
    std::vector<std::vector<int>> blocks;
    std::function<void()> rec = [&] {
        int anchor = 0;
        while (anchor < total && used[anchor]) ++anchor;
        if (anchor == total) {
            fn(blocks);
            return;
        }
        std::vector<int> block{anchor};
        used[anchor] = true;
        std::function<void(int)> choose = [&](int from) {
            if (static_cast<int>(block.size()) == k) {
                blocks.push_back(block);
                rec();
                blocks.pop_back();
                return;
            }
            for (int q = from; q < total; ++q) {
                if (used[q]) continue;
                used[q] = true;
                block.push_back(q);
                choose(q + 1);
                block.pop_back();
                used[q] = false;
            }
        };
        choose(anchor + 1);
        used[anchor] = false;
    };
    rec();
}

Multiset pick(const Multiset& C, const std::vector<int>& positions) {
    Multiset A;
    for (int q : positions) A.push_back(C[q]);
    std::sort(A.begin(), A.end());
    return A;
}

}  // namespace

CSMForm concat(const CSMForm& S, const CSMForm& T) {
    if (S.p() != T.p() || S.n() != T.n()) throw DimensionMismatch("concat: forms on different spaces");
    const int p = S.p(), k = S.arity(), l = T.arity(), total = k + l;
    CSMForm R(p, S.n(), total);
    if (S.coeffs().empty() || T.coeffs().empty()) return R;
    for (const auto& C : multisets(S.n(), total, p)) {
        int acc = 0;
        for (u64 mask = 0; mask < (u64{1} << total); ++mask) {
            if (__builtin_popcountll(mask) != k) continue;
            std::vector<int> a, b;
            for (int q = 0; q < total; ++q) (mask >> q & 1 ? a : b).push_back(q);
            acc = (acc + S.coeff(pick(C, a)) * T.coeff(pick(C, b))) % p;
        }
        if (acc != 0) R.set(C, acc);
    }
    return R;
}

CSMForm sym_power(const CSMForm& T, int m) {
    const int p = T.p(), k = T.arity();
    if (k < 2) throw Error("symmetric power needs arity >= 2");
    if (m < 1) throw Error("symmetric power needs m >= 1");
    if (m == 1) return T;
    CSMForm R(p, T.n(), m * k);
    if (T.coeffs().empty()) return R;
    for (const auto& C : multisets(T.n(), m * k, p)) {
        int acc = 0;
        block_partitions(m * k, k, [&](const std::vector<std::vector<int>>& blocks) {
            int prod = 1;
            for (const auto& b : blocks) {
                prod = prod * T.coeff(pick(C, b)) % p;
                if (prod == 0) break;
            }
            acc = (acc + prod) % p;
        });
        if (acc != 0) R.set(C, acc);
    }
    return R;
}

NCPoly antiderivative(const CSMForm& T) {
    const int p = T.p();
    const PrimeField F(p);
    const Space V(p, T.n());
    CanonicalForm f{TorusValue::zero(p), {}};
    std::map<u64, int> mono_coeff;
    for (const auto& [A, c] : T.coeffs()) {
        u64 mono = 0;
        int coeff = c;
        for (std::size_t i = 0; i < A.size();) {
            std::size_t j = i;
            while (j < A.size() && A[j] == A[i]) ++j;
            const int a = static_cast<int>(j - i);
            int fact = 1;
            for (int q = 2; q <= a; ++q) fact = fact * q % p;
            coeff = F.mul(coeff, F.inv(fact));
            mono += static_cast<u64>(a) * V.weight(A[i]);
            i = j;
        }
        mono_coeff[mono] = F.add(mono_coeff[mono], coeff);
    }
    for (const auto& [mono, c] : mono_coeff)
        if (c != 0) f.terms.push_back(Term{mono, 0, c});
    return NCPoly::from_form(V, std::move(f));
}

int binom_mod_p(u64 n, u64 m, int p) {
    const auto pp = static_cast<u64>(p);
    int r = 1;
    while (n > 0 || m > 0) {
        const u64 a = n % pp, b = m % pp;
        if (b > a) return 0;
        u64 c = 1;
        for (u64 i = 1; i <= b; ++i) c = c * (a - b + i) / i;
        r = static_cast<int>(r * (c % pp) % pp);
        n /= pp;
        m /= pp;
    }
    return r;
}

NCPoly binomial_lift_power(const NCPoly& P, int k, int m) {
    if (!P.is_classical()) throw Error("binomial_lift_power: non-classical input");
    if (k < 2) throw Error("binomial_lift_power: arity must be >= 2");
    if (m < 1) throw Error("binomial_lift_power: m must be >= 1");
    if (degree(P) > k) throw Error("binomial_lift_power: degree exceeds k");
    const int p = P.p();
    int M = 0;
    while (static_cast<u64>(m) >= ipow(static_cast<u64>(p), M + 1)) ++M;
    NCPoly lift = P;
    for (int i = 0; i < M; ++i) lift = pth_root(lift);
    const Space& V = P.space();
    std::vector<u64> q(V.size());
    for (u64 x = 0; x < V.size(); ++x) q[x] = static_cast<u64>(binom_mod_p(lift.residue(x, M + 1), static_cast<u64>(m), p));
    return NCPoly(V, 1, std::move(q));
}

// ---------------------------------------------------------------------------

namespace {

// p = 2: the last argument is packed into a bitmask, so a tensor with r
// remaining arguments is n^{r-1} masks.
struct BinaryBias {
    int n;
    u64 size;
    std::vector<std::vector<u64>> scratch;

    u64 run(const std::vector<u64>& M, int r) {
        if (r == 2) {
            u64 count = 0, mask = 0;
            for (u64 c = 0;; ++c) {
                count += mask == 0;
                if (c + 1 == size) break;
                mask ^= M[static_cast<std::size_t>(__builtin_ctzll(c + 1))];
            }
            return count;
        }
        const u64 block = M.size() / static_cast<u64>(n);
        auto& child = scratch[static_cast<std::size_t>(r)];
        child.assign(block, 0);
        u64 count = 0;
        for (u64 c = 0;; ++c) {
            count += run(child, r - 1);
            if (c + 1 == size) break;
            const u64* row = &M[static_cast<u64>(__builtin_ctzll(c + 1)) * block];
            for (u64 b = 0; b < block; ++b) child[b] ^= row[b];
        }
        return count;
    }
};

// General p: digits stored one per byte; a tensor with r remaining
// arguments is n^r digits. Enumeration follows the modular p-ary Gray code,
// whose step from counter c adds +1 to the digit indexed by the number of
// trailing (p-1) digits of c.
struct DigitBias {
    int p, n;
    u64 size;
    std::vector<std::vector<std::uint8_t>> scratch;
    std::vector<std::vector<int>> counters;

    int step(std::vector<int>& digits) const {
        int t = 0;
        while (digits[static_cast<std::size_t>(t)] == p - 1) digits[static_cast<std::size_t>(t++)] = 0;
        ++digits[static_cast<std::size_t>(t)];
        return t;
    }

    u64 run(const std::vector<std::uint8_t>& M, int r) {
        auto& digits = counters[static_cast<std::size_t>(r)];
        digits.assign(static_cast<std::size_t>(n) + 1, 0);
        const u64 block = M.size() / static_cast<u64>(n);
        auto& child = scratch[static_cast<std::size_t>(r)];
        child.assign(block, 0);
        u64 count = 0;
        int nonzero = 0;
        for (u64 c = 0;; ++c) {
            count += r == 2 ? (nonzero == 0) : run(child, r - 1);
            if (c + 1 == size) break;
            const std::uint8_t* row = &M[static_cast<u64>(step(digits)) * block];
            for (u64 b = 0; b < block; ++b) {
                const int old = child[b];
                int v = old + row[b];
                if (v >= p) v -= p;
                child[b] = static_cast<std::uint8_t>(v);
                if (r == 2) nonzero += (v != 0) - (old != 0);
            }
        }
        return count;
    }
};

}  // namespace

BiasResult bias(const MultilinearTable& T, u64 budget) {
    const int p = T.p(), n = T.n(), k = T.arity();
    const Space V(p, n);
    u64 total = 1, work = static_cast<u64>(n);
    for (int i = 0; i + 1 < k; ++i) {
        if (__builtin_mul_overflow(total, V.size(), &total) || __builtin_mul_overflow(work, V.size(), &work))
            throw BudgetExceeded("bias enumeration overflows");
    }
    if (work > budget)
        throw BudgetExceeded("bias needs ~" + std::to_string(work) + " operations, budget " + std::to_string(budget));
    if (total > (u64{1} << 62)) throw BudgetExceeded("bias denominator too large");

    u64 zero_count = 0;
    if (k == 1) {
        zero_count = T.is_zero() ? 1 : 0;
    } else if (p == 2) {
        if (n > 64) throw BudgetExceeded("bit-packed bias supports n <= 64");
        const u64 rows = T.size() / static_cast<u64>(n);
        std::vector<u64> M0(rows, 0);
        for (u64 r = 0; r < rows; ++r)
            for (int i = 0; i < n; ++i)
                if (T.data()[r * static_cast<u64>(n) + static_cast<u64>(i)]) M0[r] |= u64{1} << i;
        const u64 block = rows / static_cast<u64>(n);
        zero_count = parallel_reduce<u64>(
            V.size(), 0,
            [&](u64 first, u64 last, u64 acc) {
                BinaryBias kernel{n, V.size(), std::vector<std::vector<u64>>(static_cast<std::size_t>(k) + 1)};
                std::vector<u64> child(block);
                for (u64 h = first; h < last; ++h) {
                    std::fill(child.begin(), child.end(), 0);
                    for (int i = 0; i < n; ++i)
                        if (h >> i & 1)
                            for (u64 b = 0; b < block; ++b) child[b] ^= M0[static_cast<u64>(i) * block + b];
                    acc += k == 2 ? (child[0] == 0) : kernel.run(child, k - 1);
                }
                return acc;
            },
            [](u64& acc, u64 part) { acc += part; });
    } else {
        const u64 block = T.size() / static_cast<u64>(n);
        zero_count = parallel_reduce<u64>(
            V.size(), 0,
            [&](u64 first, u64 last, u64 acc) {
                DigitBias kernel{p, n, V.size(), std::vector<std::vector<std::uint8_t>>(static_cast<std::size_t>(k) + 1),
                                 std::vector<std::vector<int>>(static_cast<std::size_t>(k) + 1)};
                std::vector<std::uint8_t> child(block);
                for (u64 h = first; h < last; ++h) {
                    std::vector<int> acc_digits(block, 0);
                    for (int i = 0; i < n; ++i) {
                        const int hi = V.digit(h, i);
                        if (hi == 0) continue;
                        for (u64 b = 0; b < block; ++b) acc_digits[b] += hi * T.data()[static_cast<u64>(i) * block + b];
                    }
                    for (u64 b = 0; b < block; ++b) child[b] = static_cast<std::uint8_t>(acc_digits[b] % p);
                    if (k == 2)
                        acc += std::all_of(child.begin(), child.end(), [](std::uint8_t v) { return v == 0; });
                    else
                        acc += kernel.run(child, k - 1);
                }
                return acc;
            },
            [](u64& acc, u64 part) { acc += part; });
    }
    return BiasResult{Rational(static_cast<std::int64_t>(zero_count), static_cast<std::int64_t>(total)), zero_count, total};
}

BiasResult bias(const CSMForm& T, u64 budget) { return bias(T.table(), budget); }

// ---------------------------------------------------------------------------

DkpReport check_dkp(const NCPoly& P, int k, u64 trials, u64 seed) {
    const Space& V = P.space();
    const int p = V.p();
    if (k < p) throw Error("check_dkp needs k >= p");
    require_degree_at_most(P, k);
    const NCPoly pP = scale(p, P);
    const int r = k - p + 1;
    DkpReport report;
    auto check = [&](const std::vector<u64>& h) {
        std::vector<u64> lhs_dirs(static_cast<std::size_t>(p), h[0]);
        lhs_dirs.insert(lhs_dirs.end(), h.begin() + 1, h.end());
        const TorusValue lhs = iterated_derivative(P, lhs_dirs);
        const TorusValue rhs = -iterated_derivative(pP, h);
        ++report.checked;
        if (!(lhs == rhs)) {
            if (report.failures == 0) report.counterexample = h;
            ++report.failures;
        }
    };
    std::vector<u64> h(static_cast<std::size_t>(r), 0);
    if (trials == 0) {
        const u64 count = checked_power(V.size(), r, "dkp tuple count");
        if (count > (u64{1} << 26)) throw BudgetExceeded("exhaustive dkp check too large");
        for (u64 c = 0; c < count; ++c) {
            u64 rest = c;
            for (auto& v : h) {
                v = rest % V.size();
                rest /= V.size();
            }
            check(h);
        }
    } else {
        SplitMix64 rng(seed);
        for (u64 t = 0; t < trials; ++t) {
            for (auto& v : h) v = rng.below(V.size());
            check(h);
        }
    }
    return report;
}

}  // namespace hofa
