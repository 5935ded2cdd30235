#include "hofa/cubes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace hofa {

namespace {

using u64 = std::uint64_t;

constexpr u64 kMaxGroupSize = u64{1} << 20;

int sign_of(u64 mask) { return __builtin_popcountll(mask) % 2 == 0 ? 1 : -1; }

// Coefficients of the M-th cyclotomic polynomial, constant term first.
std::vector<std::int64_t> cyclotomic(u64 M) {
    std::vector<std::int64_t> num(M + 1, 0);
    num[0] = -1;
    num[M] = 1;
    for (u64 d = 1; d < M; ++d) {
        if (M % d != 0) continue;
        const auto den = cyclotomic(d);
        const std::size_t dd = den.size() - 1;
        std::vector<std::int64_t> q(num.size() - dd, 0);
        for (std::size_t i = num.size(); i-- > dd;) {
            const std::int64_t c = num[i];
            q[i - dd] = c;
            for (std::size_t j = 0; j <= dd; ++j) num[i - dd + j] -= c * den[j];
        }
        num = std::move(q);
    }
    return num;
}

// True iff sum_r c_r z^r = 0 for z a primitive M-th root of unity.
bool vanishes_at_root(std::vector<std::int64_t> c, const std::vector<std::int64_t>& phi) {
    const std::size_t d = phi.size() - 1;
    for (std::size_t i = c.size(); i-- > d;) {
        const std::int64_t lead = c[i];
        if (lead == 0) continue;
        for (std::size_t j = 0; j <= d; ++j) c[i - d + j] -= lead * phi[j];
    }
    for (std::size_t i = 0; i < std::min(d, c.size()); ++i)
        if (c[i] != 0) return false;
    return true;
}

}  // namespace

FilteredAbelianGroup::FilteredAbelianGroup(std::vector<u64> orders, std::vector<std::vector<u64>> level_generators)
    : orders_(std::move(orders)), gens_(std::move(level_generators)) {
    for (u64 n : orders_) {
        if (n < 1) throw Error("cyclic orders must be >= 1");
        if (__builtin_mul_overflow(size_, n, &size_) || size_ > kMaxGroupSize) throw BudgetExceeded("group too large");
    }
    if (size_ <= 256) {
        add_table_.resize(size_ * size_);
        neg_table_.resize(size_);
        for (u64 a = 0; a < size_; ++a) {
            neg_table_[a] = static_cast<std::uint16_t>(neg_slow(a));
            for (u64 b = 0; b < size_; ++b) add_table_[a * size_ + b] = static_cast<std::uint16_t>(add_slow(a, b));
        }
    }
    for (auto& level : gens_) {
        for (u64 g : level)
            if (g >= size_) throw Error("generator outside the group");
        elements_.push_back(generated_subgroup(*this, level));
        std::vector<char> member(size_, 0);
        for (u64 g : elements_.back()) member[g] = 1;
        member_.push_back(std::move(member));
    }
    for (std::size_t i = 1; i < elements_.size(); ++i)
        for (u64 g : gens_[i])
            if (!member_[i - 1][g]) throw Error("filtration is not nested at level " + std::to_string(i));
}

FilteredAbelianGroup FilteredAbelianGroup::maximal(std::vector<u64> orders, int k) {
    std::vector<u64> basis;
    u64 stride = 1;
    for (u64 n : orders) {
        if (n > 1) basis.push_back(stride);
        stride *= n;
    }
    return FilteredAbelianGroup(std::move(orders), std::vector<std::vector<u64>>(static_cast<std::size_t>(std::max(k + 1, 0)), basis));
}

FilteredAbelianGroup FilteredAbelianGroup::weighted(int p, const std::vector<int>& D, const std::vector<int>& J) {
    if (D.size() != J.size()) throw DimensionMismatch("one depth per initial degree");
    std::vector<u64> orders;
    std::vector<u64> strides;
    u64 stride = 1;
    int top = -1;
    for (std::size_t i = 0; i < D.size(); ++i) {
        if (D[i] < 1 || J[i] < 0) throw Error("weighted filtration needs D_i >= 1 and J_i >= 0");
        orders.push_back(ipow(static_cast<u64>(p), J[i] + 1));
        strides.push_back(stride);
        stride *= orders.back();
        top = std::max(top, D[i] + J[i] * (p - 1));
    }
    std::vector<std::vector<u64>> levels;
    for (int d = 0; d <= top; ++d) {
        std::vector<u64> gens;
        for (std::size_t i = 0; i < D.size(); ++i)
            for (int j = 0; j <= J[i]; ++j)
                if (D[i] + j * (p - 1) >= d) gens.push_back(ipow(static_cast<u64>(p), j) * strides[i]);
        levels.push_back(std::move(gens));
    }
    return FilteredAbelianGroup(std::move(orders), std::move(levels));
}

FilteredAbelianGroup FilteredAbelianGroup::p_adic(std::vector<u64> orders, int p) {
    std::vector<std::vector<u64>> levels;
    std::vector<u64> gens;
    u64 stride = 1;
    for (u64 n : orders) {
        if (n > 1) gens.push_back(stride);
        stride *= n;
    }
    const FilteredAbelianGroup whole = maximal(orders, 0);
    levels.push_back(gens);
    std::size_t prev = whole.size() + 1;
    while (!gens.empty()) {
        const std::size_t here = generated_subgroup(whole, gens).size();
        if (here == prev) throw Error("p-adic filtration does not reach 0; orders must be powers of p");
        prev = here;
        levels.push_back(gens);
        std::vector<u64> next;
        for (u64 g : gens) {
            const u64 h = whole.mul(p, g);
            if (h != 0) next.push_back(h);
        }
        gens = std::move(next);
    }
    return FilteredAbelianGroup(std::move(orders), std::move(levels));
}

int FilteredAbelianGroup::degree() const {
    for (int i = levels() - 1; i >= 0; --i)
        if (elements_[i].size() > 1) return i;
    return -1;
}

u64 FilteredAbelianGroup::add_slow(u64 a, u64 b) const {
    u64 out = 0, stride = 1;
    for (u64 n : orders_) {
        out += ((a % n + b % n) % n) * stride;
        a /= n;
        b /= n;
        stride *= n;
    }
    return out;
}

u64 FilteredAbelianGroup::neg_slow(u64 a) const {
    u64 out = 0, stride = 1;
    for (u64 n : orders_) {
        out += ((n - a % n) % n) * stride;
        a /= n;
        stride *= n;
    }
    return out;
}

u64 FilteredAbelianGroup::mul(std::int64_t c, u64 a) const {
    u64 out = 0, stride = 1;
    for (u64 n : orders_) {
        const auto m = static_cast<std::int64_t>(n);
        std::int64_t r = (c % m) * static_cast<std::int64_t>(a % n) % m;
        if (r < 0) r += m;
        out += static_cast<u64>(r) * stride;
        a /= n;
        stride *= n;
    }
    return out;
}

std::vector<u64> FilteredAbelianGroup::decode(u64 a) const {
    std::vector<u64> d;
    for (u64 n : orders_) {
        d.push_back(a % n);
        a /= n;
    }
    return d;
}

u64 FilteredAbelianGroup::encode(const std::vector<std::int64_t>& digits) const {
    if (digits.size() != orders_.size()) throw DimensionMismatch("element has wrong number of coordinates");
    u64 out = 0, stride = 1;
    for (std::size_t t = 0; t < orders_.size(); ++t) {
        const auto m = static_cast<std::int64_t>(orders_[t]);
        out += static_cast<u64>(((digits[t] % m) + m) % m) * stride;
        stride *= orders_[t];
    }
    return out;
}

const std::vector<u64>& FilteredAbelianGroup::generators(int i) const {
    if (i < 0) i = 0;
    return i < levels() ? gens_[i] : no_generators_;
}

const std::vector<u64>& FilteredAbelianGroup::level(int i) const {
    if (i < 0) i = 0;
    return i < levels() ? elements_[i] : zero_level_;
}

bool FilteredAbelianGroup::contains(int i, u64 g) const {
    if (i < 0) i = 0;
    if (i >= levels()) return g == 0;
    return g < size_ && member_[i][g];
}

std::string FilteredAbelianGroup::str() const {
    std::ostringstream os;
    for (std::size_t t = 0; t < orders_.size(); ++t) os << (t ? " x " : "") << "Z/" << orders_[t];
    if (orders_.empty()) os << "0";
    os << " [";
    for (int i = 0; i < levels(); ++i) os << (i ? "," : "") << level(i).size();
    os << "]";
    return os.str();
}

std::vector<u64> generated_subgroup(const FilteredAbelianGroup& G, const std::vector<u64>& gens) {
    std::vector<char> seen(G.size(), 0);
    std::vector<u64> out{0};
    seen[0] = 1;
    for (std::size_t q = 0; q < out.size(); ++q)
        for (u64 g : gens) {
            const u64 h = G.add(out[q], g);
            if (!seen[h]) {
                seen[h] = 1;
                out.push_back(h);
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void require_cube(const CubePoint& g, const FilteredAbelianGroup& G) {
    if (g.k < 0 || g.k > 16 || g.entries.size() != (std::size_t{1} << g.k)) throw DimensionMismatch("cube has wrong shape");
    for (u64 v : g.entries)
        if (v >= G.size()) throw DimensionMismatch("cube entry outside the group");
}

// sum over T inside S of (-1)^{|f|+|T|} g_{f|T}.
u64 face_sum(const std::vector<u64>& g, u64 f, u64 S, const FilteredAbelianGroup& G) {
    u64 acc = 0;
    for (u64 T = S;; T = (T - 1) & S) {
        const u64 v = g[f | T];
        acc = sign_of(f | T) > 0 ? G.add(acc, v) : G.sub(acc, v);
        if (T == 0) break;
    }
    return acc;
}

}  // namespace

bool hk_membership(const CubePoint& g, const FilteredAbelianGroup& G) {
    require_cube(g, G);
    const u64 N = g.entries.size();
    for (u64 S = 0; S < N; ++S) {
        const u64 rest = (N - 1) & ~S;
        for (u64 f = rest;; f = (f - 1) & rest) {
            if (!G.contains(__builtin_popcountll(S), face_sum(g.entries, f, S, G))) return false;
            if (f == 0) break;
        }
    }
    return true;
}

TaylorResult hk_taylor(const CubePoint& g, const FilteredAbelianGroup& G) {
    require_cube(g, G);
    TaylorResult r;
    r.coeffs = g.entries;
    const u64 N = r.coeffs.size();
    for (int j = 0; j < g.k; ++j)
        for (u64 w = 0; w < N; ++w)
            if (w >> j & 1) r.coeffs[w] = G.sub(r.coeffs[w], r.coeffs[w ^ (u64{1} << j)]);
    r.member = true;
    for (u64 J = 0; J < N; ++J)
        if (!G.contains(__builtin_popcountll(J), r.coeffs[J])) {
            r.member = false;
            r.offending = static_cast<std::uint32_t>(J);
            break;
        }
    return r;
}

CubePoint taylor_expand(const std::vector<u64>& coeffs, int k, const FilteredAbelianGroup& G) {
    CubePoint c{k, coeffs};
    require_cube(c, G);
    const u64 N = coeffs.size();
    for (int j = 0; j < k; ++j)
        for (u64 w = 0; w < N; ++w)
            if (w >> j & 1) c.entries[w] = G.add(c.entries[w], c.entries[w ^ (u64{1} << j)]);
    return c;
}

u64 hk_size(const FilteredAbelianGroup& G, int k) {
    u64 size = 1;
    for (u64 J = 0; J < (u64{1} << k); ++J) {
        const u64 s = G.level(__builtin_popcountll(J)).size();
        if (__builtin_mul_overflow(size, s, &size) || size > (u64{1} << 63)) return u64{1} << 63;
    }
    return size;
}

HkScan hk_equivalence_scan(const FilteredAbelianGroup& G, int k, u64 budget) {
    if (k < 0 || k > 4) throw Error("cube dimension out of range");
    const u64 N = u64{1} << k;
    u64 estimate = hk_size(G, k);
    if (__builtin_mul_overflow(estimate, G.size(), &estimate) || estimate > budget)
        throw BudgetExceeded("cube scan over " + G.str() + " at k=" + std::to_string(k) + " exceeds budget");
    HkScan scan;
    std::vector<u64> g(N, 0);
    const double order = static_cast<double>(G.size());
    std::function<void(u64, bool, bool)> visit = [&](u64 w, bool taylor_ok, bool face_ok) {
        for (u64 a = 0; a < G.size(); ++a) {
            g[w] = a;
            bool t = taylor_ok, f = face_ok;
            if (t) {
                // The Taylor coefficient g_w is complete once vertex w is set.
                u64 c = 0;
                for (u64 T = w;; T = (T - 1) & w) {
                    c = sign_of(w ^ T) > 0 ? G.add(c, g[T]) : G.sub(c, g[T]);
                    if (T == 0) break;
                }
                t = G.contains(__builtin_popcountll(w), c);
            }
            if (f) {
                // Faces whose largest vertex is w: free set S inside w, fixed bits w \ S.
                for (u64 S = w;; S = (S - 1) & w) {
                    if (!G.contains(__builtin_popcountll(S), face_sum(g, w & ~S, S, G))) {
                        f = false;
                        break;
                    }
                    if (S == 0) break;
                }
            }
            if (!t && !f) {
                scan.cubes += std::pow(order, static_cast<double>(N - 1 - w));
                continue;
            }
            if (w + 1 < N) {
                visit(w + 1, t, f);
                continue;
            }
            scan.cubes += 1;
            if (t && f) ++scan.members;
            if (t != f) {
                ++scan.disagreements;
                if (!scan.counterexample) scan.counterexample = CubePoint{k, g};
            }
        }
    };
    visit(0, true, true);
    return scan;
}

HkIndexCheck hk_equivalence_by_index(const FilteredAbelianGroup& G, int k, u64 budget) {
    if (k < 0 || k > 4) throw Error("cube dimension out of range");
    const u64 N = u64{1} << k;
    HkIndexCheck r;
    r.taylor_in_faces = true;
    for (u64 J = 0; J < N; ++J)
        for (u64 c : G.generators(__builtin_popcountll(J))) {
            std::vector<u64> coeffs(N, 0);
            coeffs[J] = c;
            if (!hk_membership(taylor_expand(coeffs, k, G), G)) r.taylor_in_faces = false;
        }

    struct Face {
        u64 f, S;
    };
    std::vector<Face> faces;
    for (u64 S = 0; S < N; ++S) {
        const u64 rest = (N - 1) & ~S;
        for (u64 f = rest;; f = (f - 1) & rest) {
            if (G.level(__builtin_popcountll(S)).size() < G.size()) faces.push_back({f, S});
            if (f == 0) break;
        }
    }
    auto coset = [&](int i, u64 a) {
        u64 best = a;
        for (u64 h : G.level(i)) best = std::min(best, G.add(a, h));
        return best;
    };
    auto image = [&](const std::vector<u64>& g) {
        std::vector<u64> out(faces.size());
        for (std::size_t t = 0; t < faces.size(); ++t)
            out[t] = coset(__builtin_popcountll(faces[t].S), face_sum(g, faces[t].f, faces[t].S, G));
        return out;
    };
    std::vector<std::vector<u64>> gens;
    for (u64 w = 0; w < N; ++w)
        for (std::size_t t = 0; t < G.orders().size(); ++t) {
            std::vector<std::int64_t> digits(G.orders().size(), 0);
            digits[t] = 1;
            std::vector<u64> g(N, 0);
            g[w] = G.encode(digits);
            gens.push_back(image(g));
        }
    auto plus = [&](const std::vector<u64>& a, const std::vector<u64>& b) {
        std::vector<u64> out(a.size());
        for (std::size_t t = 0; t < a.size(); ++t) out[t] = coset(__builtin_popcountll(faces[t].S), G.add(a[t], b[t]));
        return out;
    };
    std::set<std::vector<u64>> seen{std::vector<u64>(faces.size(), 0)};
    std::vector<std::vector<u64>> frontier(seen.begin(), seen.end());
    while (!frontier.empty()) {
        std::vector<std::vector<u64>> next;
        for (const auto& a : frontier)
            for (const auto& b : gens) {
                auto c = plus(a, b);
                if (seen.insert(c).second) {
                    if (seen.size() > budget) throw BudgetExceeded("face-sum image over " + G.str() + " exceeds budget");
                    next.push_back(std::move(c));
                }
            }
        frontier = std::move(next);
    }
    u64 total = 1;
    for (u64 w = 0; w < N; ++w)
        if (__builtin_mul_overflow(total, G.size(), &total)) throw BudgetExceeded("|G|^(2^k) overflows");
    r.face_members = total / seen.size();
    r.equal = r.taylor_in_faces && r.face_members == hk_size(G, k);
    return r;
}

// ---------------------------------------------------------------------------

bool is_polynomial_map(const GroupMap& phi, const FilteredAbelianGroup& H, const FilteredAbelianGroup& G, GeneratorMode mode) {
    if (phi.size() != H.size()) throw DimensionMismatch("map table size differs from |H|");
    for (u64 v : phi) {
        if (v >= G.size()) throw DimensionMismatch("map value outside G");
        if (!G.contains(0, v)) return false;
    }
    const int top = G.degree() + 1;
    struct Gen {
        int weight;
        u64 h;
    };
    std::vector<Gen> gens;
    for (int i = 1; i <= std::min(top, H.degree()); ++i) {
        const auto& src = mode == GeneratorMode::Generators ? H.generators(i) : H.level(i);
        for (u64 h : src)
            if (h != 0) gens.push_back({i, h});
    }
    std::function<bool(const GroupMap&, std::size_t, int)> search = [&](const GroupMap& D, std::size_t first, int w) {
        for (std::size_t idx = first; idx < gens.size(); ++idx) {
            const int w2 = w + gens[idx].weight;
            if (w2 > top) continue;
            GroupMap E(D.size());
            bool zero = true;
            for (u64 x = 0; x < D.size(); ++x) {
                E[x] = G.sub(D[H.add(x, gens[idx].h)], D[x]);
                if (!G.contains(w2, E[x])) return false;
                zero = zero && E[x] == 0;
            }
            if (!zero && !search(E, idx, w2)) return false;
        }
        return true;
    };
    return search(phi, 0, 0);
}

CubePreservation cube_preservation_check(const GroupMap& phi, const FilteredAbelianGroup& H, const FilteredAbelianGroup& G,
                                         int k_max, u64 budget) {
    if (phi.size() != H.size()) throw DimensionMismatch("map table size differs from |H|");
    CubePreservation r;
    for (int k = 0; k <= k_max && r.preserved; ++k) {
        enumerate_hk(
            H, k,
            [&](const CubePoint& c) {
                CubePoint image{k, std::vector<u64>(c.entries.size())};
                for (std::size_t w = 0; w < c.entries.size(); ++w) image.entries[w] = phi[c.entries[w]];
                ++r.cubes_checked;
                if (hk_membership(image, G)) return true;
                r.preserved = false;
                r.failing_k = k;
                r.witness = c;
                return false;
            },
            budget);
    }
    return r;
}

// ---------------------------------------------------------------------------

EquidistributionReport equidistribution_report(const std::vector<u64>& values, const std::vector<u64>& orders) {
    if (values.empty()) throw Error("equidistribution of an empty family");
    u64 B = 1, M = 1;
    for (u64 n : orders) {
        if (n < 1) throw Error("cyclic orders must be >= 1");
        if (__builtin_mul_overflow(B, n, &B) || B > kMaxGroupSize) throw BudgetExceeded("target group too large");
        M = std::lcm(M, n);
    }
    if (B * M > (u64{1} << 24)) throw BudgetExceeded("character table too large");
    EquidistributionReport rep;
    rep.histogram.assign(B, 0);
    for (u64 v : values) {
        if (v >= B) throw DimensionMismatch("value outside the target group");
        ++rep.histogram[v];
    }
    rep.total = values.size();
    const auto A = static_cast<std::int64_t>(rep.total);
    const auto Bi = static_cast<std::int64_t>(B);
    rep.max_deviation = Rational(0);
    for (u64 c : rep.histogram) {
        const Rational dev(std::abs(static_cast<std::int64_t>(c) * Bi - A), A * Bi);
        rep.max_deviation = std::max(rep.max_deviation, dev);
    }

    // S(xi) = sum_b count_b z^{xi.b} in Z[z]/(z^M - 1), one axis at a time.
    std::vector<std::int64_t> S(B * M, 0);
    for (u64 b = 0; b < B; ++b) S[b * M] = static_cast<std::int64_t>(rep.histogram[b]);
    u64 stride = 1;
    for (u64 n : orders) {
        const u64 scale = M / n;
        std::vector<std::int64_t> out(B * M, 0);
        for (u64 base = 0; base < B; ++base) {
            if (base / stride % n != 0) continue;
            for (u64 xi = 0; xi < n; ++xi) {
                std::int64_t* dst = &out[(base + xi * stride) * M];
                for (u64 b = 0; b < n; ++b) {
                    const std::int64_t* src = &S[(base + b * stride) * M];
                    const u64 shift = xi * b % n * scale;
                    for (u64 r = 0; r < M; ++r) dst[(r + shift) % M] += src[r];
                }
            }
        }
        S = std::move(out);
        stride *= n;
    }
    const auto phi = cyclotomic(M);
    rep.bias_zero = true;
    for (u64 xi = 1; xi < B; ++xi) {
        const std::vector<std::int64_t> c(S.begin() + static_cast<std::ptrdiff_t>(xi * M),
                                          S.begin() + static_cast<std::ptrdiff_t>((xi + 1) * M));
        const bool zero = vanishes_at_root(c, phi);
        rep.bias_zero = rep.bias_zero && zero;
        Complex z = 0;
        if (!zero)
            for (u64 r = 0; r < M; ++r)
                if (c[r] != 0) z += static_cast<double>(c[r]) * root_of_unity(r, M);
        const double bias = std::abs(z) / static_cast<double>(A);
        if (bias > rep.max_bias) {
            rep.max_bias = bias;
            rep.argmax = xi;
        }
    }
    const double dev = boost::rational_cast<double>(rep.max_deviation);
    const double bound = static_cast<double>(B - 1) / static_cast<double>(B) * rep.max_bias;
    rep.weyl_consistent = dev <= bound + 1e-12 && rep.bias_zero == (rep.max_deviation == Rational(0));
    return rep;
}

EquidistributionReport joint_equidistribution_report(const Space& V, int d, const std::vector<JointComponent>& components,
                                                     u64 budget) {
    if (d < 1) throw Error("need at least one variable");
    if (components.empty()) throw Error("need at least one component");
    u64 total = 1;
    for (int t = 0; t < d; ++t)
        if (__builtin_mul_overflow(total, V.size(), &total) || total > budget) throw BudgetExceeded("V^d too large");
    for (const auto& c : components) {
        if (c.form.p() != V.p() || c.form.n() != V.n()) throw DimensionMismatch("component form on a different space");
        if (static_cast<int>(c.args.size()) != c.form.arity()) throw DimensionMismatch("component needs one argument per slot");
        for (int a : c.args)
            if (a < 0 || a >= d) throw DimensionMismatch("component argument out of range");
    }
    std::vector<u64> orders(components.size(), static_cast<u64>(V.p()));
    std::vector<u64> values(total);
    std::vector<std::uint64_t> h(static_cast<std::size_t>(d));
    for (u64 idx = 0; idx < total; ++idx) {
        u64 rest = idx;
        for (int t = 0; t < d; ++t) {
            h[t] = rest % V.size();
            rest /= V.size();
        }
        u64 code = 0, stride = 1;
        for (const auto& c : components) {
            std::vector<std::uint64_t> args;
            for (int a : c.args) args.push_back(h[a]);
            code += static_cast<u64>(c.form(V, args)) * stride;
            stride *= static_cast<u64>(V.p());
        }
        values[idx] = code;
    }
    return equidistribution_report(values, orders);
}

std::pair<std::vector<u64>, std::vector<u64>> factor_map(const Factor& F) {
    if (F.dimension() == 0) throw Error("empty factor");
    const Space& V = F.chains[0][0].space();
    std::vector<u64> orders;
    for (int i = 0; i < F.dimension(); ++i) orders.push_back(ipow(static_cast<u64>(F.p), F.depth(i) + 1));
    std::vector<u64> values(V.size());
    for (u64 x = 0; x < V.size(); ++x) {
        u64 code = 0, stride = 1;
        for (int i = 0; i < F.dimension(); ++i) {
            code += F.chains[i].back().residue(x, F.depth(i) + 1) * stride;
            stride *= orders[i];
        }
        values[x] = code;
    }
    return {orders, values};
}

}  // namespace hofa
