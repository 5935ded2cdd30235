#include "hofa/gowers.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numbers>

#include "hofa/parallel.hpp"

namespace hofa {

namespace {

using u64 = std::uint64_t;
using CVec = std::vector<Complex>;

CVec to_std(const Eigen::VectorXcd& v) { return CVec(v.data(), v.data() + v.size()); }

Eigen::VectorXcd to_eigen(const CVec& v) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

u64 work_estimate(u64 size, int levels, const char* what) {
    u64 w = 1;
    for (int i = 0; i < levels; ++i)
        if (__builtin_mul_overflow(w, size, &w)) throw BudgetExceeded(std::string(what) + " overflows");
    return w;
}

void require_budget(u64 work, u64 budget, const char* what) {
    if (work > budget)
        throw BudgetExceeded(std::string(what) + " needs ~" + std::to_string(work) + " operations, budget " +
                             std::to_string(budget));
}

void derive_into(const Space& V, const CVec& g, u64 h, CVec& out) {
    out.resize(g.size());
    for (u64 x = 0; x < g.size(); ++x) out[x] = g[V.add(x, h)] * std::conj(g[x]);
}

// E_h ||Delta_h g||^{2^{d-1}}_{U^{d-1}} down to |E g|^2.
double recursive_power(const Space& V, const CVec& g, int d, std::vector<CVec>& scratch) {
    if (d == 1) {
        Complex m = 0;
        for (const auto& v : g) m += v;
        return std::norm(m / static_cast<double>(g.size()));
    }
    CVec& child = scratch[static_cast<std::size_t>(d)];
    double acc = 0;
    for (u64 h = 0; h < g.size(); ++h) {
        derive_into(V, g, h, child);
        acc += recursive_power(V, child, d - 1, scratch);
    }
    return acc / static_cast<double>(g.size());
}

Complex direct_sum(const Space& V, const CVec& g, int d, std::vector<CVec>& scratch) {
    if (d == 0) {
        Complex m = 0;
        for (const auto& v : g) m += v;
        return m / static_cast<double>(g.size());
    }
    CVec& child = scratch[static_cast<std::size_t>(d)];
    Complex acc = 0;
    for (u64 h = 0; h < g.size(); ++h) {
        derive_into(V, g, h, child);
        acc += direct_sum(V, child, d - 1, scratch);
    }
    return acc / static_cast<double>(g.size());
}

struct Cplx {
    Complex v = 0;
};

}  // namespace

BoundedFunction::BoundedFunction(Space V, Eigen::VectorXcd values) : V_(V), values_(std::move(values)) {
    if (static_cast<u64>(values_.size()) != V_.size()) throw DimensionMismatch("function table size differs from |V|");
}

BoundedFunction BoundedFunction::constant(const Space& V, Complex c) {
    return BoundedFunction(V, Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(V.size()), c));
}

BoundedFunction BoundedFunction::phase(const NCPoly& P) {
    const Space& V = P.space();
    const u64 m = ipow(static_cast<u64>(V.p()), P.exponent());
    Eigen::VectorXcd v(static_cast<Eigen::Index>(V.size()));
    for (u64 x = 0; x < V.size(); ++x) v[static_cast<Eigen::Index>(x)] = root_of_unity(P.residues()[x], m);
    BoundedFunction f(V, std::move(v));
    f.phase_ = P;
    return f;
}

BoundedFunction BoundedFunction::random(const Space& V, SplitMix64& rng) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(V.size()));
    for (auto& z : v) {
        const double r = rng.uniform();
        const double theta = 2 * std::numbers::pi * rng.uniform();
        z = std::polar(r, theta);
    }
    return BoundedFunction(V, std::move(v));
}

double BoundedFunction::sup_norm() const { return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff(); }

double BoundedFunction::lp_norm(double q) const {
    double acc = 0;
    for (const auto& z : values_) acc += std::pow(std::abs(z), q);
    return std::pow(acc / static_cast<double>(values_.size()), 1.0 / q);
}

BoundedFunction operator+(const BoundedFunction& f, const BoundedFunction& g) {
    require_same_space(f.space(), g.space(), "function sum");
    return BoundedFunction(f.space(), f.values() + g.values());
}

BoundedFunction operator-(const BoundedFunction& f, const BoundedFunction& g) {
    require_same_space(f.space(), g.space(), "function difference");
    return BoundedFunction(f.space(), f.values() - g.values());
}

BoundedFunction operator*(const BoundedFunction& f, const BoundedFunction& g) {
    require_same_space(f.space(), g.space(), "function product");
    if (f.phase_poly() && g.phase_poly()) return BoundedFunction::phase(*f.phase_poly() + *g.phase_poly());
    return BoundedFunction(f.space(), f.values().cwiseProduct(g.values()));
}

BoundedFunction operator*(Complex c, const BoundedFunction& f) { return BoundedFunction(f.space(), c * f.values()); }

BoundedFunction conj(const BoundedFunction& f) {
    if (f.phase_poly()) return BoundedFunction::phase(-*f.phase_poly());
    return BoundedFunction(f.space(), f.values().conjugate());
}

BoundedFunction modulate(const BoundedFunction& f, const NCPoly& P) { return f * BoundedFunction::phase(P); }

BoundedFunction mult_derivative(const BoundedFunction& f, u64 h) {
    const Space& V = f.space();
    if (h >= V.size()) throw DimensionMismatch("shift outside V");
    if (f.phase_poly()) return BoundedFunction::phase(derivative(*f.phase_poly(), h));
    CVec out;
    derive_into(V, to_std(f.values()), h, out);
    return BoundedFunction(V, to_eigen(out));
}

BoundedFunction mult_derivative(const BoundedFunction& f, const FVec& h) { return mult_derivative(f, h.code(f.space())); }

Complex inner(const BoundedFunction& f, const BoundedFunction& g) {
    require_same_space(f.space(), g.space(), "inner product");
    return g.values().dot(f.values()) / static_cast<double>(f.space().size());
}

NormResult gowers_norm(const BoundedFunction& f, int d, NormMethod method, u64 budget) {
    if (d < 1) throw Error("Gowers norm needs d >= 1");
    const Space& V = f.space();
    const CVec g = to_std(f.values());
    const int levels = method == NormMethod::Direct ? d + 1 : d;
    require_budget(work_estimate(V.size(), levels, "Gowers norm"), budget, "Gowers norm");

    double power;
    if (d == 1 && method == NormMethod::Recursive) {
        power = std::norm(f.mean());
    } else if (method == NormMethod::Recursive) {
        power = parallel_reduce<double>(
            V.size(), 0.0,
            [&](u64 first, u64 last, double acc) {
                std::vector<CVec> scratch(static_cast<std::size_t>(d) + 1);
                CVec child;
                for (u64 h = first; h < last; ++h) {
                    derive_into(V, g, h, child);
                    acc += recursive_power(V, child, d - 1, scratch);
                }
                return acc;
            },
            [](double& acc, double part) { acc += part; });
        power /= static_cast<double>(V.size());
    } else {
        const Cplx sum = parallel_reduce<Cplx>(
            V.size(), Cplx{},
            [&](u64 first, u64 last, Cplx acc) {
                std::vector<CVec> scratch(static_cast<std::size_t>(d) + 1);
                CVec child;
                for (u64 h = first; h < last; ++h) {
                    derive_into(V, g, h, child);
                    acc.v += direct_sum(V, child, d - 1, scratch);
                }
                return acc;
            },
            [](Cplx& acc, Cplx part) { acc.v += part.v; });
        power = sum.v.real() / static_cast<double>(V.size());
    }
    NormResult r;
    r.power = std::max(power, 0.0);
    r.norm = std::pow(r.power, 1.0 / static_cast<double>(u64{1} << d));
    if (f.phase_poly()) {
        try {
            r.exact = phase_norm_power(*f.phase_poly(), d, budget);
        } catch (const BudgetExceeded&) {
        }
    }
    return r;
}

Expectation phase_norm_power(const NCPoly& P, int d, u64 budget) {
    if (d < 1) throw Error("Gowers norm needs d >= 1");
    const Space& V = P.space();
    require_budget(work_estimate(V.size(), d + 1, "phase norm"), budget, "phase norm");
    const int K = P.exponent();
    const u64 m = ipow(static_cast<u64>(V.p()), K);
    const auto& table = P.residues();

    struct Level {
        std::vector<std::vector<u64>> scratch;
    };
    auto derive = [&](const std::vector<u64>& g, u64 h, std::vector<u64>& out) {
        out.resize(g.size());
        for (u64 x = 0; x < g.size(); ++x) out[x] = (g[V.add(x, h)] + m - g[x]) % m;
    };
    std::function<void(const std::vector<u64>&, int, Level&, UnityCounter&)> count =
        [&](const std::vector<u64>& g, int left, Level& lv, UnityCounter& c) {
            if (left == 0) {
                for (u64 v : g) c.add_residue(v);
                return;
            }
            auto& child = lv.scratch[static_cast<std::size_t>(left)];
            for (u64 h = 0; h < g.size(); ++h) {
                derive(g, h, child);
                count(child, left - 1, lv, c);
            }
        };
    const UnityCounter total = parallel_reduce<UnityCounter>(
        V.size(), UnityCounter(V.p(), K),
        [&](u64 first, u64 last, UnityCounter acc) {
            Level lv{std::vector<std::vector<u64>>(static_cast<std::size_t>(d) + 1)};
            std::vector<u64> child;
            for (u64 h = first; h < last; ++h) {
                derive(table, h, child);
                count(child, d - 1, lv, acc);
            }
            return acc;
        },
        [](UnityCounter& acc, const UnityCounter& part) { acc.merge(part); });
    return total.expectation();
}

Complex gowers_inner_product(const std::vector<BoundedFunction>& fs, int d, u64 budget) {
    if (d < 1 || d > 20) throw Error("Gowers inner product needs 1 <= d <= 20");
    if (fs.size() != (std::size_t{1} << d)) throw DimensionMismatch("Gowers inner product needs 2^d functions");
    const Space& V = fs[0].space();
    for (const auto& f : fs) require_same_space(V, f.space(), "Gowers inner product");
    require_budget(work_estimate(V.size(), d + 1, "Gowers inner product") << d, budget, "Gowers inner product");

    std::vector<CVec> start;
    for (const auto& f : fs) start.push_back(to_std(f.values()));
    // Level t holds the 2^{d-t} partial products indexed by the unused bits.
    std::function<Complex(const std::vector<CVec>&)> rec = [&](const std::vector<CVec>& g) -> Complex {
        if (g.size() == 1) {
            Complex m = 0;
            for (const auto& v : g[0]) m += v;
            return m / static_cast<double>(V.size());
        }
        std::vector<CVec> next(g.size() / 2, CVec(V.size()));
        Complex acc = 0;
        for (u64 h = 0; h < V.size(); ++h) {
            for (std::size_t e = 0; e < next.size(); ++e)
                for (u64 x = 0; x < V.size(); ++x) next[e][x] = g[2 * e][x] * std::conj(g[2 * e + 1][V.add(x, h)]);
            acc += rec(next);
        }
        return acc / static_cast<double>(V.size());
    };
    return rec(start);
}

ArankResult analytic_rank(const NCPoly& P, int s, u64 budget) {
    if (s < 0) throw Error("analytic rank needs s >= 0");
    const BiasResult b = bias(dk_extract(P, s + 1), budget);
    ArankResult r;
    r.bias = b.value;
    if (b.value.numerator() == 0) {
        r.infinite = true;
        r.arank = std::numeric_limits<double>::infinity();
        return r;
    }
    r.arank = (std::log(static_cast<double>(b.value.denominator())) - std::log(static_cast<double>(b.value.numerator()))) /
              std::log(static_cast<double>(P.p()));
    return r;
}

bool TorusTupleLess::operator()(const std::vector<TorusValue>& a, const std::vector<TorusValue>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](const TorusValue& u, const TorusValue& v) {
        return std::pair(u.exp(), u.num()) < std::pair(v.exp(), v.num());
    });
}

std::vector<TorusValue> RankWitness::key(u64 x) const {
    std::vector<TorusValue> k;
    k.reserve(polys.size());
    for (const auto& Q : polys) k.push_back(Q(x));
    return k;
}

std::optional<RankWitness> RankWitness::induced(const NCPoly& P, std::vector<NCPoly> polys) {
    RankWitness w{std::move(polys), {}};
    for (const auto& Q : w.polys) require_same_space(P.space(), Q.space(), "rank witness");
    for (u64 x = 0; x < P.space().size(); ++x) {
        const auto [it, inserted] = w.table.emplace(w.key(x), P(x));
        if (!inserted && !(it->second == P(x))) return std::nullopt;
    }
    return w;
}

bool rank_witness_check(const NCPoly& P, int s, const RankWitness& w) {
    for (const auto& Q : w.polys) {
        require_same_space(P.space(), Q.space(), "rank witness");
        if (degree(Q) > s) throw Error("witness polynomial has degree " + degree_str(degree(Q)) + " > " + std::to_string(s));
    }
    for (u64 x = 0; x < P.space().size(); ++x) {
        const auto it = w.table.find(w.key(x));
        if (it == w.table.end()) throw Error("incomplete lookup table: no entry for the value tuple at x = " + std::to_string(x));
        if (!(it->second == P(x))) return false;
    }
    return true;
}

namespace {

void axis_transform(const Space& V, Eigen::VectorXcd& v, int sign) {
    const int p = V.p();
    if (p == 2) {
        for (u64 w = 1; w < V.size(); w <<= 1)
            for (u64 base = 0; base < V.size(); base += 2 * w)
                for (u64 x = base; x < base + w; ++x) {
                    const Complex a = v[static_cast<Eigen::Index>(x)], b = v[static_cast<Eigen::Index>(x + w)];
                    v[static_cast<Eigen::Index>(x)] = a + b;
                    v[static_cast<Eigen::Index>(x + w)] = a - b;
                }
        return;
    }
    std::vector<Complex> roots(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) roots[j] = root_of_unity(static_cast<u64>((sign * j % p + p) % p), static_cast<u64>(p));
    std::vector<Complex> in(static_cast<std::size_t>(p));
    for (int t = 0; t < V.n(); ++t) {
        const u64 w = V.weight(t);
        for (u64 x = 0; x < V.size(); ++x) {
            if (V.digit(x, t) != 0) continue;
            for (int a = 0; a < p; ++a) in[a] = v[static_cast<Eigen::Index>(x + a * w)];
            for (int b = 0; b < p; ++b) {
                Complex s = 0;
                for (int a = 0; a < p; ++a) s += in[a] * roots[a * b % p];
                v[static_cast<Eigen::Index>(x + b * w)] = s;
            }
        }
    }
}

}  // namespace

Eigen::VectorXcd walsh_fourier(const BoundedFunction& f) {
    Eigen::VectorXcd v = f.values();
    axis_transform(f.space(), v, -1);
    return v / static_cast<double>(f.space().size());
}

Eigen::VectorXcd inverse_fourier(const Space& V, const Eigen::VectorXcd& fhat) {
    if (static_cast<u64>(fhat.size()) != V.size()) throw DimensionMismatch("coefficient table size differs from |V|");
    Eigen::VectorXcd v = fhat;
    axis_transform(V, v, 1);
    return v;
}

ExploreResult inverse_explore(const BoundedFunction& f, int s, u64 budget) {
    const Space& V = f.space();
    const PolyFamily fam(V, s, true, std::max<u64>(budget / V.size(), 1));
    require_budget(work_estimate(V.size(), 1, "explore") * fam.count(), budget, "inverse_explore");
    const int K = fam.max_exponent();
    const u64 m = ipow(static_cast<u64>(V.p()), K);
    std::vector<Complex> roots(m);
    for (u64 r = 0; r < m; ++r) roots[r] = root_of_unity((m - r) % m, m);

    struct Best {
        double corr = -1;
        u64 index = 0;
    };
    const auto better = [](const Best& a, const Best& cur) { return a.corr > cur.corr + 1e-12; };
    const Best best = parallel_reduce<Best>(
        fam.count(), Best{},
        [&](u64 first, u64 last, Best acc) {
            std::vector<u64> buf;
            for (u64 i = first; i < last; ++i) {
                tabulate_form(V, fam.form(i), K, buf);
                Complex sum = 0;
                for (u64 x = 0; x < V.size(); ++x) sum += f(x) * roots[buf[x]];
                const Best cand{std::abs(sum) / static_cast<double>(V.size()), i};
                if (better(cand, acc)) acc = cand;
            }
            return acc;
        },
        [&](Best& acc, const Best& part) {
            if (better(part, acc)) acc = part;
        });
    return ExploreResult{fam.poly(best.index), best.corr, best.index, fam.count()};
}

Atoms level_sets(const Space& V, const std::vector<std::vector<u64>>& factors) {
    for (const auto& F : factors)
        if (F.size() != V.size()) throw DimensionMismatch("factor table size differs from |V|");
    Atoms B;
    B.label.resize(V.size());
    std::map<std::vector<u64>, std::uint32_t> ids;
    std::vector<u64> key(factors.size());
    for (u64 x = 0; x < V.size(); ++x) {
        for (std::size_t i = 0; i < factors.size(); ++i) key[i] = factors[i][x];
        const auto [it, inserted] = ids.emplace(key, static_cast<std::uint32_t>(B.size.size()));
        if (inserted) B.size.push_back(0);
        B.label[x] = it->second;
        ++B.size[it->second];
    }
    return B;
}

Atoms level_sets(const Space& V, const std::vector<NCPoly>& factors) {
    std::vector<std::vector<u64>> tables;
    for (const auto& P : factors) {
        require_same_space(V, P.space(), "factor");
        tables.push_back(P.residues());
    }
    return level_sets(V, tables);
}

BoundedFunction conditional_expectation(const BoundedFunction& f, const Atoms& B) {
    return BoundedFunction(f.space(), to_eigen(conditional_expectation(B, to_std(f.values()))));
}

}  // namespace hofa
