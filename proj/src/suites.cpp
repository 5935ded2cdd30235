#include "hofa/suites.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "hofa/catalog.hpp"
#include "hofa/cubes.hpp"
#include "hofa/gowers.hpp"
#include "hofa/io.hpp"
#include "hofa/multilinear.hpp"
#include "hofa/ncpoly.hpp"
#include "hofa/parallel.hpp"
#include "hofa/rng.hpp"
#include "hofa/weighted.hpp"

namespace hofa {

using nlohmann::json;
using u64 = std::uint64_t;

bool SuiteReport::pass() const { return failures() == 0; }

std::size_t SuiteReport::failures() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const CheckRecord& r) { return !r.pass; }));
}

json SuiteReport::to_json(bool timing) const {
    json recs = json::array();
    for (const auto& r : records) {
        json j = {{"check", r.check},     {"lemma", r.lemma}, {"params", r.params},       {"inputs_digest", r.inputs_digest},
                  {"lhs", r.lhs},         {"rhs", r.rhs},     {"tolerance", r.tolerance}, {"pass", r.pass}};
        if (!r.witness.is_null()) j["witness"] = r.witness;
        if (timing) j["runtime"] = r.runtime;
        recs.push_back(std::move(j));
    }
    return {{"suite", suite},       {"seed", seed},           {"rng", SplitMix64::name},
            {"pass", pass()},       {"failures", failures()}, {"records", recs}};
}

std::string SuiteReport::to_csv(bool timing) const {
    auto cell = [](const json& v) {
        std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        if (s.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
            return q + "\"";
        }
        return s;
    };
    std::ostringstream out;
    out << "suite,check,lemma,inputs_digest,lhs,rhs,tolerance,pass" << (timing ? ",runtime" : "") << "\n";
    for (const auto& r : records) {
        out << suite << ',' << r.check << ',' << cell(r.lemma) << ',' << r.inputs_digest << ',' << cell(r.lhs) << ','
            << cell(r.rhs) << ',' << r.tolerance << ',' << (r.pass ? 1 : 0);
        if (timing) out << ',' << r.runtime;
        out << "\n";
    }
    return out.str();
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"lucas", "lam",     "df",       "symprod", "gowers-props",
                                                   "dkp",   "roots",   "weighted", "cubes",   "decomposition"};
    return names;
}

namespace {

using Clock = std::chrono::steady_clock;

class Recorder {
public:
    Recorder(SuiteReport& report, const SuiteParams& params) : report_(report), params_(params), last_(Clock::now()) {}

    void charge(u64 ops, const std::string& what) {
        used_ = ops > ~u64{0} - used_ ? ~u64{0} : used_ + ops;
        if (params_.budget && used_ > params_.budget)
            throw BudgetExceeded(report_.suite + ": budget exhausted at " + what + " (" + std::to_string(used_) +
                                 " > " + std::to_string(params_.budget) + " ops)");
    }

    CheckRecord& add(std::string check, std::string lemma, json params, json lhs, json rhs, bool pass,
                     double tolerance = 0, json witness = nullptr) {
        const auto now = Clock::now();
        CheckRecord r;
        r.inputs_digest = io::digest({{"suite", report_.suite}, {"check", check}, {"params", params}, {"seed", report_.seed}});
        r.check = std::move(check);
        r.lemma = std::move(lemma);
        r.params = std::move(params);
        r.lhs = std::move(lhs);
        r.rhs = std::move(rhs);
        r.pass = pass;
        r.tolerance = tolerance;
        r.witness = std::move(witness);
        r.runtime = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        report_.records.push_back(std::move(r));
        return report_.records.back();
    }

    /// Pointwise equality of two residue tables.
    void tables(std::string check, std::string lemma, json params, const std::vector<u64>& lhs,
                const std::vector<u64>& rhs) {
        json witness = nullptr;
        for (std::size_t x = 0; x < std::min(lhs.size(), rhs.size()); ++x)
            if (lhs[x] != rhs[x]) {
                witness = {{"x", x}, {"lhs", lhs[x]}, {"rhs", rhs[x]}};
                break;
            }
        const bool pass = lhs == rhs;
        add(std::move(check), std::move(lemma), std::move(params), io::digest(lhs), io::digest(rhs), pass, 0,
            pass ? json(nullptr) : witness);
    }

    const SuiteParams& params() const { return params_; }
    u64 seed() const { return report_.seed; }

private:
    SuiteReport& report_;
    const SuiteParams& params_;
    Clock::time_point last_;
    u64 used_ = 0;
};

/// Failures over a batch of cases, keeping the first failing case.
struct Tally {
    u64 cases = 0;
    u64 failures = 0;
    json first;

    void fail(json witness) {
        if (!failures++) first = std::move(witness);
    }
    void merge(Tally& o) {
        cases += o.cases;
        if (o.failures && !failures) first = std::move(o.first);
        failures += o.failures;
    }
};

void record_tally(Recorder& rec, std::string check, std::string lemma, json params, const Tally& t,
                  double tolerance = 0) {
    params["cases"] = t.cases;
    rec.add(std::move(check), std::move(lemma), std::move(params), t.failures, 0, t.failures == 0 && t.cases > 0,
            tolerance, t.failures ? t.first : json(nullptr));
}

/// Worst value of a quantity that must stay <= tolerance.
struct Worst {
    u64 cases = 0;
    double value = -INFINITY;
    json at;

    void see(double v, const std::function<json()>& where) {
        ++cases;
        if (v > value) {
            value = v;
            at = where();
        }
    }
};

void record_worst(Recorder& rec, std::string check, std::string lemma, json params, const Worst& w, double tolerance) {
    params["cases"] = w.cases;
    const bool pass = w.cases > 0 && w.value <= tolerance;
    rec.add(std::move(check), std::move(lemma), std::move(params), w.value, 0, pass, tolerance, pass ? json(nullptr) : w.at);
}

int pick(int given, int fallback) { return given > 0 ? given : fallback; }

std::int64_t binom_exact(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0;
    std::int64_t r = 1;
    for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

CanonicalForm random_form(const Space& V, int d, SplitMix64& rng, bool with_alpha = true) {
    const int p = V.p();
    CanonicalForm f{TorusValue::zero(p), {}};
    if (with_alpha) {
        const int A = std::max(d - 1, 0) / (p - 1) + 1;
        f.alpha = TorusValue::from_residue(p, static_cast<std::int64_t>(rng.below(ipow(p, A))), A);
    }
    for (int j = 0; d - j * (p - 1) >= 1; ++j)
        for (u64 mono = 1; mono < V.size(); ++mono)
            if (V.digit_sum(mono) <= d - j * (p - 1) && rng.below(2))
                f.terms.push_back(Term{mono, j, 1 + static_cast<int>(rng.below(p - 1))});
    return normalize_form(V, f);
}

std::vector<NCPoly> classical_family(const Space& V, int d) {
    std::vector<u64> monos;
    for (u64 m = 1; m < V.size(); ++m) {
        int w = 0;
        for (int t = 0; t < V.n(); ++t) w += V.digit(m, t);
        if (w <= d) monos.push_back(m);
    }
    if (V.p() != 2) throw Error("classical_family enumerates p = 2 only");
    std::vector<NCPoly> out;
    for (u64 mask = 0; mask < (u64{1} << monos.size()); ++mask) {
        CanonicalForm f{TorusValue::zero(2), {}};
        for (std::size_t i = 0; i < monos.size(); ++i)
            if (mask >> i & 1) f.terms.push_back(Term{monos[i], 0, 1});
        out.push_back(NCPoly::from_form(V, normalize_form(V, f)));
    }
    return out;
}


std::vector<u64> residues_at(const NCPoly& P, int K) {
    std::vector<u64> out(P.space().size());
    for (u64 x = 0; x < out.size(); ++x) out[x] = P.residue(x, K);
    return out;
}

void require_p(const SuiteParams& prm, int p, const char* suite) {
    if (prm.p && prm.p != p) throw Error(std::string(suite) + " runs over F_" + std::to_string(p) + " only");
}

// ---------------------------------------------------------------------------

void suite_lucas(Recorder& rec) {
    require_p(rec.params(), 2, "lucas");
    const int N = pick(rec.params().n, 10);
    const int kmax = rec.params().degree >= 0 ? rec.params().degree : 10;
    for (int n = 1; n <= N; ++n) {
        const Space V(2, n);
        rec.charge(V.size() * static_cast<u64>(kmax + 1) * static_cast<u64>(n + 4), "lucas n=" + std::to_string(n));
        const auto L = catalog::L(V);
        std::map<int, NCPoly> S;
        auto get_S = [&](int k) -> const NCPoly& {
            auto it = S.find(k);
            if (it == S.end()) it = S.emplace(k, catalog::S(V, k)).first;
            return it->second;
        };
        for (int k = 0; k <= kmax; ++k) {
            std::vector<u64> binom(V.size());
            for (u64 x = 0; x < V.size(); ++x) binom[x] = static_cast<u64>(binom_exact(L[x], k) % 2);
            rec.tables("lucas.definition", "S_k = binom(L, k) mod 2", {{"n", n}, {"k", k}}, residues_at(get_S(k), 1), binom);

            NCPoly prod = get_S(0);
            json factors = json::array();
            for (int a = 0; (1 << a) <= k; ++a)
                if (k >> a & 1) {
                    prod = multiply_classical(prod, get_S(1 << a));
                    factors.push_back(1 << a);
                }
            rec.tables("lucas.product", "S_k = prod of S_{2^a} over the binary digits of k",
                       {{"n", n}, {"k", k}, {"factors", factors}}, residues_at(get_S(k), 1), residues_at(prod, 1));
        }
    }
}

void suite_lam(Recorder& rec) {
    require_p(rec.params(), 2, "lam");
    const int N = pick(rec.params().n, 12);
    for (int n = 1; n <= N; ++n) {
        const Space V(2, n);
        rec.charge(V.size() * static_cast<u64>(n), "lam n=" + std::to_string(n));
        const auto L = catalog::L(V);
        std::vector<u64> lhs(L.begin(), L.end()), rhs(V.size(), 0);
        json powers = json::array();
        for (int m = 0; (1 << m) <= n; ++m) {
            const NCPoly Sm = catalog::S(V, 1 << m);
            for (u64 x = 0; x < V.size(); ++x) rhs[x] += Sm.residue(x, 1) << m;
            powers.push_back(1 << m);
        }
        rec.tables("lam.binary-expansion", "L = sum_m |S_{2^m}| 2^m as integers", {{"n", n}, {"terms", powers}}, lhs, rhs);
    }
}

void suite_df(Recorder& rec) {
    require_p(rec.params(), 2, "df");
    const int N = pick(rec.params().n, 6);
    for (int n = 2; n <= N; ++n) {
        const Space V(2, n);
        const NCPoly S2 = catalog::S(V, 2), S4 = catalog::S(V, 4);
        const CSMForm B = catalog::B(n);
        rec.charge(V.size() * 64, "df forms n=" + std::to_string(n));
        const CSMForm d2 = dk_extract_csm(S2, 2);
        rec.add("df.second-derivative", "d^2 S_2 = B, B(e_i, e_j) = 1 iff i != j", {{"n", n}}, io::digest(io::to_json(d2)),
                io::digest(io::to_json(B)), d2 == B);
        const CSMForm d4 = dk_extract_csm(S4, 4), sq = sym_power(B, 2);
        rec.add("df.form", "d^4 S_4 = Sym^2(B) as forms", {{"n", n}}, io::digest(io::to_json(d4)), io::digest(io::to_json(sq)),
                d4 == sq);

        auto quad = [&](u64 a, u64 b, u64 c, u64 d, Tally& t) {
            const int rhs = (B(V, {a, b}) * B(V, {c, d}) + B(V, {a, c}) * B(V, {b, d}) + B(V, {a, d}) * B(V, {b, c})) % 2;
            const TorusValue lhs = iterated_derivative(S4, {a, b, c, d}, 0);
            ++t.cases;
            if (lhs != TorusValue::iota(2, rhs))
                t.fail({{"h", {a, b, c, d}}, {"lhs", io::to_json(lhs)}, {"rhs", rhs}});
        };
        const json prm = {{"n", n}};
        if (n <= 4) {
            const u64 total = V.size() * V.size() * V.size() * V.size();
            rec.charge(total * 40, "df exhaustive n=" + std::to_string(n));
            Tally t = parallel_reduce(
                total, Tally{},
                [&](u64 first, u64 last, Tally acc) {
                    for (u64 c = first; c < last; ++c) {
                        const u64 s = V.size();
                        quad(c % s, c / s % s, c / s / s % s, c / s / s / s, acc);
                    }
                    return acc;
                },
                [](Tally& acc, Tally& part) { acc.merge(part); });
            record_tally(rec, "df.pointwise-exhaustive", "B(a,b)B(c,d) + B(a,c)B(b,d) + B(a,d)B(b,c) = d^4 S_4(a,b,c,d)", prm, t);
        } else {
            constexpr u64 kTrials = 10000;
            rec.charge(kTrials * 40, "df sampled n=" + std::to_string(n));
            SplitMix64 rng = SplitMix64(rec.seed()).split(static_cast<u64>(n));
            Tally t;
            for (u64 i = 0; i < kTrials; ++i) {
                const u64 a = rng.below(V.size()), b = rng.below(V.size()), c = rng.below(V.size()), d = rng.below(V.size());
                quad(a, b, c, d, t);
            }
            record_tally(rec, "df.pointwise-sampled", "B(a,b)B(c,d) + B(a,c)B(b,d) + B(a,d)B(b,c) = d^4 S_4(a,b,c,d)", prm, t);
        }
        if (n == 4 || n == 5) {
            rec.charge(ipow(V.size(), 5), "df norm power n=" + std::to_string(n));
            const Expectation e = phase_norm_power(S4, 4);
            const Rational b = bias(d4).value;
            const bool exact = e.rational.has_value();
            rec.add("df.norm-power", "||e(S_4)||_{U^4}^16 = E e(d^4 S_4)", prm,
                    exact ? io::to_json(*e.rational) : json(e.value.real()), io::to_json(b), exact && *e.rational == b);
        }
    }
}

void suite_symprod(Recorder& rec) {
    require_p(rec.params(), 2, "symprod");
    const int n = pick(rec.params().n, 3);
    const int dmax = rec.params().degree >= 0 ? rec.params().degree : 4;
    const Space V(2, n);
    std::map<int, std::vector<NCPoly>> fam;
    for (int k = 1; k < dmax; ++k) fam[k] = classical_family(V, k);
    for (int k = 1; k < dmax; ++k)
        for (int l = 1; k + l <= dmax; ++l) {
            const auto& Ps = fam[k];
            const auto& Qs = fam[l];
            rec.charge(Ps.size() * Qs.size() * V.size() * 16, "symprod product rule");
            std::vector<CSMForm> dQ;
            for (const auto& Q : Qs) dQ.push_back(dk_extract_csm(Q, l));
            Tally t = parallel_reduce(
                Ps.size(), Tally{},
                [&](u64 first, u64 last, Tally acc) {
                    for (u64 i = first; i < last; ++i) {
                        const CSMForm dP = dk_extract_csm(Ps[i], k);
                        for (std::size_t j = 0; j < Qs.size(); ++j) {
                            ++acc.cases;
                            if (dk_extract_csm(multiply_classical(Ps[i], Qs[j]), k + l) != concat(dP, dQ[j]))
                                acc.fail({{"P", io::poly_text(Ps[i])}, {"Q", io::poly_text(Qs[j])}});
                        }
                    }
                    return acc;
                },
                [](Tally& acc, Tally& part) { acc.merge(part); });
            record_tally(rec, "symprod.product-rule", "d^{k+l}(PQ) = d^k P * d^l Q", {{"n", n}, {"k", k}, {"l", l}}, t);
        }

    const int N = pick(rec.params().n, 5);
    for (int m = 2; m <= N; ++m) {
        const Space W(2, m);
        rec.charge(W.size() * 256, "symprod lift n=" + std::to_string(m));
        const NCPoly S2 = catalog::S(W, 2), S4 = catalog::S(W, 4);
        const NCPoly Q = binomial_lift_power(S2, 2, 2);
        const CSMForm target = sym_power(dk_extract_csm(S2, 2), 2);
        const CSMForm dQ = dk_extract_csm(Q, 4);
        const json prm = {{"n", m}};
        rec.add("symprod.lift-classical", "binom(lift of S_2, 2) mod 2 is classical", prm, Q.exponent(), 1, Q.exponent() <= 1);
        rec.add("symprod.lift-form", "d^4 Q = Sym^2(d^2 S_2)", prm, io::digest(io::to_json(dQ)), io::digest(io::to_json(target)),
                dQ == target);
        const CSMForm dS4 = dk_extract_csm(S4, 4);
        rec.add("symprod.s4-is-a-lift", "d^4 S_4 = Sym^2(d^2 S_2)", prm, io::digest(io::to_json(dS4)),
                io::digest(io::to_json(target)), dS4 == target);
        const int dd = degree_by_derivatives(Q - S4);
        rec.add("symprod.lift-matches-s4", "deg(Q - S_4) <= 3", prm, degree_str(dd), 3, dd <= 3);
    }
}

void suite_dkp(Recorder& rec) {
    require_p(rec.params(), 2, "dkp");
    const int N = pick(rec.params().n, 3);
    std::vector<int> ks = {3, 4};
    if (rec.params().degree >= 0) ks = {rec.params().degree};
    for (int k : ks) {
        if (k < 2) throw Error("dkp needs k >= p");
        for (int n = 1; n <= N; ++n) {
            const Space V(2, n);
            std::vector<NCPoly> polys;
            std::string source;
            const PolyFamily fam(V, k, true, ~u64{0} >> 2);
            if (fam.count() <= 65536) {
                for (u64 i = 0; i < fam.count(); ++i) polys.push_back(fam.poly(i));
                source = "all degree <= k modulo constants";
            } else {
                // Both sides are additive in P, so the single-term generators
                // of the degree <= k group cover every member.
                for (const auto& slot : fam.slots()) {
                    CanonicalForm f{TorusValue::zero(2), {Term{slot.mono, slot.depth, 1}}};
                    polys.push_back(NCPoly::from_form(V, f));
                }
                for (int j = 1; j <= k; ++j) polys.push_back(catalog::L_over(V, j));
                source = "single-term generators of all degree <= k, and L/2^j";
            }
            const u64 tuples = ipow(V.size(), k - 1);
            rec.charge(polys.size() * tuples * (u64{1} << k), "dkp");
            Tally t = parallel_reduce(
                polys.size(), Tally{},
                [&](u64 first, u64 last, Tally acc) {
                    for (u64 i = first; i < last; ++i) {
                        const DkpReport r = check_dkp(polys[i], k);
                        acc.cases += r.checked;
                        if (!r.pass()) acc.fail({{"P", io::poly_text(polys[i])}, {"tuple", r.counterexample}});
                    }
                    return acc;
                },
                [](Tally& acc, Tally& part) { acc.merge(part); });
            record_tally(rec, "dkp.identity", "d^k P(h_1 x p, h_2, ...) = -d^{k-p+1}(pP)(h_1, h_2, ...)",
                         {{"n", n}, {"k", k}, {"polynomials", polys.size()}, {"source", source}}, t);
        }
    }
}

struct RootTally {
    Tally root, degree, interpolate, values;
    void merge(RootTally& o) {
        root.merge(o.root);
        degree.merge(o.degree);
        interpolate.merge(o.interpolate);
        values.merge(o.values);
    }
};

void check_poly(const Space& V, const CanonicalForm& f, RootTally& t) {
    const NCPoly P = NCPoly::from_form(V, f);
    const int d = form_degree(V, f);
    const NCPoly R = pth_root(P);
    ++t.root.cases;
    if (mul_by_p(R) != P) t.root.fail({{"P", io::poly_text(P)}});
    ++t.degree.cases;
    const int dr = degree_by_derivatives(NCPoly(V, R.exponent(), R.residues()));
    const int bound = d == kNegInfDegree ? kNegInfDegree : std::max(d, 0) + V.p() - 1;
    if (dr > bound) t.degree.fail({{"P", io::poly_text(P)}, {"root_degree", degree_str(dr)}, {"bound", degree_str(bound)}});
    ++t.interpolate.cases;
    if (interpolate(V, P.residues(), P.exponent()) != f) t.interpolate.fail({{"P", io::poly_text(P)}});
    ++t.values.cases;
    const u64 vc = value_count(P), vb = value_count_bound(V.p(), d);
    if (vc > vb) t.values.fail({{"P", io::poly_text(P)}, {"values", vc}, {"bound", vb}});
}

void record_roots(Recorder& rec, const json& prm, const RootTally& t) {
    record_tally(rec, "roots.multiply", "p * pth_root(P) = P", prm, t.root);
    record_tally(rec, "roots.degree", "deg pth_root(P) <= deg P + p - 1", prm, t.degree);
    record_tally(rec, "roots.interpolate", "interpolate(eval(f)) = f", prm, t.interpolate);
    record_tally(rec, "roots.value-count", "#values of P <= p^{floor((d-1)/(p-1)) + 1}", prm, t.values);
}

void suite_roots(Recorder& rec) {
    const auto& prm = rec.params();
    std::vector<std::tuple<int, int, int>> ranges;
    if (prm.p) {
        if (!is_prime(prm.p) || prm.p > kMaxPrime) throw Error("p must be a prime <= 13");
        ranges.emplace_back(prm.p, pick(prm.n, prm.p == 2 ? 3 : 2), prm.degree >= 0 ? prm.degree : (prm.p == 2 ? 4 : 3));
    } else {
        ranges = {{2, pick(prm.n, 3), prm.degree >= 0 ? prm.degree : 4}, {3, pick(prm.n, 2), prm.degree >= 0 ? prm.degree : 3}};
    }
    for (auto [p, N, d] : ranges)
        for (int n = 1; n <= N; ++n) {
            const Space V(p, n);
            const PolyFamily fam(V, d, true, ~u64{0} >> 2);
            rec.charge(fam.count() * V.size() * static_cast<u64>(8 + 4 * d), "roots family");
            RootTally t = parallel_reduce(
                fam.count(), RootTally{},
                [&](u64 first, u64 last, RootTally acc) {
                    for (u64 i = first; i < last; ++i) check_poly(V, fam.form(i), acc);
                    return acc;
                },
                [](RootTally& acc, RootTally& part) { acc.merge(part); });
            record_roots(rec, {{"p", p}, {"n", n}, {"d", d}, {"family", "all modulo constants"}}, t);
        }

    // Larger spaces, with constants.
    const std::vector<std::tuple<int, int, int>> big = {{2, 4, 5}, {2, 5, 6}, {2, 6, 4}, {3, 3, 4}, {3, 4, 3}, {5, 2, 5}};
    const u64 samples = prm.p ? 100 : 500;
    std::vector<std::tuple<int, int, int>> pool;
    for (auto c : big)
        if (!prm.p || std::get<0>(c) == prm.p) pool.push_back(c);
    if (pool.empty()) return;
    rec.charge(samples * 4096 * 32, "roots random");
    SplitMix64 rng = SplitMix64(rec.seed()).split(7);
    std::vector<std::pair<std::size_t, CanonicalForm>> cases;
    for (u64 s = 0; s < samples; ++s) {
        const std::size_t c = rng.below(pool.size());
        const auto [p, n, d] = pool[c];
        cases.emplace_back(c, random_form(Space(p, n), d, rng));
    }
    RootTally t = parallel_reduce(
        cases.size(), RootTally{},
        [&](u64 first, u64 last, RootTally acc) {
            for (u64 i = first; i < last; ++i) {
                const auto [p, n, d] = pool[cases[i].first];
                check_poly(Space(p, n), cases[i].second, acc);
            }
            return acc;
        },
        [](RootTally& acc, RootTally& part) { acc.merge(part); });
    json shapes = json::array();
    for (auto [p, n, d] : pool) shapes.push_back({p, n, d});
    record_roots(rec, {{"shapes", shapes}, {"family", "seeded random with constants"}}, t);
}

double unorm(const BoundedFunction& f, int d) { return gowers_norm(f, d).norm; }

void gowers_props_at(Recorder& rec, int p, int n, int trials) {
    const Space V(p, n);
    const int dmax = 3;
    const json base = {{"p", p}, {"n", n}, {"trials", trials}};
    constexpr double kTol = 1e-8;
    rec.charge(static_cast<u64>(trials) * 12 * ipow(V.size(), dmax + 1), "gowers-props");
    SplitMix64 root = SplitMix64(rec.seed()).split(static_cast<u64>(p * 100 + n));
    auto where = [](int d, int t) { return [d, t] { return json{{"d", d}, {"trial", t}}; }; };

    for (int d = 1; d <= dmax; ++d) {
        json prm = base;
        prm["d"] = d;
        SplitMix64 rng = root.split(static_cast<u64>(d));
        Worst tri, homog, mono, lp, csg1, csg2, modul, methods;
        for (int t = 0; t < trials; ++t) {
            const BoundedFunction f = BoundedFunction::random(V, rng), g = BoundedFunction::random(V, rng);
            const double nf = unorm(f, d), ng = unorm(g, d);
            tri.see(unorm(f + g, d) - nf - ng, where(d, t));
            homog.see(std::abs(unorm(Complex(2.0) * g, d) - 2 * ng), where(d, t));
            methods.see(std::abs(gowers_norm(f, d, NormMethod::Direct).norm - nf), where(d, t));
            mono.see(nf - unorm(f, d + 1), where(d, t));
            if (d == 1) mono.see(std::abs(std::abs(f.mean()) - nf), where(d, t));
            lp.see(nf - f.lp_norm(std::ldexp(1.0, d) / (d + 1)), where(d, t));

            std::vector<BoundedFunction> fs;
            double prod = 1;
            for (int w = 0; w < (1 << d); ++w) {
                fs.push_back(BoundedFunction::random(V, rng));
                prod *= unorm(fs.back(), d);
            }
            csg1.see(std::abs(gowers_inner_product(fs, d)) - prod, where(d, t));

            // F_j is a random 1-bounded table on the coordinates other than x_j.
            std::vector<std::vector<Complex>> F(static_cast<std::size_t>(d));
            const u64 others = ipow(V.size(), d - 1);
            for (auto& Fj : F) {
                Fj.resize(others);
                for (auto& z : Fj) z = std::polar(rng.uniform(), 2 * std::numbers::pi * rng.uniform());
            }
            Complex acc = 0;
            const u64 total = ipow(V.size(), d);
            std::vector<u64> x(static_cast<std::size_t>(d));
            for (u64 c = 0; c < total; ++c) {
                u64 r = c, sum = 0;
                for (int j = 0; j < d; ++j) {
                    x[j] = r % V.size();
                    r /= V.size();
                    sum = V.add(sum, x[j]);
                }
                Complex term = f(sum);
                for (int j = 0; j < d; ++j) {
                    u64 idx = 0;
                    for (int i = d - 1; i >= 0; --i)
                        if (i != j) idx = idx * V.size() + x[i];
                    term *= F[j][idx];
                }
                acc += term;
            }
            csg2.see(std::abs(acc / static_cast<double>(total)) - nf, where(d, t));

            const NCPoly P = NCPoly::from_form(V, random_form(V, d - 1, rng));
            modul.see(std::abs(unorm(modulate(f, P), d) - nf), where(d, t));
        }
        record_worst(rec, "gowers.triangle", "||f+g|| <= ||f|| + ||g||", prm, tri, kTol);
        record_worst(rec, "gowers.homogeneity", "||2g|| = 2||g||", prm, homog, kTol);
        record_worst(rec, "gowers.monotone", "|E f| = ||f||_{U^1} and ||f||_{U^d} <= ||f||_{U^{d+1}}", prm, mono, kTol);
        record_worst(rec, "gowers.lp-bound", "||f||_{U^d} <= ||f||_{L^{2^d/(d+1)}}", prm, lp, kTol);
        record_worst(rec, "gowers.cauchy-schwarz-1", "|<f_w>_{U^d}| <= prod ||f_w||_{U^d}", prm, csg1, kTol);
        record_worst(rec, "gowers.cauchy-schwarz-2", "|E f(x_1+...+x_d) prod F_j| <= ||f||_{U^d}, F_j free of x_j", prm,
                     csg2, kTol);
        record_worst(rec, "gowers.modulation", "||f e(P)||_{U^d} = ||f||_{U^d} for deg P <= d-1", prm, modul, kTol);
        record_worst(rec, "gowers.direct-vs-recursive", "direct and recursive norms agree", prm, methods, 1e-9);
    }

    // Pure phases: the exact unity-counter value must equal the bias of d^d P.
    SplitMix64 rng = root.split(99);
    for (int d = 1; d <= dmax; ++d) {
        Tally exact;
        Worst flt;
        for (int t = 0; t < 20; ++t) {
            const NCPoly P = NCPoly::from_form(V, random_form(V, d, rng));
            const Expectation e = phase_norm_power(P, d);
            const BiasResult b = bias(dk_extract(P, d));
            ++exact.cases;
            if (!e.rational || *e.rational != b.value)
                exact.fail({{"P", io::poly_text(P)}, {"bias", to_string(b.value)}});
            const double num = gowers_norm(BoundedFunction::phase(P), d).power;
            flt.see(std::abs(num - boost::rational_cast<double>(b.value)), [&] { return json{{"P", io::poly_text(P)}}; });
        }
        json prm = base;
        prm["d"] = d;
        record_tally(rec, "gowers.phase-exact", "||e(P)||_{U^d}^{2^d} = bias(d^d P) exactly", prm, exact);
        record_worst(rec, "gowers.phase-float", "floating norm power matches the exact value", prm, flt, 1e-9);
    }
}

void gi1_at(Recorder& rec, int p, int n, int trials) {
    const Space V(p, n);
    rec.charge(static_cast<u64>(trials) * ipow(V.size(), 3), "gi1");
    SplitMix64 rng = SplitMix64(rec.seed()).split(static_cast<u64>(7000 + p * 100 + n));
    Worst w;
    for (int t = 0; t < trials; ++t) {
        const BoundedFunction f = BoundedFunction::random(V, rng);
        const double u2 = gowers_norm(f, 2).norm;
        const double fmax = walsh_fourier(f).cwiseAbs().maxCoeff();
        w.see(u2 * u2 - fmax, [t] { return json{{"trial", t}}; });
    }
    record_worst(rec, "gowers.gi1-certificate", "max |fhat| >= ||f||_{U^2}^2", {{"p", p}, {"n", n}, {"trials", trials}}, w, 1e-12);
}

void suite_gowers_props(Recorder& rec) {
    const auto& prm = rec.params();
    std::vector<std::pair<int, int>> sizes;
    if (prm.p || prm.n) {
        sizes.emplace_back(pick(prm.p, 2), pick(prm.n, pick(prm.p, 2) == 2 ? 4 : 2));
    } else {
        sizes = {{2, 4}, {3, 2}};
    }
    for (auto [p, n] : sizes) {
        if (ipow(p, n) > 64) throw BudgetExceeded("gowers-props runs on |V| <= 64");
        gowers_props_at(rec, p, n, 100);
        gi1_at(rec, p, n, 100);
    }
    if (!prm.p && !prm.n) gi1_at(rec, 2, 6, 1000);

    // Quadratic forms: sum of x_i^2 over F_3^n has bias 3^{-n}, so arank_1 = n.
    if (!prm.p || prm.p == 3)
        for (int n = 2; n <= 3; ++n) {
            const Space V(3, n);
            const NCPoly Q = NCPoly::classical(V, [&](u64 x) {
                int s = 0;
                for (int t = 0; t < n; ++t) s += V.digit(x, t) * V.digit(x, t);
                return s % 3;
            });
            const ArankResult a = analytic_rank(Q, 1);
            const Rational expect(1, static_cast<std::int64_t>(ipow(3, n)));
            rec.add("gowers.quadratic-rank", "arank_1(sum x_i^2) = n over F_3^n", {{"n", n}},
                    {{"bias", to_string(a.bias)}, {"arank", a.arank}}, {{"bias", to_string(expect)}, {"arank", n}},
                    a.bias == expect && std::abs(a.arank - n) < 1e-12, 1e-12);
        }

    // arank(P) = arank(-P) on every polynomial of degree <= 3 on F_2^2 and F_3^2.
    for (auto [p, n, d] : {std::tuple{2, 2, 3}, std::tuple{3, 2, 2}}) {
        if (prm.p && prm.p != p) continue;
        const Space V(p, n);
        const PolyFamily fam(V, d, true);
        Tally t;
        for (u64 i = 0; i < fam.count(); ++i) {
            const NCPoly P = fam.poly(i);
            const int s = std::max(d - 1, 0);
            ++t.cases;
            if (analytic_rank(P, s).bias != analytic_rank(-P, s).bias) t.fail({{"P", io::poly_text(P)}});
        }
        record_tally(rec, "gowers.arank-negation", "arank(P) = arank(-P)", {{"p", p}, {"n", n}, {"d", d}}, t);
    }

    // rank_3(S_4) <= 1: S_4 is a function of L/8.
    if (!prm.p || prm.p == 2)
        for (int n = 4; n <= 6; ++n) {
            const Space V(2, n);
            const NCPoly S4 = catalog::S(V, 4), L8 = catalog::L_over(V, 3);
            const auto w = RankWitness::induced(S4, {L8});
            const bool ok = w && rank_witness_check(S4, 3, *w);
            rec.add("gowers.rank-witness", "S_4 is a function of L/8", {{"n", n}, {"s", 3}}, ok, true, ok);
        }
}

WeightedPoly random_weighted(int p, const std::vector<int>& D, int d, SplitMix64& rng) {
    WeightedPoly f(p, D);
    f.add_term(std::vector<int>(D.size(), 0), TorusValue(p, rng.below(ipow(p, 2)), 2));
    const int m = static_cast<int>(D.size());
    std::vector<int> i(static_cast<std::size_t>(m), 0);
    std::function<void(int, int)> fill = [&](int t, int used) {
        if (t == m) {
            if (std::all_of(i.begin(), i.end(), [](int v) { return v == 0; })) return;
            for (int r = 0; used + r * (p - 1) <= d; ++r)
                if (rng.below(2)) f.add_term(i, TorusValue(p, rng.below(ipow(p, r + 1)), r + 1));
            return;
        }
        for (int v = 0; used + v * D[t] <= d; ++v) {
            i[t] = v;
            fill(t + 1, used + v * D[t]);
        }
        i[t] = 0;
    };
    fill(0, 0);
    return f;
}

Factor sample_factor(const Space& V) {
    Factor F;
    F.p = 2;
    F.D = {2, 3};
    const NCPoly S2 = catalog::S(V, 2);
    F.chains = {{S2, pth_root(S2)}, {catalog::S(V, 3)}};
    return F;
}

void suite_weighted(Recorder& rec) {
    const auto& prm = rec.params();
    std::vector<int> primes = {2, 3};
    if (prm.p) primes = {prm.p};
    const int dmax = prm.degree >= 0 ? prm.degree : 5;
    SplitMix64 rng = SplitMix64(rec.seed()).split(11);
    Tally root, root_deg, expand, deg, period;
    rec.charge(300 * 20000, "weighted random");
    for (int trial = 0; trial < 300; ++trial) {
        const int p = primes[rng.below(primes.size())];
        const int m = 1 + static_cast<int>(rng.below(2));
        std::vector<int> D;
        for (int t = 0; t < m; ++t) D.push_back(1 + static_cast<int>(rng.below(2)));
        const int d = static_cast<int>(rng.below(static_cast<u64>(dmax) + 1));
        const WeightedPoly f = random_weighted(p, D, d, rng);
        const int df = weighted_degree(f);
        auto w = [&] { return json{{"trial", trial}, {"f", io::to_json(f)}}; };

        const WeightedPoly g = weighted_pth_root(f);
        ++root.cases;
        if (scale(p, g) != f) root.fail(w());
        ++root_deg.cases;
        const int dg = weighted_degree(PeriodicTable::from_poly(g));
        if (dg > std::max(df, 0) + p - 1) root_deg.fail(w());

        const PeriodicTable T = PeriodicTable::from_poly(f);
        ++deg.cases;
        if (weighted_degree(T) != df) deg.fail(w());
        ++expand.cases;
        if (binomial_expand(T, std::max(df, 0)) != f) expand.fail(w());
        ++period.cases;
        if (df >= 0 && !periodicity_check(f, std::max(df, 1)).pass()) period.fail(w());
    }
    const json base = {{"primes", primes}, {"d_max", dmax}};
    record_tally(rec, "weighted.root", "p * root(f) = f", base, root);
    record_tally(rec, "weighted.root-degree", "deg root(f) <= deg f + p - 1", base, root_deg);
    record_tally(rec, "weighted.degree", "table degree = term degree", base, deg);
    record_tally(rec, "weighted.expand", "binomial expansion of the table returns f", base, expand);
    record_tally(rec, "weighted.periodicity", "forced periods and top differences", base, period);

    if (prm.p && prm.p != 2) return;
    const Space V(2, pick(prm.n, 4));
    rec.charge(V.size() * 4096, "weighted factor");
    const Factor F = sample_factor(V);
    const json fprm = {{"n", V.n()}, {"D", F.D}};
    const FactorCheck c0 = verify_factor(F);
    rec.add("weighted.factor", "chains satisfy p P_{i,j} = P_{i,j-1} with the declared degrees", fprm, c0.failures, json::array(),
            c0.pass());
    const Factor G = factor_depth_extend(F, {2, 1});
    const FactorCheck c1 = verify_factor(G);
    rec.add("weighted.factor-extend", "depth extension keeps a valid factor", fprm, c1.failures, json::array(),
            c1.pass() && G.depth(0) == 2 && G.depth(1) == 1);
    const Factor R = factor_retract(G, 3);
    const FactorCheck c2 = verify_factor(R);
    rec.add("weighted.factor-retract", "retraction to degree 3 keeps a valid factor", fprm, c2.failures, json::array(),
            c2.pass() && R.degree() <= 3);
    Tally pull;
    for (int t = 0; t < 40; ++t) {
        const WeightedPoly f = random_weighted(2, G.D, G.degree(), rng);
        const NCPoly Q = factor_pullback(G, f);
        ++pull.cases;
        if (degree_by_derivatives(Q) > weighted_degree(f)) pull.fail({{"f", io::to_json(f)}});
    }
    record_tally(rec, "weighted.pullback", "deg f(P_{1,J_1}, ..., P_{m,J_m}) <= weighted deg f", fprm, pull);
}

// ---------------------------------------------------------------------------

std::vector<std::vector<u64>> abelian_orders(u64 max_order) {
    static const std::vector<std::vector<u64>> all = {
        {2},  {3},  {4},  {2, 2}, {5},  {6},    {7},  {8},    {2, 4},    {2, 2, 2},    {9},    {3, 3},
        {10}, {11}, {12}, {2, 6}, {13}, {14},   {15}, {16},   {2, 8},    {4, 4},       {2, 2, 4}, {2, 2, 2, 2}};
    std::vector<std::vector<u64>> out;
    for (const auto& o : all) {
        u64 s = 1;
        for (u64 n : o) s *= n;
        if (s <= max_order) out.push_back(o);
    }
    return out;
}

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

constexpr u64 kScanBudget = u64{1} << 24;

void suite_cubes(Recorder& rec) {
    const auto& prm = rec.params();
    const u64 max_order = prm.n > 0 ? static_cast<u64>(prm.n) : 16;
    const int kmax = prm.degree >= 0 ? prm.degree : 3;
    SplitMix64 rng = SplitMix64(rec.seed()).split(17);
    for (const auto& orders : abelian_orders(max_order)) {
        const auto groups = filtrations_of(orders, rng);
        for (int k = 0; k <= kmax; ++k) {
            struct Scan {
                bool skipped = false;
                std::optional<HkIndexCheck> index;
                HkScan s;
            };
            rec.charge(groups.size() * kScanBudget, "cubes scan");
            std::vector<Scan> scans(groups.size());
            parallel_chunks(static_cast<unsigned>(groups.size()), [&](unsigned g) {
                try {
                    scans[g].s = hk_equivalence_scan(groups[g], k, kScanBudget);
                } catch (const BudgetExceeded&) {
                    try {
                        scans[g].index = hk_equivalence_by_index(groups[g], k, kScanBudget);
                    } catch (const BudgetExceeded&) {
                        scans[g].skipped = true;
                    }
                }
            });
            Tally t;
            u64 skipped = 0, by_index = 0;
            for (std::size_t g = 0; g < groups.size(); ++g) {
                if (scans[g].skipped) {
                    ++skipped;
                    continue;
                }
                ++t.cases;
                if (const auto& ix = scans[g].index) {
                    ++by_index;
                    if (!ix->equal)
                        t.fail({{"group", io::to_json(groups[g])},
                                {"taylor_in_faces", ix->taylor_in_faces},
                                {"face_members", ix->face_members},
                                {"hk_size", hk_size(groups[g], k)}});
                    continue;
                }
                const HkScan& s = scans[g].s;
                const double expect = std::pow(static_cast<double>(groups[g].size()), 1 << k);
                if (s.disagreements || s.members != hk_size(groups[g], k) || s.cubes != expect) {
                    json w = {{"group", io::to_json(groups[g])}, {"disagreements", s.disagreements}, {"members", s.members}};
                    if (s.counterexample) w["cube"] = io::cube_to_json(*s.counterexample, groups[g]);
                    t.fail(std::move(w));
                }
            }
            record_tally(rec, "cubes.hk-equivalence", "face sums in G_|face| iff Taylor coefficients in G_|J|",
                         {{"orders", orders}, {"k", k}, {"filtrations", groups.size()}, {"by_index", by_index}, {"skipped", skipped}}, t);
        }
    }

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
    SplitMix64 mrng = SplitMix64(rec.seed()).split(1000);
    for (const auto& [H, G] : pairs) {
        const int kmax_pair = G.degree() + 1;
        double count = 1;
        for (u64 x = 0; x < H.size(); ++x) count *= static_cast<double>(G.size());
        const bool exhaustive = count <= 4096;
        const u64 runs = exhaustive ? static_cast<u64>(count) : 400;
        std::vector<GroupMap> maps(runs, GroupMap(H.size()));
        for (u64 r = 0; r < runs; ++r) {
            u64 code = r;
            for (auto& v : maps[r]) {
                if (exhaustive) {
                    v = code % G.size();
                    code /= G.size();
                } else {
                    v = mrng.below(G.size());
                }
            }
        }
        rec.charge(runs * 4096, "cubes maps");
        struct MapTally {
            Tally t;
            u64 polynomial = 0;
            void merge(MapTally& o) {
                t.merge(o.t);
                polynomial += o.polynomial;
            }
        };
        MapTally mt = parallel_reduce(
            runs, MapTally{},
            [&](u64 first, u64 last, MapTally acc) {
                for (u64 r = first; r < last; ++r) {
                    const bool poly = is_polynomial_map(maps[r], H, G);
                    const CubePreservation c = cube_preservation_check(maps[r], H, G, kmax_pair);
                    ++acc.t.cases;
                    acc.polynomial += poly;
                    if (c.preserved != poly) acc.t.fail({{"map", maps[r]}, {"polynomial", poly}, {"failing_k", c.failing_k}});
                }
                return acc;
            },
            [](MapTally& acc, MapTally& part) { acc.merge(part); });
        record_tally(rec, "cubes.polynomial-iff-cube-preserving", "phi polynomial iff phi(HK^k(H)) in HK^k(G), k <= deg G + 1",
                     {{"domain", io::to_json(H)},
                      {"codomain", io::to_json(G)},
                      {"k_max", kmax_pair},
                      {"exhaustive", exhaustive},
                      {"polynomial_maps", mt.polynomial}},
                     mt.t);
    }
}

// ---------------------------------------------------------------------------

void suite_decomposition(Recorder& rec) {
    require_p(rec.params(), 2, "decomposition");
    const Space V(2, pick(rec.params().n, 5));
    rec.charge(100 * V.size() * 64, "decomposition");
    SplitMix64 rng = SplitMix64(rec.seed()).split(10);
    const std::vector<NCPoly> pool = {catalog::S(V, 1), catalog::S(V, 2), catalog::S(V, 3), catalog::L_over(V, 2),
                                      catalog::L_over(V, 3)};
    Tally pyth, orth, mono, meas;
    for (int t = 0; t < 100; ++t) {
        std::vector<Rational> f(V.size());
        for (auto& v : f) v = Rational(static_cast<std::int64_t>(rng.below(21)) - 10, 1 + static_cast<std::int64_t>(rng.below(6)));
        std::vector<NCPoly> factors;
        for (const auto& P : pool)
            if (rng.below(2)) factors.push_back(P);
        factors.push_back(NCPoly::from_form(V, random_form(V, 1 + static_cast<int>(rng.below(2)), rng)));
        const Atoms B = level_sets(V, factors);
        const auto Ef = conditional_expectation(B, f);
        std::vector<Rational> r(V.size());
        for (u64 x = 0; x < V.size(); ++x) r[x] = f[x] - Ef[x];
        auto w = [&] { return json{{"trial", t}, {"atoms", B.size.size()}}; };

        ++pyth.cases;
        if (energy(f) != energy(Ef) + energy(r)) pyth.fail(w());

        std::vector<Rational> atom_value(B.size.size());
        for (auto& a : atom_value) a = Rational(static_cast<std::int64_t>(rng.below(11)) - 5, 1 + static_cast<std::int64_t>(rng.below(4)));
        std::vector<Rational> g(V.size());
        for (u64 x = 0; x < V.size(); ++x) g[x] = atom_value[B.label[x]];
        ++orth.cases;
        if (mean_product(r, g) != Rational(0)) orth.fail(w());

        ++meas.cases;
        if (conditional_expectation(B, g) != g) meas.fail(w());

        std::vector<NCPoly> finer = factors;
        finer.push_back(pool[rng.below(pool.size())]);
        const auto Ef2 = conditional_expectation(level_sets(V, finer), f);
        ++mono.cases;
        if (energy(Ef2) < energy(Ef)) mono.fail(w());
    }
    const json prm = {{"n", V.n()}, {"trials", 100}};
    record_tally(rec, "decomposition.pythagoras", "||f||^2 = ||E(f|B)||^2 + ||f - E(f|B)||^2", prm, pyth);
    record_tally(rec, "decomposition.orthogonality", "<f - E(f|B), g> = 0 for B-measurable g", prm, orth);
    record_tally(rec, "decomposition.measurable-fixed", "E(g|B) = g for B-measurable g", prm, meas);
    record_tally(rec, "decomposition.energy-monotone", "refining B does not decrease ||E(f|B)||^2", prm, mono);
}

}  // namespace

SuiteReport run_suite(const std::string& name, const SuiteParams& params) {
    static const std::map<std::string, void (*)(Recorder&)> table = {
        {"lucas", suite_lucas},     {"lam", suite_lam},     {"df", suite_df},           {"symprod", suite_symprod},
        {"gowers-props", suite_gowers_props}, {"dkp", suite_dkp}, {"roots", suite_roots}, {"weighted", suite_weighted},
        {"cubes", suite_cubes},     {"decomposition", suite_decomposition}};
    const auto it = table.find(name);
    if (it == table.end()) throw Error("unknown suite: " + name);
    SuiteReport report;
    report.suite = name;
    report.seed = params.seed;
    Recorder rec(report, params);
    it->second(rec);
    return report;
}

}  // namespace hofa
