#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hofa/catalog.hpp"
#include "hofa/cubes.hpp"
#include "hofa/gowers.hpp"
#include "hofa/io.hpp"
#include "hofa/multilinear.hpp"
#include "hofa/ncpoly.hpp"
#include "hofa/parallel.hpp"
#include "hofa/suites.hpp"
#include "hofa/weighted.hpp"

using namespace hofa;
using nlohmann::json;
using u64 = std::uint64_t;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kBudget = 3 };

struct Globals {
    int p = 2;
    int n = 0;
    int degree = -1;
    std::string input;
    std::string catalog;
    std::string out;
    bool json = false;
    bool timing = false;
    bool csv = false;
    u64 seed = 1;
    unsigned threads = 1;
    u64 budget = 0;
};

class Usage : public Error {
public:
    using Error::Error;
};

json load(const Globals& g) {
    if (g.input.empty()) throw Usage("--input is required");
    return io::read_json(g.input);
}

NCPoly load_poly(const Globals& g) {
    if (!g.catalog.empty()) {
        if (g.n <= 0 && g.catalog != "P" && g.catalog != "Q") throw Usage("--catalog needs --n");
        return catalog::by_name(g.catalog, g.n);
    }
    json j = load(g);
    if (j.is_string()) {
        if (g.n <= 0) throw Usage("text input needs --p and --n");
        return io::parse_poly_text(g.p, g.n, j.get<std::string>());
    }
    if (j.is_object() && j.contains("poly")) j = j.at("poly");
    if (!j.contains("p")) j["p"] = g.p;
    if (!j.contains("n")) j["n"] = g.n;
    return io::ncpoly_from_json(j);
}

BoundedFunction load_function(const Globals& g) {
    if (!g.catalog.empty()) return BoundedFunction::phase(load_poly(g));
    const json j = load(g);
    if (j.is_object() && j.contains("values")) return io::function_from_json(j);
    return BoundedFunction::phase(load_poly(g));
}

std::vector<u64> parse_vector(const Space& V, const std::string& s) {
    std::vector<int> d;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) d.push_back(std::stoi(tok));
    if (static_cast<int>(d.size()) != V.n()) throw Usage("vector '" + s + "' needs " + std::to_string(V.n()) + " coordinates");
    for (int& v : d) v = ((v % V.p()) + V.p()) % V.p();
    return {V.encode(d)};
}

void write(const Globals& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(g.out);
    if (!f) throw Usage("cannot write " + g.out);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

void emit(const Globals& g, const json& j) {
    if (g.json) {
        write(g, j.dump(2));
        return;
    }
    std::ostringstream s;
    for (auto it = j.begin(); it != j.end(); ++it)
        s << it.key() << ": " << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump()) << "\n";
    write(g, s.str());
}

json poly_out(const NCPoly& P) {
    json j = io::to_json(P);
    j["text"] = io::poly_text(P);
    return j;
}

u64 budget_or(const Globals& g, u64 fallback) { return g.budget ? g.budget : fallback; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-classical polynomials, Gowers norms and cube groups over F_p^n"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--p", g.p, "Field characteristic");
    app.add_option("--n", g.n, "Dimension of F_p^n");
    app.add_option("--degree,--s", g.degree, "Degree bound (s for arank, d for norms)");
    app.add_option("--input", g.input, "JSON file, or - for stdin");
    app.add_option("--catalog", g.catalog, "Named polynomial on F_2^n: S<k>, L/<2^j>, P, Q");
    app.add_option("--out", g.out, "Write the result here instead of stdout");
    app.add_flag("--json", g.json, "Emit JSON");
    app.add_flag("--timing", g.timing, "Include runtimes in suite reports");
    app.add_flag("--csv", g.csv, "Emit suite reports as CSV");
    app.add_option("--seed", g.seed, "Seed for sampled checks");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    app.add_option("--budget", g.budget, "Work cap in elementary operations");

    std::vector<std::string> points;
    std::string method = "recursive";
    std::string suite;
    std::vector<u64> orders;

    auto* eval = app.add_subcommand("eval", "Evaluate a polynomial at points (default: whole table)");
    eval->add_option("--x", points, "Point as comma-separated digits");
    auto* derive = app.add_subcommand("derive", "Additive derivative along the given directions");
    derive->add_option("--along", points, "Direction as comma-separated digits")->required();
    auto* deg = app.add_subcommand("degree", "Degree of a polynomial");
    auto* interp = app.add_subcommand("interpolate", "Canonical form of a residue table {p,n,K,residues}");
    auto* root = app.add_subcommand("root", "p-th root by depth shift");
    auto* mulp = app.add_subcommand("mulp", "Multiply by p");
    auto* norm = app.add_subcommand("norm", "Gowers U^d norm of a function or phase e(P)");
    norm->add_option("--method", method, "direct or recursive")->check(CLI::IsMember({"direct", "recursive"}));
    auto* arank = app.add_subcommand("arank", "Analytic rank -log_p E e(d^{s+1} P)");
    auto* biasc = app.add_subcommand("bias", "Exact bias of a multilinear form (CSMForm JSON or d^k of a polynomial)");
    auto* witness = app.add_subcommand("witness-check", "Check P = F(Q_1, ..., Q_m) for {P, s, witness}");
    auto* explore = app.add_subcommand("explore", "Best correlating polynomial of degree <= s");
    auto* decompose = app.add_subcommand("decompose", "E(f|B) for {f, factors}, with the energy identity");
    auto* wdeg = app.add_subcommand("wdegree", "Weighted degree of a WeightedPoly");
    auto* wroot = app.add_subcommand("wroot", "p-th root of a WeightedPoly");
    auto* cube = app.add_subcommand("cube-check", "Host-Kra membership of {group, cube}");
    auto* polymap = app.add_subcommand("polymap-check", "Polynomial map and cube preservation for {domain, codomain, values}");
    auto* equi = app.add_subcommand("equidist", "Value histogram and character biases of {orders, values} or a factor");
    equi->add_option("--orders", orders, "Cyclic orders of the target group");
    auto* verify = app.add_subcommand("verify", "Run an identity suite");
    verify->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(suite_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kPass : kUsage;
    }

    try {
        set_thread_count(g.threads);
        if (*eval) {
            const NCPoly P = load_poly(g);
            json vals = json::object();
            if (points.empty()) {
                json table = json::array();
                for (u64 x = 0; x < P.space().size(); ++x) table.push_back(io::to_json(P(x)));
                vals["values"] = table;
            } else {
                json list = json::array();
                for (const auto& s : points) {
                    const u64 x = parse_vector(P.space(), s)[0];
                    list.push_back({{"x", s}, {"value", io::to_json(P(x))}, {"text", P(x).str()}});
                }
                vals["values"] = list;
            }
            emit(g, vals);
        } else if (*derive) {
            NCPoly P = load_poly(g);
            for (const auto& s : points) P = derivative(P, parse_vector(P.space(), s)[0]);
            emit(g, poly_out(P.with_form()));
        } else if (*deg) {
            const NCPoly P = load_poly(g);
            emit(g, {{"degree", degree_str(degree(P))}, {"classical", P.is_classical()}, {"exponent", P.exponent()}});
        } else if (*interp) {
            json j = load(g);
            if (!j.contains("p")) j["p"] = g.p;
            if (!j.contains("n")) j["n"] = g.n;
            const NCPoly P = io::ncpoly_from_json(j).with_form();
            json out = poly_out(P);
            out["degree"] = degree_str(degree(P));
            emit(g, out);
        } else if (*root) {
            emit(g, poly_out(pth_root(load_poly(g))));
        } else if (*mulp) {
            emit(g, poly_out(mul_by_p(load_poly(g)).with_form()));
        } else if (*norm) {
            const BoundedFunction f = load_function(g);
            const int d = g.degree > 0 ? g.degree : 2;
            const auto m = method == "direct" ? NormMethod::Direct : NormMethod::Recursive;
            const NormResult r = gowers_norm(f, d, m, budget_or(g, kDefaultNormBudget));
            json out = {{"d", d}, {"norm", r.norm}, {"power", r.power}};
            if (f.phase_poly()) {
                const Expectation e = phase_norm_power(*f.phase_poly(), d, budget_or(g, kDefaultNormBudget));
                if (e.rational) out["exact_power"] = io::to_json(*e.rational);
                out["exact_power_value"] = e.value.real();
            }
            emit(g, out);
        } else if (*arank) {
            const NCPoly P = load_poly(g);
            if (g.degree < 0) throw Usage("arank needs --s");
            const ArankResult r = analytic_rank(P, g.degree, budget_or(g, kDefaultBiasBudget));
            json out = {{"bias", io::to_json(r.bias)}, {"arank", r.infinite ? json("inf") : json(r.arank)}, {"s", g.degree}};
            emit(g, out);
        } else if (*biasc) {
            BiasResult r;
            if (!g.catalog.empty() && g.catalog.rfind("d4S4", 0) == 0) {
                if (g.n <= 0) throw Usage("--catalog d4S4 needs --n");
                r = bias(catalog::d4S4(g.n), budget_or(g, kDefaultBiasBudget));
            } else if (g.catalog.empty() && load(g).contains("coeffs")) {
                r = bias(io::csm_from_json(load(g)), budget_or(g, kDefaultBiasBudget));
            } else {
                const NCPoly P = load_poly(g);
                const int k = g.degree >= 0 ? g.degree : degree(P);
                r = bias(dk_extract(P, k), budget_or(g, kDefaultBiasBudget));
            }
            emit(g, {{"bias", io::to_json(r.value)},
                     {"bias_value", boost::rational_cast<double>(r.value)},
                     {"zero_count", r.zero_count},
                     {"total", r.total}});
        } else if (*witness) {
            const json j = load(g);
            const NCPoly P = io::ncpoly_from_json(j.at("P"));
            const int s = j.contains("s") ? j.at("s").get<int>() : g.degree;
            std::vector<NCPoly> qs;
            for (const auto& q : j.at("witness")) qs.push_back(io::ncpoly_from_json(q));
            const auto w = RankWitness::induced(P, qs);
            bool ok = false;
            if (w) ok = rank_witness_check(P, s, *w);
            emit(g, {{"pass", ok}, {"s", s}, {"witness_size", qs.size()}, {"table_entries", w ? w->table.size() : 0}});
            return ok ? kPass : kFail;
        } else if (*explore) {
            const BoundedFunction f = load_function(g);
            const int s = g.degree >= 0 ? g.degree : 1;
            const ExploreResult r = inverse_explore(f, s, budget_or(g, kDefaultNormBudget));
            json out = poly_out(r.best);
            out["correlation"] = r.correlation;
            out["candidates"] = r.candidates;
            out["index"] = r.index;
            emit(g, out);
        } else if (*decompose) {
            const json j = load(g);
            const BoundedFunction f = io::function_from_json(j.at("f"));
            std::vector<NCPoly> factors;
            for (const auto& q : j.at("factors")) factors.push_back(io::ncpoly_from_json(q));
            const Atoms B = level_sets(f.space(), factors);
            const BoundedFunction Ef = conditional_expectation(f, B);
            const double ef = std::pow(f.lp_norm(2), 2), eb = std::pow(Ef.lp_norm(2), 2), er = std::pow((f - Ef).lp_norm(2), 2);
            json vals = json::array();
            for (Eigen::Index x = 0; x < Ef.values().size(); ++x)
                vals.push_back({{"re", Ef.values()[x].real()}, {"im", Ef.values()[x].imag()}});
            const bool ok = std::abs(ef - eb - er) <= 1e-9;
            emit(g, {{"atoms", B.size.size()},
                     {"energy_f", ef},
                     {"energy_conditional", eb},
                     {"energy_residual", er},
                     {"pythagoras", ok},
                     {"conditional", {{"p", f.space().p()}, {"n", f.space().n()}, {"values", vals}}}});
            return ok ? kPass : kFail;
        } else if (*wdeg) {
            const WeightedPoly f = io::weighted_from_json(load(g));
            const int d = weighted_degree(f);
            json out = {{"degree", degree_str(d)}};
            if (d >= 0) out["table_degree"] = degree_str(weighted_degree(PeriodicTable::from_poly(f)));
            emit(g, out);
        } else if (*wroot) {
            const WeightedPoly f = weighted_pth_root(io::weighted_from_json(load(g)));
            json out = io::to_json(f);
            out["degree"] = degree_str(weighted_degree(f));
            emit(g, out);
        } else if (*cube) {
            const json j = load(g);
            const FilteredAbelianGroup G = io::group_from_json(j.at("group"));
            const CubePoint c = io::cube_from_json(j.at("cube"), G);
            const bool faces = hk_membership(c, G);
            const TaylorResult t = hk_taylor(c, G);
            json coeffs = json::array();
            for (u64 x : t.coeffs) coeffs.push_back(io::element_to_json(x, G));
            json out = {{"member", faces}, {"taylor_member", t.member}, {"taylor", coeffs}, {"k", c.k}};
            if (t.offending) out["offending_face"] = *t.offending;
            emit(g, out);
            if (faces != t.member) return kFail;
            return faces ? kPass : kFail;
        } else if (*polymap) {
            const io::MapSpec m = io::map_from_json(load(g));
            const int kmax = g.degree >= 0 ? g.degree : m.G.degree() + 1;
            const bool poly = is_polynomial_map(m.phi, m.H, m.G);
            const CubePreservation c = cube_preservation_check(m.phi, m.H, m.G, kmax, budget_or(g, kDefaultCubeBudget));
            json out = {{"polynomial", poly}, {"cube_preserving", c.preserved}, {"k_max", kmax}, {"cubes_checked", c.cubes_checked}};
            if (c.witness) {
                out["failing_k"] = c.failing_k;
                out["witness"] = io::cube_to_json(*c.witness, m.H);
            }
            emit(g, out);
            return poly == c.preserved && poly ? kPass : kFail;
        } else if (*equi) {
            const json j = load(g);
            std::vector<u64> ord = orders, vals;
            if (j.contains("chains")) {
                auto [o, v] = factor_map(io::factor_from_json(j));
                ord = o;
                vals = v;
            } else {
                if (j.contains("orders")) ord = j.at("orders").get<std::vector<u64>>();
                vals = j.at("values").get<std::vector<u64>>();
            }
            if (ord.empty()) throw Usage("equidist needs target orders");
            const EquidistributionReport r = equidistribution_report(vals, ord);
            emit(g, {{"orders", ord},
                     {"histogram", r.histogram},
                     {"total", r.total},
                     {"max_bias", r.max_bias},
                     {"argmax", r.argmax},
                     {"bias_zero", r.bias_zero},
                     {"max_deviation", io::to_json(r.max_deviation)},
                     {"weyl_consistent", r.weyl_consistent}});
            return r.bias_zero ? kPass : kFail;
        } else if (*verify) {
            SuiteParams prm;
            prm.p = app.count("--p") ? g.p : 0;
            prm.n = g.n;
            prm.degree = g.degree;
            prm.seed = g.seed;
            prm.budget = g.budget;
            const SuiteReport r = run_suite(suite, prm);
            if (g.csv) {
                write(g, r.to_csv(g.timing));
            } else if (g.json) {
                write(g, r.to_json(g.timing).dump(2));
            } else {
                std::ostringstream s;
                for (const auto& rec : r.records)
                    s << (rec.pass ? "PASS " : "FAIL ") << rec.check << " " << rec.params.dump() << " lhs=" << rec.lhs.dump()
                      << " rhs=" << rec.rhs.dump() << "\n";
                s << r.suite << ": " << r.records.size() - r.failures() << "/" << r.records.size() << " passed (seed " << r.seed
                  << ", " << SplitMix64::name << ")\n";
                write(g, s.str());
            }
            return r.pass() ? kPass : kFail;
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kBudget;
    } catch (const Usage& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: bad JSON input: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kPass;
}
