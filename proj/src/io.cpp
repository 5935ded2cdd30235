#include "hofa/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>

namespace hofa::io {

namespace {

template <class T>
T get(const json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad field \"") + key + "\": " + e.what());
    }
}

// coeff / p^e * prod |x_t|^{exps_t}
NCPoly monomial(const Space& V, std::int64_t coeff, int e, const std::vector<int>& exps) {
    if (static_cast<int>(exps.size()) != V.n()) throw ParseError("exponent vector has wrong length");
    for (int a : exps)
        if (a < 0) throw ParseError("negative exponent");
    return NCPoly::tabulate(V, e, [&](std::uint64_t x) {
        std::int64_t v = coeff;
        for (int t = 0; t < V.n(); ++t)
            for (int a = 0; a < exps[t]; ++a) v *= V.digit(x, t);
        return v;
    });
}

int denominator_exponent(int p, std::uint64_t m) {
    int e = 0;
    while (m > 1) {
        if (m % p) throw ParseError("denominator is not a power of p");
        m /= p;
        ++e;
    }
    return e;
}

}  // namespace

json to_json(const Rational& r) { return to_string(r); }

json to_json(const TorusValue& a) { return {{"num", a.num()}, {"exp", a.exp()}}; }

TorusValue torus_from_json(int p, const json& j) {
    const auto num = get<std::int64_t>(j, "num");
    const int exp = get<int>(j, "exp");
    if (exp < 0) throw ParseError("negative exponent");
    return TorusValue::from_residue(p, num, exp);
}

json to_json(const FVec& x) { return {{"p", x.p}, {"digits", x.digits}}; }

FVec fvec_from_json(const json& j) {
    FVec x{get<int>(j, "p"), get<std::vector<int>>(j, "digits")};
    for (int d : x.digits)
        if (d < 0 || d >= x.p) throw ParseError("digit out of range");
    return x;
}

json to_json(const NCPoly& P) {
    const CanonicalForm f = P.canonical();
    json terms = json::array();
    for (const Term& t : f.terms) {
        const auto d = P.space().digits(t.mono);
        terms.push_back({{"exps", d}, {"depth", t.depth}, {"coeff", t.coeff}});
    }
    return {{"p", P.p()}, {"n", P.n()}, {"alpha", to_json(f.alpha)}, {"terms", terms}};
}

NCPoly ncpoly_from_json(const json& j) {
    const int p = get<int>(j, "p");
    const int n = get<int>(j, "n");
    if (!is_prime(p)) throw ParseError("p must be prime");
    const Space V(p, n);
    if (j.contains("text")) return parse_poly_text(p, n, get<std::string>(j, "text"));
    if (j.contains("residues")) {
        auto r = get<std::vector<std::uint64_t>>(j, "residues");
        if (r.size() != V.size()) throw ParseError("residue table has wrong size");
        return NCPoly(V, get<int>(j, "K"), std::move(r));
    }
    NCPoly P = j.contains("alpha") ? NCPoly::constant(V, torus_from_json(p, j.at("alpha"))) : NCPoly::zero(V);
    if (j.contains("terms"))
        for (const auto& t : j.at("terms")) {
            const int depth = get<int>(t, "depth");
            if (depth < 0) throw ParseError("negative depth");
            P = P + monomial(V, get<std::int64_t>(t, "coeff"), depth + 1, get<std::vector<int>>(t, "exps"));
        }
    return P.with_form();
}

NCPoly parse_poly_text(int p, int n, const std::string& text) {
    const Space V(p, n);
    NCPoly P = NCPoly::zero(V);
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto number = [&] {
        skip();
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
            throw ParseError("expected a number at position " + std::to_string(i));
        std::uint64_t v = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) v = v * 10 + (text[i++] - '0');
        return v;
    };
    bool first = true;
    while (true) {
        skip();
        if (i >= text.size()) break;
        std::int64_t sign = 1;
        if (text[i] == '+' || text[i] == '-') {
            sign = text[i] == '-' ? -1 : 1;
            ++i;
            skip();
        } else if (!first) {
            throw ParseError("expected + or - at position " + std::to_string(i));
        }
        first = false;
        std::int64_t coeff = 1;
        int e = 1;
        std::vector<int> exps(n, 0);
        bool need_factor = true;
        if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            coeff = static_cast<std::int64_t>(number());
            e = 0;
            skip();
            if (i < text.size() && text[i] == '/') {
                ++i;
                e = denominator_exponent(p, number());
            }
            skip();
            need_factor = i < text.size() && text[i] == '*';
            if (need_factor) ++i;
        }
        while (need_factor) {
            skip();
            if (i >= text.size() || text[i] != 'x') throw ParseError("expected x<i> at position " + std::to_string(i));
            ++i;
            const std::uint64_t t = number();
            if (t < 1 || t > static_cast<std::uint64_t>(n)) throw ParseError("variable index out of range");
            int a = 1;
            skip();
            if (i < text.size() && text[i] == '^') {
                ++i;
                a = static_cast<int>(number());
            }
            exps[t - 1] += a;
            skip();
            need_factor = i < text.size() && text[i] == '*';
            if (need_factor) ++i;
        }
        P = P + monomial(V, sign * coeff, e, exps);
    }
    return P.with_form();
}

std::string poly_text(const NCPoly& P) {
    const CanonicalForm f = P.canonical();
    std::string out;
    auto frac = [&](std::uint64_t num, int exp) {
        return exp == 0 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(ipow(P.p(), exp));
    };
    for (const Term& t : f.terms) {
        if (!out.empty()) out += " + ";
        out += frac(static_cast<std::uint64_t>(t.coeff), t.depth + 1);
        const auto d = P.space().digits(t.mono);
        for (int s = 0; s < P.n(); ++s) {
            if (d[s] == 0) continue;
            out += "*x" + std::to_string(s + 1);
            if (d[s] > 1) out += "^" + std::to_string(d[s]);
        }
    }
    if (!f.alpha.is_zero() || out.empty()) {
        if (!out.empty()) out += " + ";
        out += frac(f.alpha.num(), f.alpha.exp());
    }
    return out;
}

json to_json(const CSMForm& T) {
    json coeffs = json::array();
    for (const auto& [A, c] : T.coeffs())
        if (c) coeffs.push_back({{"multiset", A}, {"c", c}});
    return {{"p", T.p()}, {"n", T.n()}, {"k", T.arity()}, {"coeffs", coeffs}};
}

CSMForm csm_from_json(const json& j) {
    CSMForm T(get<int>(j, "p"), get<int>(j, "n"), get<int>(j, "k"));
    for (const auto& e : j.at("coeffs")) {
        auto A = get<Multiset>(e, "multiset");
        if (static_cast<int>(A.size()) != T.arity()) throw ParseError("multiset has wrong size");
        for (int a : A)
            if (a < 0 || a >= T.n()) throw ParseError("multiset index out of range");
        T.set(std::move(A), ((get<int>(e, "c") % T.p()) + T.p()) % T.p());
    }
    return T;
}

json to_json(const BoundedFunction& f) {
    json values = json::array();
    if (f.phase_poly()) {
        for (const TorusValue& v : f.phase_poly()->values()) values.push_back(to_json(v));
    } else {
        for (Eigen::Index x = 0; x < f.values().size(); ++x)
            values.push_back({{"re", f.values()[x].real()}, {"im", f.values()[x].imag()}});
    }
    return {{"p", f.space().p()}, {"n", f.space().n()}, {"values", values}};
}

BoundedFunction function_from_json(const json& j) {
    const Space V(get<int>(j, "p"), get<int>(j, "n"));
    const json& vals = j.at("values");
    if (vals.size() != V.size()) throw ParseError("value table has wrong size");
    bool phases = !vals.empty();
    for (const auto& v : vals) phases = phases && v.contains("num");
    if (phases) {
        std::vector<TorusValue> tv;
        for (const auto& v : vals) tv.push_back(torus_from_json(V.p(), v));
        return BoundedFunction::phase(NCPoly::from_values(V, tv));
    }
    Eigen::VectorXcd out(static_cast<Eigen::Index>(V.size()));
    for (std::size_t x = 0; x < vals.size(); ++x) {
        const auto& v = vals[x];
        out[static_cast<Eigen::Index>(x)] =
            v.contains("num") ? char_eval(torus_from_json(V.p(), v)) : Complex(get<double>(v, "re"), get<double>(v, "im"));
    }
    return BoundedFunction(V, out);
}

json to_json(const WeightedPoly& f) {
    json terms = json::array();
    for (const auto& [i, a] : f.terms()) terms.push_back({{"i", i}, {"r", a.exp() - 1}, {"c", a.num()}});
    return {{"p", f.p()}, {"m", f.m()}, {"D", f.initial_degrees()}, {"alpha", to_json(f.alpha())}, {"terms", terms}};
}

WeightedPoly weighted_from_json(const json& j) {
    const int p = get<int>(j, "p");
    const auto D = get<std::vector<int>>(j, "D");
    if (j.contains("m") && get<int>(j, "m") != static_cast<int>(D.size())) throw ParseError("m does not match D");
    WeightedPoly f(p, D);
    if (j.contains("alpha")) f.add_term(std::vector<int>(D.size(), 0), torus_from_json(p, j.at("alpha")));
    if (j.contains("terms"))
        for (const auto& t : j.at("terms")) {
            const auto i = get<std::vector<int>>(t, "i");
            if (i.size() != D.size()) throw ParseError("term index has wrong length");
            const int r = get<int>(t, "r");
            if (r < 0) throw ParseError("negative depth");
            f.add_term(i, TorusValue::from_residue(p, get<std::int64_t>(t, "c"), r + 1));
        }
    return f;
}

json to_json(const Factor& F) {
    json chains = json::array();
    std::vector<int> J;
    for (const auto& chain : F.chains) {
        json c = json::array();
        for (const NCPoly& P : chain) c.push_back(to_json(P));
        chains.push_back(c);
        J.push_back(static_cast<int>(chain.size()) - 1);
    }
    return {{"p", F.p}, {"D", F.D}, {"J", J}, {"chains", chains}};
}

Factor factor_from_json(const json& j) {
    Factor F;
    F.p = get<int>(j, "p");
    F.D = get<std::vector<int>>(j, "D");
    for (const auto& c : j.at("chains")) {
        std::vector<NCPoly> chain;
        for (const auto& P : c) chain.push_back(ncpoly_from_json(P));
        F.chains.push_back(std::move(chain));
    }
    if (F.chains.size() != F.D.size()) throw ParseError("chains and D differ in length");
    if (j.contains("J")) {
        const auto J = get<std::vector<int>>(j, "J");
        for (std::size_t i = 0; i < J.size() && i < F.chains.size(); ++i)
            if (J[i] != F.depth(static_cast<int>(i))) throw ParseError("declared depth J does not match chain length");
    }
    return F;
}

json element_to_json(std::uint64_t g, const FilteredAbelianGroup& G) { return G.decode(g); }

std::uint64_t element_from_json(const json& j, const FilteredAbelianGroup& G) {
    if (j.is_number_unsigned() || j.is_number_integer()) {
        const auto g = j.get<std::int64_t>();
        if (g < 0 || static_cast<std::uint64_t>(g) >= G.size()) throw ParseError("element code out of range");
        return static_cast<std::uint64_t>(g);
    }
    if (!j.is_array() || j.size() != G.orders().size()) throw ParseError("element must be a code or a digit array");
    return G.encode(j.get<std::vector<std::int64_t>>());
}

json to_json(const FilteredAbelianGroup& G) {
    json filtration = json::array();
    for (int i = 0; i < G.levels(); ++i) {
        json level = json::array();
        for (std::uint64_t g : G.generators(i)) level.push_back(element_to_json(g, G));
        filtration.push_back(level);
    }
    return {{"cyclic_orders", G.orders()}, {"filtration", filtration}};
}

FilteredAbelianGroup group_from_json(const json& j) {
    const auto orders = get<std::vector<std::uint64_t>>(j, "cyclic_orders");
    for (auto o : orders)
        if (o == 0) throw ParseError("cyclic order must be positive");
    const FilteredAbelianGroup plain(orders, {});
    std::vector<std::vector<std::uint64_t>> levels;
    for (const auto& level : j.at("filtration")) {
        std::vector<std::uint64_t> gens;
        for (const auto& g : level) gens.push_back(element_from_json(g, plain));
        levels.push_back(std::move(gens));
    }
    return FilteredAbelianGroup(orders, levels);
}

json cube_to_json(const CubePoint& c, const FilteredAbelianGroup& G) {
    json out = json::array();
    for (std::uint64_t g : c.entries) out.push_back(element_to_json(g, G));
    return out;
}

CubePoint cube_from_json(const json& j, const FilteredAbelianGroup& G) {
    if (!j.is_array() || j.empty()) throw ParseError("cube must be a nonempty array");
    int k = 0;
    while ((std::size_t{1} << k) < j.size()) ++k;
    if ((std::size_t{1} << k) != j.size()) throw ParseError("cube length must be a power of 2");
    CubePoint c{k, {}};
    for (const auto& g : j) c.entries.push_back(element_from_json(g, G));
    return c;
}

MapSpec map_from_json(const json& j) {
    MapSpec m{group_from_json(j.at("domain")), group_from_json(j.at("codomain")), {}};
    const json& vals = j.at("values");
    if (vals.size() != m.H.size()) throw ParseError("map table has wrong size");
    for (const auto& v : vals) m.phi.push_back(element_from_json(v, m.G));
    return m;
}

std::string digest(const json& j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json read_json(const std::string& path) {
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open " + path);
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace hofa::io
