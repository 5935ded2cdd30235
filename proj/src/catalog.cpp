#include "hofa/catalog.hpp"

#include <bit>

namespace hofa::catalog {

std::vector<std::int64_t> L(const Space& V) {
    std::vector<std::int64_t> out(V.size());
    for (std::uint64_t x = 0; x < V.size(); ++x) out[x] = V.digit_sum(x);
    return out;
}

NCPoly S(const Space& V, int k) {
    if (V.p() != 2) throw Error("S_k is defined on F_2^n");
    CanonicalForm f{TorusValue::zero(2), {}};
    if (k == 0) f.alpha = TorusValue(2, 1, 1);
    else
        for (std::uint64_t mono = 1; mono < V.size(); ++mono)
            if (std::popcount(mono) == k) f.terms.push_back(Term{mono, 0, 1});
    return NCPoly::from_form(V, f);
}

NCPoly L_over(const Space& V, int j) {
    return NCPoly::tabulate(V, j, [&](std::uint64_t x) { return static_cast<std::int64_t>(V.digit_sum(x)); });
}

NCPoly mother_P() { return NCPoly(Space(2, 1), 1, {0, 1}); }
NCPoly mother_Q() { return NCPoly(Space(2, 1), 2, {0, 1}); }

CSMForm B(int n) {
    CSMForm T(2, n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) T.set({i, j}, 1);
    return T;
}

CSMForm d4S4(int n) { return dk_extract_csm(S(Space(2, n), 4), 4); }

NCPoly by_name(const std::string& name, int n) {
    const Space V(2, n);
    if (name == "P") return mother_P();
    if (name == "Q") return mother_Q();
    if (name.size() > 1 && name[0] == 'S') return S(V, std::stoi(name.substr(1)));
    if (name.rfind("L/", 0) == 0) {
        const std::uint64_t den = std::stoull(name.substr(2));
        if (!std::has_single_bit(den)) throw Error("L/m needs m a power of 2");
        return L_over(V, std::countr_zero(den));
    }
    throw Error("unknown catalog entry: " + name);
}

}  // namespace hofa::catalog
