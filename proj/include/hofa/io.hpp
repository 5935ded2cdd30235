#pragma once

// JSON encodings of the library's objects, and the text form of polynomials.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "hofa/cubes.hpp"
#include "hofa/gowers.hpp"
#include "hofa/multilinear.hpp"
#include "hofa/ncpoly.hpp"
#include "hofa/weighted.hpp"

namespace hofa::io {

using nlohmann::json;

class ParseError : public Error {
public:
    using Error::Error;
};

/// {"num": int, "exp": int}
json to_json(const TorusValue& a);
TorusValue torus_from_json(int p, const json& j);

/// {"p": int, "digits": [int]}
json to_json(const FVec& x);
FVec fvec_from_json(const json& j);

/// {"p","n","alpha","terms":[{"exps","depth","coeff"}]}, terms meaning
/// coeff / p^{depth+1} |x_1|^{e_1} ... |x_n|^{e_n}. Input may instead give
/// {"p","n","K","residues"} or {"p","n","text"}.
json to_json(const NCPoly& P);
NCPoly ncpoly_from_json(const json& j);

/// "1/4*x1*x2 + 1/2*x3 - 1/8": a bare monomial has coefficient 1/p.
NCPoly parse_poly_text(int p, int n, const std::string& text);
std::string poly_text(const NCPoly& P);

/// {"p","n","k","coeffs":[{"multiset","c"}]}
json to_json(const CSMForm& T);
CSMForm csm_from_json(const json& j);

/// {"p","n","values":[{"re","im"} | {"num","exp"}]}
json to_json(const BoundedFunction& f);
BoundedFunction function_from_json(const json& j);

/// {"p","m","D","alpha","terms":[{"i","r","c"}]}, a_i = c / p^{r+1}.
json to_json(const WeightedPoly& f);
WeightedPoly weighted_from_json(const json& j);

/// {"p","D","chains":[[poly, ...], ...]}; J_i is the chain length minus 1.
json to_json(const Factor& F);
Factor factor_from_json(const json& j);

/// {"cyclic_orders":[...],"filtration":[[gens...], ...]}, generators as
/// digit arrays (codes are also accepted on input).
json to_json(const FilteredAbelianGroup& G);
FilteredAbelianGroup group_from_json(const json& j);

/// Flat array of 2^k elements in omega order.
json cube_to_json(const CubePoint& c, const FilteredAbelianGroup& G);
CubePoint cube_from_json(const json& j, const FilteredAbelianGroup& G);

json element_to_json(std::uint64_t g, const FilteredAbelianGroup& G);
std::uint64_t element_from_json(const json& j, const FilteredAbelianGroup& G);

/// {"domain": group, "codomain": group, "values": [element, ...]}
struct MapSpec {
    FilteredAbelianGroup H;
    FilteredAbelianGroup G;
    GroupMap phi;
};
MapSpec map_from_json(const json& j);

json to_json(const Rational& r);

/// FNV-1a over the compact dump, as 16 hex digits.
std::string digest(const json& j);

json read_json(const std::string& path_or_dash);

}  // namespace hofa::io
