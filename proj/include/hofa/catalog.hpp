#pragma once

// Named examples on F_2^n: the integer weight L, symmetric polynomials S_k,
// the phases L/2^j, the mother polynomials on F_2, and the forms d^2 S_2 and
// d^4 S_4.

#include <cstdint>
#include <string>
#include <vector>

#include "hofa/multilinear.hpp"
#include "hofa/ncpoly.hpp"

namespace hofa::catalog {

/// L(x) = |x_1| + ... + |x_n| as integers.
std::vector<std::int64_t> L(const Space& V);

/// Sum over k-subsets A of prod_{i in A} x_i, built from its canonical form.
NCPoly S(const Space& V, int k);

/// L / 2^j mod 1.
NCPoly L_over(const Space& V, int j);

/// P(x) = x/2 on F_2.
NCPoly mother_P();
/// Q(x) = |x|/4 on F_2.
NCPoly mother_Q();

/// B = d^2 S_2, the form with B(e_i, e_j) = 1 iff i != j.
CSMForm B(int n);
/// d^4 S_4.
CSMForm d4S4(int n);

/// Resolves "L/<2^j>", "S<k>", "P", "Q" on F_2^n; throws Error otherwise.
NCPoly by_name(const std::string& name, int n);

}  // namespace hofa::catalog
