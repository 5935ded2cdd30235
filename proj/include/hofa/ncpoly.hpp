#pragma once

// Non-classical polynomials P: F_p^n -> T with values in (1/p^K)Z/Z.

#include <climits>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hofa/core.hpp"

namespace hofa {

/// Degree of the zero polynomial.
constexpr int kNegInfDegree = INT_MIN;

std::string degree_str(int d);

class NotAPolynomial : public Error {
public:
    using Error::Error;
};

/// One term c / p^{depth+1} * |x_1|^{i_1} ... |x_n|^{i_n}. The exponent
/// vector i in {0..p-1}^n is stored as a code of the ambient Space.
struct Term {
    std::uint64_t mono = 0;
    int depth = 0;
    int coeff = 0;

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term& a, const Term& b) {
        if (a.depth != b.depth) return a.depth <=> b.depth;
        return a.mono <=> b.mono;
    }
};

struct CanonicalForm {
    TorusValue alpha;
    std::vector<Term> terms;  // sorted by (depth, mono), coefficients in 1..p-1

    friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
};

/// max over terms of |i| + j(p-1); 0 for a nonzero constant; -inf for zero.
int form_degree(const Space& V, const CanonicalForm& f);

/// Smallest K such that every value of the form lies in (1/p^K)Z/Z.
int form_exponent(const CanonicalForm& f);

/// Sorts terms, drops zero coefficients and reduces coefficients mod p.
CanonicalForm normalize_form(const Space& V, CanonicalForm f);

/// Residues of the form at exponent K (K >= form_exponent) for every x.
void tabulate_form(const Space& V, const CanonicalForm& f, int K, std::vector<std::uint64_t>& out);

/// Unique canonical form of a table of residues mod p^K. Throws
/// NotAPolynomial if the result has degree above d_max (d_max < 0: no bound).
CanonicalForm interpolate(const Space& V, const std::vector<std::uint64_t>& residues, int K, int d_max = -1);

/// Least d such that every (d+1)-fold derivative along basis directions
/// vanishes. Throws BudgetExceeded if the search passes d_max (d_max < 0:
/// unbounded).
int degree_by_derivatives(const Space& V, const std::vector<std::uint64_t>& residues, int K, int d_max = -1);

class NCPoly {
public:
    NCPoly() = default;
    /// Table of residues mod p^K indexed by vector code.
    NCPoly(Space V, int K, std::vector<std::uint64_t> residues);

    static NCPoly zero(const Space& V);
    static NCPoly constant(const Space& V, const TorusValue& a);
    static NCPoly from_values(const Space& V, const std::vector<TorusValue>& values);
    static NCPoly from_form(const Space& V, CanonicalForm f);
    /// iota(F) for F: V -> F_p.
    static NCPoly classical(const Space& V, const std::function<int(std::uint64_t)>& F);
    /// x -> r(x) / p^K for an integer-valued r.
    static NCPoly tabulate(const Space& V, int K, const std::function<std::int64_t(std::uint64_t)>& r);

    const Space& space() const { return V_; }
    int p() const { return V_.p(); }
    int n() const { return V_.n(); }
    /// Least K with all values in (1/p^K)Z/Z.
    int exponent() const { return K_; }
    const std::vector<std::uint64_t>& residues() const { return table_; }

    TorusValue operator()(std::uint64_t x) const { return TorusValue(V_.p(), table_[x], K_); }
    TorusValue eval(const FVec& x) const;
    std::uint64_t residue(std::uint64_t x, int K) const;
    std::vector<TorusValue> values() const;

    bool has_form() const { return form_.has_value(); }
    /// Canonical form, computed by interpolation when not attached.
    CanonicalForm canonical() const;
    NCPoly with_form() const;

    bool is_zero() const { return K_ == 0; }
    bool is_classical() const { return K_ <= 1; }

    /// Value of iota^{-1}: residue in F_p for a classical polynomial.
    int field_value(std::uint64_t x) const;

    friend bool operator==(const NCPoly& a, const NCPoly& b) {
        return a.V_ == b.V_ && a.K_ == b.K_ && a.table_ == b.table_;
    }

private:
    void normalize();

    Space V_;
    int K_ = 0;
    std::vector<std::uint64_t> table_;
    std::optional<CanonicalForm> form_;
};

NCPoly operator+(const NCPoly& a, const NCPoly& b);
NCPoly operator-(const NCPoly& a, const NCPoly& b);
NCPoly operator-(const NCPoly& a);
NCPoly scale(std::int64_t c, const NCPoly& a);

/// T_h P (x) = P(x + h).
NCPoly shift(const NCPoly& P, std::uint64_t h);
NCPoly derivative(const NCPoly& P, std::uint64_t h);
NCPoly derivative(const NCPoly& P, const FVec& h);

/// Canonical-form degree when a form is attached, else by derivatives.
int degree(const NCPoly& P);
int degree_by_derivatives(const NCPoly& P, int d_max = -1);

NCPoly mul_by_p(const NCPoly& P);
/// Denominator-shift root: every c/p^{j+1} becomes c/p^{j+2}, alpha -> alpha/p.
NCPoly pth_root(const NCPoly& P);
NCPoly multiply_classical(const NCPoly& P, const NCPoly& Q);

/// Number of distinct values of P.
std::uint64_t value_count(const NCPoly& P);

/// Upper bound p^{floor((d-1)/(p-1)) + 1} on the number of values of a
/// degree <= d polynomial.
std::uint64_t value_count_bound(int p, int d);

/// All canonical forms of degree <= d on F_p^n, indexed 0..count()-1.
/// Without modulo_constants, alpha ranges over (1/p^A)Z/Z with
/// A = floor(max(d-1,0)/(p-1)) + 1.
class PolyFamily {
public:
    struct Slot {
        std::uint64_t mono;
        int depth;
    };

    PolyFamily(const Space& V, int d, bool modulo_constants, std::uint64_t cap = std::uint64_t{1} << 32);

    std::uint64_t count() const { return count_; }
    const std::vector<Slot>& slots() const { return slots_; }
    int alpha_exponent() const { return alpha_exp_; }
    /// Exponent large enough for every member.
    int max_exponent() const;

    CanonicalForm form(std::uint64_t index) const;
    NCPoly poly(std::uint64_t index) const { return NCPoly::from_form(V_, form(index)); }

private:
    Space V_;
    int d_;
    bool modulo_constants_;
    int alpha_exp_ = 0;
    std::vector<Slot> slots_;
    std::uint64_t count_ = 0;
};

}  // namespace hofa
