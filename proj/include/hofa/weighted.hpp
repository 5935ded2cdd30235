#pragma once

// Maps Z^m -> T of bounded weighted degree, where the generator p^j e_i has
// degree D_i + j(p-1), written in the binomial basis
//     f(x) = alpha + sum_i a_i binom(x_1, i_1) ... binom(x_m, i_m),
// together with factors (chains P_{i,j} with p P_{i,j} = P_{i,j-1}) on F_p^n.

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "hofa/core.hpp"
#include "hofa/ncpoly.hpp"

namespace hofa {

/// binom(x, i) mod p^e for any integer x.
std::uint64_t binom_mod_prime_power(std::int64_t x, int i, int p, int e);

class WeightedPoly {
public:
    WeightedPoly(int p, std::vector<int> D);
    /// Coefficient terms keyed by i; a zero i folds into alpha.
    WeightedPoly(int p, std::vector<int> D, TorusValue alpha, const std::map<std::vector<int>, TorusValue>& terms);

    int p() const { return p_; }
    int m() const { return static_cast<int>(D_.size()); }
    const std::vector<int>& initial_degrees() const { return D_; }
    const TorusValue& alpha() const { return alpha_; }
    /// Nonzero a_i; a_i = c / p^{r+1} with p not dividing c.
    const std::map<std::vector<int>, TorusValue>& terms() const { return terms_; }

    void add_term(const std::vector<int>& i, const TorusValue& a);

    TorusValue operator()(const std::vector<std::int64_t>& x) const;
    bool is_zero() const { return alpha_.is_zero() && terms_.empty(); }

    /// (sum_j D_j i_j) + r(p-1) for the term at i.
    int term_degree(const std::vector<int>& i) const;

    friend bool operator==(const WeightedPoly&, const WeightedPoly&) = default;

private:
    int p_;
    std::vector<int> D_;
    TorusValue alpha_;
    std::map<std::vector<int>, TorusValue> terms_;
};

WeightedPoly operator+(const WeightedPoly& f, const WeightedPoly& g);
WeightedPoly scale(std::int64_t c, const WeightedPoly& f);

/// Maximum term degree; 0 for constants and kNegInfDegree for 0.
int weighted_degree(const WeightedPoly& f);

/// Least K with D + K(p-1) > d: p^K e_i is a period of every f of weighted
/// degree <= d.
int period_exponent(int p, int D, int d);

/// A map Z^m -> (1/p^E)Z/Z stored on the box prod [0, p^{K_t}) and extended
/// periodically; coordinate 0 varies fastest.
class PeriodicTable {
public:
    PeriodicTable(int p, std::vector<int> D, std::vector<int> K, int E, std::vector<std::uint64_t> residues);

    /// Samples fn on two periods in every direction; throws if the declared
    /// periods p^{K_t} do not hold.
    static PeriodicTable sample(int p, std::vector<int> D, std::vector<int> K, int E,
                                const std::function<TorusValue(const std::vector<std::int64_t>&)>& fn);
    /// f on periods p^{K_t + guard}, K_t from weighted_degree(f).
    static PeriodicTable from_poly(const WeightedPoly& f, int guard = 1);

    int p() const { return p_; }
    int m() const { return static_cast<int>(D_.size()); }
    int exponent() const { return E_; }
    const std::vector<int>& initial_degrees() const { return D_; }
    const std::vector<int>& period_exponents() const { return K_; }
    const std::vector<std::uint64_t>& residues() const { return table_; }
    std::uint64_t size() const { return table_.size(); }

    std::uint64_t index(const std::vector<std::int64_t>& x) const;
    std::vector<std::int64_t> point(std::uint64_t index) const;
    TorusValue operator()(const std::vector<std::int64_t>& x) const { return TorusValue(p_, table_[index(x)], E_); }

    /// Table of d_{p^j e_i} f.
    PeriodicTable derivative(int i, int j) const;
    bool is_zero() const;

private:
    int p_;
    std::vector<int> D_;
    std::vector<int> K_;
    int E_;
    std::vector<std::uint64_t> table_;
    std::vector<std::uint64_t> stride_;
};

/// Least d such that d_{v_1} ... d_{v_r} f = 0 whenever the generator degrees
/// sum past d, by a search over multisets of generators p^j e_i, j < K_i.
int weighted_degree(const PeriodicTable& f);

/// Binomial-basis coefficients (iterated forward differences at 0). Throws
/// if some term exceeds degree d or the expansion does not reproduce f.
WeightedPoly binomial_expand(const PeriodicTable& f, int d);

/// g with p g = f: every coefficient c/p^{r+1} becomes c/p^{r+2}.
WeightedPoly weighted_pth_root(const WeightedPoly& f);

struct PeriodicityReport {
    struct Period {
        int coord;
        int j;
        std::uint64_t period;
        bool holds;
    };
    struct Top {
        int coord;
        int j;
        bool constant;
        int c;
    };
    std::vector<Period> periods;
    std::vector<Top> tops;
    /// f minus sum c_i x_i / p^{j_i+1} has period p^{j_i} e_i for each top i.
    bool remainder_periodic = true;
    bool pass() const;
};

/// Checks that p^j e_i is a period whenever D_i + j(p-1) > d and, when
/// D_i + j_i(p-1) = d, that d_{p^{j_i} e_i} f is a constant c_i / p.
PeriodicityReport periodicity_check(const WeightedPoly& f, int d);

/// P_{i,j} for 1 <= i <= m, 0 <= j <= J_i, with p P_{i,j} = P_{i,j-1}.
struct Factor {
    int p = 2;
    std::vector<int> D;
    std::vector<std::vector<NCPoly>> chains;
    /// Regularity is asymptotic; callers may assert it but it is never checked.
    bool regular_assumed = false;

    int dimension() const { return static_cast<int>(chains.size()); }
    int depth(int i) const { return static_cast<int>(chains[i].size()) - 1; }
    int degree() const;
};

struct FactorCheck {
    bool chain = true;
    bool degrees = true;
    bool value_ranges = true;
    bool initial_degrees = true;
    std::vector<std::string> failures;
    bool pass() const { return chain && degrees && value_ranges && initial_degrees; }
};

FactorCheck verify_factor(const Factor& F);

/// Adjoins p-th roots until chain i has depth J'_i.
Factor factor_depth_extend(const Factor& F, const std::vector<int>& new_depths, int max_degree = 64);

/// Drops every P_{i,j} with D_i + j(p-1) > d, and indices left empty.
Factor factor_retract(const Factor& F, int d);

/// Q(x) = f(a_1, ..., a_m) where P_{i,J_i}(x) = a_i / p^{J_i+1}.
NCPoly factor_pullback(const Factor& F, const WeightedPoly& f);

}  // namespace hofa
