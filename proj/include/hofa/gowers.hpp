#pragma once

// Gowers uniformity norms, analytic rank, rank witnesses, Fourier analysis on
// F_p^n, exhaustive correlation search and conditional expectations.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hofa/core.hpp"
#include "hofa/multilinear.hpp"
#include "hofa/ncpoly.hpp"
#include "hofa/rng.hpp"

namespace hofa {

/// A complex function on V. Functions of the form e(P) keep P so that norms
/// and derivatives can be computed exactly.
class BoundedFunction {
public:
    BoundedFunction(Space V, Eigen::VectorXcd values);

    static BoundedFunction constant(const Space& V, Complex c = 1.0);
    static BoundedFunction phase(const NCPoly& P);
    /// Values r e^{i theta} with r uniform in [0,1] and theta uniform.
    static BoundedFunction random(const Space& V, SplitMix64& rng);

    const Space& space() const { return V_; }
    const Eigen::VectorXcd& values() const { return values_; }
    Complex operator()(std::uint64_t x) const { return values_[static_cast<Eigen::Index>(x)]; }
    const std::optional<NCPoly>& phase_poly() const { return phase_; }

    double sup_norm() const;
    bool is_one_bounded(double tol = 1e-12) const { return sup_norm() <= 1.0 + tol; }
    /// (E |f|^q)^{1/q}.
    double lp_norm(double q) const;
    Complex mean() const { return values_.mean(); }

private:
    Space V_;
    Eigen::VectorXcd values_;
    std::optional<NCPoly> phase_;
};

BoundedFunction operator+(const BoundedFunction& f, const BoundedFunction& g);
BoundedFunction operator-(const BoundedFunction& f, const BoundedFunction& g);
/// Pointwise product; e(P) e(Q) stays the phase e(P + Q).
BoundedFunction operator*(const BoundedFunction& f, const BoundedFunction& g);
BoundedFunction operator*(Complex c, const BoundedFunction& f);
BoundedFunction conj(const BoundedFunction& f);
/// f e(P).
BoundedFunction modulate(const BoundedFunction& f, const NCPoly& P);

/// Delta_h f(x) = f(x + h) conj(f(x)).
BoundedFunction mult_derivative(const BoundedFunction& f, std::uint64_t h);
BoundedFunction mult_derivative(const BoundedFunction& f, const FVec& h);

/// E_x f(x) conj(g(x)).
Complex inner(const BoundedFunction& f, const BoundedFunction& g);

enum class NormMethod { Direct, Recursive };

constexpr std::uint64_t kDefaultNormBudget = std::uint64_t{1} << 32;

struct NormResult {
    double norm = 0;
    /// ||f||^{2^d}.
    double power = 0;
    /// Exact ||e(P)||^{2^d} for pure phases, when within budget.
    std::optional<Expectation> exact;
};

/// ||f||_{U^d}. Direct sums all |V|^{d+1} terms of the defining average;
/// Recursive uses ||f||_{U^d}^{2^d} = E_h ||Delta_h f||_{U^{d-1}}^{2^{d-1}}
/// down to |E g|^2 at d = 1.
NormResult gowers_norm(const BoundedFunction& f, int d, NormMethod method = NormMethod::Recursive,
                       std::uint64_t budget = kDefaultNormBudget);

/// E_{h_1..h_d, x} e(d_{h_1} ... d_{h_d} P(x)) by counting residues.
Expectation phase_norm_power(const NCPoly& P, int d, std::uint64_t budget = kDefaultNormBudget);

/// Gowers inner product E_{x,h} prod_omega C^{|omega|} f_omega(x + omega.h)
/// over 2^d functions indexed by the bitmask omega.
Complex gowers_inner_product(const std::vector<BoundedFunction>& fs, int d, std::uint64_t budget = kDefaultNormBudget);

struct ArankResult {
    Rational bias;
    double arank = 0;
    bool infinite = false;
};

/// -log_p E e(d^{s+1} P), through the multilinear bias kernel.
ArankResult analytic_rank(const NCPoly& P, int s, std::uint64_t budget = kDefaultBiasBudget);

struct TorusTupleLess {
    bool operator()(const std::vector<TorusValue>& a, const std::vector<TorusValue>& b) const;
};

/// P = F(Q_1, ..., Q_m) with F given on the value tuples it is applied to.
struct RankWitness {
    std::vector<NCPoly> polys;
    std::map<std::vector<TorusValue>, TorusValue, TorusTupleLess> table;

    std::vector<TorusValue> key(std::uint64_t x) const;
    /// The table read off from P itself; nullopt when P is not a function of
    /// the Q_i.
    static std::optional<RankWitness> induced(const NCPoly& P, std::vector<NCPoly> polys);
};

/// True iff P(x) = F(Q_1(x), ..., Q_m(x)) for all x. Throws if some Q_i has
/// degree > s or the table misses a value tuple that occurs.
bool rank_witness_check(const NCPoly& P, int s, const RankWitness& w);

/// fhat(xi) = E_x f(x) e(-xi.x / p), indexed by the code of xi.
Eigen::VectorXcd walsh_fourier(const BoundedFunction& f);
/// Inverse of walsh_fourier.
Eigen::VectorXcd inverse_fourier(const Space& V, const Eigen::VectorXcd& fhat);

struct ExploreResult {
    NCPoly best;
    double correlation = 0;
    std::uint64_t index = 0;
    std::uint64_t candidates = 0;
};

/// max |E f e(-P)| over degree <= s polynomials modulo constants; the first
/// candidate in enumeration order wins ties (1e-12).
ExploreResult inverse_explore(const BoundedFunction& f, int s, std::uint64_t budget = kDefaultNormBudget);

/// Atoms of the sigma-algebra generated by finitely many finite-valued
/// functions, labelled in order of first occurrence.
struct Atoms {
    std::vector<std::uint32_t> label;
    std::vector<std::uint64_t> size;
};

Atoms level_sets(const Space& V, const std::vector<std::vector<std::uint64_t>>& factors);
Atoms level_sets(const Space& V, const std::vector<NCPoly>& factors);

/// E(f | B)(x): the average of f over the atom of x.
template <class T>
std::vector<T> conditional_expectation(const Atoms& B, const std::vector<T>& f) {
    std::vector<T> sums(B.size.size(), T(0));
    for (std::size_t x = 0; x < f.size(); ++x) sums[B.label[x]] += f[x];
    for (std::size_t a = 0; a < sums.size(); ++a) sums[a] /= T(static_cast<std::int64_t>(B.size[a]));
    std::vector<T> out(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) out[x] = sums[B.label[x]];
    return out;
}

inline Complex conj_value(const Complex& z) { return std::conj(z); }
inline Rational conj_value(const Rational& r) { return r; }
inline double real_part(const Complex& z) { return z.real(); }
inline Rational real_part(const Rational& r) { return r; }

/// E_x f(x) conj(g(x)).
template <class T>
T mean_product(const std::vector<T>& f, const std::vector<T>& g) {
    T acc(0);
    for (std::size_t x = 0; x < f.size(); ++x) acc += f[x] * conj_value(g[x]);
    return acc / T(static_cast<std::int64_t>(f.size()));
}

/// ||f||_{L^2}^2.
template <class T>
auto energy(const std::vector<T>& f) {
    return real_part(mean_product(f, f));
}

BoundedFunction conditional_expectation(const BoundedFunction& f, const Atoms& B);

}  // namespace hofa
