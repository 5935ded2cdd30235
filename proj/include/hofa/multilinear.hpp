#pragma once

// Multilinear forms V^k -> F_p: dense tables on basis tuples, classical
// symmetric forms keyed by coordinate multisets, and the operations that
// connect them to classical polynomials.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hofa/core.hpp"
#include "hofa/ncpoly.hpp"

namespace hofa {

/// Sorted coordinate indices (0-based) with multiplicities.
using Multiset = std::vector<int>;

/// A k-linear map V^k -> F_p stored by its values on basis tuples,
/// T(e_{i_1}, ..., e_{i_k}) at index ((i_1 n + i_2) n + ...) + i_k.
class MultilinearTable {
public:
    MultilinearTable(int p, int n, int k);

    int p() const { return p_; }
    int n() const { return n_; }
    int arity() const { return k_; }
    std::uint64_t size() const { return data_.size(); }

    int at(const std::vector<int>& idx) const { return data_[offset(idx)]; }
    void set(const std::vector<int>& idx, int v);
    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    /// T(h_1, ..., h_k) for vector codes h_t of F_p^n.
    int operator()(const Space& V, const std::vector<std::uint64_t>& h) const;

    bool is_symmetric() const;
    /// Symmetric and zero on every basis tuple with p or more equal indices.
    bool is_classical() const;
    bool is_zero() const;

    friend bool operator==(const MultilinearTable&, const MultilinearTable&) = default;

private:
    std::uint64_t offset(const std::vector<int>& idx) const;

    int p_, n_, k_;
    std::vector<std::uint8_t> data_;
};

/// Classical symmetric k-linear form keyed by multisets of size k whose
/// multiplicities are all below p: T(e_{i_1}, ..., e_{i_k}) = c_{{i_1..i_k}}.
class CSMForm {
public:
    CSMForm(int p, int n, int k);

    int p() const { return p_; }
    int n() const { return n_; }
    int arity() const { return k_; }
    const std::map<Multiset, int>& coeffs() const { return coeffs_; }

    int coeff(const Multiset& A) const;
    /// Sets c_A (A sorted on entry); rejects multiplicities >= p.
    void set(Multiset A, int c);

    int operator()(const Space& V, const std::vector<std::uint64_t>& h) const;
    MultilinearTable table() const;
    /// Converts a classical symmetric table; throws if it is not one.
    static CSMForm from_table(const MultilinearTable& T);

    friend bool operator==(const CSMForm&, const CSMForm&) = default;

private:
    int p_, n_, k_;
    std::map<Multiset, int> coeffs_;
};

/// All multisets of size k over {0..n-1} with multiplicities < max_mult.
std::vector<Multiset> multisets(int n, int k, int max_mult);

/// d_{h_1} ... d_{h_r} P (x).
TorusValue iterated_derivative(const NCPoly& P, const std::vector<std::uint64_t>& h, std::uint64_t x = 0);

/// d^k P on basis tuples. Throws if degree(P) > k.
MultilinearTable dk_extract(const NCPoly& P, int k);
/// d^k P for classical P, as a CSM form.
CSMForm dk_extract_csm(const NCPoly& P, int k);

CSMForm concat(const CSMForm& S, const CSMForm& T);
CSMForm sym_power(const CSMForm& T, int m);

/// Classical P of degree <= k with d^k P = T, built from monomials
/// prod x_j^{a_j} / a_j!.
NCPoly antiderivative(const CSMForm& T);

/// binom(n, m) mod p by Lucas' theorem.
int binom_mod_p(std::uint64_t n, std::uint64_t m, int p);

/// Q = binom(P_M, m) mod p where P_M lifts P to Z/p^{M+1}Z through M
/// iterated p-th roots, M minimal with m < p^{M+1}.
NCPoly binomial_lift_power(const NCPoly& P, int k, int m);

struct BiasResult {
    Rational value;
    /// Number of (h_1..h_{k-1}) with T(h_1, ..., h_{k-1}, .) identically zero.
    std::uint64_t zero_count = 0;
    std::uint64_t total = 0;
};

constexpr std::uint64_t kDefaultBiasBudget = std::uint64_t{1} << 32;

/// E e(iota(T(h_1..h_k))) over V^k, computed as the density of
/// (h_1..h_{k-1}) whose contraction vanishes.
BiasResult bias(const MultilinearTable& T, std::uint64_t budget = kDefaultBiasBudget);
BiasResult bias(const CSMForm& T, std::uint64_t budget = kDefaultBiasBudget);

struct DkpReport {
    std::uint64_t checked = 0;
    std::uint64_t failures = 0;
    /// First failing tuple (h_1, ..., h_{k-p+1}), empty when none.
    std::vector<std::uint64_t> counterexample;
    bool pass() const { return failures == 0; }
};

/// Checks d^k P(h_1 x p, h_2, ..., h_{k-p+1}) = -d^{k-p+1}(pP)(h_1, ..., h_{k-p+1})
/// on every tuple (trials == 0) or on `trials` random tuples.
DkpReport check_dkp(const NCPoly& P, int k, std::uint64_t trials = 0, std::uint64_t seed = 0);

}  // namespace hofa
