#pragma once

// Exact arithmetic substrate: the prime field F_p, torus values with p-power
// denominators, enumeration of F_p^n, characters and residue counters.

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace hofa {

using Rational = boost::rational<std::int64_t>;
using Complex = std::complex<double>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a requested computation exceeds a configured size or work cap.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

constexpr int kMaxPrime = 13;
constexpr std::uint64_t kDefaultSpaceCap = std::uint64_t{1} << 24;

bool is_prime(int p);

/// p^k for small arguments; throws if the result does not fit in 62 bits.
std::uint64_t ipow(std::uint64_t p, int k);

/// Largest K with p^K < 2^62.
int max_exponent(int p);

class PrimeField {
public:
    explicit PrimeField(int p);

    int p() const { return p_; }
    int add(int a, int b) const { return (a + b) % p_; }
    int sub(int a, int b) const { return (a - b + p_) % p_; }
    int mul(int a, int b) const { return (a * b) % p_; }
    int neg(int a) const { return (p_ - a) % p_; }
    int inv(int a) const;
    int reduce(std::int64_t a) const {
        const auto r = static_cast<int>(a % p_);
        return r < 0 ? r + p_ : r;
    }

private:
    int p_;
};

/// Exact element num / p^exp of (1/p^K)Z/Z, kept reduced.
class TorusValue {
public:
    TorusValue() = default;
    TorusValue(int p, std::uint64_t num, int exp);

    /// Residue a mod p^K interpreted as a / p^K.
    static TorusValue from_residue(int p, std::int64_t a, int K);
    /// iota(j) = j/p mod 1.
    static TorusValue iota(int p, std::int64_t j) { return from_residue(p, j, 1); }
    static TorusValue zero(int p) { return TorusValue(p, 0, 0); }

    int p() const { return p_; }
    std::uint64_t num() const { return num_; }
    int exp() const { return exp_; }
    bool is_zero() const { return num_ == 0; }

    /// Numerator after lifting to denominator p^K (K >= exp()).
    std::uint64_t residue_at(int K) const;

    double to_double() const;
    std::string str() const;

    friend bool operator==(const TorusValue&, const TorusValue&) = default;

private:
    void reduce();

    int p_ = 2;
    int exp_ = 0;
    std::uint64_t num_ = 0;
};

TorusValue torus_add(const TorusValue& a, const TorusValue& b);
TorusValue torus_neg(const TorusValue& a);
TorusValue torus_sub(const TorusValue& a, const TorusValue& b);
TorusValue torus_scale(std::int64_t n, const TorusValue& a);

inline TorusValue operator+(const TorusValue& a, const TorusValue& b) { return torus_add(a, b); }
inline TorusValue operator-(const TorusValue& a, const TorusValue& b) { return torus_sub(a, b); }
inline TorusValue operator-(const TorusValue& a) { return torus_neg(a); }
inline TorusValue operator*(std::int64_t n, const TorusValue& a) { return torus_scale(n, a); }

/// e(a) = exp(2 pi i a).
Complex char_eval(const TorusValue& a);

/// e(r / m) with exact values at multiples of m/4.
Complex root_of_unity(std::uint64_t r, std::uint64_t m);

/// Geometry of V = F_p^n. Vectors are coded as integers sum_t x_t p^t, so
/// the first coordinate varies fastest and p = 2 codes are bitmasks.
class Space {
public:
    Space() = default;
    Space(int p, int n, std::uint64_t cap = kDefaultSpaceCap);

    int p() const { return p_; }
    int n() const { return n_; }
    std::uint64_t size() const { return size_; }
    std::uint64_t weight(int t) const { return pow_[t]; }

    int digit(std::uint64_t x, int t) const {
        return p_ == 2 ? static_cast<int>((x >> t) & 1U) : static_cast<int>((x / pow_[t]) % p_);
    }
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t neg(std::uint64_t a) const;
    std::uint64_t scale(int c, std::uint64_t a) const;
    /// Standard basis vector e_t (t zero-based).
    std::uint64_t basis(int t) const { return pow_[t]; }
    /// Coordinate-wise sum of integer lifts |x_1| + ... + |x_n|.
    int digit_sum(std::uint64_t x) const;
    /// Dot product in F_p.
    int dot(std::uint64_t a, std::uint64_t b) const;

    std::vector<int> digits(std::uint64_t x) const;
    std::uint64_t encode(const std::vector<int>& digits) const;

    friend bool operator==(const Space& a, const Space& b) { return a.p_ == b.p_ && a.n_ == b.n_; }

private:
    int p_ = 2;
    int n_ = 0;
    std::uint64_t size_ = 1;
    std::vector<std::uint64_t> pow_;
};

void require_same_space(const Space& a, const Space& b, const char* what);

/// An element of F_p^n.
struct FVec {
    int p = 2;
    std::vector<int> digits;

    int n() const { return static_cast<int>(digits.size()); }
    std::uint64_t code(const Space& V) const;
    static FVec from_code(const Space& V, std::uint64_t code);
};

/// Calls fn(x) for every x in F_p^n in lexicographic (code) order.
template <class Fn>
void enumerate_space(const Space& V, Fn&& fn) {
    for (std::uint64_t x = 0; x < V.size(); ++x) fn(x);
}

/// Splits [0, total) into `chunks` contiguous ranges; chunk c is [first, second).
std::pair<std::uint64_t, std::uint64_t> chunk_range(std::uint64_t total, unsigned chunks, unsigned c);

/// Exact expectation of e(residue / p^K) over counted residues.
struct Expectation {
    Complex value;
    /// Coefficients of the sum in the power basis 1, z, ..., z^{phi(m)-1}
    /// of Q(z), z = e(1/m), before dividing by `total`.
    std::vector<std::int64_t> cyclotomic;
    std::uint64_t total = 0;
    /// Set when the expectation is a rational number.
    std::optional<Rational> rational;
};

/// Integer histogram over residues of (1/p^K)Z/Z.
class UnityCounter {
public:
    UnityCounter(int p, int K);

    int p() const { return p_; }
    int exponent() const { return K_; }
    std::uint64_t modulus() const { return m_; }
    std::uint64_t total() const;
    const std::vector<std::uint64_t>& counts() const { return counts_; }

    void add_residue(std::uint64_t r, std::uint64_t times = 1) { counts_[r % m_] += times; }
    void add(const TorusValue& v, std::uint64_t times = 1);
    void merge(const UnityCounter& other);

    Expectation expectation() const;

private:
    int p_;
    int K_;
    std::uint64_t m_;
    std::vector<std::uint64_t> counts_;
};

std::string to_string(const Rational& r);

}  // namespace hofa
