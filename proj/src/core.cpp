#include "hofa/core.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hofa {

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

std::uint64_t ipow(std::uint64_t p, int k) {
    std::uint64_t r = 1;
    for (int i = 0; i < k; ++i)
        if (__builtin_mul_overflow(r, p, &r) || r > (std::uint64_t{1} << 62))
            throw BudgetExceeded("power " + std::to_string(p) + "^" + std::to_string(k) + " overflows");
    return r;
}

int max_exponent(int p) {
    static const auto table = [] {
        std::array<int, kMaxPrime + 1> t{};
        for (int q = 2; q <= kMaxPrime; ++q) {
            std::uint64_t r = 1;
            while (r <= (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(q)) {
                r *= static_cast<std::uint64_t>(q);
                ++t[q];
            }
        }
        return t;
    }();
    if (p < 2 || p > kMaxPrime) throw Error("unsupported prime " + std::to_string(p));
    return table[p];
}

PrimeField::PrimeField(int p) : p_(p) {
    if (!is_prime(p) || p > kMaxPrime) throw Error("p must be a prime in [2, 13], got " + std::to_string(p));
}

int PrimeField::inv(int a) const {
    a = reduce(a);
    if (a == 0) throw Error("zero has no inverse in F_p");
    int r = 1;
    for (int e = p_ - 2, b = a; e > 0; e >>= 1, b = b * b % p_)
        if (e & 1) r = r * b % p_;
    return r;
}

// ---------------------------------------------------------------------------

TorusValue::TorusValue(int p, std::uint64_t num, int exp) : p_(p), exp_(exp), num_(num) {
    if (exp < 0) throw Error("negative torus exponent");
    if (exp > max_exponent(p)) throw BudgetExceeded("torus exponent too large");
    num_ %= ipow(static_cast<std::uint64_t>(p), exp);
    reduce();
}

TorusValue TorusValue::from_residue(int p, std::int64_t a, int K) {
    const auto m = static_cast<std::int64_t>(ipow(static_cast<std::uint64_t>(p), K));
    std::int64_t r = a % m;
    if (r < 0) r += m;
    return TorusValue(p, static_cast<std::uint64_t>(r), K);
}

void TorusValue::reduce() {
    const auto p = static_cast<std::uint64_t>(p_);
    if (num_ == 0) {
        exp_ = 0;
        return;
    }
    while (exp_ > 0 && num_ % p == 0) {
        num_ /= p;
        --exp_;
    }
}

std::uint64_t TorusValue::residue_at(int K) const {
    if (K < exp_) throw Error("residue_at: exponent below value denominator");
    return num_ * ipow(static_cast<std::uint64_t>(p_), K - exp_);
}

double TorusValue::to_double() const {
    return static_cast<double>(num_) / static_cast<double>(ipow(static_cast<std::uint64_t>(p_), exp_));
}

std::string TorusValue::str() const {
    if (num_ == 0) return "0";
    return std::to_string(num_) + "/" + std::to_string(ipow(static_cast<std::uint64_t>(p_), exp_));
}

static void require_same_p(const TorusValue& a, const TorusValue& b) {
    if (a.p() != b.p()) throw Error("torus values over different primes");
}

TorusValue torus_add(const TorusValue& a, const TorusValue& b) {
    require_same_p(a, b);
    const int K = std::max(a.exp(), b.exp());
    const auto m = ipow(static_cast<std::uint64_t>(a.p()), K);
    return TorusValue(a.p(), (a.residue_at(K) + b.residue_at(K)) % m, K);
}

TorusValue torus_neg(const TorusValue& a) {
    const auto m = ipow(static_cast<std::uint64_t>(a.p()), a.exp());
    return TorusValue(a.p(), (m - a.num()) % m, a.exp());
}

TorusValue torus_sub(const TorusValue& a, const TorusValue& b) { return torus_add(a, torus_neg(b)); }

TorusValue torus_scale(std::int64_t n, const TorusValue& a) {
    const auto m = static_cast<__int128>(ipow(static_cast<std::uint64_t>(a.p()), a.exp()));
    __int128 r = (static_cast<__int128>(n) % m) * static_cast<__int128>(a.num()) % m;
    if (r < 0) r += m;
    return TorusValue(a.p(), static_cast<std::uint64_t>(r), a.exp());
}

Complex root_of_unity(std::uint64_t r, std::uint64_t m) {
    r %= m;
    if (r == 0) return {1.0, 0.0};
    if (m % 4 == 0) {
        if (r == m / 4) return {0.0, 1.0};
        if (r == m / 2) return {-1.0, 0.0};
        if (r == 3 * m / 4) return {0.0, -1.0};
    } else if (m % 2 == 0 && r == m / 2) {
        return {-1.0, 0.0};
    }
    // Evaluate on the nearer half of the circle to keep the angle small.
    const bool upper = 2 * r <= m;
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(upper ? r : m - r) / static_cast<double>(m);
    const Complex z{std::cos(theta), std::sin(theta)};
    return upper ? z : std::conj(z);
}

Complex char_eval(const TorusValue& a) {
    return root_of_unity(a.num(), ipow(static_cast<std::uint64_t>(a.p()), a.exp()));
}

// ---------------------------------------------------------------------------

Space::Space(int p, int n, std::uint64_t cap) : p_(p), n_(n) {
    PrimeField{p};
    if (n < 0) throw Error("negative dimension");
    pow_.resize(static_cast<std::size_t>(n) + 1);
    pow_[0] = 1;
    for (int t = 0; t < n; ++t) {
        if (pow_[t] > cap / static_cast<std::uint64_t>(p))
            throw BudgetExceeded("|F_" + std::to_string(p) + "^" + std::to_string(n) + "| exceeds the space cap");
        pow_[t + 1] = pow_[t] * static_cast<std::uint64_t>(p);
    }
    size_ = pow_[n];
}

std::uint64_t Space::add(std::uint64_t a, std::uint64_t b) const {
    if (p_ == 2) return a ^ b;
    std::uint64_t r = 0;
    const auto p = static_cast<std::uint64_t>(p_);
    for (int t = 0; t < n_; ++t) {
        r += ((a % p + b % p) % p) * pow_[t];
        a /= p;
        b /= p;
    }
    return r;
}

std::uint64_t Space::neg(std::uint64_t a) const {
    if (p_ == 2) return a;
    std::uint64_t r = 0;
    const auto p = static_cast<std::uint64_t>(p_);
    for (int t = 0; t < n_; ++t) {
        r += ((p - a % p) % p) * pow_[t];
        a /= p;
    }
    return r;
}

std::uint64_t Space::sub(std::uint64_t a, std::uint64_t b) const { return add(a, neg(b)); }

std::uint64_t Space::scale(int c, std::uint64_t a) const {
    const auto p = static_cast<std::uint64_t>(p_);
    const auto cc = static_cast<std::uint64_t>(((c % p_) + p_) % p_);
    std::uint64_t r = 0;
    for (int t = 0; t < n_; ++t) {
        r += (cc * (a % p) % p) * pow_[t];
        a /= p;
    }
    return r;
}

int Space::digit_sum(std::uint64_t x) const {
    if (p_ == 2) return __builtin_popcountll(x);
    int s = 0;
    const auto p = static_cast<std::uint64_t>(p_);
    for (int t = 0; t < n_; ++t) {
        s += static_cast<int>(x % p);
        x /= p;
    }
    return s;
}

int Space::dot(std::uint64_t a, std::uint64_t b) const {
    if (p_ == 2) return __builtin_popcountll(a & b) & 1;
    int s = 0;
    const auto p = static_cast<std::uint64_t>(p_);
    for (int t = 0; t < n_; ++t) {
        s += static_cast<int>((a % p) * (b % p));
        a /= p;
        b /= p;
    }
    return s % p_;
}

std::vector<int> Space::digits(std::uint64_t x) const {
    std::vector<int> d(static_cast<std::size_t>(n_));
    for (int t = 0; t < n_; ++t) d[static_cast<std::size_t>(t)] = digit(x, t);
    return d;
}

std::uint64_t Space::encode(const std::vector<int>& digits) const {
    if (static_cast<int>(digits.size()) != n_) throw DimensionMismatch("vector has wrong dimension");
    std::uint64_t r = 0;
    for (int t = 0; t < n_; ++t) {
        const int d = digits[static_cast<std::size_t>(t)];
        if (d < 0 || d >= p_) throw Error("digit out of range for F_" + std::to_string(p_));
        r += static_cast<std::uint64_t>(d) * pow_[t];
    }
    return r;
}

void require_same_space(const Space& a, const Space& b, const char* what) {
    if (!(a == b)) throw DimensionMismatch(std::string(what) + ": spaces differ");
}

std::uint64_t FVec::code(const Space& V) const {
    if (p != V.p()) throw DimensionMismatch("vector over a different field");
    return V.encode(digits);
}

FVec FVec::from_code(const Space& V, std::uint64_t code) { return FVec{V.p(), V.digits(code)}; }

std::pair<std::uint64_t, std::uint64_t> chunk_range(std::uint64_t total, unsigned chunks, unsigned c) {
    const std::uint64_t base = total / chunks, extra = total % chunks;
    const std::uint64_t first = c * base + std::min<std::uint64_t>(c, extra);
    return {first, first + base + (c < extra ? 1 : 0)};
}

// ---------------------------------------------------------------------------

UnityCounter::UnityCounter(int p, int K) : p_(p), K_(K), m_(ipow(static_cast<std::uint64_t>(p), K)) {
    PrimeField{p};
    if (m_ > (std::uint64_t{1} << 24)) throw BudgetExceeded("unity counter modulus too large");
    counts_.assign(m_, 0);
}

std::uint64_t UnityCounter::total() const {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
}

void UnityCounter::add(const TorusValue& v, std::uint64_t times) {
    if (v.p() != p_) throw Error("unity counter: mismatched prime");
    add_residue(v.residue_at(K_), times);
}

void UnityCounter::merge(const UnityCounter& other) {
    if (other.p_ != p_ || other.K_ != K_) throw Error("unity counter: incompatible merge");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

Expectation UnityCounter::expectation() const {
    Expectation e;
    e.total = total();
    if (e.total == 0) throw Error("expectation of an empty counter");

    Complex acc{0.0, 0.0};
    for (std::uint64_t r = 0; r < m_; ++r)
        if (counts_[r] != 0) acc += static_cast<double>(counts_[r]) * root_of_unity(r, m_);
    e.value = acc / static_cast<double>(e.total);

    // Reduce modulo the cyclotomic polynomial sum_{i<p} z^{i m/p}.
    std::vector<std::int64_t> c(counts_.begin(), counts_.end());
    if (m_ == 1) {
        e.cyclotomic = c;
    } else {
        const std::uint64_t step = m_ / static_cast<std::uint64_t>(p_);
        const std::uint64_t phi = m_ - step;
        for (std::uint64_t r = phi; r < m_; ++r) {
            const std::int64_t v = c[r];
            if (v == 0) continue;
            const std::uint64_t a = r - phi;
            for (int i = 0; i + 1 < p_; ++i) c[a + static_cast<std::uint64_t>(i) * step] -= v;
        }
        c.resize(phi);
        e.cyclotomic = c;
    }
    bool rational = true;
    for (std::size_t i = 1; i < e.cyclotomic.size(); ++i) rational = rational && e.cyclotomic[i] == 0;
    if (rational) e.rational = Rational(e.cyclotomic[0], static_cast<std::int64_t>(e.total));
    return e;
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace hofa
