#pragma once

// Filtered finite abelian groups Z/n_1 x ... x Z/n_r, Host-Kra cube groups,
// polynomial maps between filtered groups, and exact equidistribution
// reports for maps into finite abelian groups.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hofa/core.hpp"
#include "hofa/multilinear.hpp"
#include "hofa/weighted.hpp"

namespace hofa {

/// Elements are mixed-radix codes, coordinate 0 fastest.
class FilteredAbelianGroup {
public:
    /// level_generators[i] generates G_i for 0 <= i <= s; G_i = 0 for i > s.
    /// Throws unless G_0 >= G_1 >= ... >= G_s.
    FilteredAbelianGroup(std::vector<std::uint64_t> orders, std::vector<std::vector<std::uint64_t>> level_generators);

    /// G_i = G for i <= k, 0 beyond.
    static FilteredAbelianGroup maximal(std::vector<std::uint64_t> orders, int k);
    /// prod Z/p^{J_i+1}, G_d generated by p^j e_i with D_i + j(p-1) >= d.
    static FilteredAbelianGroup weighted(int p, const std::vector<int>& D, const std::vector<int>& J);
    /// G_0 = G_1 = G, G_{i+1} = p G_i.
    static FilteredAbelianGroup p_adic(std::vector<std::uint64_t> orders, int p);

    const std::vector<std::uint64_t>& orders() const { return orders_; }
    std::uint64_t size() const { return size_; }
    /// Largest s with G_s nonzero; -1 when G_0 = 0.
    int degree() const;
    int levels() const { return static_cast<int>(elements_.size()); }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        return add_table_.empty() ? add_slow(a, b) : add_table_[a * size_ + b];
    }
    std::uint64_t neg(std::uint64_t a) const { return neg_table_.empty() ? neg_slow(a) : neg_table_[a]; }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return add(a, neg(b)); }
    std::uint64_t mul(std::int64_t c, std::uint64_t a) const;
    std::vector<std::uint64_t> decode(std::uint64_t a) const;
    std::uint64_t encode(const std::vector<std::int64_t>& digits) const;

    const std::vector<std::uint64_t>& generators(int i) const;
    /// Sorted elements of G_i.
    const std::vector<std::uint64_t>& level(int i) const;
    bool contains(int i, std::uint64_t g) const;

    std::string str() const;

private:
    std::uint64_t add_slow(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t neg_slow(std::uint64_t a) const;

    std::vector<std::uint64_t> orders_;
    std::uint64_t size_ = 1;
    std::vector<std::vector<std::uint64_t>> gens_;
    std::vector<std::vector<std::uint64_t>> elements_;
    std::vector<std::vector<char>> member_;
    std::vector<std::uint64_t> zero_level_{0};
    std::vector<std::uint64_t> no_generators_;
    std::vector<std::uint16_t> add_table_;
    std::vector<std::uint16_t> neg_table_;
};

/// The subgroup generated by gens.
std::vector<std::uint64_t> generated_subgroup(const FilteredAbelianGroup& G, const std::vector<std::uint64_t>& gens);

/// entries[omega] with omega_j = bit j-1 of the index.
struct CubePoint {
    int k = 0;
    std::vector<std::uint64_t> entries;
};

/// Every face of dimension i has alternating sum in G_i.
bool hk_membership(const CubePoint& g, const FilteredAbelianGroup& G);

struct TaylorResult {
    bool member = false;
    /// g_J indexed by the bitmask of J.
    std::vector<std::uint64_t> coeffs;
    /// First J (in increasing bitmask order) with g_J outside G_{|J|}.
    std::optional<std::uint32_t> offending;
};

TaylorResult hk_taylor(const CubePoint& g, const FilteredAbelianGroup& G);
/// g_omega = sum over J inside omega of g_J.
CubePoint taylor_expand(const std::vector<std::uint64_t>& coeffs, int k, const FilteredAbelianGroup& G);

/// prod_J |G_{|J|}|, saturating at 2^63.
std::uint64_t hk_size(const FilteredAbelianGroup& G, int k);

constexpr std::uint64_t kDefaultCubeBudget = std::uint64_t{1} << 28;

/// Calls fn on every element of HK^k(G), in Taylor-coefficient order, until
/// fn returns false.
template <class Fn>
void enumerate_hk(const FilteredAbelianGroup& G, int k, Fn&& fn, std::uint64_t budget = kDefaultCubeBudget) {
    if (hk_size(G, k) > budget) throw BudgetExceeded("HK^" + std::to_string(k) + " too large to enumerate");
    const std::uint32_t N = 1u << k;
    std::vector<std::size_t> pos(N, 0);
    std::vector<std::uint64_t> coeffs(N);
    for (std::uint32_t J = 0; J < N; ++J) {
        if (G.level(__builtin_popcount(J)).empty()) return;
        coeffs[J] = G.level(__builtin_popcount(J))[0];
    }
    while (true) {
        if (!fn(taylor_expand(coeffs, k, G))) return;
        std::uint32_t J = 0;
        for (; J < N; ++J) {
            const auto& L = G.level(__builtin_popcount(J));
            if (++pos[J] < L.size()) {
                coeffs[J] = L[pos[J]];
                break;
            }
            pos[J] = 0;
            coeffs[J] = L[0];
        }
        if (J == N) return;
    }
}

struct HkScan {
    /// |G|^{2^k}: every cube is accounted for, visited or pruned.
    double cubes = 0;
    std::uint64_t members = 0;
    std::uint64_t disagreements = 0;
    std::optional<CubePoint> counterexample;
};

/// Compares the Taylor and face characterisations on all of G^{2^k}. Vertices
/// are assigned in increasing omega; a prefix on which both predicates have
/// already failed is pruned, since both stay false on every completion.
HkScan hk_equivalence_scan(const FilteredAbelianGroup& G, int k, std::uint64_t budget = kDefaultCubeBudget);

struct HkIndexCheck {
    /// Every Taylor generator g_J e_J (g_J a generator of G_{|J|}) passes the face test.
    bool taylor_in_faces = false;
    /// |{face-test cubes}| = |G|^{2^k} / |image of the face-sum map|.
    std::uint64_t face_members = 0;
    bool equal = false;
};

/// Same equivalence, decided on subgroups: the face-test cubes form the kernel
/// of a homomorphism G^{2^k} -> prod_faces G / G_{|face|}, whose image is
/// enumerated by closure. Cost is the image size, small exactly when HK^k(G)
/// is large. Throws BudgetExceeded when the image outgrows budget.
HkIndexCheck hk_equivalence_by_index(const FilteredAbelianGroup& G, int k, std::uint64_t budget = kDefaultCubeBudget);

/// phi[h] for every code h of H.
using GroupMap = std::vector<std::uint64_t>;

enum class GeneratorMode { Generators, AllElements };

/// d_{h_1} ... d_{h_m} phi(x) in G_{i_1 + ... + i_m} for h_t from the
/// generators (or all elements) of H_{i_t}, up to total weight deg(G) + 1.
bool is_polynomial_map(const GroupMap& phi, const FilteredAbelianGroup& H, const FilteredAbelianGroup& G,
                       GeneratorMode mode = GeneratorMode::Generators);

struct CubePreservation {
    bool preserved = true;
    int failing_k = -1;
    std::optional<CubePoint> witness;
    std::uint64_t cubes_checked = 0;
};

/// phi maps HK^k(H) into HK^k(G) for every k <= k_max.
CubePreservation cube_preservation_check(const GroupMap& phi, const FilteredAbelianGroup& H,
                                         const FilteredAbelianGroup& G, int k_max,
                                         std::uint64_t budget = kDefaultCubeBudget);

struct EquidistributionReport {
    std::vector<std::uint64_t> histogram;
    std::uint64_t total = 0;
    /// max over nonzero characters xi of |E e(xi(f(a)))|.
    double max_bias = 0;
    /// A maximising character, as a code of the dual group.
    std::uint64_t argmax = 0;
    /// Decided exactly in the cyclotomic field.
    bool bias_zero = false;
    /// max_b | |{f = b}| / |A| - 1/|B| |.
    Rational max_deviation;
    /// deviation <= (|B|-1)/|B| max_bias, and bias_zero iff deviation = 0.
    bool weyl_consistent = false;
};

/// values are codes of B = prod Z/orders_t.
EquidistributionReport equidistribution_report(const std::vector<std::uint64_t>& values,
                                               const std::vector<std::uint64_t>& orders);

/// One coordinate of a tuple map: T(h_{args[0]}, ..., h_{args[k-1]}) in F_p.
struct JointComponent {
    MultilinearTable form;
    std::vector<int> args;
};

/// Equidistribution of (h_1, ..., h_d) -> (T_c(h_{args_c}))_c over V^d.
EquidistributionReport joint_equidistribution_report(const Space& V, int d, const std::vector<JointComponent>& components,
                                                     std::uint64_t budget = kDefaultCubeBudget);

/// x -> (a_1, ..., a_m) with P_{i,J_i}(x) = a_i / p^{J_i+1}, as codes of
/// prod Z/p^{J_i+1}.
std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>> factor_map(const Factor& F);

}  // namespace hofa
