#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "recomb/partition.hpp"

namespace recomb {

// Absolute per-weight tolerance for algebraic identities between measures.
inline constexpr double kIdentityTolerance = 1e-12;

// X = X_1 x ... x X_n with finite alphabets X_i = {0, ..., |X_i|-1}.
class ProductSpace {
public:
    explicit ProductSpace(std::vector<std::size_t> site_sizes);

    std::size_t num_sites() const noexcept { return site_sizes_.size(); }
    const std::vector<std::size_t>& site_sizes() const noexcept { return site_sizes_; }
    std::size_t site_size(int site) const { return site_sizes_.at(static_cast<std::size_t>(site - 1)); }
    std::size_t total_states() const noexcept { return total_; }
    GroundSet sites() const { return GroundSet::range(static_cast<int>(site_sizes_.size())); }

    friend bool operator==(const ProductSpace&, const ProductSpace&) = default;

private:
    std::vector<std::size_t> site_sizes_;
    std::size_t total_ = 1;
};

// A finite signed measure on X_U for a site set U, as a dense table.
// Configurations are ordered with the last listed site varying fastest.
class ProductMeasure {
public:
    ProductMeasure(GroundSet sites, std::vector<std::size_t> sizes, std::vector<double> weights);
    ProductMeasure(const ProductSpace& space, std::vector<double> weights);

    static ProductMeasure zero(GroundSet sites, std::vector<std::size_t> sizes);
    static ProductMeasure uniform(GroundSet sites, std::vector<std::size_t> sizes);
    static ProductMeasure uniform(const ProductSpace& space);
    static ProductMeasure point_mass(GroundSet sites, std::vector<std::size_t> sizes,
                                     std::span<const std::size_t> config);

    const GroundSet& sites() const noexcept { return sites_; }
    const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t num_states() const noexcept { return weights_.size(); }

    double weight(std::span<const std::size_t> config) const;
    double operator[](std::size_t flat) const { return weights_[flat]; }

    // Digits of a flat index, one per site.
    std::vector<std::size_t> config_of(std::size_t flat) const;
    std::size_t flat_of(std::span<const std::size_t> config) const;

    double total_mass() const;
    bool is_positive(double tol = 0.0) const;
    bool is_probability(double tol = kIdentityTolerance) const;
    bool same_space(const ProductMeasure& other) const;

    ProductMeasure& operator+=(const ProductMeasure& other);
    ProductMeasure& operator-=(const ProductMeasure& other);
    ProductMeasure& operator*=(double c);
    // this += c * other
    ProductMeasure& add_scaled(double c, const ProductMeasure& other);

    friend ProductMeasure operator+(ProductMeasure a, const ProductMeasure& b) { return a += b; }
    friend ProductMeasure operator-(ProductMeasure a, const ProductMeasure& b) { return a -= b; }
    friend ProductMeasure operator*(double c, ProductMeasure a) { return a *= c; }

    friend bool operator==(const ProductMeasure&, const ProductMeasure&) = default;

private:
    GroundSet sites_;
    std::vector<std::size_t> sizes_;
    std::vector<double> weights_;
};

// Sum of absolute weights.
double total_variation_norm(const ProductMeasure& m);

// Push-forward under the projection onto the sites in u.
ProductMeasure marginal(const ProductMeasure& m, const GroundSet& u);

// Product measure on the union of pairwise-disjoint site sets, sites in
// ascending order regardless of argument order.
ProductMeasure tensor(std::span<const ProductMeasure> parts);

// R_A(m): tensor product of the block marginals of m, divided by
// ||m||^(|A|-1); the zero measure maps to itself.
ProductMeasure recombinator(const SetPartition& a, const ProductMeasure& m);

double tv_distance(const ProductMeasure& a, const ProductMeasure& b);
double max_abs_difference(const ProductMeasure& a, const ProductMeasure& b);

}  // namespace recomb
