#include "recomb/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "recomb/errors.hpp"

namespace recomb {

namespace {

std::size_t checked_product(std::span<const std::size_t> sizes)
{
    std::size_t total = 1;
    for (auto s : sizes) {
        if (s == 0)
            throw InputError("alphabet sizes must be at least 1");
        if (total > std::numeric_limits<std::size_t>::max() / s)
            throw InputError("state space too large");
        total *= s;
    }
    return total;
}

// Row-major strides, last site fastest.
std::vector<std::size_t> strides_of(std::span<const std::size_t> sizes)
{
    std::vector<std::size_t> strides(sizes.size(), 1);
    for (std::size_t i = sizes.size(); i-- > 1;)
        strides[i - 1] = strides[i] * sizes[i];
    return strides;
}

}  // namespace

// ------------------------------------------------------------- ProductSpace

ProductSpace::ProductSpace(std::vector<std::size_t> site_sizes)
    : site_sizes_(std::move(site_sizes))
{
    if (site_sizes_.empty())
        throw InputError("product space needs at least one site");
    total_ = checked_product(site_sizes_);
}

// ----------------------------------------------------------- ProductMeasure

ProductMeasure::ProductMeasure(GroundSet sites, std::vector<std::size_t> sizes,
                               std::vector<double> weights)
    : sites_(std::move(sites)), sizes_(std::move(sizes)), weights_(std::move(weights))
{
    if (sites_.empty())
        throw InputError("measure needs at least one site");
    if (sizes_.size() != sites_.size())
        throw InputError("one alphabet size per site required");
    if (checked_product(sizes_) != weights_.size())
        throw InputError("weight table length " + std::to_string(weights_.size()) +
                         " does not match state count " + std::to_string(checked_product(sizes_)));
}

ProductMeasure::ProductMeasure(const ProductSpace& space, std::vector<double> weights)
    : ProductMeasure(space.sites(), space.site_sizes(), std::move(weights))
{
}

ProductMeasure ProductMeasure::zero(GroundSet sites, std::vector<std::size_t> sizes)
{
    const auto n = checked_product(sizes);
    return ProductMeasure(std::move(sites), std::move(sizes), std::vector<double>(n, 0.0));
}

ProductMeasure ProductMeasure::uniform(GroundSet sites, std::vector<std::size_t> sizes)
{
    const auto n = checked_product(sizes);
    return ProductMeasure(std::move(sites), std::move(sizes),
                          std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProductMeasure ProductMeasure::uniform(const ProductSpace& space)
{
    return uniform(space.sites(), space.site_sizes());
}

ProductMeasure ProductMeasure::point_mass(GroundSet sites, std::vector<std::size_t> sizes,
                                          std::span<const std::size_t> config)
{
    auto m = zero(std::move(sites), std::move(sizes));
    m.weights_[m.flat_of(config)] = 1.0;
    return m;
}

std::vector<std::size_t> ProductMeasure::config_of(std::size_t flat) const
{
    std::vector<std::size_t> config(sizes_.size());
    for (std::size_t i = sizes_.size(); i-- > 0;) {
        config[i] = flat % sizes_[i];
        flat /= sizes_[i];
    }
    return config;
}

std::size_t ProductMeasure::flat_of(std::span<const std::size_t> config) const
{
    if (config.size() != sizes_.size())
        throw InputError("configuration length does not match site count");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
        if (config[i] >= sizes_[i])
            throw InputError("configuration entry out of alphabet range");
        flat = flat * sizes_[i] + config[i];
    }
    return flat;
}

double ProductMeasure::weight(std::span<const std::size_t> config) const
{
    return weights_[flat_of(config)];
}

double ProductMeasure::total_mass() const
{
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

bool ProductMeasure::is_positive(double tol) const
{
    return std::all_of(weights_.begin(), weights_.end(), [tol](double w) { return w >= -tol; });
}

bool ProductMeasure::is_probability(double tol) const
{
    return is_positive(tol) && std::abs(total_mass() - 1.0) <= tol;
}

bool ProductMeasure::same_space(const ProductMeasure& other) const
{
    return sites_ == other.sites_ && sizes_ == other.sizes_;
}

ProductMeasure& ProductMeasure::add_scaled(double c, const ProductMeasure& other)
{
    if (!same_space(other))
        throw InputError("measures live on different spaces");
    for (std::size_t i = 0; i < weights_.size(); ++i)
        weights_[i] += c * other.weights_[i];
    return *this;
}

ProductMeasure& ProductMeasure::operator+=(const ProductMeasure& other)
{
    if (!same_space(other))
        throw InputError("measures live on different spaces");
    for (std::size_t i = 0; i < weights_.size(); ++i)
        weights_[i] += other.weights_[i];
    return *this;
}

ProductMeasure& ProductMeasure::operator-=(const ProductMeasure& other)
{
    if (!same_space(other))
        throw InputError("measures live on different spaces");
    for (std::size_t i = 0; i < weights_.size(); ++i)
        weights_[i] -= other.weights_[i];
    return *this;
}

ProductMeasure& ProductMeasure::operator*=(double c)
{
    for (auto& w : weights_)
        w *= c;
    return *this;
}

// --------------------------------------------------------------- operations

double total_variation_norm(const ProductMeasure& m)
{
    double s = 0.0;
    for (double w : m.weights())
        s += std::abs(w);
    return s;
}

ProductMeasure marginal(const ProductMeasure& m, const GroundSet& u)
{
    if (u.empty())
        throw InputError("cannot marginalize onto an empty site set");
    if (!u.is_subset_of(m.sites()))
        throw InputError(u.to_string() + " is not a subset of the measure's sites " +
                         m.sites().to_string());
    if (u == m.sites())
        return m;

    std::vector<std::size_t> keep;
    std::vector<std::size_t> sub_sizes;
    for (int site : u) {
        keep.push_back(m.sites().position(site));
        sub_sizes.push_back(m.sizes()[keep.back()]);
    }
    const auto sub_strides = strides_of(sub_sizes);

    // Per-site contribution to the sub-index; zero for summed-out sites.
    std::vector<std::size_t> contribution(m.sizes().size(), 0);
    for (std::size_t k = 0; k < keep.size(); ++k)
        contribution[keep[k]] = sub_strides[k];

    std::vector<double> out(checked_product(sub_sizes), 0.0);
    std::vector<std::size_t> digits(m.sizes().size(), 0);
    std::size_t sub = 0;
    const auto weights = m.weights();
    for (std::size_t flat = 0; flat < weights.size(); ++flat) {
        out[sub] += weights[flat];
        // Odometer increment, last site fastest.
        for (std::size_t i = digits.size(); i-- > 0;) {
            if (++digits[i] < m.sizes()[i]) {
                sub += contribution[i];
                break;
            }
            sub -= contribution[i] * (digits[i] - 1);
            digits[i] = 0;
        }
    }
    return ProductMeasure(u, std::move(sub_sizes), std::move(out));
}

ProductMeasure tensor(std::span<const ProductMeasure> parts)
{
    if (parts.empty())
        throw InputError("tensor of no measures");
    if (parts.size() == 1)
        return parts.front();

    GroundSet sites;
    for (const auto& p : parts) {
        if (!sites.is_disjoint_from(p.sites()))
            throw InputError("tensor: overlapping site sets");
        sites = sites.set_union(p.sites());
    }

    // For every global site: owning part and its stride inside that part.
    std::vector<std::size_t> sizes(sites.size());
    std::vector<std::size_t> owner(sites.size());
    std::vector<std::size_t> local_stride(sites.size());
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto strides = strides_of(parts[k].sizes());
        for (std::size_t j = 0; j < parts[k].sites().size(); ++j) {
            const auto g = sites.position(parts[k].sites()[j]);
            sizes[g] = parts[k].sizes()[j];
            owner[g] = k;
            local_stride[g] = strides[j];
        }
    }

    std::vector<double> out(checked_product(sizes));
    std::vector<std::size_t> digits(sizes.size(), 0);
    std::vector<std::size_t> local(parts.size(), 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        double w = 1.0;
        for (std::size_t k = 0; k < parts.size(); ++k)
            w *= parts[k][local[k]];
        out[flat] = w;
        for (std::size_t i = digits.size(); i-- > 0;) {
            if (++digits[i] < sizes[i]) {
                local[owner[i]] += local_stride[i];
                break;
            }
            local[owner[i]] -= local_stride[i] * (digits[i] - 1);
            digits[i] = 0;
        }
    }
    return ProductMeasure(std::move(sites), std::move(sizes), std::move(out));
}

ProductMeasure recombinator(const SetPartition& a, const ProductMeasure& m)
{
    if (a.ground() != m.sites())
        throw InputError("partition " + a.to_string() + " does not partition the measure's sites " +
                         m.sites().to_string());
    if (a.is_one())
        return m;
    const double norm = total_variation_norm(m);
    if (norm == 0.0)
        return ProductMeasure::zero(m.sites(), m.sizes());

    std::vector<ProductMeasure> factors;
    factors.reserve(a.size());
    for (const auto& block : a.blocks())
        factors.push_back(marginal(m, GroundSet(block)));
    auto out = tensor(factors);
    out *= 1.0 / std::pow(norm, static_cast<double>(a.size() - 1));
    return out;
}

double tv_distance(const ProductMeasure& a, const ProductMeasure& b)
{
    if (!a.same_space(b))
        throw InputError("tv_distance: measures live on different spaces");
    double s = 0.0;
    for (std::size_t i = 0; i < a.num_states(); ++i)
        s += std::abs(a[i] - b[i]);
    return s;
}

double max_abs_difference(const ProductMeasure& a, const ProductMeasure& b)
{
    if (!a.same_space(b))
        throw InputError("max_abs_difference: measures live on different spaces");
    double s = 0.0;
    for (std::size_t i = 0; i < a.num_states(); ++i)
        s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

}  // namespace recomb
