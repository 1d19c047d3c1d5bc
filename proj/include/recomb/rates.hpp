#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "recomb/partition.hpp"

namespace recomb {

// Tolerance on the sum of recombination probabilities.
inline constexpr double kProbSumTolerance = 1e-12;

// A non-negative function on the partitions of a ground set; partitions
// absent from the map have value 0. Continuous time uses it for
// recombination rates, discrete time for recombination probabilities.
template <class Tag>
class PartitionFunction {
public:
    PartitionFunction() = default;
    explicit PartitionFunction(GroundSet ground) : ground_(std::move(ground)) {}
    PartitionFunction(GroundSet ground, std::map<SetPartition, double> values)
        : ground_(std::move(ground)), values_(std::move(values))
    {
        for (const auto& [p, v] : values_)
            check_key(p);
    }

    const GroundSet& ground() const noexcept { return ground_; }
    const std::map<SetPartition, double>& values() const noexcept { return values_; }

    double operator()(const SetPartition& p) const
    {
        auto it = values_.find(p);
        return it == values_.end() ? 0.0 : it->second;
    }

    // Overwrites any previous value.
    void set(const SetPartition& p, double value)
    {
        check_key(p);
        values_[p] = value;
    }
    void add(const SetPartition& p, double value)
    {
        check_key(p);
        values_[p] += value;
    }
    void erase(const SetPartition& p) { values_.erase(p); }

    double total() const
    {
        double s = 0.0;
        for (const auto& [p, v] : values_)
            s += v;
        return s;
    }

    friend bool operator==(const PartitionFunction&, const PartitionFunction&) = default;

private:
    void check_key(const SetPartition& p) const;

    GroundSet ground_;
    std::map<SetPartition, double> values_;
};

struct RateTag {};
struct ProbTag {};

// Recombination rates per unit time.
using RateSpec = PartitionFunction<RateTag>;
// Per-generation recombination probabilities; must sum to 1.
using ProbSpec = PartitionFunction<ProbTag>;

extern template class PartitionFunction<RateTag>;
extern template class PartitionFunction<ProbTag>;

struct Diagnostic {
    std::string key;
    std::string message;
    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// One unchecked (blocks, value) pair as read from a file.
struct RawEntry {
    std::string key;
    std::vector<Block> blocks;
    double value = 0.0;
};

enum class SpecKind { rates, probabilities };

std::vector<Diagnostic> validate(const RateSpec& rho);
std::vector<Diagnostic> validate(const ProbSpec& r, double sum_tolerance = kProbSumTolerance);
// Checks keys as well as values; duplicates after canonicalization are
// reported.
std::vector<Diagnostic> validate(const GroundSet& ground, std::span<const RawEntry> entries,
                                 SpecKind kind, double sum_tolerance = kProbSumTolerance);

// Throws InputError carrying the first diagnostic if there is any.
void require_valid(const RateSpec& rho);
void require_valid(const ProbSpec& r);

// Sum of the values over each restriction fiber: the marginal of
// partition A of u collects every B of the full ground set with B|_u = A.
RateSpec marginal_rates(const RateSpec& rho, const GroundSet& u);
ProbSpec marginal_probs(const ProbSpec& r, const GroundSet& u);

// Drops the entry for the single-block partition; it has no effect on
// continuous-time dynamics.
RateSpec without_trivial_rate(const RateSpec& rho);

}  // namespace recomb
