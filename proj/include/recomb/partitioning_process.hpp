#pragma once

// Monte Carlo simulation of the partition-valued refinement processes whose
// laws are the coefficient vectors a_t.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "recomb/linearizer.hpp"
#include "recomb/partition.hpp"
#include "recomb/rates.hpp"

namespace recomb {

struct SimulationConfig {
    std::uint64_t n_samples = 100000;
    std::uint64_t seed = 0;
    // Worker threads; output does not depend on this.
    unsigned workers = 1;
    // Assert refinement monotonicity on every transition and, in
    // continuous time, cross-check the jump rate against the per-block
    // description of the process.
    bool debug_checks = false;
};

struct EmpiricalDistribution {
    std::shared_ptr<const PartitionLattice> lattice;
    std::vector<std::uint64_t> counts;
    std::uint64_t n_samples = 0;

    double fraction(std::size_t i) const
    {
        return static_cast<double>(counts[i]) / static_cast<double>(n_samples);
    }

    friend bool operator==(const EmpiricalDistribution& a, const EmpiricalDistribution& b)
    {
        return a.counts == b.counts && a.n_samples == b.n_samples &&
               a.lattice->ground() == b.lattice->ground();
    }
};

// Gillespie simulation started at `start` (default: single block), state
// recorded at time t.
EmpiricalDistribution simulate_ctmc(const RateSpec& rho, double t, const SimulationConfig& cfg,
                                    const std::optional<SetPartition>& start = std::nullopt);

// Each step refines every block B_i independently according to r^{B_i};
// state recorded after t steps.
EmpiricalDistribution simulate_discrete_chain(const ProbSpec& r, std::size_t t,
                                              const SimulationConfig& cfg,
                                              const std::optional<SetPartition>& start =
                                                  std::nullopt);

struct ComparisonReport {
    // Half the L1 distance between empirical and reference laws.
    double tv = 0.0;
    // (p_hat - p) / sqrt(p (1 - p) / n) per state; 0 where both p and p_hat
    // are degenerate and equal, infinite where only p is degenerate.
    std::vector<double> z_scores;
    double max_abs_z = 0.0;
    double threshold = 0.0;
    bool passed = false;
};

ComparisonReport compare(const EmpiricalDistribution& empirical, const CoefficientVector& reference,
                         double tv_threshold = 0.01);

}  // namespace recomb
