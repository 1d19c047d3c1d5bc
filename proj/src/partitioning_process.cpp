#include "recomb/partitioning_process.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include "recomb/errors.hpp"
#include "recomb/rng.hpp"

namespace recomb {

namespace {

// Runs `sample(rng)` for every sample index and tallies the returned
// lattice indices. Sample i always uses stream i, and per-worker tallies
// are summed at the end, so the result is independent of `workers`.
template <class Sampler>
std::vector<std::uint64_t> run_samples(std::size_t states, const SimulationConfig& cfg,
                                       const Sampler& sample)
{
    const unsigned workers = std::max(1u, cfg.workers);
    std::vector<std::vector<std::uint64_t>> tallies(workers,
                                                    std::vector<std::uint64_t>(states, 0));
    std::vector<std::exception_ptr> errors(workers);

    auto work = [&](unsigned w) {
        try {
            const std::uint64_t lo = cfg.n_samples * w / workers;
            const std::uint64_t hi = cfg.n_samples * (w + 1) / workers;
            for (std::uint64_t i = lo; i < hi; ++i) {
                auto rng = SplitMix64::for_stream(cfg.seed, i);
                ++tallies[w][sample(rng)];
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    std::vector<std::uint64_t> counts(states, 0);
    for (const auto& t : tallies)
        for (std::size_t s = 0; s < states; ++s)
            counts[s] += t[s];
    return counts;
}

void require_samples(const SimulationConfig& cfg)
{
    if (cfg.n_samples == 0)
        throw InputError("n_samples must be at least 1");
}

std::size_t start_index(const PartitionLattice& lattice, const std::optional<SetPartition>& start)
{
    return start ? lattice.index_of(*start) : PartitionLattice::one_index();
}

// Index of the first cumulative weight exceeding u * total.
std::size_t draw(std::span<const double> cumulative, double u)
{
    const double target = u * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end())
        --it;
    return static_cast<std::size_t>(it - cumulative.begin());
}

struct JumpTable {
    double exit_rate = 0.0;
    std::vector<std::size_t> targets;
    std::vector<double> cumulative;
};

// The rate of B -> C read from the per-block description: C must refine
// exactly one block B_i of B, at rate rho^{B_i}(C|_{B_i}).
double per_block_rate(const SetPartition& from, const SetPartition& to, const RateSpec& rho)
{
    double rate = 0.0;
    std::size_t refined = 0;
    for (const auto& block : from.blocks()) {
        const GroundSet b(block);
        const auto local = restrict(to, b);
        if (local.is_one())
            continue;
        ++refined;
        rate = marginal_rates(rho, b)(local);
    }
    return refined == 1 ? rate : 0.0;
}

}  // namespace

EmpiricalDistribution simulate_ctmc(const RateSpec& rho, double t, const SimulationConfig& cfg,
                                    const std::optional<SetPartition>& start)
{
    if (!(t >= 0.0))
        throw InputError("simulation horizon must be non-negative");
    require_samples(cfg);
    const auto q = build_generator(rho);
    const auto& lattice = *q.lattice;
    const RateSpec effective = without_trivial_rate(rho);

    std::vector<JumpTable> jumps(lattice.size());
    for (std::size_t b = 0; b < lattice.size(); ++b) {
        auto& row = jumps[b];
        row.exit_rate = -q(b, b);
        double acc = 0.0;
        for (std::size_t c = 0; c < lattice.size(); ++c) {
            if (c == b || q(b, c) == 0.0)
                continue;
            acc += q(b, c);
            row.targets.push_back(c);
            row.cumulative.push_back(acc);
        }
        if (row.targets.empty())
            row.exit_rate = 0.0;
    }
    const std::size_t origin = start_index(lattice, start);

    auto sample = [&](SplitMix64& rng) {
        std::size_t state = origin;
        double clock = 0.0;
        for (;;) {
            const auto& row = jumps[state];
            if (row.exit_rate <= 0.0)
                break;
            clock += -std::log(rng.uniform_open_closed()) / row.exit_rate;
            if (clock > t)
                break;
            const std::size_t next = row.targets[draw(row.cumulative, rng.uniform())];
            if (cfg.debug_checks) {
                if (!is_refinement(lattice[next], lattice[state]) || next == state)
                    throw NumericalError("CTMC jump " + lattice[state].to_string() + " -> " +
                                         lattice[next].to_string() + " is not a refinement");
                const double block_rate = per_block_rate(lattice[state], lattice[next], effective);
                if (std::abs(block_rate - q(state, next)) > 1e-12 * std::max(1.0, block_rate))
                    throw NumericalError("per-block rate disagrees with generator for " +
                                         lattice[state].to_string() + " -> " +
                                         lattice[next].to_string());
            }
            state = next;
        }
        return state;
    };

    return {q.lattice, run_samples(lattice.size(), cfg, sample), cfg.n_samples};
}

EmpiricalDistribution simulate_discrete_chain(const ProbSpec& r, std::size_t t,
                                              const SimulationConfig& cfg,
                                              const std::optional<SetPartition>& start)
{
    require_samples(cfg);
    require_valid(r);
    auto lattice_ptr = make_lattice(r.ground());
    const auto& lattice = *lattice_ptr;
    const GroundSet& ground = lattice.ground();

    // Per distinct block: candidate refinements (as labels over the block)
    // with cumulative probabilities.
    struct Choices {
        std::vector<std::vector<std::vector<int>>> options;
        std::vector<double> cumulative;
    };
    std::map<Block, Choices> by_block;
    for (const auto& p : lattice) {
        for (const auto& block : p.blocks()) {
            if (by_block.count(block))
                continue;
            const GroundSet b(block);
            const auto local = marginal_probs(r, b);
            Choices ch;
            double acc = 0.0;
            for (const auto& [sub, prob] : local.values()) {
                if (prob <= 0.0)
                    continue;
                std::vector<std::vector<int>> pos;
                for (const auto& sb : sub.blocks()) {
                    pos.emplace_back();
                    for (int x : sb)
                        pos.back().push_back(static_cast<int>(ground.position(x)));
                }
                acc += prob;
                ch.options.push_back(std::move(pos));
                ch.cumulative.push_back(acc);
            }
            by_block.emplace(block, std::move(ch));
        }
    }
    std::vector<std::vector<const Choices*>> per_state(lattice.size());
    for (std::size_t s = 0; s < lattice.size(); ++s)
        for (const auto& block : lattice[s].blocks())
            per_state[s].push_back(&by_block.at(block));

    const std::size_t origin = start_index(lattice, start);

    auto sample = [&](SplitMix64& rng) {
        std::size_t state = origin;
        std::vector<int> labels(ground.size());
        for (std::size_t step = 0; step < t; ++step) {
            if (state == lattice.zero_index())
                break;
            int next_label = 0;
            for (const Choices* ch : per_state[state]) {
                const auto& option = ch->options[draw(ch->cumulative, rng.uniform())];
                for (const auto& sub_block : option) {
                    for (int pos : sub_block)
                        labels[static_cast<std::size_t>(pos)] = next_label;
                    ++next_label;
                }
            }
            const std::size_t next = lattice.index_of(SetPartition::from_labels(ground, labels));
            if (cfg.debug_checks && !is_refinement(lattice[next], lattice[state]))
                throw NumericalError("discrete step " + lattice[state].to_string() + " -> " +
                                     lattice[next].to_string() + " is not a refinement");
            state = next;
        }
        return state;
    };

    return {lattice_ptr, run_samples(lattice.size(), cfg, sample), cfg.n_samples};
}

ComparisonReport compare(const EmpiricalDistribution& empirical, const CoefficientVector& reference,
                         double tv_threshold)
{
    if (empirical.n_samples == 0)
        throw InputError("empirical distribution has no samples");
    if (empirical.lattice->ground() != reference.lattice->ground())
        throw InputError("empirical and reference distributions are on different ground sets");
    if (empirical.counts.size() != reference.values.size())
        throw InputError("empirical and reference distributions have different sizes");

    ComparisonReport report;
    report.threshold = tv_threshold;
    const double n = static_cast<double>(empirical.n_samples);
    for (std::size_t i = 0; i < reference.values.size(); ++i) {
        const double p = std::clamp(reference.values[i], 0.0, 1.0);
        const double p_hat = empirical.fraction(i);
        report.tv += std::abs(p_hat - p);
        const double var = p * (1.0 - p) / n;
        double z = 0.0;
        if (var > 0.0)
            z = (p_hat - p) / std::sqrt(var);
        else if (p_hat != p)
            z = std::numeric_limits<double>::infinity();
        report.z_scores.push_back(z);
        report.max_abs_z = std::max(report.max_abs_z, std::abs(z));
    }
    report.tv *= 0.5;
    report.passed = report.tv <= tv_threshold;
    return report;
}

}  // namespace recomb
