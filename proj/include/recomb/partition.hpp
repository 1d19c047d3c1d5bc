#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace recomb {

// A finite set of site indices (1-based), kept sorted and duplicate-free.
class GroundSet {
public:
    GroundSet() = default;
    // Sorts its input; throws InputError on duplicates or indices < 1.
    explicit GroundSet(std::vector<int> elements);
    GroundSet(std::initializer_list<int> elements);

    // {1, ..., n}
    static GroundSet range(int n);

    const std::vector<int>& elements() const noexcept { return elements_; }
    std::size_t size() const noexcept { return elements_.size(); }
    bool empty() const noexcept { return elements_.empty(); }
    int operator[](std::size_t i) const { return elements_[i]; }
    auto begin() const noexcept { return elements_.begin(); }
    auto end() const noexcept { return elements_.end(); }

    bool contains(int site) const;
    bool is_subset_of(const GroundSet& other) const;
    bool is_disjoint_from(const GroundSet& other) const;
    // Position of `site` within elements(); throws if absent.
    std::size_t position(int site) const;

    GroundSet set_union(const GroundSet& other) const;
    GroundSet set_difference(const GroundSet& other) const;

    std::string to_string() const;

    friend bool operator==(const GroundSet&, const GroundSet&) = default;
    friend auto operator<=>(const GroundSet&, const GroundSet&) = default;

private:
    std::vector<int> elements_;
};

using Block = std::vector<int>;

// A partition of a non-empty ground set into non-empty, disjoint blocks.
// Always held in canonical form: each block ascending, blocks ordered by
// their smallest element.
class SetPartition {
public:
    // Validates that `blocks` partition `ground` and canonicalizes.
    SetPartition(GroundSet ground, std::vector<Block> blocks);
    // Ground set is taken to be the union of the blocks.
    explicit SetPartition(std::vector<Block> blocks);

    // {S}, the coarsest partition.
    static SetPartition one(const GroundSet& ground);
    // All singletons, the finest partition.
    static SetPartition zero(const GroundSet& ground);
    // Builds the partition whose i-th ground element sits in block
    // labels[i]; labels need not be in restricted-growth form.
    static SetPartition from_labels(const GroundSet& ground, std::span<const int> labels);

    // Text form `1,3|2|4,5`. Whitespace is ignored. If `ground` is given
    // the parsed elements must cover it exactly.
    static SetPartition parse(std::string_view text,
                              const std::optional<GroundSet>& ground = std::nullopt);

    const GroundSet& ground() const noexcept { return ground_; }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    const Block& block(std::size_t i) const { return blocks_.at(i); }
    std::size_t size() const noexcept { return blocks_.size(); }

    bool is_one() const noexcept { return blocks_.size() == 1; }
    bool is_zero() const noexcept { return blocks_.size() == ground_.size(); }

    // Index of the block containing `site`.
    std::size_t block_of(int site) const;
    // Restricted-growth string: entry i is the block index of ground()[i].
    std::vector<int> labels() const;

    std::string to_string() const;

    friend bool operator==(const SetPartition&, const SetPartition&) = default;
    friend auto operator<=>(const SetPartition&, const SetPartition&) = default;

private:
    struct Canonical {};
    SetPartition(Canonical, GroundSet ground, std::vector<Block> blocks);

    GroundSet ground_;
    std::vector<Block> blocks_;
};

std::uint64_t bell_number(std::size_t n);

// Every partition of `ground`, as restricted-growth strings in
// lexicographic order: index 0 is the single-block partition and the last
// entry is the all-singletons partition.
std::vector<SetPartition> enumerate_partitions(const GroundSet& ground);

// Coarsest common refinement.
SetPartition meet(const SetPartition& a, const SetPartition& b);
// True iff a is finer than or equal to b.
bool is_refinement(const SetPartition& a, const SetPartition& b);
SetPartition restrict(const SetPartition& a, const GroundSet& u);
// Partition of the union of pairwise-disjoint ground sets.
SetPartition join_disjoint(std::span<const SetPartition> parts);
// Partition of ground \ B_i obtained by dropping block i (0-based).
SetPartition remove_block(const SetPartition& b, std::size_t i);

// Enumerated partitions of a fixed ground set with O(log) reverse lookup.
class PartitionLattice {
public:
    explicit PartitionLattice(GroundSet ground);

    const GroundSet& ground() const noexcept { return ground_; }
    std::size_t size() const noexcept { return partitions_.size(); }
    const SetPartition& operator[](std::size_t i) const { return partitions_[i]; }
    const std::vector<SetPartition>& partitions() const noexcept { return partitions_; }
    auto begin() const noexcept { return partitions_.begin(); }
    auto end() const noexcept { return partitions_.end(); }

    std::size_t index_of(const SetPartition& p) const;

    static constexpr std::size_t one_index() noexcept { return 0; }
    std::size_t zero_index() const noexcept { return partitions_.size() - 1; }

private:
    GroundSet ground_;
    std::vector<SetPartition> partitions_;
    std::map<std::vector<int>, std::size_t> index_;
};

}  // namespace recomb
