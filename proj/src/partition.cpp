#include "recomb/partition.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <sstream>

#include "recomb/errors.hpp"

namespace recomb {

// ---------------------------------------------------------------- GroundSet

GroundSet::GroundSet(std::vector<int> elements) : elements_(std::move(elements))
{
    std::sort(elements_.begin(), elements_.end());
    if (std::adjacent_find(elements_.begin(), elements_.end()) != elements_.end())
        throw InputError("ground set has duplicate element");
    if (!elements_.empty() && elements_.front() < 1)
        throw InputError("site indices are 1-based");
}

GroundSet::GroundSet(std::initializer_list<int> elements)
    : GroundSet(std::vector<int>(elements))
{
}

GroundSet GroundSet::range(int n)
{
    if (n < 1)
        throw InputError("empty ground set");
    std::vector<int> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 1);
    return GroundSet(std::move(v));
}

bool GroundSet::contains(int site) const
{
    return std::binary_search(elements_.begin(), elements_.end(), site);
}

bool GroundSet::is_subset_of(const GroundSet& other) const
{
    return std::includes(other.elements_.begin(), other.elements_.end(),
                         elements_.begin(), elements_.end());
}

bool GroundSet::is_disjoint_from(const GroundSet& other) const
{
    auto a = elements_.begin();
    auto b = other.elements_.begin();
    while (a != elements_.end() && b != other.elements_.end()) {
        if (*a == *b)
            return false;
        if (*a < *b)
            ++a;
        else
            ++b;
    }
    return true;
}

std::size_t GroundSet::position(int site) const
{
    auto it = std::lower_bound(elements_.begin(), elements_.end(), site);
    if (it == elements_.end() || *it != site)
        throw InputError("site " + std::to_string(site) + " not in ground set " + to_string());
    return static_cast<std::size_t>(it - elements_.begin());
}

GroundSet GroundSet::set_union(const GroundSet& other) const
{
    std::vector<int> out;
    std::set_union(elements_.begin(), elements_.end(), other.elements_.begin(),
                   other.elements_.end(), std::back_inserter(out));
    return GroundSet(std::move(out));
}

GroundSet GroundSet::set_difference(const GroundSet& other) const
{
    std::vector<int> out;
    std::set_difference(elements_.begin(), elements_.end(), other.elements_.begin(),
                        other.elements_.end(), std::back_inserter(out));
    return GroundSet(std::move(out));
}

std::string GroundSet::to_string() const
{
    std::string s = "{";
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(elements_[i]);
    }
    return s + "}";
}

// ------------------------------------------------------------- SetPartition

namespace {

void canonicalize(std::vector<Block>& blocks)
{
    for (auto& b : blocks)
        std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end(),
              [](const Block& x, const Block& y) { return x.front() < y.front(); });
}

}  // namespace

SetPartition::SetPartition(Canonical, GroundSet ground, std::vector<Block> blocks)
    : ground_(std::move(ground)), blocks_(std::move(blocks))
{
}

SetPartition::SetPartition(GroundSet ground, std::vector<Block> blocks)
    : ground_(std::move(ground)), blocks_(std::move(blocks))
{
    if (ground_.empty())
        throw InputError("empty ground set");
    std::vector<int> seen;
    for (const auto& b : blocks_) {
        if (b.empty())
            throw InputError("partition has an empty block");
        seen.insert(seen.end(), b.begin(), b.end());
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw InputError("not a partition: element appears in two blocks");
    if (seen != ground_.elements())
        throw InputError("not a partition: blocks do not cover ground set " + ground_.to_string());
    canonicalize(blocks_);
}

namespace {

GroundSet union_of(const std::vector<Block>& blocks)
{
    std::vector<int> all;
    for (const auto& b : blocks)
        all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw InputError("not a partition: element appears in two blocks");
    return GroundSet(std::move(all));
}

}  // namespace

SetPartition::SetPartition(std::vector<Block> blocks)
{
    // Ground set first: argument evaluation order would allow the move to
    // happen before union_of reads the blocks.
    GroundSet ground = union_of(blocks);
    *this = SetPartition(std::move(ground), std::move(blocks));
}

SetPartition SetPartition::one(const GroundSet& ground)
{
    if (ground.empty())
        throw InputError("empty ground set");
    return SetPartition(Canonical{}, ground, {ground.elements()});
}

SetPartition SetPartition::zero(const GroundSet& ground)
{
    if (ground.empty())
        throw InputError("empty ground set");
    std::vector<Block> blocks;
    blocks.reserve(ground.size());
    for (int x : ground)
        blocks.push_back({x});
    return SetPartition(Canonical{}, ground, std::move(blocks));
}

SetPartition SetPartition::from_labels(const GroundSet& ground, std::span<const int> labels)
{
    if (ground.empty())
        throw InputError("empty ground set");
    if (labels.size() != ground.size())
        throw InputError("label count does not match ground set");
    // Ground elements are visited in ascending order, so blocks are created
    // in order of their minimum and each block is filled ascending.
    std::vector<Block> blocks;
    std::map<int, std::size_t> slot;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, fresh] = slot.try_emplace(labels[i], blocks.size());
        if (fresh)
            blocks.emplace_back();
        blocks[it->second].push_back(ground[i]);
    }
    return SetPartition(Canonical{}, ground, std::move(blocks));
}

SetPartition SetPartition::parse(std::string_view text, const std::optional<GroundSet>& ground)
{
    std::string compact;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            compact += c;
    if (compact.empty())
        throw InputError("empty partition string");

    std::vector<Block> blocks(1);
    std::size_t pos = 0;
    while (pos <= compact.size()) {
        std::size_t end = pos;
        while (end < compact.size() && compact[end] != ',' && compact[end] != '|')
            ++end;
        int value = 0;
        auto [ptr, ec] = std::from_chars(compact.data() + pos, compact.data() + end, value);
        if (ec != std::errc() || ptr != compact.data() + end || end == pos)
            throw InputError("malformed partition string '" + std::string(text) + "'");
        blocks.back().push_back(value);
        if (end == compact.size())
            break;
        if (compact[end] == '|')
            blocks.emplace_back();
        pos = end + 1;
    }

    if (ground) {
        std::vector<int> all;
        for (const auto& b : blocks)
            all.insert(all.end(), b.begin(), b.end());
        std::sort(all.begin(), all.end());
        if (std::adjacent_find(all.begin(), all.end()) != all.end())
            throw InputError("duplicate element in partition '" + std::string(text) + "'");
        if (all != ground->elements())
            throw InputError("partition '" + std::string(text) + "' does not cover ground set " +
                             ground->to_string());
        return SetPartition(*ground, std::move(blocks));
    }
    return SetPartition(std::move(blocks));
}

std::size_t SetPartition::block_of(int site) const
{
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        if (std::binary_search(blocks_[i].begin(), blocks_[i].end(), site))
            return i;
    throw InputError("site " + std::to_string(site) + " not in partition " + to_string());
}

std::vector<int> SetPartition::labels() const
{
    std::vector<int> out(ground_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        for (int x : blocks_[b])
            out[ground_.position(x)] = static_cast<int>(b);
    return out;
}

std::string SetPartition::to_string() const
{
    std::string s;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        if (b)
            s += '|';
        for (std::size_t i = 0; i < blocks_[b].size(); ++i) {
            if (i)
                s += ',';
            s += std::to_string(blocks_[b][i]);
        }
    }
    return s;
}

// --------------------------------------------------------------- operations

std::uint64_t bell_number(std::size_t n)
{
    // Bell triangle.
    std::vector<std::uint64_t> row{1};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint64_t> next{row.back()};
        for (auto v : row)
            next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.front();
}

std::vector<SetPartition> enumerate_partitions(const GroundSet& ground)
{
    if (ground.empty())
        throw InputError("empty ground set");
    const std::size_t n = ground.size();
    std::vector<SetPartition> out;
    out.reserve(static_cast<std::size_t>(bell_number(n)));

    // rgs[i] <= 1 + max(rgs[0..i-1]); prefix_max[i] = max(rgs[0..i]).
    std::vector<int> rgs(n, 0);
    std::vector<int> prefix_max(n, 0);
    for (;;) {
        out.push_back(SetPartition::from_labels(ground, rgs));
        std::size_t i = n;
        while (i-- > 1) {
            if (rgs[i] <= prefix_max[i - 1])
                break;
        }
        if (i == 0 || i >= n)
            break;
        ++rgs[i];
        prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            rgs[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }
    return out;
}

namespace {

void require_same_ground(const SetPartition& a, const SetPartition& b)
{
    if (a.ground() != b.ground())
        throw InputError("partitions " + a.to_string() + " and " + b.to_string() +
                         " have different ground sets");
}

}  // namespace

SetPartition meet(const SetPartition& a, const SetPartition& b)
{
    require_same_ground(a, b);
    const auto la = a.labels();
    const auto lb = b.labels();
    const int width = static_cast<int>(b.size());
    std::vector<int> labels(la.size());
    for (std::size_t i = 0; i < la.size(); ++i)
        labels[i] = la[i] * width + lb[i];
    return SetPartition::from_labels(a.ground(), labels);
}

bool is_refinement(const SetPartition& a, const SetPartition& b)
{
    require_same_ground(a, b);
    const auto lb = b.labels();
    for (const auto& block : a.blocks()) {
        const int target = lb[a.ground().position(block.front())];
        for (int x : block)
            if (lb[a.ground().position(x)] != target)
                return false;
    }
    return true;
}

SetPartition restrict(const SetPartition& a, const GroundSet& u)
{
    if (u.empty())
        throw InputError("cannot restrict to an empty set");
    if (!u.is_subset_of(a.ground()))
        throw InputError(u.to_string() + " is not a subset of " + a.ground().to_string());
    std::vector<int> labels;
    labels.reserve(u.size());
    for (int x : u)
        labels.push_back(static_cast<int>(a.block_of(x)));
    return SetPartition::from_labels(u, labels);
}

SetPartition join_disjoint(std::span<const SetPartition> parts)
{
    if (parts.empty())
        throw InputError("join of no partitions");
    GroundSet ground;
    std::vector<Block> blocks;
    for (const auto& p : parts) {
        if (!ground.is_disjoint_from(p.ground()))
            throw InputError("join_disjoint: overlapping ground sets");
        ground = ground.set_union(p.ground());
        blocks.insert(blocks.end(), p.blocks().begin(), p.blocks().end());
    }
    return SetPartition(std::move(ground), std::move(blocks));
}

SetPartition remove_block(const SetPartition& b, std::size_t i)
{
    if (b.size() < 2)
        throw InputError("remove_block: single-block partition would leave an empty ground set");
    if (i >= b.size())
        throw InputError("remove_block: block index out of range");
    std::vector<Block> blocks;
    for (std::size_t j = 0; j < b.size(); ++j)
        if (j != i)
            blocks.push_back(b.block(j));
    return SetPartition(b.ground().set_difference(GroundSet(b.block(i))), std::move(blocks));
}

// --------------------------------------------------------- PartitionLattice

PartitionLattice::PartitionLattice(GroundSet ground)
    : ground_(std::move(ground)), partitions_(enumerate_partitions(ground_))
{
    for (std::size_t i = 0; i < partitions_.size(); ++i)
        index_.emplace(partitions_[i].labels(), i);
}

std::size_t PartitionLattice::index_of(const SetPartition& p) const
{
    if (p.ground() != ground_)
        throw InputError("partition " + p.to_string() + " is not on " + ground_.to_string());
    return index_.at(p.labels());
}

}  // namespace recomb
