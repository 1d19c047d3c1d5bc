#include "recomb/rates.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "recomb/errors.hpp"

namespace recomb {

template <class Tag>
void PartitionFunction<Tag>::check_key(const SetPartition& p) const
{
    if (p.ground() != ground_)
        throw InputError("key " + p.to_string() + " does not partition " + ground_.to_string());
}

template class PartitionFunction<RateTag>;
template class PartitionFunction<ProbTag>;

namespace {

std::string format_deviation(double d)
{
    std::ostringstream os;
    os.precision(3);
    os << d;
    return os.str();
}

template <class Spec>
void check_values(const Spec& spec, std::vector<Diagnostic>& out)
{
    for (const auto& [p, v] : spec.values()) {
        if (!std::isfinite(v))
            out.push_back({p.to_string(), "value is not finite"});
        else if (v < 0.0)
            out.push_back({p.to_string(), "negative value " + format_deviation(v)});
    }
}

void check_sum(double sum, double tol, std::vector<Diagnostic>& out)
{
    const double dev = std::abs(sum - 1.0);
    if (!(dev <= tol))
        out.push_back({"", "sum deviates by " + format_deviation(dev)});
}

template <class Spec>
Spec marginalize(const Spec& spec, const GroundSet& u)
{
    if (u.empty())
        throw InputError("cannot marginalize onto an empty site set");
    if (!u.is_subset_of(spec.ground()))
        throw InputError(u.to_string() + " is not a subset of " + spec.ground().to_string());
    Spec out(u);
    for (const auto& [p, v] : spec.values())
        out.add(restrict(p, u), v);
    return out;
}

}  // namespace

std::vector<Diagnostic> validate(const RateSpec& rho)
{
    std::vector<Diagnostic> out;
    check_values(rho, out);
    return out;
}

std::vector<Diagnostic> validate(const ProbSpec& r, double sum_tolerance)
{
    std::vector<Diagnostic> out;
    check_values(r, out);
    check_sum(r.total(), sum_tolerance, out);
    return out;
}

std::vector<Diagnostic> validate(const GroundSet& ground, std::span<const RawEntry> entries,
                                 SpecKind kind, double sum_tolerance)
{
    std::vector<Diagnostic> out;
    std::set<SetPartition> seen;
    double sum = 0.0;
    for (const auto& e : entries) {
        try {
            SetPartition p(ground, e.blocks);
            if (!seen.insert(p).second)
                out.push_back({e.key, "duplicate key (canonical form " + p.to_string() + ")"});
        } catch (const InputError&) {
            out.push_back({e.key, "not a partition of " + ground.to_string()});
            continue;
        }
        if (!std::isfinite(e.value))
            out.push_back({e.key, "value is not finite"});
        else if (e.value < 0.0)
            out.push_back({e.key, "negative value " + format_deviation(e.value)});
        sum += e.value;
    }
    if (kind == SpecKind::probabilities)
        check_sum(sum, sum_tolerance, out);
    return out;
}

void require_valid(const RateSpec& rho)
{
    auto d = validate(rho);
    if (!d.empty())
        throw InputError("invalid rate spec: " + d.front().key + ": " + d.front().message);
}

void require_valid(const ProbSpec& r)
{
    auto d = validate(r);
    if (!d.empty())
        throw InputError("invalid probability spec: " +
                         (d.front().key.empty() ? "" : d.front().key + ": ") + d.front().message);
}

RateSpec marginal_rates(const RateSpec& rho, const GroundSet& u)
{
    return marginalize(rho, u);
}

ProbSpec marginal_probs(const ProbSpec& r, const GroundSet& u)
{
    return marginalize(r, u);
}

RateSpec without_trivial_rate(const RateSpec& rho)
{
    RateSpec out = rho;
    out.erase(SetPartition::one(rho.ground()));
    return out;
}

}  // namespace recomb
