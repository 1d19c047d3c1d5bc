#include "recomb/linearizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "recomb/errors.hpp"

namespace recomb {

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Marginal of a spec onto each block, computed once per distinct block.
template <class Spec, class Marginalize>
class BlockMarginals {
public:
    BlockMarginals(const Spec& spec, Marginalize f) : spec_(spec), f_(f) {}

    const Spec& operator()(const Block& block)
    {
        auto it = cache_.find(block);
        if (it == cache_.end())
            it = cache_.emplace(block, f_(spec_, GroundSet(block))).first;
        return it->second;
    }

private:
    const Spec& spec_;
    Marginalize f_;
    std::map<Block, Spec> cache_;
};

void require_probability(const ProductMeasure& omega0)
{
    if (!omega0.is_probability(kIdentityTolerance))
        throw InputError("initial measure must be a probability measure");
}

void require_dynamics_sites(const ProductMeasure& omega0, const GroundSet& ground)
{
    if (omega0.sites() != ground)
        throw InputError("initial measure lives on sites " + omega0.sites().to_string() +
                         " but the rates are given on " + ground.to_string());
}

void check_coefficients(const CoefficientVector& a)
{
    double sum = 0.0;
    for (double v : a.values) {
        if (v < -kIdentityTolerance)
            throw NumericalError("coefficient vector has negative entry " + fmt(v));
        sum += v;
    }
    if (std::abs(sum - 1.0) > kCoefficientSumTolerance)
        throw NumericalError("coefficient vector sums to " + fmt(sum));
}

void check_solution(const ProductMeasure& m)
{
    if (!m.is_positive(kIdentityTolerance) ||
        std::abs(m.total_mass() - 1.0) > kCoefficientSumTolerance)
        throw NumericalError("solution left the probability simplex");
}

double max_row_abs_sum(const Eigen::MatrixXd& a)
{
    return a.rows() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

std::shared_ptr<const PartitionLattice> make_lattice(const GroundSet& ground)
{
    if (ground.empty())
        throw InputError("empty ground set");
    if (ground.size() > kMaxLinearizedSites)
        throw InputError("ground set of " + std::to_string(ground.size()) +
                         " sites exceeds the limit of " + std::to_string(kMaxLinearizedSites) +
                         " (matrix dimension grows as the Bell number, Bell(" +
                         std::to_string(ground.size()) + ") = " +
                         std::to_string(bell_number(ground.size())) + ")");
    return std::make_shared<const PartitionLattice>(ground);
}

PartitionMatrix build_generator(const RateSpec& rho)
{
    require_valid(rho);
    auto lattice = make_lattice(rho.ground());
    const RateSpec effective = without_trivial_rate(rho);
    BlockMarginals marginals(effective, &marginal_rates);

    const auto dim = static_cast<Eigen::Index>(lattice->size());
    PartitionMatrix q{lattice, Eigen::MatrixXd::Zero(dim, dim), MatrixKind::generator};
    for (std::size_t b = 0; b < lattice->size(); ++b) {
        const SetPartition& from = (*lattice)[b];
        double exit_rate = 0.0;
        for (std::size_t i = 0; i < from.size(); ++i) {
            const Block& block = from.block(i);
            if (block.size() == 1)
                continue;
            const RateSpec& local = marginals(block);
            for (const auto& [refinement, rate] : local.values()) {
                if (refinement.is_one() || rate == 0.0)
                    continue;
                const SetPartition to =
                    from.is_one()
                        ? refinement
                        : join_disjoint(std::vector{remove_block(from, i), refinement});
                q.entries(static_cast<Eigen::Index>(b),
                          static_cast<Eigen::Index>(lattice->index_of(to))) += rate;
                exit_rate += rate;
            }
        }
        q.entries(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) = 0.0 - exit_rate;  // +0 for absorbing states
    }
    return q;
}

PartitionMatrix build_markov_matrix(const ProbSpec& r, double sum_tolerance)
{
    auto diagnostics = validate(r, sum_tolerance);
    if (!diagnostics.empty())
        throw InputError("invalid probability spec: " + diagnostics.front().key + " " +
                         diagnostics.front().message);
    auto lattice = make_lattice(r.ground());
    BlockMarginals marginals(r, &marginal_probs);

    const auto dim = static_cast<Eigen::Index>(lattice->size());
    PartitionMatrix m{lattice, Eigen::MatrixXd::Zero(dim, dim), MatrixKind::markov};
    for (std::size_t b = 0; b < lattice->size(); ++b) {
        const SetPartition& from = (*lattice)[b];
        for (std::size_t c = 0; c < lattice->size(); ++c) {
            const SetPartition& to = (*lattice)[c];
            if (!is_refinement(to, from))
                continue;
            double p = 1.0;
            for (const auto& block : from.blocks()) {
                if (block.size() == 1)
                    continue;
                p *= marginals(block)(restrict(to, GroundSet(block)));
                if (p == 0.0)
                    break;
            }
            m.entries(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)) = p;
        }
    }
    return m;
}

PartitionMatrix semigroup(const PartitionMatrix& q, double t)
{
    if (!(t >= 0.0))
        throw InputError("semigroup time must be non-negative");
    const auto dim = q.entries.rows();
    PartitionMatrix out{q.lattice, Eigen::MatrixXd::Identity(dim, dim), MatrixKind::markov};
    if (t == 0.0)
        return out;

    Eigen::MatrixXd a = t * q.entries;
    const double norm = max_row_abs_sum(a);
    int squarings = 0;
    if (norm > 0.5)
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    a /= std::ldexp(1.0, squarings);

    // ||a|| <= 1/2, so the k-th term is below 2^-k / k! and 30 terms are
    // far past double precision.
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::MatrixXd sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * a / static_cast<double>(k);
        sum += term;
        if (max_row_abs_sum(term) < 1e-18)
            break;
    }
    for (int s = 0; s < squarings; ++s)
        sum = sum * sum;
    out.entries = std::move(sum);

    auto violations = check_structure(out);
    if (!violations.empty())
        throw NumericalError("exp(tQ) at t = " + fmt(t) + ": " + violations.front());
    return out;
}

std::vector<std::string> check_structure(const PartitionMatrix& m, double tol)
{
    std::vector<std::string> out;
    const auto& lattice = *m.lattice;
    const std::size_t dim = m.dim();
    if (dim != lattice.size() || static_cast<std::size_t>(m.entries.cols()) != dim) {
        out.push_back("matrix dimension does not match the lattice");
        return out;
    }
    if (m.kind == MatrixKind::general)
        return out;
    const double target = m.kind == MatrixKind::generator ? 0.0 : 1.0;
    for (std::size_t b = 0; b < dim; ++b) {
        double row = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            const double v = m(b, c);
            row += v;
            const bool off = b != c;
            if (m.kind == MatrixKind::generator && off && v < 0.0)
                out.push_back("negative off-diagonal rate at (" + lattice[b].to_string() + ", " +
                              lattice[c].to_string() + ")");
            if (m.kind == MatrixKind::markov && (v < -tol || v > 1.0 + tol))
                out.push_back("entry " + fmt(v) + " outside [0,1] at (" + lattice[b].to_string() +
                              ", " + lattice[c].to_string() + ")");
            if (v != 0.0 && off && !is_refinement(lattice[c], lattice[b]))
                out.push_back("nonzero entry at (" + lattice[b].to_string() + ", " +
                              lattice[c].to_string() + ") breaks refinement order");
        }
        if (std::abs(row - target) > tol)
            out.push_back("row " + lattice[b].to_string() + " sums to " + fmt(row));
    }
    return out;
}

CoefficientVector coefficients_continuous(const PartitionMatrix& q, double t)
{
    const auto e = semigroup(q, t);
    CoefficientVector a{q.lattice, {}, t};
    a.values.resize(q.dim());
    for (std::size_t c = 0; c < q.dim(); ++c)
        a.values[c] = e(PartitionLattice::one_index(), c);
    check_coefficients(a);
    return a;
}

CoefficientVector coefficients_continuous(const RateSpec& rho, double t)
{
    return coefficients_continuous(build_generator(rho), t);
}

std::vector<CoefficientVector> coefficients_discrete_series(const PartitionMatrix& m,
                                                            std::size_t generations)
{
    std::vector<CoefficientVector> out;
    out.reserve(generations + 1);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m.entries.cols());
    row(0) = 1.0;
    for (std::size_t t = 0;; ++t) {
        CoefficientVector a{m.lattice, std::vector<double>(row.data(), row.data() + row.size()),
                            static_cast<double>(t)};
        check_coefficients(a);
        out.push_back(std::move(a));
        if (t == generations)
            break;
        row = row * m.entries;
    }
    return out;
}

CoefficientVector coefficients_discrete(const ProbSpec& r, std::size_t t)
{
    return coefficients_discrete_series(build_markov_matrix(r), t).back();
}

std::vector<ProductMeasure> recombined_family(const ProductMeasure& omega0,
                                              const PartitionLattice& lattice)
{
    std::vector<ProductMeasure> family;
    family.reserve(lattice.size());
    for (const auto& p : lattice)
        family.push_back(recombinator(p, omega0));
    return family;
}

ProductMeasure mix(std::span<const ProductMeasure> family, const CoefficientVector& a)
{
    if (family.size() != a.values.size() || family.empty())
        throw InputError("coefficient vector does not match the recombined family");
    auto out = ProductMeasure::zero(family.front().sites(), family.front().sizes());
    for (std::size_t k = 0; k < family.size(); ++k)
        if (a.values[k] != 0.0)
            out.add_scaled(a.values[k], family[k]);
    return out;
}

std::vector<ProductMeasure> solve_continuous(const ProductMeasure& omega0, const RateSpec& rho,
                                             std::span<const double> times)
{
    require_probability(omega0);
    require_dynamics_sites(omega0, rho.ground());
    for (double t : times)
        if (!(t >= 0.0))
            throw InputError("evaluation times must be non-negative");
    const auto q = build_generator(rho);
    const auto family = recombined_family(omega0, *q.lattice);

    std::vector<ProductMeasure> out;
    out.reserve(times.size());
    for (double t : times) {
        out.push_back(mix(family, coefficients_continuous(q, t)));
        check_solution(out.back());
    }
    return out;
}

std::vector<ProductMeasure> solve_discrete(const ProductMeasure& omega0, const ProbSpec& r,
                                           std::size_t generations)
{
    require_probability(omega0);
    require_dynamics_sites(omega0, r.ground());
    const auto m = build_markov_matrix(r);
    const auto family = recombined_family(omega0, *m.lattice);

    std::vector<ProductMeasure> out;
    out.reserve(generations + 1);
    for (const auto& a : coefficients_discrete_series(m, generations)) {
        out.push_back(mix(family, a));
        check_solution(out.back());
    }
    return out;
}

SpectrumReport spectrum_diagnostics(const PartitionMatrix& m, double tol)
{
    SpectrumReport report;
    const auto& lattice = *m.lattice;
    report.order.resize(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i)
        report.order[i] = i;
    // Refinement strictly increases the block count.
    std::stable_sort(report.order.begin(), report.order.end(), [&](std::size_t x, std::size_t y) {
        return lattice[x].size() < lattice[y].size();
    });

    report.triangular = true;
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (m(report.order[i], report.order[j]) != 0.0)
                report.triangular = false;

    for (auto idx : report.order)
        report.eigenvalues.push_back(m(idx, idx));

    std::vector<double> sorted = report.eigenvalues;
    std::sort(sorted.begin(), sorted.end());
    for (double v : sorted) {
        if (!report.multiplicities.empty() &&
            std::abs(v - report.multiplicities.back().first) <=
                tol * std::max(1.0, std::abs(v))) {
            ++report.multiplicities.back().second;
        } else {
            report.multiplicities.emplace_back(v, 1);
        }
    }
    for (const auto& [v, k] : report.multiplicities)
        if (k > 1)
            report.repeated.push_back(v);
    return report;
}

}  // namespace recomb
