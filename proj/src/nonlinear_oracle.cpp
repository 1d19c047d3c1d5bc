#include "recomb/nonlinear_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "recomb/errors.hpp"

namespace recomb {

namespace {

void require_initial(const ProductMeasure& omega0, const GroundSet& ground)
{
    if (!omega0.is_probability(kIdentityTolerance))
        throw InputError("initial measure must be a probability measure");
    if (omega0.sites() != ground)
        throw InputError("initial measure sites " + omega0.sites().to_string() +
                         " do not match spec ground set " + ground.to_string());
}

ProductMeasure rk4_step(const ProductMeasure& y, const RateSpec& rho, double h)
{
    const auto k1 = rhs(y, rho);
    auto y2 = y;
    y2.add_scaled(0.5 * h, k1);
    const auto k2 = rhs(y2, rho);
    auto y3 = y;
    y3.add_scaled(0.5 * h, k2);
    const auto k3 = rhs(y3, rho);
    auto y4 = y;
    y4.add_scaled(h, k3);
    const auto k4 = rhs(y4, rho);

    auto out = y;
    out.add_scaled(h / 6.0, k1);
    out.add_scaled(h / 3.0, k2);
    out.add_scaled(h / 3.0, k3);
    out.add_scaled(h / 6.0, k4);
    return out;
}

}  // namespace

ProductMeasure rhs(const ProductMeasure& omega, const RateSpec& rho)
{
    if (!omega.is_positive(kStagePositivityTolerance))
        throw InputError("rhs requires a positive measure");
    if (omega.sites() != rho.ground())
        throw InputError("measure and rate spec live on different site sets");
    auto out = ProductMeasure::zero(omega.sites(), omega.sizes());
    for (const auto& [partition, rate] : rho.values()) {
        if (rate == 0.0 || partition.is_one())
            continue;
        out.add_scaled(rate, recombinator(partition, omega));
        out.add_scaled(-rate, omega);
    }
    return out;
}

std::vector<ProductMeasure> integrate_at(const ProductMeasure& omega0, const RateSpec& rho,
                                         std::span<const double> times,
                                         const IntegratorConfig& cfg)
{
    if (!(cfg.step_size > 0.0))
        throw InputError("step size must be positive");
    require_initial(omega0, rho.ground());
    require_valid(rho);
    if (!std::is_sorted(times.begin(), times.end()) ||
        (!times.empty() && !(times.front() >= 0.0)))
        throw InputError("integration times must be sorted and non-negative");

    std::vector<ProductMeasure> out;
    out.reserve(times.size());
    ProductMeasure y = omega0;
    double now = 0.0;
    std::size_t steps_taken = 0;
    for (double target : times) {
        // Full steps are placed on the grid k*h to avoid drift in `now`.
        const auto full = static_cast<std::size_t>(std::floor(target / cfg.step_size * (1 + 1e-14)));
        while (steps_taken < full) {
            y = rk4_step(y, rho, cfg.step_size);
            ++steps_taken;
            now = static_cast<double>(steps_taken) * cfg.step_size;
        }
        const double rest = target - now;
        if (rest > 0.0)
            out.push_back(rk4_step(y, rho, rest));
        else
            out.push_back(y);
    }
    return out;
}

ProductMeasure integrate(const ProductMeasure& omega0, const RateSpec& rho, double t_end,
                         const IntegratorConfig& cfg)
{
    if (!(t_end >= 0.0))
        throw InputError("t_end must be non-negative");
    const double times[] = {t_end};
    return integrate_at(omega0, rho, times, cfg).front();
}

std::vector<ProductMeasure> iterate(const ProductMeasure& omega0, const ProbSpec& r,
                                    std::size_t generations)
{
    require_initial(omega0, r.ground());
    require_valid(r);
    std::vector<ProductMeasure> out{omega0};
    out.reserve(generations + 1);
    for (std::size_t t = 0; t < generations; ++t) {
        const auto& prev = out.back();
        auto next = ProductMeasure::zero(prev.sites(), prev.sizes());
        for (const auto& [partition, p] : r.values())
            if (p != 0.0)
                next.add_scaled(p, recombinator(partition, prev));
        out.push_back(std::move(next));
    }
    return out;
}

}  // namespace recomb
