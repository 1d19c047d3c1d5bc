#pragma once

// Direct evolution of the recombination dynamics, without any
// partition-indexed linear system. Used as ground truth for the linearizer.

#include <cstddef>
#include <span>
#include <vector>

#include "recomb/measure.hpp"
#include "recomb/rates.hpp"

namespace recomb {

struct IntegratorConfig {
    double step_size = 1e-3;
};

// Tolerance used for the positivity precondition of rhs(); RK4 stages may
// dip below zero by round-off.
inline constexpr double kStagePositivityTolerance = 1e-9;

// sum_A rho(A) (R_A(omega) - omega); a signed measure of total mass 0.
ProductMeasure rhs(const ProductMeasure& omega, const RateSpec& rho);

// Classical fourth-order Runge-Kutta from 0 to t_end with a shortened final
// step if t_end is not a multiple of the step size. No renormalisation.
ProductMeasure integrate(const ProductMeasure& omega0, const RateSpec& rho, double t_end,
                         const IntegratorConfig& cfg = {});

// One RK4 pass returning the state at each of the (sorted) times.
std::vector<ProductMeasure> integrate_at(const ProductMeasure& omega0, const RateSpec& rho,
                                         std::span<const double> times,
                                         const IntegratorConfig& cfg = {});

// omega_{t+1} = sum_A r(A) R_A(omega_t); returns omega_0 .. omega_generations.
std::vector<ProductMeasure> iterate(const ProductMeasure& omega0, const ProbSpec& r,
                                    std::size_t generations);

}  // namespace recomb
