#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "recomb/measure.hpp"
#include "recomb/partition.hpp"
#include "recomb/rates.hpp"

namespace recomb {

// Largest ground set for which partition-indexed matrices are built;
// dimension Bell(6) = 203.
inline constexpr std::size_t kMaxLinearizedSites = 6;

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kCoefficientSumTolerance = 1e-10;

enum class MatrixKind { generator, markov, general };

// Square matrix indexed by the canonical enumeration of a partition
// lattice (row/column 0 is the single-block partition).
struct PartitionMatrix {
    std::shared_ptr<const PartitionLattice> lattice;
    Eigen::MatrixXd entries;
    MatrixKind kind = MatrixKind::general;

    const GroundSet& ground() const { return lattice->ground(); }
    std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
    double operator()(std::size_t b, std::size_t c) const
    {
        return entries(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c));
    }
};

// a_t over the partition lattice.
struct CoefficientVector {
    std::shared_ptr<const PartitionLattice> lattice;
    std::vector<double> values;
    double time = 0.0;

    double operator[](std::size_t i) const { return values[i]; }
    double operator()(const SetPartition& p) const { return values[lattice->index_of(p)]; }
};

// Shared lattice for a ground set; rejects ground sets above
// kMaxLinearizedSites.
std::shared_ptr<const PartitionLattice> make_lattice(const GroundSet& ground);

// Markov generator of the partitioning process. Entry (B, C) is the
// marginal rate rho^{B_i}(A_i) when C replaces exactly one block B_i of B
// by a proper refinement A_i; the diagonal makes rows sum to zero.
PartitionMatrix build_generator(const RateSpec& rho);

// One-generation transition matrix: entry (B, C) is the product of
// r^{B_i}(C|_{B_i}) over the blocks of B when C refines B, else 0.
PartitionMatrix build_markov_matrix(const ProbSpec& r, double sum_tolerance = kProbSumTolerance);

// exp(t Q) by scaling and squaring a truncated Taylor series. Throws
// NumericalError if the result is not a Markov matrix to kRowSumTolerance.
PartitionMatrix semigroup(const PartitionMatrix& q, double t);

// Violations of the structural invariants of `m.kind` (empty when none).
std::vector<std::string> check_structure(const PartitionMatrix& m,
                                         double tol = kRowSumTolerance);

CoefficientVector coefficients_continuous(const RateSpec& rho, double t);
CoefficientVector coefficients_continuous(const PartitionMatrix& q, double t);
CoefficientVector coefficients_discrete(const ProbSpec& r, std::size_t t);
// a_0, ..., a_generations from a Markov matrix.
std::vector<CoefficientVector> coefficients_discrete_series(const PartitionMatrix& m,
                                                            std::size_t generations);

// R_A(omega0) for every A, in lattice order.
std::vector<ProductMeasure> recombined_family(const ProductMeasure& omega0,
                                              const PartitionLattice& lattice);
// Sum over A of a(A) R_A(omega0), accumulated in lattice order.
ProductMeasure mix(std::span<const ProductMeasure> family, const CoefficientVector& a);

std::vector<ProductMeasure> solve_continuous(const ProductMeasure& omega0, const RateSpec& rho,
                                             std::span<const double> times);
// omega_0, ..., omega_generations.
std::vector<ProductMeasure> solve_discrete(const ProductMeasure& omega0, const ProbSpec& r,
                                           std::size_t generations);

struct SpectrumReport {
    // Lattice indices sorted coarsest first; a linear extension of the
    // refinement order, under which the matrix is upper triangular.
    std::vector<std::size_t> order;
    // Diagonal entries in `order`.
    std::vector<double> eigenvalues;
    // Distinct eigenvalues (ascending) and their algebraic multiplicities.
    std::vector<std::pair<double, std::size_t>> multiplicities;
    // Eigenvalues with multiplicity greater than one.
    std::vector<double> repeated;
    bool triangular = false;

    bool degenerate() const { return !repeated.empty(); }
};

SpectrumReport spectrum_diagnostics(const PartitionMatrix& m, double tol = 1e-12);

}  // namespace recomb
