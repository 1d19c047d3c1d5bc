#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recomb/errors.hpp"
#include "recomb/linearizer.hpp"
#include "recomb/measure.hpp"
#include "recomb/partitioning_process.hpp"
#include "recomb/rates.hpp"

namespace recomb {

// Sum tolerance applied to probability files after decimal parsing.
inline constexpr double kFileProbSumTolerance = 1e-9;

// An InputError that names its source file and (1-based) line.
class FileError : public InputError {
public:
    FileError(std::string file, std::size_t line, const std::string& message);

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

nlohmann::json measure_to_json(const ProductMeasure& m);
ProductMeasure measure_from_json(const nlohmann::json& j);
ProductMeasure read_measure_file(const std::filesystem::path& path);
void write_measure_file(const std::filesystem::path& path, const ProductMeasure& m);

enum class Mode { continuous, discrete };

struct RateFile {
    std::string source;
    std::size_t n = 0;
    Mode mode = Mode::continuous;
    // Alphabet size per site; all 2 unless the file lists `site_sizes`.
    std::vector<std::size_t> site_sizes;
    bool site_sizes_given = false;
    RateSpec rates;   // continuous mode
    ProbSpec probs;   // discrete mode
    // sum - 1 as read (discrete mode), before any renormalisation.
    double residual = 0.0;
    bool renormalized = false;
};

// `{ "n": 4, "mode": "continuous"|"discrete", "rates": { "1,3|2|4": 0.7 } }`
// with optional `"site_sizes": [..]`. Throws FileError.
RateFile parse_rate_config(std::string_view text, const std::string& source, bool renormalize);
RateFile read_rate_file(const std::filesystem::path& path, bool renormalize);

// CSV with a header row of canonical partition strings.
void write_matrix_csv(std::ostream& os, const PartitionMatrix& m);
// One row per time: t, then a_t in lattice order.
void write_coefficients_csv(std::ostream& os, std::span<const CoefficientVector> series);
// One row per (t, configuration, weight); configurations are the site
// values joined by '-'.
void write_trajectory_csv(std::ostream& os, std::span<const double> times,
                          std::span<const ProductMeasure> measures);
// partition, count, fraction, reference, z
void write_histogram_csv(std::ostream& os, const EmpiricalDistribution& empirical,
                         const CoefficientVector& reference, const ComparisonReport& report);

std::string config_label(const ProductMeasure& m, std::size_t flat);

}  // namespace recomb
