#include "recomb/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace recomb {

using nlohmann::json;

FileError::FileError(std::string file, std::size_t line, const std::string& message)
    : InputError(file + ":" + std::to_string(line) + ": " + message),
      file_(std::move(file)),
      line_(line)
{
}

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// ------------------------------------------------------------------ measure

json measure_to_json(const ProductMeasure& m)
{
    json j;
    j["site_sizes"] = m.sizes();
    j["sites"] = m.sites().elements();
    j["weights"] = std::vector<double>(m.weights().begin(), m.weights().end());
    return j;
}

ProductMeasure measure_from_json(const json& j)
{
    try {
        auto sizes = j.at("site_sizes").get<std::vector<std::size_t>>();
        std::vector<int> sites;
        if (j.contains("sites")) {
            sites = j.at("sites").get<std::vector<int>>();
        } else {
            for (std::size_t i = 0; i < sizes.size(); ++i)
                sites.push_back(static_cast<int>(i + 1));
        }
        if (!std::is_sorted(sites.begin(), sites.end()))
            throw InputError("measure sites must be listed in ascending order");
        return ProductMeasure(GroundSet(std::move(sites)), std::move(sizes),
                              j.at("weights").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed measure: ") + e.what());
    }
}

namespace {

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileError(path.string(), 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_of_offset(std::string_view text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line where the quoted key first appears; 1 if it cannot be located.
std::size_t line_of_key(std::string_view text, const std::string& key)
{
    const auto pos = text.find("\"" + key + "\"");
    return pos == std::string_view::npos ? 1 : line_of_offset(text, pos);
}

json parse_json(std::string_view text, const std::string& source)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FileError(source, line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
    }
}

}  // namespace

ProductMeasure read_measure_file(const std::filesystem::path& path)
{
    const auto text = slurp(path);
    const auto j = parse_json(text, path.string());
    try {
        return measure_from_json(j);
    } catch (const InputError& e) {
        throw FileError(path.string(), 1, e.what());
    }
}

void write_measure_file(const std::filesystem::path& path, const ProductMeasure& m)
{
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << measure_to_json(m).dump(2) << '\n';
}

// -------------------------------------------------------------- rate files

RateFile parse_rate_config(std::string_view text, const std::string& source, bool renormalize)
{
    const json j = parse_json(text, source);
    RateFile rf;
    rf.source = source;
    auto fail = [&](const std::string& key, const std::string& msg) -> FileError {
        return FileError(source, line_of_key(text, key), msg);
    };

    if (!j.is_object())
        throw FileError(source, 1, "top level must be an object");
    if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long long>() < 1)
        throw fail("n", "\"n\" must be a positive integer");
    rf.n = j["n"].get<std::size_t>();

    const std::string mode = j.value("mode", "");
    if (mode == "continuous")
        rf.mode = Mode::continuous;
    else if (mode == "discrete")
        rf.mode = Mode::discrete;
    else
        throw fail("mode", "\"mode\" must be \"continuous\" or \"discrete\"");

    rf.site_sizes.assign(rf.n, 2);
    if (j.contains("site_sizes")) {
        rf.site_sizes_given = true;
        try {
            rf.site_sizes = j["site_sizes"].get<std::vector<std::size_t>>();
        } catch (const json::exception&) {
            throw fail("site_sizes", "\"site_sizes\" must be an array of positive integers");
        }
        if (rf.site_sizes.size() != rf.n)
            throw fail("site_sizes", "\"site_sizes\" must list one size per site");
        for (auto s : rf.site_sizes)
            if (s == 0)
                throw fail("site_sizes", "alphabet sizes must be at least 1");
    }

    if (!j.contains("rates") || !j["rates"].is_object())
        throw fail("rates", "\"rates\" must be an object keyed by partition strings");

    const GroundSet ground = GroundSet::range(static_cast<int>(rf.n));
    std::vector<RawEntry> entries;
    for (const auto& [key, value] : j["rates"].items()) {
        if (!value.is_number())
            throw fail(key, "value for \"" + key + "\" is not a number");
        RawEntry e{key, {}, value.get<double>()};
        try {
            e.blocks = SetPartition::parse(key).blocks();
        } catch (const InputError& err) {
            throw fail(key, "key \"" + key + "\": " + err.what());
        }
        entries.push_back(std::move(e));
    }

    const auto kind = rf.mode == Mode::continuous ? SpecKind::rates : SpecKind::probabilities;
    // Sum deviations are handled below so that --renormalize can act on them.
    auto diagnostics = validate(ground, entries, kind, std::numeric_limits<double>::infinity());
    if (!diagnostics.empty()) {
        const auto& d = diagnostics.front();
        throw fail(d.key, "rate \"" + d.key + "\": " + d.message);
    }

    double sum = 0.0;
    std::map<SetPartition, double> values;
    for (const auto& e : entries) {
        values.emplace(SetPartition(ground, e.blocks), e.value);
        sum += e.value;
    }

    if (rf.mode == Mode::continuous) {
        rf.rates = RateSpec(ground, std::move(values));
        return rf;
    }

    rf.residual = sum - 1.0;
    if (std::abs(rf.residual) > kFileProbSumTolerance) {
        if (!renormalize || !(sum > 0.0))
            throw fail("rates", "probabilities sum to " + format_double(sum) + " (residual " +
                                    format_double(rf.residual) + "); use --renormalize to rescale");
    }
    if (renormalize && rf.residual != 0.0) {
        for (auto& [p, v] : values)
            v /= sum;
        rf.renormalized = true;
    }
    rf.probs = ProbSpec(ground, std::move(values));
    return rf;
}

RateFile read_rate_file(const std::filesystem::path& path, bool renormalize)
{
    return parse_rate_config(slurp(path), path.string(), renormalize);
}

// --------------------------------------------------------------------- CSV

namespace {

// Partition strings contain commas, so they are quoted.
std::string csv_field(const SetPartition& p)
{
    const auto s = p.to_string();
    return s.find(',') == std::string::npos ? s : '"' + s + '"';
}

}  // namespace

void write_matrix_csv(std::ostream& os, const PartitionMatrix& m)
{
    const auto& lattice = *m.lattice;
    os << "partition";
    for (const auto& p : lattice)
        os << ',' << csv_field(p);
    os << '\n';
    for (std::size_t b = 0; b < m.dim(); ++b) {
        os << csv_field(lattice[b]);
        for (std::size_t c = 0; c < m.dim(); ++c)
            os << ',' << format_double(m(b, c));
        os << '\n';
    }
}

void write_coefficients_csv(std::ostream& os, std::span<const CoefficientVector> series)
{
    if (series.empty())
        return;
    os << "t";
    for (const auto& p : *series.front().lattice)
        os << ',' << csv_field(p);
    os << '\n';
    for (const auto& a : series) {
        os << format_double(a.time);
        for (double v : a.values)
            os << ',' << format_double(v);
        os << '\n';
    }
}

std::string config_label(const ProductMeasure& m, std::size_t flat)
{
    std::string s;
    const auto config = m.config_of(flat);
    for (std::size_t i = 0; i < config.size(); ++i) {
        if (i)
            s += '-';
        s += std::to_string(config[i]);
    }
    return s;
}

void write_trajectory_csv(std::ostream& os, std::span<const double> times,
                          std::span<const ProductMeasure> measures)
{
    if (times.size() != measures.size())
        throw InputError("trajectory times and measures differ in length");
    os << "t,configuration,weight\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto& m = measures[k];
        for (std::size_t flat = 0; flat < m.num_states(); ++flat)
            os << format_double(times[k]) << ',' << config_label(m, flat) << ','
               << format_double(m[flat]) << '\n';
    }
}

void write_histogram_csv(std::ostream& os, const EmpiricalDistribution& empirical,
                         const CoefficientVector& reference, const ComparisonReport& report)
{
    os << "partition,count,fraction,reference,z\n";
    for (std::size_t i = 0; i < empirical.counts.size(); ++i)
        os << csv_field((*empirical.lattice)[i]) << ',' << empirical.counts[i] << ','
           << format_double(empirical.fraction(i)) << ',' << format_double(reference.values[i])
           << ',' << format_double(report.z_scores[i]) << '\n';
}

}  // namespace recomb
