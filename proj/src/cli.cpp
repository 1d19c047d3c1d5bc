#include "recomb/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recomb/errors.hpp"
#include "recomb/io.hpp"
#include "recomb/linearizer.hpp"
#include "recomb/nonlinear_oracle.hpp"
#include "recomb/partitioning_process.hpp"

namespace recomb::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kDefaultOracleTolerance = 1e-7;
constexpr double kDefaultMonteCarloTolerance = 1e-2;

struct RunConfig {
    std::string rates_path;
    std::optional<std::string> init_path;
    std::optional<std::string> times_text;
    std::optional<std::size_t> generations;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::uint64_t samples = 100000;
    bool renormalize = false;
    bool mc = false;
    double tolerance_tv = kDefaultOracleTolerance;
    double tolerance_mc = kDefaultMonteCarloTolerance;
    double step = 1e-3;
    unsigned workers = 1;
};

// Inputs shared by all subcommands, after parsing and cross-checks.
struct Instance {
    RateFile rates;
    ProductMeasure omega0;
    std::vector<double> times;  // continuous mode
    std::size_t generations = 0;  // discrete mode
};

std::vector<double> parse_times(const std::string& text)
{
    std::vector<double> times;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos)
            continue;
        const auto last = item.find_last_not_of(" \t");
        const std::string token = item.substr(first, last - first + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size())
            throw InputError("--times: cannot parse '" + token + "'");
        times.push_back(v);
    }
    if (times.empty())
        throw InputError("no evaluation times");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0))
            throw InputError("--times: evaluation times must be non-negative");
        if (i && times[i] < times[i - 1])
            throw InputError("--times: evaluation times must be sorted");
    }
    return times;
}

Instance load_instance(const RunConfig& cfg, bool need_grid)
{
    Instance inst{read_rate_file(cfg.rates_path, cfg.renormalize),
                  ProductMeasure::zero(GroundSet{1}, {1}),
                  {},
                  0};
    const auto& rf = inst.rates;
    if (rf.n > kMaxLinearizedSites)
        throw FileError(cfg.rates_path, 1,
                        "n = " + std::to_string(rf.n) + " exceeds the supported maximum of " +
                            std::to_string(kMaxLinearizedSites) +
                            " sites (partition lattice size is the Bell number of n)");

    if (cfg.init_path) {
        inst.omega0 = read_measure_file(*cfg.init_path);
        if (inst.omega0.sites() != GroundSet::range(static_cast<int>(rf.n)))
            throw FileError(*cfg.init_path, 1, "initial measure must cover sites 1.." +
                                                    std::to_string(rf.n));
        if (rf.site_sizes_given && inst.omega0.sizes() != rf.site_sizes)
            throw FileError(*cfg.init_path, 1, "alphabet sizes differ from the rate file's site_sizes");
        if (!inst.omega0.is_probability(kIdentityTolerance))
            throw FileError(*cfg.init_path, 1, "initial measure is not a probability measure");
    } else {
        inst.omega0 = ProductMeasure::uniform(ProductSpace(rf.site_sizes));
    }

    if (!need_grid)
        return inst;
    if (rf.mode == Mode::continuous) {
        if (cfg.generations)
            throw InputError("continuous rate file: use --times, not --generations");
        if (!cfg.times_text)
            throw InputError("no evaluation times");
        inst.times = parse_times(*cfg.times_text);
    } else {
        if (cfg.times_text)
            throw InputError("discrete rate file: use --generations, not --times");
        if (!cfg.generations)
            throw InputError("discrete rate file requires --generations");
        inst.generations = *cfg.generations;
    }
    return inst;
}

std::ofstream open_output(const fs::path& dir, const std::string& name)
{
    fs::create_directories(dir);
    std::ofstream out(dir / name);
    if (!out)
        throw InputError("cannot write " + (dir / name).string());
    return out;
}

void print_coefficients(std::ostream& out, const CoefficientVector& a)
{
    out << "a_t at t = " << format_double(a.time) << ":";
    for (std::size_t i = 0; i < a.values.size(); ++i)
        out << ' ' << (*a.lattice)[i].to_string() << '=' << std::setprecision(10) << a.values[i];
    out << '\n';
}

int cmd_solve(const RunConfig& cfg, std::ostream& out)
{
    const Instance inst = load_instance(cfg, true);
    std::vector<CoefficientVector> series;
    std::vector<ProductMeasure> measures;
    std::vector<double> times;

    if (inst.rates.mode == Mode::continuous) {
        const auto q = build_generator(inst.rates.rates);
        const auto family = recombined_family(inst.omega0, *q.lattice);
        for (double t : inst.times) {
            series.push_back(coefficients_continuous(q, t));
            measures.push_back(mix(family, series.back()));
        }
        times = inst.times;
        auto os = open_output(cfg.out_dir, "generator.csv");
        write_matrix_csv(os, q);
    } else {
        const auto m = build_markov_matrix(inst.rates.probs, kFileProbSumTolerance);
        const auto family = recombined_family(inst.omega0, *m.lattice);
        series = coefficients_discrete_series(m, inst.generations);
        for (const auto& a : series) {
            measures.push_back(mix(family, a));
            times.push_back(a.time);
        }
        auto os = open_output(cfg.out_dir, "markov.csv");
        write_matrix_csv(os, m);
    }

    for (const auto& w : measures)
        if (!w.is_positive(kIdentityTolerance) ||
            std::abs(w.total_mass() - 1.0) > kCoefficientSumTolerance)
            throw NumericalError("solution is not a probability measure");

    {
        auto os = open_output(cfg.out_dir, "a_t.csv");
        write_coefficients_csv(os, series);
    }
    {
        auto os = open_output(cfg.out_dir, "trajectory.csv");
        write_trajectory_csv(os, times, measures);
    }
    if (inst.rates.renormalized)
        out << "note: probabilities renormalized (residual " << format_double(inst.rates.residual)
            << ")\n";
    for (const auto& a : series)
        print_coefficients(out, a);
    out << "wrote a_t.csv and trajectory.csv to " << cfg.out_dir << '\n';
    return kExitOk;
}

struct Check {
    std::string name;
    double time;
    double value;
    double tolerance;
    bool passed() const { return value <= tolerance; }
};

int cmd_verify(const RunConfig& cfg, std::ostream& out)
{
    const Instance inst = load_instance(cfg, true);
    std::vector<Check> checks;
    SimulationConfig sim{cfg.samples, cfg.seed, cfg.workers, false};

    if (inst.rates.mode == Mode::continuous) {
        const auto& rho = inst.rates.rates;
        const auto linear = solve_continuous(inst.omega0, rho, inst.times);
        const auto direct = integrate_at(inst.omega0, rho, inst.times, {cfg.step});
        for (std::size_t k = 0; k < inst.times.size(); ++k)
            checks.push_back({"linearizer_vs_oracle", inst.times[k],
                              tv_distance(linear[k], direct[k]), cfg.tolerance_tv});
        if (cfg.mc) {
            const auto q = build_generator(rho);
            for (std::size_t k = 0; k < inst.times.size(); ++k) {
                const auto empirical = simulate_ctmc(rho, inst.times[k], sim);
                const auto reference = coefficients_continuous(q, inst.times[k]);
                const auto report = compare(empirical, reference, cfg.tolerance_mc);
                checks.push_back({"monte_carlo_vs_a_t", inst.times[k], report.tv, cfg.tolerance_mc});
                if (k + 1 == inst.times.size()) {
                    auto os = open_output(cfg.out_dir, "histogram.csv");
                    write_histogram_csv(os, empirical, reference, report);
                }
            }
        }
    } else {
        const auto& r = inst.rates.probs;
        const auto linear = solve_discrete(inst.omega0, r, inst.generations);
        const auto direct = iterate(inst.omega0, r, inst.generations);
        double worst = 0.0;
        for (std::size_t t = 0; t < linear.size(); ++t)
            worst = std::max(worst, tv_distance(linear[t], direct[t]));
        checks.push_back({"linearizer_vs_iteration", static_cast<double>(inst.generations), worst,
                          cfg.tolerance_tv});
        if (cfg.mc) {
            const auto empirical = simulate_discrete_chain(r, inst.generations, sim);
            const auto reference = coefficients_discrete(r, inst.generations);
            const auto report = compare(empirical, reference, cfg.tolerance_mc);
            checks.push_back({"monte_carlo_vs_a_t", static_cast<double>(inst.generations),
                              report.tv, cfg.tolerance_mc});
            auto os = open_output(cfg.out_dir, "histogram.csv");
            write_histogram_csv(os, empirical, reference, report);
        }
    }

    bool all = true;
    json report = {{"command", "verify"},
                   {"mode", inst.rates.mode == Mode::continuous ? "continuous" : "discrete"},
                   {"n", inst.rates.n},
                   {"seed", cfg.seed},
                   {"checks", json::array()}};
    for (const auto& c : checks) {
        all = all && c.passed();
        report["checks"].push_back({{"name", c.name},
                                    {"t", c.time},
                                    {"tv", c.value},
                                    {"tolerance", c.tolerance},
                                    {"passed", c.passed()}});
        out << (c.passed() ? "PASS " : "FAIL ") << c.name << " t=" << format_double(c.time)
            << " tv=" << std::setprecision(6) << std::scientific << c.value
            << " tol=" << c.tolerance << std::defaultfloat << '\n';
    }
    report["passed"] = all;
    {
        auto os = open_output(cfg.out_dir, "report.json");
        os << report.dump(2) << '\n';
    }
    return all ? kExitOk : kExitNumerical;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out)
{
    const Instance inst = load_instance(cfg, false);
    const auto m = inst.rates.mode == Mode::continuous
                       ? build_generator(inst.rates.rates)
                       : build_markov_matrix(inst.rates.probs, kFileProbSumTolerance);
    const auto report = spectrum_diagnostics(m);
    out << (inst.rates.mode == Mode::continuous ? "generator" : "markov matrix")
        << " eigenvalues (diagonal entries, coarsest partition first):\n";
    for (std::size_t k = 0; k < report.order.size(); ++k)
        out << "  " << std::left << std::setw(16) << (*m.lattice)[report.order[k]].to_string()
            << std::right << ' ' << format_double(report.eigenvalues[k]) << '\n';
    out << "multiplicities:\n";
    for (const auto& [v, count] : report.multiplicities)
        out << "  " << format_double(v) << " x" << count << '\n';
    if (report.degenerate()) {
        for (double v : report.repeated)
            out << "repeated eigenvalue: " << format_double(v) << '\n';
    } else {
        out << "no repeated eigenvalues\n";
    }
    if (!report.triangular)
        throw NumericalError("matrix is not triangular under refinement order");
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Recombination equation solver over the lattice of set partitions", "recomb"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub, bool grid) {
        sub->add_option("--rates", cfg.rates_path, "Rate or probability file (JSON)")->required();
        sub->add_option("--init", cfg.init_path, "Initial measure (JSON); uniform if absent");
        if (grid) {
            sub->add_option("--times", cfg.times_text, "Comma-separated evaluation times");
            sub->add_option("--generations", cfg.generations, "Number of generations");
            sub->add_option("--out", cfg.out_dir, "Output directory");
        }
        sub->add_flag("--renormalize", cfg.renormalize, "Rescale probabilities to sum to 1");
    };

    auto* solve = app.add_subcommand("solve", "Linearised solution a_t and omega_t");
    add_common(solve, true);
    auto* verify = app.add_subcommand("verify", "Compare against the nonlinear oracle");
    add_common(verify, true);
    verify->add_option("--seed", cfg.seed, "Monte Carlo seed");
    verify->add_option("--samples", cfg.samples, "Monte Carlo sample count")
        ->check(CLI::PositiveNumber);
    verify->add_flag("--mc", cfg.mc, "Also compare the partitioning-process simulation");
    verify->add_option("--tolerance-tv", cfg.tolerance_tv, "Oracle TV tolerance");
    verify->add_option("--tolerance-mc", cfg.tolerance_mc, "Monte Carlo TV tolerance");
    verify->add_option("--step", cfg.step, "RK4 step size")->check(CLI::PositiveNumber);
    verify->add_option("--workers", cfg.workers, "Monte Carlo worker threads")
        ->check(CLI::Range(1u, 256u));
    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of Q or M");
    add_common(spectrum, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }

    try {
        if (solve->parsed())
            return cmd_solve(cfg, out);
        if (verify->parsed())
            return cmd_verify(cfg, out);
        return cmd_spectrum(cfg, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

}  // namespace recomb::cli
