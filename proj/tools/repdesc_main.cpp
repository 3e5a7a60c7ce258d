#include <charconv>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "repdesc/errors.hpp"
#include "repdesc/io.hpp"
#include "repdesc/synth.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;

std::string read_input(const std::string& path) {
    std::ostringstream buffer;
    if (path == "-") {
        buffer << std::cin.rdbuf();
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw repdesc::InvalidInputError("cannot open input file: " + path);
        buffer << in.rdbuf();
    }
    return buffer.str();
}

void print_error(const char* code, const std::string& message) {
    std::cout << nlohmann::ordered_json{{"error", {{"code", code}, {"message", message}}}}.dump(2)
              << '\n';
}

std::string check_iterations(const std::string& value) {
    if (value == "auto") return {};
    int parsed = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc{} || ptr != value.data() + value.size() || parsed < 1) {
        return "must be 'auto' or a positive integer";
    }
    return {};
}

struct AggregateCli {
    std::string input;
    std::string method = "mode_median";
    std::string scheme = "center_similarity";
    std::string iterations = "auto";
    int pose_exponent = 0;
    bool renormalize = false;
    std::string output = "json";
};

void add_aggregate_flags(CLI::App* cmd, AggregateCli& cli) {
    cmd->add_option("--input", cli.input, "descriptor file path, or - for stdin")->required();
    cmd->add_option("--method", cli.method, "center estimator")
        ->check(CLI::IsMember({"mean", "karcher", "geodesic_median", "mode_median"}))
        ->capture_default_str();
    cmd->add_option("--scheme", cli.scheme, "representative-selection scheme")
        ->check(CLI::IsMember(
            {"center_similarity", "pairwise_squared", "pairwise_absolute", "none"}))
        ->capture_default_str();
    cmd->add_option("--iterations", cli.iterations, "reweighting iteration count, or 'auto'")
        ->check(CLI::Validator(check_iterations, "Q|auto"))
        ->capture_default_str();
    cmd->add_option("--pose-exponent", cli.pose_exponent,
                    "pose weighting exponent (>= 2); needs a theta column; omit to disable")
        ->check(CLI::Range(2, 1'000'000));
    cmd->add_flag("--renormalize", cli.renormalize, "accept rows that are far from unit norm");
    cmd->add_option("--output", cli.output, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
}

repdesc::RunConfig make_config(const AggregateCli& cli) {
    repdesc::RunConfig config;
    config.method = *repdesc::center_method_from_string(cli.method);
    if (cli.scheme == "none") {
        config.scheme.reset();
    } else {
        config.scheme = *repdesc::selection_scheme_from_string(cli.scheme);
    }
    if (cli.iterations == "auto") {
        config.iterations = repdesc::kAutoIterations;
    } else {
        config.iterations = std::stoi(cli.iterations);
    }
    if (cli.pose_exponent != 0) config.pose_exponent = cli.pose_exponent;
    config.renormalize = cli.renormalize;
    config.output = cli.output == "csv" ? repdesc::OutputFormat::CsvVector
                                        : repdesc::OutputFormat::JsonReport;
    return config;
}

int run_aggregate_command(const AggregateCli& cli, bool include_aggregation) {
    const repdesc::RunConfig config = make_config(cli);
    if (!include_aggregation && !config.scheme) {
        std::cerr << "select requires a selection scheme; got --scheme none\n";
        return kExitUsage;
    }
    repdesc::ParseOptions options;
    options.renormalize = config.renormalize;
    options.pose_exponent = config.pose_exponent;
    const repdesc::ParsedDescriptorFile parsed =
        repdesc::parse_descriptor_data(read_input(cli.input), options);

    if (config.output == repdesc::OutputFormat::CsvVector) {
        const repdesc::AggregateOutcome outcome =
            repdesc::compute_aggregate(config, parsed.set, include_aggregation);
        if (include_aggregation) {
            std::cout << repdesc::write_center_csv(outcome.aggregation->center);
        } else {
            std::cout << repdesc::write_center_csv(parsed.set[outcome.selection->selected_index]);
        }
    } else {
        std::cout << repdesc::run_aggregate(config, parsed, cli.input, include_aggregation).dump(2)
                  << '\n';
    }
    return 0;
}

struct ScalarBenchCli {
    std::string distribution = "gamma_shape2";
    std::int64_t samples = 0;
    std::string iterations = "auto";
    int trials = 0;
    std::uint64_t seed = 42;
};

void add_scalar_bench_flags(CLI::App* cmd, ScalarBenchCli& cli) {
    cmd->add_option("--distribution", cli.distribution, "sample distribution")
        ->check(CLI::IsMember({"gamma_shape2", "exponential", "lognormal_sigma_half", "gaussian"}))
        ->capture_default_str();
    cmd->add_option("--samples", cli.samples, "draws per trial")
        ->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40))
        ->capture_default_str();
    cmd->add_option("--iterations", cli.iterations, "reweighting iteration count, or 'auto'")
        ->check(CLI::Validator(check_iterations, "Q|auto"))
        ->capture_default_str();
    cmd->add_option("--trials", cli.trials, "independent repetitions")
        ->check(CLI::Range(1, 1'000'000))
        ->capture_default_str();
    cmd->add_option("--seed", cli.seed, "base RNG seed")->capture_default_str();
}

repdesc::ScalarExperimentConfig make_scalar_config(const ScalarBenchCli& cli) {
    repdesc::ScalarExperimentConfig config;
    config.distribution = *repdesc::distribution_from_string(cli.distribution);
    config.sample_count = cli.samples;
    config.iterations =
        cli.iterations == "auto" ? repdesc::kAutoIterations : std::stoi(cli.iterations);
    config.trials = cli.trials;
    config.seed = cli.seed;
    return config;
}

struct RobustnessBenchCli {
    std::size_t dimension = 128;
    std::size_t inliers = 40;
    std::size_t outliers = 10;
    double inlier_spread = 0.05;
    double outlier_min_angle = 0.8;
    int trials = 100;
    std::uint64_t seed = 42;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust aggregation and exemplar selection for unit-norm descriptor sets"};
    app.require_subcommand(1);

    AggregateCli aggregate_cli;
    CLI::App* aggregate_cmd = app.add_subcommand(
        "aggregate", "estimate a central descriptor (and optionally a representative member)");
    add_aggregate_flags(aggregate_cmd, aggregate_cli);

    AggregateCli select_cli;
    CLI::App* select_cmd =
        app.add_subcommand("select", "pick the most representative member of a set");
    add_aggregate_flags(select_cmd, select_cli);

    CLI::App* bench_cmd = app.add_subcommand("bench", "synthetic statistical benchmarks");
    bench_cmd->require_subcommand(1);

    ScalarBenchCli converge_cli;
    converge_cli.samples = 1'000'000;
    converge_cli.trials = 1;
    CLI::App* converge_cmd =
        bench_cmd->add_subcommand("converge", "iteration trajectory of the scalar estimator");
    add_scalar_bench_flags(converge_cmd, converge_cli);

    ScalarBenchCli reliability_cli;
    reliability_cli.samples = 10'000;
    reliability_cli.trials = 200;
    CLI::App* reliability_cmd = bench_cmd->add_subcommand(
        "reliability", "across-trial spread of the estimate at probe iterations");
    add_scalar_bench_flags(reliability_cmd, reliability_cli);

    RobustnessBenchCli robustness_cli;
    CLI::App* robustness_cmd = bench_cmd->add_subcommand(
        "robustness", "estimator accuracy on contaminated spherical clusters");
    robustness_cmd->add_option("--dimension", robustness_cli.dimension, "descriptor dimension")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20))
        ->capture_default_str();
    robustness_cmd->add_option("--inliers", robustness_cli.inliers, "inlier count per cluster")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20))
        ->capture_default_str();
    robustness_cmd->add_option("--outliers", robustness_cli.outliers, "outlier count per cluster")
        ->capture_default_str();
    robustness_cmd
        ->add_option("--inlier-spread", robustness_cli.inlier_spread,
                     "std of inlier angular displacement, radians")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    robustness_cmd
        ->add_option("--outlier-min-angle", robustness_cli.outlier_min_angle,
                     "minimum outlier angle from the true center, radians")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    robustness_cmd->add_option("--trials", robustness_cli.trials, "independent clusters")
        ->check(CLI::Range(1, 1'000'000))
        ->capture_default_str();
    robustness_cmd->add_option("--seed", robustness_cli.seed, "base RNG seed")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (aggregate_cmd->parsed()) return run_aggregate_command(aggregate_cli, true);
        if (select_cmd->parsed()) return run_aggregate_command(select_cli, false);
        if (converge_cmd->parsed()) {
            repdesc::emit_convergence(std::cout,
                                      run_convergence_experiment(make_scalar_config(converge_cli)));
            return 0;
        }
        if (reliability_cmd->parsed()) {
            repdesc::emit_reliability(
                std::cout, run_reliability_experiment(make_scalar_config(reliability_cli)));
            return 0;
        }
        if (robustness_cmd->parsed()) {
            repdesc::ClusterConfig cluster;
            cluster.dimension = robustness_cli.dimension;
            cluster.inlier_count = robustness_cli.inliers;
            cluster.outlier_count = robustness_cli.outliers;
            cluster.inlier_spread = robustness_cli.inlier_spread;
            cluster.outlier_min_angle = robustness_cli.outlier_min_angle;
            repdesc::emit_robustness(
                std::cout, run_robustness_experiment(cluster, robustness_cli.trials,
                                                     robustness_cli.seed));
            return 0;
        }
        std::cerr << "no command selected\n";
        return kExitUsage;
    } catch (const repdesc::InvalidInputError& e) {
        print_error("input_validation", e.what());
        return kExitInput;
    } catch (const repdesc::NumericalError& e) {
        print_error("numerical_failure", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return kExitNumerical;
    }
}
