#include "repdesc/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "repdesc/errors.hpp"
#include "repdesc/robust_location.hpp"
#include "repdesc/summation.hpp"

namespace repdesc {
namespace {

constexpr std::string_view kBinaryMagic = "RDF1";
constexpr double kRowNormTolerance = 1e-3;

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
    throw InvalidInputError(what + " at line " + std::to_string(line));
}

std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    return text;
}

std::vector<std::string_view> split(std::string_view text, char delimiter) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(delimiter, start);
        if (pos == std::string_view::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_field(std::string_view field, std::size_t line) {
    const std::string_view token = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        fail_line(line, "malformed number");
    }
    return value;
}

std::size_t parse_header_count(std::string_view token, std::size_t line, const char* what) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        fail_line(line, std::string("malformed header ") + what);
    }
    return value;
}

// Normalizes one raw row under the shared norm policy; `where` names the row
// for error messages ("line 7" / "record 3").
Descriptor normalized_row(std::span<const double> coords, bool renormalize,
                          const std::string& where) {
    for (double c : coords) {
        if (!std::isfinite(c)) throw InvalidInputError("non-finite value at " + where);
    }
    const double norm = std::sqrt(compensated_dot(coords, coords));
    if (std::abs(norm - 1.0) > kRowNormTolerance) {
        if (!renormalize) throw InvalidInputError("non-unit descriptor at " + where);
        if (norm <= 1e-12) throw InvalidInputError("zero-norm descriptor at " + where);
    }
    return normalize(coords);
}

// Applies the pose weighting + epsilon validity policy shared by both
// formats, then assembles the final ParsedDescriptorFile.
ParsedDescriptorFile assemble(std::vector<Descriptor> descriptors, std::vector<double> epsilons,
                              std::vector<double> thetas, bool has_epsilon, bool has_theta,
                              const ParseOptions& options) {
    if (options.pose_exponent) {
        if (!has_theta) throw InvalidInputError("pose weighting requires a theta column");
        for (std::size_t k = 0; k < epsilons.size(); ++k) {
            epsilons[k] *= pose_weight(thetas[k], *options.pose_exponent);
        }
    }
    CompensatedSum total;
    for (double e : epsilons) total.add(e);
    if (!(total.value() > 0.0)) throw InvalidInputError("no statistically valid descriptors");

    return {DescriptorSet(std::move(descriptors), std::move(epsilons)), has_epsilon, has_theta,
            has_theta ? std::move(thetas) : std::vector<double>{}};
}

ParsedDescriptorFile parse_csv(std::string_view data, const ParseOptions& options) {
    std::vector<std::string_view> lines = split(data, '\n');
    for (std::string_view& line : lines) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    }

    if (lines.empty() || trim(lines[0]).empty() || trim(lines[0]).front() != '#') {
        throw InvalidInputError("missing header line");
    }

    // Header: "# dim=N count=K fields=coords[,eps][,theta]"
    std::size_t dim = 0;
    std::size_t count = 0;
    bool has_epsilon = false;
    bool has_theta = false;
    bool saw_dim = false;
    bool saw_count = false;
    bool saw_fields = false;
    {
        std::string_view header = trim(lines[0]);
        header.remove_prefix(1);  // '#'
        std::istringstream tokens{std::string(header)};
        std::string token;
        while (tokens >> token) {
            const std::size_t eq = token.find('=');
            if (eq == std::string::npos) fail_line(1, "malformed header token '" + token + "'");
            const std::string key = token.substr(0, eq);
            const std::string value = token.substr(eq + 1);
            if (key == "dim") {
                dim = parse_header_count(value, 1, "dimension");
                saw_dim = true;
            } else if (key == "count") {
                count = parse_header_count(value, 1, "count");
                saw_count = true;
            } else if (key == "fields") {
                if (value == "coords") {
                } else if (value == "coords,eps") {
                    has_epsilon = true;
                } else if (value == "coords,theta") {
                    has_theta = true;
                } else if (value == "coords,eps,theta") {
                    has_epsilon = true;
                    has_theta = true;
                } else {
                    fail_line(1, "unsupported fields list '" + value + "'");
                }
                saw_fields = true;
            } else {
                fail_line(1, "unknown header key '" + key + "'");
            }
        }
        if (!saw_dim || !saw_count || !saw_fields) {
            fail_line(1, "header must declare dim, count and fields");
        }
        if (dim < 2) fail_line(1, "dimension must be at least 2");
        if (count < 2) fail_line(1, "descriptor count must be at least 2");
    }

    const std::size_t expected_fields = dim + (has_epsilon ? 1 : 0) + (has_theta ? 1 : 0);
    std::vector<Descriptor> descriptors;
    std::vector<double> epsilons;
    std::vector<double> thetas;
    descriptors.reserve(count);
    std::vector<double> coords(dim);

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t line_number = li + 1;
        if (trim(lines[li]).empty()) continue;
        if (descriptors.size() == count) fail_line(line_number, "more data rows than declared");

        const std::vector<std::string_view> fields = split(lines[li], ',');
        if (fields.size() != expected_fields) {
            fail_line(line_number, "row has " + std::to_string(fields.size()) +
                                       " fields, expected " + std::to_string(expected_fields));
        }
        for (std::size_t i = 0; i < dim; ++i) coords[i] = parse_field(fields[i], line_number);

        double eps = 1.0;
        if (has_epsilon) {
            eps = parse_field(fields[dim], line_number);
            if (!std::isfinite(eps)) fail_line(line_number, "non-finite value");
            if (eps < 0.0) fail_line(line_number, "negative epsilon");
        }
        double theta = 0.0;
        if (has_theta) {
            theta = parse_field(fields[dim + (has_epsilon ? 1 : 0)], line_number);
            if (!std::isfinite(theta)) fail_line(line_number, "non-finite value");
            if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
                fail_line(line_number, "pose angle outside [0, pi]");
            }
        }

        descriptors.push_back(normalized_row(coords, options.renormalize,
                                             "line " + std::to_string(line_number)));
        epsilons.push_back(eps);
        if (has_theta) thetas.push_back(theta);
    }

    if (descriptors.size() != count) {
        throw InvalidInputError("expected " + std::to_string(count) + " data rows, found " +
                                std::to_string(descriptors.size()));
    }
    return assemble(std::move(descriptors), std::move(epsilons), std::move(thetas), has_epsilon,
                    has_theta, options);
}

std::uint32_t read_u32_le(const unsigned char* bytes) {
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) |
           (static_cast<std::uint32_t>(bytes[3]) << 24);
}

double read_f64_le(const unsigned char* bytes) {
    std::uint64_t word = 0;
    for (int i = 7; i >= 0; --i) word = (word << 8) | bytes[i];
    return std::bit_cast<double>(word);
}

void append_u32_le(std::string& out, std::uint32_t value) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

void append_f64_le(std::string& out, double value) {
    const std::uint64_t word = std::bit_cast<std::uint64_t>(value);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((word >> (8 * i)) & 0xFF));
}

ParsedDescriptorFile parse_binary(std::string_view data, const ParseOptions& options) {
    if (data.size() < 12) throw InvalidInputError("truncated binary header");
    const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
    const std::uint32_t dim = read_u32_le(bytes + 4);
    const std::uint32_t count = read_u32_le(bytes + 8);
    if (dim < 2) throw InvalidInputError("dimension must be at least 2");
    if (count < 2) throw InvalidInputError("descriptor count must be at least 2");

    const std::uint64_t expected =
        12 + 8ULL * static_cast<std::uint64_t>(dim) * static_cast<std::uint64_t>(count);
    if (data.size() != expected) {
        throw InvalidInputError("binary payload size mismatch: expected " +
                                std::to_string(expected) + " bytes, found " +
                                std::to_string(data.size()));
    }

    std::vector<Descriptor> descriptors;
    descriptors.reserve(count);
    std::vector<double> coords(dim);
    const unsigned char* cursor = bytes + 12;
    for (std::uint32_t r = 0; r < count; ++r) {
        for (std::uint32_t i = 0; i < dim; ++i, cursor += 8) coords[i] = read_f64_le(cursor);
        descriptors.push_back(normalized_row(coords, options.renormalize,
                                             "record " + std::to_string(r + 1)));
    }
    return assemble(std::move(descriptors), std::vector<double>(count, 1.0), {}, false, false,
                    options);
}

nlohmann::ordered_json coords_json(std::span<const double> coords) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (double c : coords) arr.push_back(c);
    return arr;
}

nlohmann::ordered_json selection_json(const SelectionReport& selection) {
    // JSON has no representation for infinity: candidates excluded by a zero
    // epsilon (score +inf) appear as explicit nulls in the report.
    nlohmann::ordered_json scores = nlohmann::ordered_json::array();
    for (double s : selection.scores) {
        if (std::isfinite(s)) {
            scores.push_back(s);
        } else {
            scores.push_back(nullptr);
        }
    }
    return {{"scheme", to_string(selection.scheme)},
            {"selected_index", selection.selected_index},
            {"scores", std::move(scores)}};
}

}  // namespace

ParsedDescriptorFile parse_descriptor_data(std::string_view data, const ParseOptions& options) {
    if (data.size() >= kBinaryMagic.size() && data.substr(0, kBinaryMagic.size()) == kBinaryMagic) {
        return parse_binary(data, options);
    }
    return parse_csv(data, options);
}

ParsedDescriptorFile parse_descriptor_file(const std::filesystem::path& path,
                                           const ParseOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open input file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_descriptor_data(buffer.str(), options);
}

std::string format_double(double value) {
    std::array<char, 32> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), ptr);
}

std::string write_descriptor_csv(const DescriptorSet& set, std::span<const double> thetas,
                                 bool include_epsilon) {
    const bool has_theta = !thetas.empty();
    if (has_theta && thetas.size() != set.size()) {
        throw InvalidInputError("theta count mismatch");
    }
    std::string fields = "coords";
    if (include_epsilon) fields += ",eps";
    if (has_theta) fields += ",theta";

    std::string out = "# dim=" + std::to_string(set.dimension()) +
                      " count=" + std::to_string(set.size()) + " fields=" + fields + "\n";
    for (std::size_t k = 0; k < set.size(); ++k) {
        for (std::size_t i = 0; i < set.dimension(); ++i) {
            if (i > 0) out += ',';
            out += format_double(set[k][i]);
        }
        if (include_epsilon) {
            out += ',';
            out += format_double(set.epsilons()[k]);
        }
        if (has_theta) {
            out += ',';
            out += format_double(thetas[k]);
        }
        out += '\n';
    }
    return out;
}

std::string write_descriptor_binary(const DescriptorSet& set) {
    std::string out;
    out.reserve(12 + 8 * set.size() * set.dimension());
    out += kBinaryMagic;
    append_u32_le(out, static_cast<std::uint32_t>(set.dimension()));
    append_u32_le(out, static_cast<std::uint32_t>(set.size()));
    for (std::size_t k = 0; k < set.size(); ++k) {
        for (std::size_t i = 0; i < set.dimension(); ++i) append_f64_le(out, set[k][i]);
    }
    return out;
}

std::string write_center_csv(const Descriptor& center) {
    std::string out =
        "# dim=" + std::to_string(center.dimension()) + " count=1 fields=coords\n";
    for (std::size_t i = 0; i < center.dimension(); ++i) {
        if (i > 0) out += ',';
        out += format_double(center[i]);
    }
    out += '\n';
    return out;
}

Descriptor read_center_csv(std::string_view data) {
    std::vector<std::string_view> lines = split(data, '\n');
    for (std::string_view& line : lines) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    }
    if (lines.empty() || trim(lines[0]).empty() || trim(lines[0]).front() != '#') {
        throw InvalidInputError("missing header line");
    }
    std::vector<std::string_view> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (!trim(lines[li]).empty()) rows.push_back(lines[li]);
    }
    if (rows.size() != 1) throw InvalidInputError("expected exactly one vector row");
    const std::vector<std::string_view> fields = split(rows[0], ',');
    std::vector<double> coords(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) coords[i] = parse_field(fields[i], 2);
    return Descriptor(std::move(coords));
}

AggregateOutcome compute_aggregate(const RunConfig& config, const DescriptorSet& set,
                                   bool need_center) {
    AggregateOutcome outcome;
    outcome.iterations_resolved =
        config.iterations == kAutoIterations
            ? iteration_count(static_cast<std::int64_t>(set.size()))
            : config.iterations;

    const bool center_for_selection =
        config.scheme && *config.scheme == SelectionScheme::CenterSimilarity;
    if (need_center || center_for_selection) {
        switch (config.method) {
            case CenterMethod::Mean: outcome.aggregation = mean_center(set); break;
            case CenterMethod::Karcher: outcome.aggregation = karcher_center(set); break;
            case CenterMethod::GeodesicMedian:
                outcome.aggregation = geodesic_median_center(set);
                break;
            case CenterMethod::ModeMedian:
                outcome.aggregation = mode_median_center(set, outcome.iterations_resolved);
                break;
        }
    }
    if (config.scheme) {
        switch (*config.scheme) {
            case SelectionScheme::CenterSimilarity:
                outcome.selection = select_by_center(set, outcome.aggregation->center);
                break;
            case SelectionScheme::PairwiseSquared:
                outcome.selection = select_pairwise(set, 2);
                break;
            case SelectionScheme::PairwiseAbsolute:
                outcome.selection = select_pairwise(set, 1);
                break;
        }
    }
    return outcome;
}

nlohmann::ordered_json run_aggregate(const RunConfig& config, const ParsedDescriptorFile& input,
                                     const std::string& input_label, bool include_aggregation) {
    const DescriptorSet& set = input.set;
    const AggregateOutcome outcome = compute_aggregate(config, set, include_aggregation);

    std::size_t zero_epsilon = 0;
    for (double e : set.epsilons()) {
        if (e == 0.0) ++zero_epsilon;
    }

    nlohmann::ordered_json report;
    report["command"] = include_aggregation ? "aggregate" : "select";
    report["config"] = {
        {"method", to_string(config.method)},
        {"scheme", config.scheme ? nlohmann::ordered_json(to_string(*config.scheme))
                                 : nlohmann::ordered_json("none")},
        {"iterations", outcome.iterations_resolved},
        {"iterations_requested", config.iterations == kAutoIterations
                                     ? nlohmann::ordered_json("auto")
                                     : nlohmann::ordered_json(config.iterations)},
        {"pose_exponent", config.pose_exponent ? nlohmann::ordered_json(*config.pose_exponent)
                                               : nlohmann::ordered_json(nullptr)},
        {"renormalize", config.renormalize},
        {"input", input_label},
    };
    report["input"] = {
        {"count", set.size()},          {"dimension", set.dimension()},
        {"has_epsilon", input.has_epsilon}, {"has_theta", input.has_theta},
        {"epsilon_sum", set.epsilon_sum()}, {"zero_epsilon_count", zero_epsilon},
    };
    if (include_aggregation) {
        nlohmann::ordered_json agg = {
            {"method", to_string(outcome.aggregation->method)},
            {"center", coords_json(outcome.aggregation->center.coords())},
            {"iterations_used", outcome.aggregation->iterations_used},
        };
        if (!outcome.aggregation->per_coordinate_spread.empty()) {
            agg["per_coordinate_spread"] = coords_json(outcome.aggregation->per_coordinate_spread);
        }
        report["aggregation"] = std::move(agg);
    }
    if (outcome.selection) report["selection"] = selection_json(*outcome.selection);
    return report;
}

void emit_convergence(std::ostream& out, const ConvergenceCurve& curve) {
    const int q = curve.config.iterations;
    out << nlohmann::ordered_json{{"record", "config"},
                                  {"experiment", "converge"},
                                  {"distribution", to_string(curve.config.distribution)},
                                  {"samples", curve.config.sample_count},
                                  {"iterations", q},
                                  {"trials", curve.config.trials},
                                  {"seed", curve.config.seed}}
               .dump()
        << '\n';
    for (std::size_t t = 0; t < curve.trial_locations.size(); ++t) {
        out << nlohmann::ordered_json{{"record", "trial"},
                                      {"trial", t},
                                      {"locations", coords_json(curve.trial_locations[t])},
                                      {"spreads", coords_json(curve.trial_spreads[t])}}
                   .dump()
            << '\n';
    }
    const int median_probe = std::min(3, q);
    out << nlohmann::ordered_json{
               {"record", "summary"},
               {"m1", curve.location_mean.front()},
               {"m3", curve.location_mean[median_probe - 1]},
               {"m_final", curve.location_mean.back()},
               {"location_mean", coords_json(curve.location_mean)},
               {"location_std", coords_json(curve.location_std)},
               {"reference",
                {{"mean", curve.reference.mean},
                 {"median", curve.reference.median},
                 {"mode", curve.reference.mode}}}}
               .dump()
        << '\n';
}

void emit_reliability(std::ostream& out, const ReliabilityReport& report) {
    out << nlohmann::ordered_json{{"record", "config"},
                                  {"experiment", "reliability"},
                                  {"distribution", to_string(report.config.distribution)},
                                  {"samples", report.config.sample_count},
                                  {"iterations", report.config.iterations},
                                  {"trials", report.config.trials},
                                  {"seed", report.config.seed}}
               .dump()
        << '\n';
    for (std::size_t t = 0; t < report.trial_locations.size(); ++t) {
        out << nlohmann::ordered_json{{"record", "trial"},
                                      {"trial", t},
                                      {"locations", coords_json(report.trial_locations[t])}}
                   .dump()
            << '\n';
    }
    const auto& p = report.probe_iterations;
    out << nlohmann::ordered_json{
               {"record", "summary"},
               {"probe_iterations",
                {{"first", p[0]}, {"median", p[1]}, {"log2", p[2]}, {"sqrt", p[3]}}},
               {"spread_of_location",
                {{"first", report.spread[0]},
                 {"median", report.spread[1]},
                 {"log2", report.spread[2]},
                 {"sqrt", report.spread[3]}}},
               {"ratio_to_first",
                {{"median", report.ratio[1]}, {"log2", report.ratio[2]}, {"sqrt", report.ratio[3]}}}}
               .dump()
        << '\n';
}

void emit_robustness(std::ostream& out, const RobustnessReport& report) {
    out << nlohmann::ordered_json{{"record", "config"},
                                  {"experiment", "robustness"},
                                  {"dimension", report.config.dimension},
                                  {"inliers", report.config.inlier_count},
                                  {"outliers", report.config.outlier_count},
                                  {"inlier_spread", report.config.inlier_spread},
                                  {"outlier_min_angle", report.config.outlier_min_angle},
                                  {"trials", report.trials},
                                  {"seed", report.seed}}
               .dump()
        << '\n';
    for (std::size_t t = 0; t < report.per_trial.size(); ++t) {
        const RobustnessTrial& trial = report.per_trial[t];
        nlohmann::ordered_json record{{"record", "trial"},
                                      {"trial", t},
                                      {"mean_error", trial.mean_error},
                                      {"mode_median_error", trial.mode_median_error},
                                      {"geodesic_median_error", trial.geodesic_median_error}};
        nlohmann::ordered_json failures = nlohmann::ordered_json::object();
        if (!trial.mean_failure.empty()) failures["mean"] = trial.mean_failure;
        if (!trial.mode_median_failure.empty()) failures["mode_median"] = trial.mode_median_failure;
        if (!trial.geodesic_median_failure.empty()) {
            failures["geodesic_median"] = trial.geodesic_median_failure;
        }
        if (!failures.empty()) record["failures"] = std::move(failures);
        out << record.dump() << '\n';
    }
    const double trials = static_cast<double>(report.trials);
    out << nlohmann::ordered_json{
               {"record", "summary"},
               {"trials", report.trials},
               {"mode_median_wins", report.mode_median_wins},
               {"geodesic_median_wins", report.geodesic_median_wins},
               {"mode_median_win_rate", static_cast<double>(report.mode_median_wins) / trials},
               {"geodesic_median_win_rate",
                static_cast<double>(report.geodesic_median_wins) / trials},
               {"max_error",
                {{"mean", report.max_mean_error},
                 {"mode_median", report.max_mode_median_error},
                 {"geodesic_median", report.max_geodesic_median_error}}}}
               .dump()
        << '\n';
}

}  // namespace repdesc
