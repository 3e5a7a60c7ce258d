#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "repdesc/centers.hpp"
#include "repdesc/descriptor.hpp"
#include "repdesc/selection.hpp"
#include "repdesc/synth.hpp"

namespace repdesc {

struct ParseOptions {
    bool renormalize = false;          ///< accept rows whose norm is off by more than 1e-3
    std::optional<int> pose_exponent;  ///< fold cos^p(theta) into each row's epsilon
};

struct ParsedDescriptorFile {
    DescriptorSet set;
    bool has_epsilon = false;
    bool has_theta = false;
    std::vector<double> thetas;  ///< per row, present only when has_theta
};

/// Parse the headered-CSV descriptor format, or the packed binary variant
/// when the payload starts with its magic bytes. See the README for both
/// grammars. Rows within 1e-3 of unit norm are silently renormalized; rows
/// further out are rejected unless `options.renormalize` is set.
ParsedDescriptorFile parse_descriptor_data(std::string_view data,
                                           const ParseOptions& options = {});
ParsedDescriptorFile parse_descriptor_file(const std::filesystem::path& path,
                                           const ParseOptions& options = {});

/// Serialize a set in the headered CSV dialect (shortest round-trip
/// decimals). `thetas`, when non-empty, must have one entry per member.
std::string write_descriptor_csv(const DescriptorSet& set, std::span<const double> thetas = {},
                                 bool include_epsilon = false);

///// Packed binary variant: magic "RDF1", u32 dimension, u32 count, then
/// count * dimension little-endian doubles (coordinates only).
std::string write_descriptor_binary(const DescriptorSet& set);

/// Single-vector CSV (count=1), the --output csv payload.
std::string write_center_csv(const Descriptor& center);
Descriptor read_center_csv(std::string_view data);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

enum class OutputFormat { JsonReport, CsvVector };

struct RunConfig {
    CenterMethod method = CenterMethod::ModeMedian;
    std::optional<SelectionScheme> scheme = SelectionScheme::CenterSimilarity;  ///< nullopt: none
    int iterations = kAutoIterations;
    std::optional<int> pose_exponent;
    bool renormalize = false;
    OutputFormat output = OutputFormat::JsonReport;
};

/// Everything an aggregate/select run produces. `aggregation` is present
/// whenever the run needed a center (always for aggregate; for select only
/// under the center_similarity scheme).
struct AggregateOutcome {
    int iterations_resolved = 0;
    std::optional<AggregationResult> aggregation;
    std::optional<SelectionReport> selection;
};
AggregateOutcome compute_aggregate(const RunConfig& config, const DescriptorSet& set,
                                   bool need_center);

/// JSON report for aggregate (include_aggregation = true) or select. The
/// config and input blocks echo the full effective configuration, including
/// the resolved iteration count, so a run is reproducible from its output.
nlohmann::ordered_json run_aggregate(const RunConfig& config, const ParsedDescriptorFile& input,
                                     const std::string& input_label,
                                     bool include_aggregation = true);

/// Benchmark reports as line-delimited JSON: a config record, one record per
/// trial, and a closing summary record.
void emit_convergence(std::ostream& out, const ConvergenceCurve& curve);
void emit_reliability(std::ostream& out, const ReliabilityReport& report);
void emit_robustness(std::ostream& out, const RobustnessReport& report);

}  // namespace repdesc
