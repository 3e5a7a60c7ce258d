#include "repdesc/selection.hpp"

#include <limits>

#include "repdesc/errors.hpp"
#include "repdesc/summation.hpp"

namespace repdesc {
namespace {

std::size_t argmin(const std::vector<double>& scores) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
        if (scores[k] < scores[best]) best = k;  // strict: ties keep the lowest index
    }
    return best;
}

}  // namespace

std::string_view to_string(SelectionScheme scheme) {
    switch (scheme) {
        case SelectionScheme::CenterSimilarity: return "center_similarity";
        case SelectionScheme::PairwiseSquared: return "pairwise_squared";
        case SelectionScheme::PairwiseAbsolute: return "pairwise_absolute";
    }
    return "unknown";
}

std::optional<SelectionScheme> selection_scheme_from_string(std::string_view name) {
    if (name == "center_similarity") return SelectionScheme::CenterSimilarity;
    if (name == "pairwise_squared") return SelectionScheme::PairwiseSquared;
    if (name == "pairwise_absolute") return SelectionScheme::PairwiseAbsolute;
    return std::nullopt;
}

SelectionReport select_by_center(const DescriptorSet& set, const Descriptor& center) {
    if (center.dimension() != set.dimension()) {
        throw InvalidInputError("descriptor dimension mismatch");
    }
    SelectionReport report;
    report.scheme = SelectionScheme::CenterSimilarity;
    report.scores.resize(set.size());
    for (std::size_t k = 0; k < set.size(); ++k) report.scores[k] = -center.dot(set[k]);
    report.selected_index = argmin(report.scores);
    return report;
}

SelectionReport select_pairwise(const DescriptorSet& set, int exponent) {
    if (exponent != 1 && exponent != 2) {
        throw InvalidInputError("pairwise exponent must be 1 or 2");
    }
    const auto eps = set.epsilons();
    SelectionReport report;
    report.scheme = exponent == 2 ? SelectionScheme::PairwiseSquared
                                  : SelectionScheme::PairwiseAbsolute;
    report.scores.resize(set.size());
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (eps[k] == 0.0) {
            report.scores[k] = std::numeric_limits<double>::infinity();
            continue;
        }
        CompensatedSum score;
        for (std::size_t j = 0; j < set.size(); ++j) {
            // The self term is exactly zero mathematically; computing it
            // would inject acos(1 - ulp) noise whenever the self dot rounds
            // below 1, so it is skipped rather than evaluated.
            if (j == k || eps[j] == 0.0) continue;
            const double d = angular_distance(set[j], set[k]);
            score.add(eps[j] * (exponent == 2 ? d * d : d));
        }
        report.scores[k] = score.value();
    }
    report.selected_index = argmin(report.scores);
    return report;
}

}  // namespace repdesc
