#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "repdesc/descriptor.hpp"

namespace repdesc {

enum class SelectionScheme { CenterSimilarity, PairwiseSquared, PairwiseAbsolute };

std::string_view to_string(SelectionScheme scheme);
std::optional<SelectionScheme> selection_scheme_from_string(std::string_view name);

/// Most-representative-member verdict. Scores are "lower is better";
/// candidates excluded by a zero epsilon carry +infinity. Ties resolve to
/// the lowest index.
struct SelectionReport {
    std::size_t selected_index = 0;
    std::vector<double> scores;
    SelectionScheme scheme = SelectionScheme::CenterSimilarity;
};

/// Pick the member most similar to `center`: scores[k] = -(center . v_k),
/// so the argmin is the argmax of the dot product. Every member is scored,
/// including zero-epsilon ones.
SelectionReport select_by_center(const DescriptorSet& set, const Descriptor& center);

/// Pick the member with the smallest epsilon-weighted sum of pairwise
/// angular distances raised to `exponent` (1 or 2):
/// scores[k] = sum_k' epsilon_k' * arccos^e(v_k' . v_k). Members with
/// epsilon 0 neither vote nor stand as candidates.
SelectionReport select_pairwise(const DescriptorSet& set, int exponent);

}  // namespace repdesc
