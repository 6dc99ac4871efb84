#pragma once

#include "nuc/prediction.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace nuc {

/// Extracts a prediction from free-form model output.
///
/// The label is the earliest label-space member that appears as a whole token,
/// compared case-insensitively (a token boundary is any character other than an
/// ASCII letter, digit or '_'). When several labels match at the same offset the
/// longest wins. The confidence is the first number after the label whose value
/// lies in [0, 1]; when there is none it defaults to 0.5 and
/// `confidence_defaulted` is set. With no label the result is invalid.
Prediction parse_response(std::string_view raw, const std::vector<std::string>& label_space);

}  // namespace nuc
