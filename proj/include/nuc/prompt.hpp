#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nuc {

// Zero-shot classification prompt. The label list is rendered as a compact JSON
// array of strings so that any label text survives a round trip:
//
//   Instruction: Please select a label ... between 0 and 1.
//   <blank>
//   Label Options: ["a","b"].
//   <blank>
//   == Testing Samples ==
//   <text>
std::string build_prompt(std::string_view text, const std::vector<std::string>& label_space);

struct Demonstration {
    std::string text;
    std::optional<std::string> label;
};

// Demonstrations block followed by a blank line and the zero-shot prompt:
//
//   == Demonstrations ==
//   1. Text: <text>
//   Label: <label>        (only when a label is given)
//   2. Text: <text>
//   ...
//
// Demonstrations are rendered in the order given. With no demonstrations the
// result is exactly build_prompt().
std::string build_demonstration_prompt(std::string_view text, const std::vector<Demonstration>& demos,
                                       const std::vector<std::string>& label_space);

/// Recovers the label list from a prompt produced by build_prompt.
std::optional<std::vector<std::string>> parse_label_options(std::string_view prompt);

/// Recovers the test text from a prompt produced by build_prompt.
std::optional<std::string> parse_testing_sample(std::string_view prompt);

}  // namespace nuc
