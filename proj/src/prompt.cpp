#include "nuc/prompt.hpp"

#include "nuc/error.hpp"

#include <nlohmann/json.hpp>

namespace nuc {

namespace {

constexpr std::string_view kInstruction =
    "Instruction: Please select a label from the provided options for the following testing samples and also "
    "show your confidence in the label assignment by providing a probability between 0 and 1.";
constexpr std::string_view kOptionsPrefix = "Label Options: ";
constexpr std::string_view kOptionsSuffix = ".\n\n";
constexpr std::string_view kSamplesHeader = "== Testing Samples ==\n";
constexpr std::string_view kDemosHeader = "== Demonstrations ==\n";

}  // namespace

std::string build_prompt(std::string_view text, const std::vector<std::string>& label_space) {
    if (label_space.empty()) throw ValidationError("label space is empty");
    std::string out;
    out.reserve(kInstruction.size() + text.size() + 64 + label_space.size() * 16);
    out += kInstruction;
    out += "\n\n";
    out += kOptionsPrefix;
    out += nlohmann::json(label_space).dump();
    out += kOptionsSuffix;
    out += kSamplesHeader;
    out += text;
    return out;
}

std::string build_demonstration_prompt(std::string_view text, const std::vector<Demonstration>& demos,
                                       const std::vector<std::string>& label_space) {
    if (demos.empty()) return build_prompt(text, label_space);
    std::string out(kDemosHeader);
    for (std::size_t i = 0; i < demos.size(); ++i) {
        out += std::to_string(i + 1) + ". Text: " + demos[i].text + "\n";
        if (demos[i].label) out += "Label: " + *demos[i].label + "\n";
    }
    out += "\n";
    out += build_prompt(text, label_space);
    return out;
}

std::optional<std::vector<std::string>> parse_label_options(std::string_view prompt) {
    const auto start = prompt.find(kOptionsPrefix);
    if (start == std::string_view::npos) return std::nullopt;
    const auto body = start + kOptionsPrefix.size();
    const auto end = prompt.find(std::string(kOptionsSuffix) + std::string(kSamplesHeader), body);
    if (end == std::string_view::npos) return std::nullopt;
    try {
        return nlohmann::json::parse(prompt.substr(body, end - body)).get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

std::optional<std::string> parse_testing_sample(std::string_view prompt) {
    const auto options = prompt.find(kOptionsPrefix);
    if (options == std::string_view::npos) return std::nullopt;
    const auto pos = prompt.find(std::string(kOptionsSuffix) + std::string(kSamplesHeader), options);
    if (pos == std::string_view::npos) return std::nullopt;
    return std::string(prompt.substr(pos + kOptionsSuffix.size() + kSamplesHeader.size()));
}

}  // namespace nuc
