#pragma once

#include "nuc/pipeline.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nuc {

enum class SettingKind { text, path, integer, count, real, boolean, int_list, real_list };

struct SettingDef {
    std::string key;   // config file key; dotted keys live in [section]s
    std::string flag;  // long flag without dashes
    SettingKind kind;
    std::string fallback;  // default, as text
    std::string help;

    // NUC_ followed by the key upper-cased with dots turned into underscores.
    std::string env_name() const;
};

enum class SettingSource { defaults, file, env, flag };
std::string_view to_string(SettingSource source);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

/// Layered configuration: flag > environment > config file > default.
/// Every layer rejects unknown keys and every value is type-checked when set.
class Settings {
public:
    static const std::vector<SettingDef>& definitions();
    static const SettingDef* find(std::string_view key);

    /// Reads a TOML-style file (see docs/config.md). Relative paths resolve
    /// against the file's directory.
    void load_file(const std::filesystem::path& path);
    void load_text(std::string_view text, const std::filesystem::path& base_dir = {});
    void load_env(const EnvLookup& env);
    void set_flag(std::string_view key, std::string value);

    /// Effective textual value, or nullopt when the default is empty.
    std::optional<std::string> value(std::string_view key) const;
    SettingSource source(std::string_view key) const;
    bool is_set(std::string_view key) const { return source(key) != SettingSource::defaults; }

    std::string text(std::string_view key) const;
    std::filesystem::path path(std::string_view key) const;
    std::int64_t integer(std::string_view key) const;
    std::size_t count(std::string_view key) const;
    double real(std::string_view key) const;
    bool boolean(std::string_view key) const;
    std::vector<std::int64_t> int_list(std::string_view key) const;
    std::vector<double> real_list(std::string_view key) const;

    /// Builds and validates the experiment configuration. Parallelism defaults
    /// to the CPU count for the simulated backend and 4 for the remote one.
    ExperimentConfig experiment() const;

private:
    void set(SettingSource layer, std::string_view key, std::string value, const std::filesystem::path& base_dir);

    std::map<std::string, std::string, std::less<>> layers_[4];
};

}  // namespace nuc
