#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace fluoinv::cli {

/// Built-in configuration patches. Example 1 measures n = 1e4 points while
/// Example 2 uses n = 500; each preset follows its own example.
std::vector<std::string> preset_names();
bool has_preset(const std::string& name);
nlohmann::json preset_document(const std::string& name);

/// Preset used when neither --preset nor the config names one.
std::string default_preset(const std::string& command);

}  // namespace fluoinv::cli
