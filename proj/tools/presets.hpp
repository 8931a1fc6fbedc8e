#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qcrlab {

struct Preset {
  std::string name;
  std::string summary;
  std::string config;  // INI text accepted by parse_config
};

const std::vector<Preset>& presets();
std::optional<Preset> find_preset(const std::string& name);

// Human-readable description of a task; empty when the task is unknown.
std::string explain_task(const std::string& task);

}  // namespace qcrlab
