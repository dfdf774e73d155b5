#pragma once

#include <map>
#include <string>

#include "ftf/composite.hpp"

namespace ftf {

// Plain-text device description with sections fluxonium1/fluxonium2/
// transmon/couplings/truncation. Energies in GHz, fluxes in units of Phi_0.
// Unknown keys are rejected; missing required keys are reported by name.
DeviceSpec parse_device_config_text(const std::string& text, const std::string& origin);

// Resolves a filesystem path first, then a bundled config name
// ("device_a", "device_b").
DeviceSpec parse_device_config(const std::string& path_or_name);

// Raw text used for hashing and provenance; same resolution as above.
std::string load_device_config_text(const std::string& path_or_name);

std::string serialize_device_config(const DeviceSpec& device);

const std::map<std::string, std::string>& bundled_configs();

}  // namespace ftf
