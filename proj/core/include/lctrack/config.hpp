#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "lctrack/tracker.hpp"

namespace lct {

// Flat `key = value` settings; '#' starts a comment. Unknown keys and unparsable
// values raise InputError naming the line.
void apply_setting(TrackerConfig& config, const std::string& key, const std::string& value);
TrackerConfig parse_config(std::istream& in, TrackerConfig base = {});
// Throws ResourceError when the file cannot be opened.
TrackerConfig load_config(const std::string& path, TrackerConfig base = {});

std::vector<std::string> config_keys();
// Every key with its current value, one per line; parse_config reads it back.
void write_config(std::ostream& out, const TrackerConfig& config);

}  // namespace lct
