#pragma once

#include <string>
#include <vector>

namespace cirm::cli {

// Replaces `--config FILE` with the options stored in the JSON object in
// FILE. Keys are long option names (underscores or dashes). Arrays become
// comma-separated values and booleans become bare flags. Options also given
// on the command line keep their command-line value.
// Throws cirm::ParseError on unreadable or malformed files.
std::vector<std::string> expand_config(std::vector<std::string> args);

}  // namespace cirm::cli
