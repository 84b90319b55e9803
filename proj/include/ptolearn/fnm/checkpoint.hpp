#pragma once

// Self-describing binary container for FNM models:
//   8-byte magic "FNMCKPT\0", u32 format version, u32 header length,
//   JSON header (config plus a table of named arrays with shape, dtype and offset),
//   then a little-endian float64 payload. Complex arrays are stored as (re, im) pairs.

#include <string>

#include "json.hpp"
#include "ptolearn/fnm/model.hpp"

namespace ptolearn::fnm {

inline constexpr unsigned kCheckpointVersion = 1;

nlohmann::json config_to_json(const FnmConfig& config);
FnmConfig config_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, const FnmModel& model);
FnmModel load_checkpoint(const std::string& path);

}  // namespace ptolearn::fnm
