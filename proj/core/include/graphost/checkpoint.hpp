#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "graphost/models.hpp"

namespace graphost {

/// Bumped whenever the checkpoint layout changes incompatibly.
inline constexpr int kCheckpointFormatVersion = 1;

/// {"format_version", "role", "architecture": {...}, "layers": [{"weight":
/// {"shape": [r, c], "data": [...]}, "bias": {"shape": [c], "data": [...]}}],
/// "metadata": {...}}. Doubles are written in shortest round-trip form, so a
/// reloaded checkpoint reproduces forward passes bit for bit.
nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
/// Throws `Error` on version mismatch or shape corruption.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
/// Truncated or malformed files raise `ParseError` carrying the byte offset.
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json architecture_to_json(const ArchitectureSpec& spec);
ArchitectureSpec architecture_from_json(const nlohmann::json& j);

}  // namespace graphost
