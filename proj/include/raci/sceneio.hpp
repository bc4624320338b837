#pragma once

#include "raci/scene.hpp"

#include <filesystem>

namespace raci::sceneio {

inline constexpr int kSceneFormatVersion = 1;

/// Writes dir/meta.json plus dir/frames.jsonl (one JSON object per
/// estimation frame). Floats use the shortest round-trip representation,
/// so read(write(scene)) == scene exactly and equal seeds give
/// byte-identical files.
void write_scene(const std::filesystem::path& dir, const Scene& scene);

Scene read_scene(const std::filesystem::path& dir);

}  // namespace raci::sceneio
