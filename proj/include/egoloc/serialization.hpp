#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "egoloc/action_codebook.hpp"
#include "egoloc/simulator.hpp"
#include "egoloc/verification.hpp"

namespace egoloc {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Malformed documents raise ValidationError naming the offending field;
// filesystem failures raise IoError with the path.

Json pose_sequence_to_json(const PoseSequence& seq);
PoseSequence pose_sequence_from_json(const Json& j);

/// {schema_version, k, dim, seed, centroids: k rows of dim values}.
Json codebook_to_json(const ActionCodebook& codebook);
ActionCodebook codebook_from_json(const Json& j);
void save_codebook(const ActionCodebook& codebook, const std::filesystem::path& path);
ActionCodebook load_codebook(const std::filesystem::path& path);

/// A scenario document either lists persons explicitly or names a preset:
/// {"preset": "...", "seed": 7, "duration": 207, "noise": {...}}.
Json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& j);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

Json clip_to_json(const ClipObservation& clip);
ClipObservation clip_from_json(const Json& j);

/// 64-bit FNV-1a of the canonical scenario JSON, as 16 hex digits.
std::string config_hash(const Scenario& scenario);

/// <dir>/manifest.json plus <dir>/clips/clip_00000.json, ...
void save_scene(const Scene& scene, const std::filesystem::path& dir);
Scene load_scene(const std::filesystem::path& dir);

/// {clip_id, person_id, components: {...}, total, match_probability}.
Json score_to_json(int clip_id, const VerificationScore& score);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace egoloc
