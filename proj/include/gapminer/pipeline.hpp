#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gapminer/common.hpp"

namespace gapminer::pipeline {

enum class Stage : std::uint8_t { kIngest, kNetwork, kPersist, kClassify, kMetrics, kReport };
inline constexpr std::array<Stage, 6> kStages = {Stage::kIngest,   Stage::kNetwork, Stage::kPersist,
                                                 Stage::kClassify, Stage::kMetrics, Stage::kReport};

std::string_view to_string(Stage stage);
/// Accepts the stage names plus the aliases "networks" and "topology".
std::optional<Stage> parse_stage(std::string_view name);

struct PipelineConfig {
  std::filesystem::path corpus_path;
  std::filesystem::path output_dir;
  Year year_min = 1900;
  Year year_max = 2020;
  int max_dim = 2;
  int min_persistence = 1;
  int null_replicates = 10;
  int n_rand = 10;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: GAPMINER_THREADS, then hardware concurrency
  std::optional<int> cd_window;
  int sb_horizon = 20;
  std::optional<std::filesystem::path> verb_lexicon_path;
  std::array<bool, kStages.size()> enabled{true, true, true, true, true, true};

  bool stage_enabled(Stage s) const { return enabled[static_cast<std::size_t>(s)]; }
};

/// Reads a JSON config file. Relative paths resolve against the file's
/// directory; unknown keys are a ConfigError.
PipelineConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError describing the first invalid field.
void validate(const PipelineConfig& config);

struct StageOutcome {
  Stage stage = Stage::kIngest;
  bool skipped = false;  // cached outputs matched the input key
  std::string key;
};

struct RunResult {
  std::vector<StageOutcome> stages;
  std::filesystem::path manifest_path;
};

/// Runs every enabled stage in order, or only `only`. A stage is skipped when
/// its input key matches the manifest and its recorded outputs verify. A
/// failing stage stays marked invalid in the manifest and the error message
/// names it.
RunResult run(const PipelineConfig& config, std::optional<Stage> only = std::nullopt);

inline constexpr const char* kManifestFile = "manifest.json";

/// Hex SHA-256 of a byte string or a file.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Files whose digest disagrees with the manifest in `output_dir` (missing
/// files included). Throws DataError when there is no readable manifest.
std::vector<std::string> verify_manifest(const std::filesystem::path& output_dir);

}  // namespace gapminer::pipeline
