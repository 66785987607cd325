#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unemap/dataset.hpp"
#include "unemap/errors.hpp"
#include "unemap/som.hpp"

namespace unemap {

// Invalid configuration; `field` is the dotted path such as "som.epochs".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct InputConfig {
  std::filesystem::path path;
  std::optional<std::filesystem::path> schema;  // header-mapping file
  char delimiter = ',';
};

struct SyntheticConfig {
  std::size_t n = 19246;
};

struct PipelineConfig {
  std::optional<InputConfig> input;
  std::optional<SyntheticConfig> synthetic;
  CodingSpec coding = CodingSpec::standard();
  GridTopology grid;
  TrainingSchedule schedule;
  InitStrategy init = InitStrategy::pca_plane;
  std::size_t k = 5;
  bool occupancy_weights = false;
  std::vector<Qual> mca_variables{Qual::AGEC, Qual::CTINDMOY, Qual::DIPL3, Qual::DURC,
                                  Qual::HAR,  Qual::PPARC,    Qual::RMOTIFA, Qual::RMOTIFI};
  std::size_t mca_axes = 3;
  std::vector<std::pair<std::size_t, std::size_t>> mca_planes{{1, 2}, {1, 3}};
  double threshold_registration_to_exit = 8.0;
  double threshold_exit_to_registration = 4.5;
  std::filesystem::path output_dir = "unemap-out";
  std::uint64_t seed = 1;
  bool svg = true;

  void validate() const;
  // Canonical INI text of the resolved configuration; hashed into the manifest.
  std::string canonical() const;
};

// Relative input paths resolve against the config file's directory.
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

// UNEMAP_OUTPUT_DIR and UNEMAP_SEED, when set, replace output.dir and run.seed.
void apply_environment(PipelineConfig& config);

}  // namespace unemap
