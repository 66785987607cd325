#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unemap/config.hpp"
#include "unemap/errors.hpp"

namespace unemap {

enum class Stage { ingest, synth, code, train, cluster, profile, transitions, mca, plot, all };

std::string_view name_of(Stage s);
std::optional<Stage> stage_from_name(std::string_view name);

// An upstream artifact is absent; `stage` names the stage that produces it.
class MissingStageError : public Error {
 public:
  explicit MissingStageError(std::string stage)
      : Error("missing stage: " + stage), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

inline constexpr std::string_view kVersion = "0.1.0";

std::string sha256_hex(std::string_view data);

// 64-bit seed from the first 8 bytes of SHA-256("unemap-seed/<label>/<global>").
std::uint64_t derive_seed(std::uint64_t global, std::string_view label);

// Stages `all` expands to, in execution order.
std::vector<Stage> expand(Stage stage, const PipelineConfig& config);

// Runs one stage (or the whole chain for `all`), writing artifacts, the
// manifest and the timings file in the output directory.
void run_stage(Stage stage, const PipelineConfig& config, std::ostream& log);

// Exit status: 0 success, 1 configuration error, 2 missing stage, 3 computation error.
int run_command(Stage stage, const PipelineConfig& config, std::ostream& log);

}  // namespace unemap
