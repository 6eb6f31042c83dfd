#pragma once

// JSON scene and result files.
//
// A scene holds one ProblemSpec plus optional run settings. A result holds
// the scene it was solved on, the solution vector, the objective breakdown,
// metrics, per-restart records and a world-frame geometry snapshot (sphere
// centers and route polylines) for external viewers. Doubles are written in
// shortest round-trip form, so loading a result reproduces every value bit
// for bit.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spi2/benchmarks.hpp"

namespace spi2 {

/// Malformed scene or result; `field` is a path such as
/// "bodies[1].spheres[3]" and `line` is 1-based (0 when unknown).
class SceneError : public ModelError {
 public:
  SceneError(std::string field, std::size_t line, const std::string& message);
  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

/// Optional run settings stored next to the problem in a scene file.
struct SceneSettings {
  SolverOptions solver;
  std::optional<std::string> framework;
  std::optional<std::string> init;
  std::optional<std::string> preset;
  std::optional<std::size_t> restarts;
  std::optional<std::uint64_t> seed;
  std::optional<VecX> x0;  // starting point for manual init
};

struct SceneFile {
  ProblemSpec spec;
  SceneSettings settings;
};

std::string scene_to_string(const ProblemSpec& spec, const SceneSettings* settings = nullptr);
SceneFile scene_from_string(const std::string& text);

void save_scene(const std::filesystem::path& path, const ProblemSpec& spec,
                const SceneSettings* settings = nullptr);
SceneFile load_scene_file(const std::filesystem::path& path);
ProblemSpec load_scene(const std::filesystem::path& path);

struct ResultOptions {
  bool timings = false;  // wall times are omitted unless set
};

/// Run identification written into a result file.
struct RunInfo {
  std::string framework = "nested";
  std::string init = "random";
  std::uint64_t seed = 0;
  std::map<std::string, std::string> metadata;
};

std::string result_to_string(const ProblemSpec& spec, const SolveReport& report,
                             const RunInfo& info, const ResultOptions& options = {});
std::string result_to_string(const ProblemSpec& spec, const BenchmarkResult& result,
                             const ResultOptions& options = {});

void save_result(const std::filesystem::path& path, const ProblemSpec& spec,
                 const SolveReport& report, const RunInfo& info,
                 const ResultOptions& options = {});
void save_result(const std::filesystem::path& path, const ProblemSpec& spec,
                 const BenchmarkResult& result, const ResultOptions& options = {});

struct LoadedResult {
  ProblemSpec spec;
  VecX x;
  double f_opt = 0.0;
  double max_violation = 0.0;
  bool converged = false;
  std::string termination;
};

LoadedResult result_from_string(const std::string& text);
LoadedResult load_result(const std::filesystem::path& path);

/// Re-evaluates a stored solution against its stored scene.
struct ReplayCheck {
  double f_recorded = 0.0;
  double f_replayed = 0.0;
  double violation_recorded = 0.0;
  double violation_replayed = 0.0;
  bool identical() const {
    return f_recorded == f_replayed && violation_recorded == violation_replayed;
  }
};
ReplayCheck replay(const LoadedResult& result);

}  // namespace spi2
