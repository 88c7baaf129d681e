#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arcllm/task_model.hpp"

namespace arcllm {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The eighteen single-row families plus the three 2D orientation families.
enum class TaskFamily {
  Move1,
  Move2,
  Move3,
  MoveDynamic,
  Move2Towards,
  Fill,
  PaddedFill,
  Hollow,
  Flip,
  Mirror,
  Denoise,
  DenoiseMulticolor,
  PatternCopy,
  PatternCopyMulticolor,
  RecolorByOddEven,
  RecolorBySize,
  RecolorBySizeComparison,
  Scaling,
  Fill2D,
  Move2D,
  Pile2D,
};

inline constexpr std::array<TaskFamily, 18> k1DFamilies = {
    TaskFamily::Move1,
    TaskFamily::Move2,
    TaskFamily::Move3,
    TaskFamily::MoveDynamic,
    TaskFamily::Move2Towards,
    TaskFamily::Fill,
    TaskFamily::PaddedFill,
    TaskFamily::Hollow,
    TaskFamily::Flip,
    TaskFamily::Mirror,
    TaskFamily::Denoise,
    TaskFamily::DenoiseMulticolor,
    TaskFamily::PatternCopy,
    TaskFamily::PatternCopyMulticolor,
    TaskFamily::RecolorByOddEven,
    TaskFamily::RecolorBySize,
    TaskFamily::RecolorBySizeComparison,
    TaskFamily::Scaling,
};

inline constexpr std::array<TaskFamily, 3> k2DFamilies = {TaskFamily::Fill2D, TaskFamily::Move2D,
                                                          TaskFamily::Pile2D};

/// Snake-case tag, e.g. "move_dynamic", "pile_2d".
std::string to_string(TaskFamily f);
/// Accepts the snake-case tag or the CamelCase enumerator name.
TaskFamily parse_family(std::string_view name);
bool is_2d(TaskFamily f);

enum class Orientation { Horizontal, Vertical };

/// Output colors fixed by family definitions.
namespace family_colors {
inline constexpr Color kAnchor{3};        // MoveDynamic target pixel (green)
inline constexpr Color kPivot{5};         // Mirror pivot (grey)
inline constexpr Color kSizeInput{5};     // RecolorBySize inputs (grey)
inline constexpr Color kSize2{3};         // green
inline constexpr Color kSize3{2};         // red
inline constexpr Color kSize4{1};         // blue
inline constexpr Color kOdd{1};           // RecolorByOddEven, odd sizes (blue)
inline constexpr Color kEven{2};          // RecolorByOddEven, even sizes (red)
inline constexpr Color kLargest{1};       // RecolorBySizeComparison (blue)
inline constexpr Color kSmallest{2};      // RecolorBySizeComparison (red)
}  // namespace family_colors

/// Complexity knobs. Zero-valued shape fields mean "use the family default"
/// (see default_params). For 2D families `width` bounds both grid sides.
struct GenParams {
  int width = 0;
  int num_objects = 0;
  std::pair<int, int> object_size_range{0, 0};
  std::uint64_t seed = 0;
  int num_train = 3;
  int tasks_per_type = 50;
};

GenParams default_params(TaskFamily f);
/// Fills defaults and validates; throws GenerationError when infeasible.
GenParams resolve_params(TaskFamily f, const GenParams& p);

/// The family's ground-truth transform, horizontal form.
Grid apply_transform(TaskFamily f, const Grid& input);

/// Deterministic in (family, params). 2D families yield the horizontal form.
Task generate_task(TaskFamily f, const GenParams& params, std::string id = {});

/// True iff every pair's output equals the transform of its input. Vertical
/// tasks are checked by undoing the rotation first.
bool verify_task(const Task& t, TaskFamily f, Orientation orientation = Orientation::Horizontal);

struct ManifestEntry {
  TaskFamily family;
  std::optional<Orientation> orientation;  // set for 2D families only
  std::string suite;                       // directory name, e.g. "fill_2d_v"
  std::string id;
  std::uint64_t seed;
  std::string path;  // relative to the dataset root
};

struct Manifest {
  std::uint64_t base_seed = 0;
  int tasks_per_type = 0;
  int num_train = 0;
  std::vector<ManifestEntry> entries;

  std::string to_json() const;
  static Manifest from_json(std::string_view text);
  static Manifest load(const std::filesystem::path& dataset_dir);
};

/// Seed for the index-th task of a family; stable across runs and platforms.
std::uint64_t task_seed(std::uint64_t base_seed, TaskFamily f, int index);

/// Writes `tasks_per_type` tasks per family under out_dir/<suite>/<id>.json
/// and out_dir/manifest.json. 2D families produce a horizontal suite and its
/// rotated vertical twin. Every task is verified before it is written.
Manifest generate_dataset(const std::vector<TaskFamily>& families, const GenParams& params,
                          const std::filesystem::path& out_dir);

}  // namespace arcllm
