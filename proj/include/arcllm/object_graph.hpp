#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "arcllm/task_model.hpp"

namespace arcllm {

class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How a grid is segmented into objects. Declaration order is the tie-break
/// order used by best-fit selection.
enum class AbstractionStrategy { SameColor4, SameColor8, MultiColor4, VerticalRuns, HorizontalRuns, SinglePixels };

inline constexpr std::array<AbstractionStrategy, 6> kAllStrategies = {
    AbstractionStrategy::SameColor4,   AbstractionStrategy::SameColor8,     AbstractionStrategy::MultiColor4,
    AbstractionStrategy::VerticalRuns, AbstractionStrategy::HorizontalRuns, AbstractionStrategy::SinglePixels};

std::string to_string(AbstractionStrategy s);
/// Throws std::invalid_argument for unknown tags.
AbstractionStrategy parse_strategy(std::string_view tag);

struct ObjectNode {
  int id = 0;
  Color color;
  /// Sorted row-major; never empty for abstracted graphs.
  std::vector<Cell> pixels;

  int size() const { return static_cast<int>(pixels.size()); }
  friend bool operator==(const ObjectNode&, const ObjectNode&) = default;
};

enum class Relation { Horizontal, Vertical };

std::string to_string(Relation r);

/// Undirected; always stored with a < b.
struct ObjectEdge {
  int a = 0;
  int b = 0;
  Relation relation = Relation::Horizontal;
  friend auto operator<=>(const ObjectEdge&, const ObjectEdge&) = default;
};

struct ObjectGraph {
  int grid_height = 1;
  int grid_width = 1;
  Color background = kBlack;
  std::vector<ObjectNode> nodes;
  std::vector<ObjectEdge> edges;
  /// Unset for graphs reconstructed from model output.
  std::optional<AbstractionStrategy> strategy;

  friend bool operator==(const ObjectGraph&, const ObjectGraph&) = default;
};

/// Segments `g` into objects. Background cells never belong to a node. Node ids
/// follow the row-major order of each node's first pixel.
ObjectGraph abstract(const Grid& g, AbstractionStrategy strategy, Color background = kBlack);

/// Adds a horizontal edge for every node pair sharing a row and a vertical edge
/// for every pair sharing a column. Existing edges are replaced.
ObjectGraph build_edges(ObjectGraph graph);

/// Per-task forced choices, keyed by task id.
using StrategyOverrides = std::map<std::string, AbstractionStrategy>;

StrategyOverrides parse_overrides(std::string_view json_text);
StrategyOverrides load_overrides(const std::filesystem::path& path);

/// Heuristic fitness of a strategy over a task's train pairs (higher is better).
int score_strategy(const Task& t, AbstractionStrategy strategy, Color background = kBlack);

AbstractionStrategy select_best_fit(const Task& t, const StrategyOverrides* overrides = nullptr,
                                    Color background = kBlack);

/// Paints nodes over a background-filled grid. Throws RenderError on
/// out-of-bounds or overlapping pixels.
Grid render(const ObjectGraph& graph);

}  // namespace arcllm
