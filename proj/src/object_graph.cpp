#include "arcllm/object_graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace arcllm {

namespace {

constexpr int kDr4[] = {-1, 1, 0, 0};
constexpr int kDc4[] = {0, 0, -1, 1};
constexpr int kDr8[] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDc8[] = {-1, 0, 1, -1, 1, -1, 0, 1};

struct Component {
  std::vector<Cell> pixels;
  Color color;
};

Color modal_color(const Grid& g, const std::vector<Cell>& pixels) {
  std::array<int, 10> counts{};
  for (auto p : pixels) ++counts[g.at(p.row, p.col).code()];
  // max_element returns the first maximum, i.e. the lowest code on ties.
  return Color(static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin()));
}

std::vector<Component> flood_components(const Grid& g, Color background, bool diagonal, bool same_color) {
  const int h = g.height();
  const int w = g.width();
  std::vector<char> seen(static_cast<std::size_t>(h * w), 0);
  std::vector<Component> out;
  const int nbrs = diagonal ? 8 : 4;
  const int* dr = diagonal ? kDr8 : kDr4;
  const int* dc = diagonal ? kDc8 : kDc4;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (seen[r * w + c] || g.at(r, c) == background) continue;
      const Color seed = g.at(r, c);
      std::vector<Cell> stack{{r, c}};
      std::vector<Cell> pixels;
      seen[r * w + c] = 1;
      while (!stack.empty()) {
        Cell cur = stack.back();
        stack.pop_back();
        pixels.push_back(cur);
        for (int k = 0; k < nbrs; ++k) {
          Cell n{cur.row + dr[k], cur.col + dc[k]};
          if (!g.contains(n) || seen[n.row * w + n.col]) continue;
          const Color nc = g.at(n.row, n.col);
          if (nc == background || (same_color && nc != seed)) continue;
          seen[n.row * w + n.col] = 1;
          stack.push_back(n);
        }
      }
      std::sort(pixels.begin(), pixels.end());
      Color color = same_color ? seed : modal_color(g, pixels);
      out.push_back({std::move(pixels), color});
    }
  }
  return out;
}

std::vector<Component> run_components(const Grid& g, Color background, bool vertical) {
  std::vector<Component> out;
  const int outer = vertical ? g.width() : g.height();
  const int inner = vertical ? g.height() : g.width();
  auto at = [&](int o, int i) { return vertical ? g.at(i, o) : g.at(o, i); };
  auto cell = [&](int o, int i) { return vertical ? Cell{i, o} : Cell{o, i}; };
  for (int o = 0; o < outer; ++o) {
    int i = 0;
    while (i < inner) {
      const Color c = at(o, i);
      if (c == background) {
        ++i;
        continue;
      }
      Component comp{{}, c};
      while (i < inner && at(o, i) == c) comp.pixels.push_back(cell(o, i++));
      std::sort(comp.pixels.begin(), comp.pixels.end());
      out.push_back(std::move(comp));
    }
  }
  return out;
}

std::vector<Component> single_pixels(const Grid& g, Color background) {
  std::vector<Component> out;
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      if (g.at(r, c) != background) out.push_back({{{r, c}}, g.at(r, c)});
    }
  }
  return out;
}

}  // namespace

std::string to_string(AbstractionStrategy s) {
  switch (s) {
    case AbstractionStrategy::SameColor4:
      return "SameColor4";
    case AbstractionStrategy::SameColor8:
      return "SameColor8";
    case AbstractionStrategy::MultiColor4:
      return "MultiColor4";
    case AbstractionStrategy::VerticalRuns:
      return "VerticalRuns";
    case AbstractionStrategy::HorizontalRuns:
      return "HorizontalRuns";
    case AbstractionStrategy::SinglePixels:
      return "SinglePixels";
  }
  return "?";
}

AbstractionStrategy parse_strategy(std::string_view tag) {
  for (auto s : kAllStrategies) {
    if (to_string(s) == tag) return s;
  }
  throw std::invalid_argument("unknown abstraction strategy '" + std::string(tag) + "'");
}

std::string to_string(Relation r) { return r == Relation::Horizontal ? "horizontal" : "vertical"; }

ObjectGraph abstract(const Grid& g, AbstractionStrategy strategy, Color background) {
  std::vector<Component> comps;
  switch (strategy) {
    case AbstractionStrategy::SameColor4:
      comps = flood_components(g, background, false, true);
      break;
    case AbstractionStrategy::SameColor8:
      comps = flood_components(g, background, true, true);
      break;
    case AbstractionStrategy::MultiColor4:
      comps = flood_components(g, background, false, false);
      break;
    case AbstractionStrategy::VerticalRuns:
      comps = run_components(g, background, true);
      break;
    case AbstractionStrategy::HorizontalRuns:
      comps = run_components(g, background, false);
      break;
    case AbstractionStrategy::SinglePixels:
      comps = single_pixels(g, background);
      break;
  }
  std::stable_sort(comps.begin(), comps.end(),
                   [](const Component& a, const Component& b) { return a.pixels.front() < b.pixels.front(); });

  ObjectGraph graph;
  graph.grid_height = g.height();
  graph.grid_width = g.width();
  graph.background = background;
  graph.strategy = strategy;
  graph.nodes.reserve(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    graph.nodes.push_back({static_cast<int>(i), comps[i].color, std::move(comps[i].pixels)});
  }
  return graph;
}

ObjectGraph build_edges(ObjectGraph graph) {
  const auto n = graph.nodes.size();
  std::vector<std::vector<char>> rows(n, std::vector<char>(static_cast<std::size_t>(graph.grid_height), 0));
  std::vector<std::vector<char>> cols(n, std::vector<char>(static_cast<std::size_t>(graph.grid_width), 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto p : graph.nodes[i].pixels) {
      rows[i][p.row] = 1;
      cols[i][p.col] = 1;
    }
  }
  auto overlaps = [](const std::vector<char>& x, const std::vector<char>& y) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k] && y[k]) return true;
    }
    return false;
  };
  graph.edges.clear();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      int a = graph.nodes[i].id;
      int b = graph.nodes[j].id;
      if (a > b) std::swap(a, b);
      if (overlaps(rows[i], rows[j])) graph.edges.push_back({a, b, Relation::Horizontal});
      if (overlaps(cols[i], cols[j])) graph.edges.push_back({a, b, Relation::Vertical});
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  return graph;
}

StrategyOverrides parse_overrides(std::string_view json_text) {
  auto doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw SchemaError("overrides: expected JSON object");
  StrategyOverrides out;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_string()) throw SchemaError("overrides." + it.key() + ": expected strategy tag");
    try {
      out[it.key()] = parse_strategy(it.value().get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw SchemaError("overrides." + it.key() + ": " + e.what());
    }
  }
  return out;
}

StrategyOverrides load_overrides(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_overrides(ss.str());
}

int score_strategy(const Task& t, AbstractionStrategy strategy, Color background) {
  std::vector<int> in_counts, out_counts;
  for (const auto& p : t.train) {
    in_counts.push_back(static_cast<int>(abstract(p.input, strategy, background).nodes.size()));
    out_counts.push_back(static_cast<int>(abstract(p.output, strategy, background).nodes.size()));
  }
  int score = 0;
  if (std::all_of(in_counts.begin(), in_counts.end(), [&](int c) { return c == in_counts.front(); })) score += 2;
  if (in_counts == out_counts) score += 2;

  double total = 0;
  bool degenerate = false;
  for (auto counts : {&in_counts, &out_counts}) {
    for (int c : *counts) {
      total += c;
      degenerate = degenerate || c == 0 || c > 50;
    }
  }
  const double mean = total / static_cast<double>(in_counts.size() + out_counts.size());
  if (mean >= 2.0 && mean <= 12.0) score += 1;
  if (degenerate) score -= 3;
  return score;
}

AbstractionStrategy select_best_fit(const Task& t, const StrategyOverrides* overrides, Color background) {
  if (overrides) {
    if (auto it = overrides->find(t.id); it != overrides->end()) return it->second;
  }
  AbstractionStrategy best = kAllStrategies.front();
  int best_score = score_strategy(t, best, background);
  for (std::size_t i = 1; i < kAllStrategies.size(); ++i) {
    const int s = score_strategy(t, kAllStrategies[i], background);
    if (s > best_score) {
      best_score = s;
      best = kAllStrategies[i];
    }
  }
  return best;
}

Grid render(const ObjectGraph& graph) {
  if (graph.grid_height < 1 || graph.grid_height > kMaxGridSide || graph.grid_width < 1 ||
      graph.grid_width > kMaxGridSide) {
    throw RenderError("graph dimensions " + std::to_string(graph.grid_height) + "x" +
                      std::to_string(graph.grid_width) + " outside 1..30");
  }
  Grid out = Grid::filled(graph.grid_height, graph.grid_width, graph.background);
  std::vector<char> painted(static_cast<std::size_t>(graph.grid_height * graph.grid_width), 0);
  for (const auto& node : graph.nodes) {
    for (auto p : node.pixels) {
      if (!out.contains(p)) {
        throw RenderError("object " + std::to_string(node.id) + " pixel (" + std::to_string(p.row) + "," +
                          std::to_string(p.col) + ") outside " + std::to_string(graph.grid_height) + "x" +
                          std::to_string(graph.grid_width) + " grid");
      }
      char& mark = painted[static_cast<std::size_t>(p.row * graph.grid_width + p.col)];
      if (mark) {
        throw RenderError("pixel (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                          ") claimed twice (object " + std::to_string(node.id) + ")");
      }
      mark = 1;
      out.set(p.row, p.col, node.color);
    }
  }
  return out;
}

}  // namespace arcllm
