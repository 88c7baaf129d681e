#pragma once

// Reference segmentation: union-find over explicit neighbour pairs, written
// independently of the library's flood fill and run scan.

#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "arcllm/object_graph.hpp"

namespace arcllm::oracle {

using Partition = std::set<std::set<std::pair<int, int>>>;

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) { return parent_[x] == x ? x : parent_[x] = find(parent_[x]); }
  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

inline Partition reference_partition(const Grid& g, AbstractionStrategy s, Color bg = kBlack) {
  const int h = g.height(), w = g.width();
  UnionFind uf(h * w);
  auto fg = [&](int r, int c) { return g.at(r, c) != bg; };
  auto link = [&](int r1, int c1, int r2, int c2, bool need_same_color) {
    if (r2 < 0 || r2 >= h || c2 < 0 || c2 >= w) return;
    if (!fg(r1, c1) || !fg(r2, c2)) return;
    if (need_same_color && g.at(r1, c1) != g.at(r2, c2)) return;
    uf.unite(r1 * w + c1, r2 * w + c2);
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      switch (s) {
        case AbstractionStrategy::SameColor4:
          link(r, c, r + 1, c, true);
          link(r, c, r, c + 1, true);
          break;
        case AbstractionStrategy::SameColor8:
          for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
              if (dr || dc) link(r, c, r + dr, c + dc, true);
            }
          }
          break;
        case AbstractionStrategy::MultiColor4:
          link(r, c, r + 1, c, false);
          link(r, c, r, c + 1, false);
          break;
        case AbstractionStrategy::VerticalRuns:
          link(r, c, r + 1, c, true);
          break;
        case AbstractionStrategy::HorizontalRuns:
          link(r, c, r, c + 1, true);
          break;
        case AbstractionStrategy::SinglePixels:
          break;
      }
    }
  }
  std::map<int, std::set<std::pair<int, int>>> groups;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (fg(r, c)) groups[uf.find(r * w + c)].insert({r, c});
    }
  }
  Partition out;
  for (auto& [root, cells] : groups) out.insert(std::move(cells));
  return out;
}

inline Partition partition_of(const ObjectGraph& graph) {
  Partition out;
  for (const auto& n : graph.nodes) {
    std::set<std::pair<int, int>> cells;
    for (auto p : n.pixels) cells.insert({p.row, p.col});
    out.insert(std::move(cells));
  }
  return out;
}

}  // namespace arcllm::oracle
