#include "arcllm/bench_gen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "arcllm/rng.hpp"

namespace arcllm {

namespace {

constexpr int kMaxAttempts = 1000;

using Row = std::vector<Color>;

struct FamilyInfo {
  TaskFamily family;
  const char* tag;
  const char* name;
};

constexpr FamilyInfo kFamilies[] = {
    {TaskFamily::Move1, "move_1", "Move1"},
    {TaskFamily::Move2, "move_2", "Move2"},
    {TaskFamily::Move3, "move_3", "Move3"},
    {TaskFamily::MoveDynamic, "move_dynamic", "MoveDynamic"},
    {TaskFamily::Move2Towards, "move_2_towards", "Move2Towards"},
    {TaskFamily::Fill, "fill", "Fill"},
    {TaskFamily::PaddedFill, "padded_fill", "PaddedFill"},
    {TaskFamily::Hollow, "hollow", "Hollow"},
    {TaskFamily::Flip, "flip", "Flip"},
    {TaskFamily::Mirror, "mirror", "Mirror"},
    {TaskFamily::Denoise, "denoise", "Denoise"},
    {TaskFamily::DenoiseMulticolor, "denoise_multicolor", "DenoiseMulticolor"},
    {TaskFamily::PatternCopy, "pattern_copy", "PatternCopy"},
    {TaskFamily::PatternCopyMulticolor, "pattern_copy_multicolor", "PatternCopyMulticolor"},
    {TaskFamily::RecolorByOddEven, "recolor_by_odd_even", "RecolorByOddEven"},
    {TaskFamily::RecolorBySize, "recolor_by_size", "RecolorBySize"},
    {TaskFamily::RecolorBySizeComparison, "recolor_by_size_comparison", "RecolorBySizeComparison"},
    {TaskFamily::Scaling, "scaling", "Scaling"},
    {TaskFamily::Fill2D, "fill_2d", "Fill2D"},
    {TaskFamily::Move2D, "move_2d", "Move2D"},
    {TaskFamily::Pile2D, "pile_2d", "Pile2D"},
};

// Maximal runs of non-background cells (colors may vary inside a segment).
struct Segment {
  int start;
  int len;
};

std::vector<Segment> segments(const Row& row) {
  std::vector<Segment> out;
  const int w = static_cast<int>(row.size());
  for (int i = 0; i < w;) {
    if (row[i] == kBlack) {
      ++i;
      continue;
    }
    int j = i;
    while (j < w && row[j] != kBlack) ++j;
    out.push_back({i, j - i});
    i = j;
  }
  return out;
}

Row row_of(const Grid& g, int r = 0) {
  Row row(static_cast<std::size_t>(g.width()));
  for (int c = 0; c < g.width(); ++c) row[c] = g.at(r, c);
  return row;
}

Grid grid_of(const Row& row) { return Grid(1, static_cast<int>(row.size()), row); }

int move_distance(TaskFamily f) {
  switch (f) {
    case TaskFamily::Move1:
      return 1;
    case TaskFamily::Move2:
      return 2;
    default:
      return 3;
  }
}

void fill_between(Row& row, int a, int b, Color c) {
  for (int i = a; i <= b; ++i) row[i] = c;
}

// --- horizontal-form transforms ----------------------------------------

Row shift_row(const Row& in, int k) {
  Row out(in.size(), kBlack);
  const int w = static_cast<int>(in.size());
  for (int i = 0; i < w; ++i) {
    if (in[i] != kBlack && i + k >= 0 && i + k < w) out[i + k] = in[i];
  }
  return out;
}

Row fill_pairs(const Row& in, bool exactly_one_pair) {
  Row out = in;
  std::vector<int> pos;
  for (int i = 0; i < static_cast<int>(in.size()); ++i) {
    if (in[i] != kBlack) pos.push_back(i);
  }
  if (exactly_one_pair && pos.size() != 2) return out;
  for (std::size_t k = 0; k + 1 < pos.size(); k += 2) {
    if (in[pos[k]] == in[pos[k + 1]]) fill_between(out, pos[k], pos[k + 1], in[pos[k]]);
  }
  return out;
}

Row transform_row(TaskFamily f, const Row& in) {
  const int w = static_cast<int>(in.size());
  auto segs = segments(in);
  Row out = in;
  switch (f) {
    case TaskFamily::Move1:
    case TaskFamily::Move2:
    case TaskFamily::Move3:
      return shift_row(in, move_distance(f));

    case TaskFamily::MoveDynamic: {
      auto anchor = std::find(in.begin(), in.end(), family_colors::kAnchor);
      if (anchor == in.end()) return out;
      const int a = static_cast<int>(anchor - in.begin());
      Row block(in.size(), kBlack);
      int end = -1;
      for (int i = 0; i < w; ++i) {
        if (in[i] != kBlack && i != a) {
          block[i] = in[i];
          end = i;
        }
      }
      if (end < 0) return out;
      out = shift_row(block, a - 1 - end);
      out[a] = family_colors::kAnchor;
      return out;
    }

    case TaskFamily::Move2Towards: {
      if (segs.size() != 2) return out;
      const auto& left = segs[0];
      const auto& right = segs[1];
      const int k = right.start - (left.start + left.len);
      out = in;
      for (int i = left.start; i < left.start + left.len; ++i) out[i] = kBlack;
      for (int i = left.start; i < left.start + left.len; ++i) out[i + k] = in[i];
      return out;
    }

    case TaskFamily::Fill:
      return fill_pairs(in, true);

    case TaskFamily::PaddedFill:
      return fill_pairs(in, false);

    case TaskFamily::Hollow:
      for (auto s : segs) {
        for (int i = s.start + 1; i < s.start + s.len - 1; ++i) out[i] = kBlack;
      }
      return out;

    case TaskFamily::Flip:
      for (auto s : segs) std::reverse(out.begin() + s.start, out.begin() + s.start + s.len);
      return out;

    case TaskFamily::Mirror: {
      auto pivot = std::find(in.begin(), in.end(), family_colors::kPivot);
      if (pivot == in.end()) return out;
      const int p = static_cast<int>(pivot - in.begin());
      out.assign(in.size(), kBlack);
      out[p] = family_colors::kPivot;
      for (int i = 0; i < w; ++i) {
        if (in[i] == kBlack || i == p) continue;
        const int j = 2 * p - i;
        if (j >= 0 && j < w) out[j] = in[i];
      }
      return out;
    }

    case TaskFamily::Denoise:
      for (auto s : segs) {
        if (s.len == 1) out[s.start] = kBlack;
      }
      return out;

    case TaskFamily::DenoiseMulticolor: {
      if (segs.empty()) return out;
      auto largest = *std::max_element(segs.begin(), segs.end(),
                                       [](const Segment& a, const Segment& b) { return a.len < b.len; });
      out.assign(in.size(), kBlack);
      for (int i = largest.start; i < largest.start + largest.len; ++i) out[i] = in[i];
      return out;
    }

    case TaskFamily::PatternCopy:
    case TaskFamily::PatternCopyMulticolor: {
      if (segs.empty()) return out;
      const auto pattern = segs.front();
      for (std::size_t k = 1; k < segs.size(); ++k) {
        if (segs[k].len != 1) continue;
        const int origin = segs[k].start - pattern.len / 2;
        for (int d = 0; d < pattern.len; ++d) {
          if (origin + d >= 0 && origin + d < w) out[origin + d] = in[pattern.start + d];
        }
      }
      return out;
    }

    case TaskFamily::RecolorByOddEven:
      for (auto s : segs) {
        fill_between(out, s.start, s.start + s.len - 1, s.len % 2 ? family_colors::kOdd : family_colors::kEven);
      }
      return out;

    case TaskFamily::RecolorBySize:
      for (auto s : segs) {
        if (in[s.start] != family_colors::kSizeInput) continue;
        if (s.len == 2) fill_between(out, s.start, s.start + 1, family_colors::kSize2);
        if (s.len == 3) fill_between(out, s.start, s.start + 2, family_colors::kSize3);
        if (s.len == 4) fill_between(out, s.start, s.start + 3, family_colors::kSize4);
      }
      return out;

    case TaskFamily::RecolorBySizeComparison: {
      if (segs.size() < 2) return out;
      int lo = segs.front().len, hi = segs.front().len;
      for (auto s : segs) {
        lo = std::min(lo, s.len);
        hi = std::max(hi, s.len);
      }
      if (lo == hi) return out;
      for (auto s : segs) {
        if (s.len == hi) fill_between(out, s.start, s.start + s.len - 1, family_colors::kLargest);
        if (s.len == lo) fill_between(out, s.start, s.start + s.len - 1, family_colors::kSmallest);
      }
      return out;
    }

    case TaskFamily::Scaling:
      for (auto s : segs) {
        for (int i = s.start; i < s.start + 2 * s.len && i < w; ++i) out[i] = in[s.start];
      }
      return out;

    case TaskFamily::Fill2D:
      return fill_pairs(in, true);

    case TaskFamily::Move2D:
      return shift_row(in, 1);

    case TaskFamily::Pile2D: {
      Row piled(in.size(), kBlack);
      int k = w - 1;
      for (int i = w - 1; i >= 0; --i) {
        if (in[i] != kBlack) piled[k--] = in[i];
      }
      return piled;
    }
  }
  return out;
}

// --- sampling ------------------------------------------------------------

struct TaskContext {
  TaskFamily family;
  GenParams p;
  int height = 1;
  int width = 0;
  Color task_color = kBlack;
};

Color random_color(Rng& rng, std::initializer_list<Color> exclude = {}) {
  std::vector<Color> options;
  for (int c = 1; c <= 9; ++c) {
    if (std::find(exclude.begin(), exclude.end(), Color(c)) == exclude.end()) options.emplace_back(c);
  }
  return rng.pick(options);
}

int random_size(Rng& rng, const GenParams& p, int lo_floor = 1) {
  return rng.uniform(std::max(lo_floor, p.object_size_range.first), p.object_size_range.second);
}

// Start offsets for consecutive blocks separated by at least `min_gap`, inside
// [lead, width - trail). Slack is spread with a stars-and-bars draw.
std::optional<std::vector<int>> layout(Rng& rng, int width, const std::vector<int>& sizes, int min_gap, int lead = 0,
                                       int trail = 0) {
  const int n = static_cast<int>(sizes.size());
  int used = lead + trail + min_gap * (n - 1);
  for (int s : sizes) used += s;
  const int slack = width - used;
  if (slack < 0) return std::nullopt;
  std::vector<int> cuts(static_cast<std::size_t>(n));
  for (auto& c : cuts) c = rng.uniform(0, slack);
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> starts;
  int pos = lead + cuts[0];
  for (int i = 0; i < n; ++i) {
    starts.push_back(pos);
    const int extra = (i + 1 < n ? cuts[i + 1] : slack) - cuts[i];
    pos += sizes[i] + (i + 1 < n ? min_gap + extra : 0);
  }
  return starts;
}

std::vector<int> random_sizes(Rng& rng, const GenParams& p, int n, int lo_floor = 1) {
  std::vector<int> sizes;
  for (int i = 0; i < n; ++i) sizes.push_back(random_size(rng, p, lo_floor));
  return sizes;
}

std::optional<Grid> sample_1d(const TaskContext& ctx, Rng& rng) {
  const auto& p = ctx.p;
  const int w = ctx.width;
  Row row(static_cast<std::size_t>(w), kBlack);
  auto paint = [&](int start, int len, Color c) { fill_between(row, start, start + len - 1, c); };

  switch (ctx.family) {
    case TaskFamily::Move1:
    case TaskFamily::Move2:
    case TaskFamily::Move3: {
      const int s = random_size(rng, p);
      auto at = layout(rng, w, {s}, 0, 0, move_distance(ctx.family));
      if (!at) return std::nullopt;
      paint((*at)[0], s, random_color(rng));
      break;
    }
    case TaskFamily::MoveDynamic: {
      const int s = random_size(rng, p);
      auto at = layout(rng, w, {s, 1}, 1);
      if (!at) return std::nullopt;
      paint((*at)[0], s, random_color(rng, {family_colors::kAnchor}));
      row[(*at)[1]] = family_colors::kAnchor;
      break;
    }
    case TaskFamily::Move2Towards: {
      const auto sizes = random_sizes(rng, p, 2);
      auto at = layout(rng, w, sizes, 1);
      if (!at) return std::nullopt;
      const Color a = random_color(rng);
      paint((*at)[0], sizes[0], a);
      paint((*at)[1], sizes[1], random_color(rng, {a}));
      break;
    }
    case TaskFamily::Fill: {
      const int span = random_size(rng, p, 3);
      auto at = layout(rng, w, {span}, 0);
      if (!at) return std::nullopt;
      const Color c = random_color(rng);
      row[(*at)[0]] = c;
      row[(*at)[0] + span - 1] = c;
      break;
    }
    case TaskFamily::PaddedFill: {
      const auto spans = random_sizes(rng, p, p.num_objects, 3);
      auto at = layout(rng, w, spans, 1, 1, 1);
      if (!at) return std::nullopt;
      for (std::size_t i = 0; i < spans.size(); ++i) {
        const Color c = random_color(rng);
        row[(*at)[i]] = c;
        row[(*at)[i] + spans[i] - 1] = c;
      }
      break;
    }
    case TaskFamily::Hollow: {
      const int s = random_size(rng, p, 3);
      auto at = layout(rng, w, {s}, 0);
      if (!at) return std::nullopt;
      paint((*at)[0], s, random_color(rng));
      break;
    }
    case TaskFamily::Flip: {
      const int s = random_size(rng, p, 2);
      auto at = layout(rng, w, {s}, 0);
      if (!at) return std::nullopt;
      const Color body = random_color(rng);
      const Color head = random_color(rng, {body});
      paint((*at)[0], s, body);
      row[rng.chance(1, 2) ? (*at)[0] : (*at)[0] + s - 1] = head;
      break;
    }
    case TaskFamily::Mirror: {
      const int s = random_size(rng, p);
      const int room = w - 2 * s - 1;
      if (room < 0) return std::nullopt;
      const int gap = rng.uniform(0, room / 2);
      const int pivot = rng.uniform(gap + s, w - 1 - gap - s);
      paint(pivot - gap - s, s, random_color(rng, {family_colors::kPivot}));
      row[pivot] = family_colors::kPivot;
      break;
    }
    case TaskFamily::Denoise:
    case TaskFamily::DenoiseMulticolor: {
      std::vector<int> sizes(static_cast<std::size_t>(p.num_objects), 1);
      sizes.push_back(random_size(rng, p, 3));
      rng.shuffle(sizes);
      auto at = layout(rng, w, sizes, 1);
      if (!at) return std::nullopt;
      const Color main = random_color(rng);
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        const bool noise = sizes[i] == 1;
        paint((*at)[i], sizes[i], noise && ctx.family == TaskFamily::DenoiseMulticolor ? random_color(rng) : main);
      }
      break;
    }
    case TaskFamily::PatternCopy:
    case TaskFamily::PatternCopyMulticolor: {
      // Pattern first, then one 3-cell footprint per marker.
      std::vector<int> sizes(static_cast<std::size_t>(p.num_objects) + 1, 3);
      auto at = layout(rng, w, sizes, 1);
      if (!at || (*at)[0] > 1) return std::nullopt;
      Row pattern(3);
      if (ctx.family == TaskFamily::PatternCopy) {
        pattern.assign(3, random_color(rng));
      } else {
        do {
          for (auto& c : pattern) c = random_color(rng);
        } while (pattern[0] == pattern[1] && pattern[1] == pattern[2]);
      }
      for (int d = 0; d < 3; ++d) row[(*at)[0] + d] = pattern[d];
      for (std::size_t i = 1; i < sizes.size(); ++i) row[(*at)[i] + 1] = pattern[1];
      break;
    }
    case TaskFamily::RecolorByOddEven: {
      const auto sizes = random_sizes(rng, p, p.num_objects);
      if (p.num_objects >= 2) {
        const bool odd = std::any_of(sizes.begin(), sizes.end(), [](int s) { return s % 2 == 1; });
        const bool even = std::any_of(sizes.begin(), sizes.end(), [](int s) { return s % 2 == 0; });
        if (!odd || !even) return std::nullopt;
      }
      auto at = layout(rng, w, sizes, 1);
      if (!at) return std::nullopt;
      for (std::size_t i = 0; i < sizes.size(); ++i) paint((*at)[i], sizes[i], ctx.task_color);
      break;
    }
    case TaskFamily::RecolorBySize: {
      std::vector<int> sizes;
      for (int i = 0; i < p.num_objects; ++i) sizes.push_back(rng.uniform(2, 4));
      auto at = layout(rng, w, sizes, 1);
      if (!at) return std::nullopt;
      for (std::size_t i = 0; i < sizes.size(); ++i) paint((*at)[i], sizes[i], family_colors::kSizeInput);
      break;
    }
    case TaskFamily::RecolorBySizeComparison: {
      const auto sizes = random_sizes(rng, p, p.num_objects);
      const int hi = *std::max_element(sizes.begin(), sizes.end());
      const int lo = *std::min_element(sizes.begin(), sizes.end());
      if (std::count(sizes.begin(), sizes.end(), hi) != 1 || std::count(sizes.begin(), sizes.end(), lo) != 1) {
        return std::nullopt;
      }
      auto at = layout(rng, w, sizes, 1);
      if (!at) return std::nullopt;
      for (std::size_t i = 0; i < sizes.size(); ++i) paint((*at)[i], sizes[i], ctx.task_color);
      break;
    }
    case TaskFamily::Scaling: {
      const auto sizes = random_sizes(rng, p, p.num_objects);
      std::vector<int> footprints;
      for (int s : sizes) footprints.push_back(2 * s);
      auto at = layout(rng, w, footprints, 1);
      if (!at) return std::nullopt;
      for (std::size_t i = 0; i < sizes.size(); ++i) paint((*at)[i], sizes[i], random_color(rng));
      break;
    }
    default:
      return std::nullopt;
  }
  return grid_of(row);
}

// 4-neighborhood of every cell in [col, col+len) on `row` is free.
bool bar_fits(const Grid& g, int row, int col, int len) {
  for (int c = col - 1; c <= col + len; ++c) {
    for (int r = row - 1; r <= row + 1; ++r) {
      const bool corner = (c == col - 1 || c == col + len) && r != row;
      if (corner || !g.contains({r, c})) continue;
      if (g.at(r, c) != kBlack) return false;
    }
  }
  return true;
}

std::optional<Grid> sample_2d(const TaskContext& ctx, Rng& rng) {
  const auto& p = ctx.p;
  Grid g = Grid::filled(ctx.height, ctx.width);
  switch (ctx.family) {
    case TaskFamily::Fill2D: {
      std::vector<int> rows(static_cast<std::size_t>(ctx.height));
      for (int r = 0; r < ctx.height; ++r) rows[r] = r;
      rng.shuffle(rows);
      const int n = std::min(p.num_objects, ctx.height);
      for (int k = 0; k < n; ++k) {
        const int span = rng.uniform(3, ctx.width);
        const int start = rng.uniform(0, ctx.width - span);
        const Color c = random_color(rng);
        g.set(rows[k], start, c);
        g.set(rows[k], start + span - 1, c);
      }
      break;
    }
    case TaskFamily::Move2D:
    case TaskFamily::Pile2D: {
      const bool move = ctx.family == TaskFamily::Move2D;
      for (int k = 0; k < p.num_objects; ++k) {
        const int len = std::min(random_size(rng, p), ctx.width - 1);
        const int row = rng.uniform(0, ctx.height - 1);
        // Move2D keeps the last column free so the shifted bar stays in bounds.
        const int col = rng.uniform(0, ctx.width - len - (move ? 1 : 0));
        if (!bar_fits(g, row, col, len)) return std::nullopt;
        const Color c = random_color(rng);
        for (int d = 0; d < len; ++d) g.set(row, col + d, c);
      }
      break;
    }
    default:
      return std::nullopt;
  }
  return g;
}

std::optional<Grid> sample_input(const TaskContext& ctx, Rng& rng) {
  return is_2d(ctx.family) ? sample_2d(ctx, rng) : sample_1d(ctx, rng);
}

int min_object_size(TaskFamily f) {
  switch (f) {
    case TaskFamily::Fill:
    case TaskFamily::PaddedFill:
    case TaskFamily::Hollow:
      return 3;
    case TaskFamily::Flip:
      return 2;
    default:
      return 1;
  }
}

int min_footprint(TaskFamily f, const GenParams& p) {
  const int lo = std::max(1, p.object_size_range.first);
  const int n = p.num_objects;
  switch (f) {
    case TaskFamily::Move1:
    case TaskFamily::Move2:
    case TaskFamily::Move3:
      return lo + move_distance(f);
    case TaskFamily::MoveDynamic:
      return lo + 2;
    case TaskFamily::Move2Towards:
      return 2 * lo + 1;
    case TaskFamily::Fill:
    case TaskFamily::Hollow:
      return std::max(3, lo);
    case TaskFamily::PaddedFill:
      return 2 + n * std::max(3, lo) + (n - 1);
    case TaskFamily::Flip:
      return std::max(2, lo);
    case TaskFamily::Mirror:
      return 2 * lo + 1;
    case TaskFamily::Denoise:
    case TaskFamily::DenoiseMulticolor:
      return std::max(3, lo) + 2 * n;
    case TaskFamily::PatternCopy:
    case TaskFamily::PatternCopyMulticolor:
      return 3 + 4 * n;
    case TaskFamily::RecolorByOddEven:
    case TaskFamily::RecolorBySizeComparison:
      return n * lo + (n - 1);
    case TaskFamily::RecolorBySize:
      return 2 * n + (n - 1);
    case TaskFamily::Scaling:
      return n * 2 * lo + (n - 1);
    case TaskFamily::Fill2D:
      return 3;
    case TaskFamily::Move2D:
      return lo + 1;
    case TaskFamily::Pile2D:
      return lo;
  }
  return 0;
}

}  // namespace

std::string to_string(TaskFamily f) {
  for (const auto& info : kFamilies) {
    if (info.family == f) return info.tag;
  }
  return "?";
}

TaskFamily parse_family(std::string_view name) {
  for (const auto& info : kFamilies) {
    if (name == info.tag || name == info.name) return info.family;
  }
  throw std::invalid_argument("unknown task family '" + std::string(name) + "'");
}

bool is_2d(TaskFamily f) {
  return f == TaskFamily::Fill2D || f == TaskFamily::Move2D || f == TaskFamily::Pile2D;
}

GenParams default_params(TaskFamily f) {
  GenParams p;
  switch (f) {
    case TaskFamily::Move1:
    case TaskFamily::Move2:
    case TaskFamily::Move3:
    case TaskFamily::MoveDynamic:
    case TaskFamily::Flip:
      p.width = 15;
      p.num_objects = 1;
      p.object_size_range = {3, 8};
      break;
    case TaskFamily::Move2Towards:
      p.width = 15;
      p.num_objects = 2;
      p.object_size_range = {2, 5};
      break;
    case TaskFamily::Fill:
    case TaskFamily::Hollow:
      p.width = 15;
      p.num_objects = 1;
      p.object_size_range = {3, 10};
      break;
    case TaskFamily::PaddedFill:
      p.width = 20;
      p.num_objects = 2;
      p.object_size_range = {3, 6};
      break;
    case TaskFamily::Mirror:
      p.width = 20;
      p.num_objects = 1;
      p.object_size_range = {2, 5};
      break;
    case TaskFamily::Denoise:
    case TaskFamily::DenoiseMulticolor:
      p.width = 20;
      p.num_objects = 3;
      p.object_size_range = {3, 8};
      break;
    case TaskFamily::PatternCopy:
    case TaskFamily::PatternCopyMulticolor:
      p.width = 20;
      p.num_objects = 2;
      p.object_size_range = {3, 3};
      break;
    case TaskFamily::RecolorByOddEven:
    case TaskFamily::RecolorBySizeComparison:
      p.width = 20;
      p.num_objects = 3;
      p.object_size_range = {1, 6};
      break;
    case TaskFamily::RecolorBySize:
      p.width = 20;
      p.num_objects = 3;
      p.object_size_range = {2, 4};
      break;
    case TaskFamily::Scaling:
      p.width = 15;
      p.num_objects = 1;
      p.object_size_range = {1, 5};
      break;
    case TaskFamily::Fill2D:
      p.width = 10;
      p.num_objects = 3;
      p.object_size_range = {3, 10};
      break;
    case TaskFamily::Move2D:
    case TaskFamily::Pile2D:
      p.width = 10;
      p.num_objects = 3;
      p.object_size_range = {1, 4};
      break;
  }
  return p;
}

GenParams resolve_params(TaskFamily f, const GenParams& in) {
  const GenParams d = default_params(f);
  GenParams p = in;
  if (p.width == 0) p.width = d.width;
  if (p.num_objects == 0) p.num_objects = d.num_objects;
  if (p.object_size_range == std::pair<int, int>{0, 0}) p.object_size_range = d.object_size_range;

  const std::string where = to_string(f) + " (seed " + std::to_string(p.seed) + "): ";
  if (p.width < 6 || p.width > kMaxGridSide) throw GenerationError(where + "width must be in 6..30");
  if (p.num_objects < 1) throw GenerationError(where + "num_objects must be >= 1");
  if (p.object_size_range.first < 1 || p.object_size_range.second < p.object_size_range.first) {
    throw GenerationError(where + "invalid object size range");
  }
  if (p.num_train < 1) throw GenerationError(where + "num_train must be >= 1");
  if (p.object_size_range.second < min_object_size(f)) {
    throw GenerationError(where + "objects must be at least " + std::to_string(min_object_size(f)) + " cells");
  }
  if (f == TaskFamily::RecolorBySizeComparison && p.num_objects < 2) {
    throw GenerationError(where + "needs at least two objects");
  }
  if (f == TaskFamily::RecolorBySize && (p.object_size_range.first > 4 || p.object_size_range.second < 2)) {
    throw GenerationError(where + "object sizes must overlap 2..4");
  }
  if (min_footprint(f, p) > p.width) {
    throw GenerationError(where + "infeasible: objects and gaps need " + std::to_string(min_footprint(f, p)) +
                          " cells, width is " + std::to_string(p.width));
  }
  return p;
}

Grid apply_transform(TaskFamily f, const Grid& input) {
  Grid out = input;
  for (int r = 0; r < input.height(); ++r) {
    const Row row = transform_row(f, row_of(input, r));
    for (int c = 0; c < input.width(); ++c) out.set(r, c, row[c]);
  }
  return out;
}

Task generate_task(TaskFamily f, const GenParams& params, std::string id) {
  const GenParams p = resolve_params(f, params);
  Rng rng(p.seed);

  TaskContext ctx;
  ctx.family = f;
  ctx.p = p;
  const int lo = std::max({6, p.width - 4, min_footprint(f, p)});
  ctx.width = rng.uniform(std::min(lo, p.width), p.width);
  if (is_2d(f)) ctx.height = rng.uniform(std::max(6, p.width - 4), p.width);
  ctx.task_color = random_color(rng, {family_colors::kOdd, family_colors::kEven});

  Task t;
  t.id = id.empty() ? to_string(f) + "_" + std::to_string(p.seed) : std::move(id);
  std::vector<Grid> seen;
  const int total = p.num_train + 1;
  for (int k = 0; k < total; ++k) {
    std::optional<TaskPair> pair;
    for (int attempt = 0; attempt < kMaxAttempts && !pair; ++attempt) {
      auto input = sample_input(ctx, rng);
      if (!input || std::find(seen.begin(), seen.end(), *input) != seen.end()) continue;
      Grid output = apply_transform(f, *input);
      if (output == *input) continue;
      pair = TaskPair{*input, std::move(output)};
    }
    if (!pair) {
      throw GenerationError(to_string(f) + " (seed " + std::to_string(p.seed) + "): no valid placement after " +
                            std::to_string(kMaxAttempts) + " attempts");
    }
    seen.push_back(pair->input);
    (k < p.num_train ? t.train : t.test).push_back(std::move(*pair));
  }
  return t;
}

bool verify_task(const Task& t, TaskFamily f, Orientation orientation) {
  auto check = [&](const std::vector<TaskPair>& pairs) {
    for (const auto& pair : pairs) {
      if (!is_2d(f) && orientation == Orientation::Horizontal && pair.input.height() != 1) return false;
      if (orientation == Orientation::Horizontal) {
        if (apply_transform(f, pair.input) != pair.output) return false;
      } else {
        const Grid h_in = rotate90(pair.input, Rotation::Counterclockwise);
        if (rotate90(apply_transform(f, h_in), Rotation::Clockwise) != pair.output) return false;
      }
    }
    return true;
  };
  return !t.train.empty() && !t.test.empty() && check(t.train) && check(t.test);
}

std::uint64_t task_seed(std::uint64_t base_seed, TaskFamily f, int index) {
  const auto family_index = static_cast<std::uint64_t>(f);
  return splitmix64(splitmix64(base_seed ^ (family_index << 32)) + static_cast<std::uint64_t>(index));
}

// --- manifest ------------------------------------------------------------

std::string Manifest::to_json() const {
  nlohmann::ordered_json doc;
  doc["base_seed"] = base_seed;
  doc["tasks_per_type"] = tasks_per_type;
  doc["num_train"] = num_train;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json o;
    o["family"] = to_string(e.family);
    o["orientation"] = e.orientation ? nlohmann::ordered_json(*e.orientation == Orientation::Horizontal ? "H" : "V")
                                     : nlohmann::ordered_json(nullptr);
    o["suite"] = e.suite;
    o["id"] = e.id;
    o["seed"] = e.seed;
    o["path"] = e.path;
    arr.push_back(std::move(o));
  }
  doc["tasks"] = std::move(arr);
  return doc.dump(1);
}

Manifest Manifest::from_json(std::string_view text) {
  auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("tasks")) throw SchemaError("manifest: malformed");
  Manifest m;
  m.base_seed = doc.value("base_seed", std::uint64_t{0});
  m.tasks_per_type = doc.value("tasks_per_type", 0);
  m.num_train = doc.value("num_train", 0);
  for (const auto& o : doc["tasks"]) {
    ManifestEntry e;
    e.family = parse_family(o.at("family").get<std::string>());
    if (o.contains("orientation") && o["orientation"].is_string()) {
      e.orientation = o["orientation"] == "V" ? Orientation::Vertical : Orientation::Horizontal;
    }
    e.suite = o.at("suite").get<std::string>();
    e.id = o.at("id").get<std::string>();
    e.seed = o.at("seed").get<std::uint64_t>();
    e.path = o.at("path").get<std::string>();
    m.entries.push_back(std::move(e));
  }
  return m;
}

Manifest Manifest::load(const std::filesystem::path& dataset_dir) {
  std::ifstream in(dataset_dir / "manifest.json");
  if (!in) throw std::runtime_error("no manifest.json in " + dataset_dir.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

Manifest generate_dataset(const std::vector<TaskFamily>& families, const GenParams& params,
                          const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  Manifest m;
  m.base_seed = params.seed;
  m.tasks_per_type = params.tasks_per_type;
  m.num_train = params.num_train;

  auto write = [&](const Task& t, TaskFamily f, std::optional<Orientation> o, const std::string& suite,
                   std::uint64_t seed) {
    fs::create_directories(out_dir / suite);
    const std::string rel = suite + "/" + t.id + ".json";
    save_task_file(t, out_dir / rel);
    m.entries.push_back({f, o, suite, t.id, seed, rel});
  };

  for (auto f : families) {
    const std::string tag = to_string(f);
    for (int i = 0; i < params.tasks_per_type; ++i) {
      GenParams p = params;
      p.seed = task_seed(params.seed, f, i);
      char index[16];
      std::snprintf(index, sizeof index, "%03d", i);
      const std::string id = tag + "_" + index;
      const Task t = generate_task(f, p, id);
      if (!verify_task(t, f)) throw GenerationError(tag + " (seed " + std::to_string(p.seed) + "): self-check failed");
      if (!is_2d(f)) {
        write(t, f, std::nullopt, tag, p.seed);
        continue;
      }
      write(t, f, Orientation::Horizontal, tag + "_h", p.seed);
      const Task v = rotate_task(t, Rotation::Clockwise);
      if (!verify_task(v, f, Orientation::Vertical)) {
        throw GenerationError(tag + " (seed " + std::to_string(p.seed) + "): vertical self-check failed");
      }
      write(v, f, Orientation::Vertical, tag + "_v", p.seed);
    }
  }

  fs::create_directories(out_dir);
  std::ofstream out(out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << m.to_json() << '\n';
  if (!out) throw std::runtime_error("cannot write manifest in " + out_dir.string());
  return m;
}

}  // namespace arcllm
