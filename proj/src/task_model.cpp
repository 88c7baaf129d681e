#include "arcllm/task_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace arcllm {

using json = nlohmann::json;

namespace {

void check_dims(int height, int width) {
  if (height < 1 || height > kMaxGridSide || width < 1 || width > kMaxGridSide) {
    throw SchemaError("grid dimensions " + std::to_string(height) + "x" + std::to_string(width) +
                      " outside 1..30");
  }
}

Grid parse_grid(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path + ": expected non-empty array of rows");
  std::vector<Color> cells;
  std::size_t width = 0;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto& row = j[r];
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.empty()) throw SchemaError(row_path + ": expected non-empty array of colors");
    if (r == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw SchemaError(row_path + ": ragged rows (width " + std::to_string(row.size()) + ", expected " +
                        std::to_string(width) + ")");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& v = row[c];
      if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 9) {
        throw SchemaError(row_path + "[" + std::to_string(c) + "]: color code outside 0-9");
      }
      cells.emplace_back(v.get<int>());
    }
  }
  if (j.size() > kMaxGridSide || width > kMaxGridSide) {
    throw SchemaError(path + ": grid exceeds 30x30");
  }
  return Grid(static_cast<int>(j.size()), static_cast<int>(width), std::move(cells));
}

std::vector<TaskPair> parse_pairs(const json& doc, const char* key) {
  const std::string path = key;
  if (!doc.contains(key)) throw SchemaError(path + ": missing");
  const auto& arr = doc[key];
  if (!arr.is_array()) throw SchemaError(path + ": expected array");
  if (arr.empty()) throw SchemaError(path + ": empty " + path + " list");
  std::vector<TaskPair> pairs;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string pp = path + "[" + std::to_string(i) + "]";
    const auto& p = arr[i];
    if (!p.is_object()) throw SchemaError(pp + ": expected object");
    if (!p.contains("input")) throw SchemaError(pp + ".input: missing");
    if (!p.contains("output")) throw SchemaError(pp + ".output: missing");
    pairs.push_back({parse_grid(p["input"], pp + ".input"), parse_grid(p["output"], pp + ".output")});
  }
  return pairs;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Grid::Grid(int height, int width, std::vector<Color> cells)
    : height_(height), width_(width), cells_(std::move(cells)) {
  check_dims(height, width);
  if (cells_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw SchemaError("cell count does not match grid dimensions");
  }
}

Grid Grid::filled(int height, int width, Color color) {
  check_dims(height, width);
  return Grid(height, width, std::vector<Color>(static_cast<std::size_t>(height * width), color));
}

Grid Grid::from_rows(const std::vector<std::vector<int>>& rows) { return parse_grid(json(rows), "grid"); }

std::size_t Grid::index(int row, int col) const {
  if (row < 0 || row >= height_ || col < 0 || col >= width_) {
    throw std::out_of_range("grid index (" + std::to_string(row) + "," + std::to_string(col) + ") out of range");
  }
  return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
}

std::vector<std::vector<int>> Grid::rows() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(height_));
  for (int r = 0; r < height_; ++r) {
    out[r].reserve(static_cast<std::size_t>(width_));
    for (int c = 0; c < width_; ++c) out[r].push_back(at(r, c).code());
  }
  return out;
}

std::array<int, 10> Grid::histogram() const {
  std::array<int, 10> h{};
  for (Color c : cells_) ++h[c.code()];
  return h;
}

// Palette

const Palette& Palette::canonical() {
  static const Palette p({"black", "blue", "red", "green", "yellow", "grey", "purple", "orange", "cyan", "brown"});
  return p;
}

Palette::Palette(std::array<std::string, 10> words) : words_(std::move(words)) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto& w = words_[i];
    if (w.empty()) throw SchemaError("palette[" + std::to_string(i) + "]: empty word");
    for (char& ch : w) {
      if (!std::isalpha(static_cast<unsigned char>(ch))) {
        throw SchemaError("palette[" + std::to_string(i) + "]: word '" + w + "' must be alphabetic");
      }
      ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    if (!seen.insert(w).second) throw SchemaError("palette[" + std::to_string(i) + "]: duplicate word '" + w + "'");
  }
}

Palette Palette::from_json(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw SchemaError("palette: expected JSON object");
  std::array<std::string, 10> words;
  for (int code = 0; code < 10; ++code) {
    const std::string key = std::to_string(code);
    if (!doc.contains(key) || !doc[key].is_string()) throw SchemaError("palette." + key + ": missing word");
    words[code] = doc[key].get<std::string>();
  }
  if (doc.size() != 10) throw SchemaError("palette: unexpected keys besides 0-9");
  return Palette(std::move(words));
}

Palette Palette::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

std::optional<Color> Palette::lookup(std::string_view word) const {
  if (word.empty()) return std::nullopt;
  for (int code = 0; code < 10; ++code) {
    const auto& w = words_[code];
    if (w.size() != word.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < w.size() && match; ++i) {
      match = w[i] == std::tolower(static_cast<unsigned char>(word[i]));
    }
    if (match) return Color(code);
  }
  return std::nullopt;
}

// Task IO

Task load_task(std::string_view json_text, std::string id) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) throw SchemaError("$: malformed JSON");
  if (!doc.is_object()) throw SchemaError("$: expected object");
  Task t;
  t.id = std::move(id);
  t.train = parse_pairs(doc, "train");
  t.test = parse_pairs(doc, "test");
  return t;
}

Task load_task_file(const std::filesystem::path& path) {
  try {
    return load_task(read_file(path), path.stem().string());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::string save_task(const Task& t) {
  auto pairs = [](const std::vector<TaskPair>& ps) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : ps) {
      nlohmann::ordered_json o;
      o["input"] = p.input.rows();
      o["output"] = p.output.rows();
      arr.push_back(std::move(o));
    }
    return arr;
  };
  nlohmann::ordered_json doc;
  doc["train"] = pairs(t.train);
  doc["test"] = pairs(t.test);
  return doc.dump();
}

void save_task_file(const Task& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << save_task(t) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<Task> load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("dataset directory not found: " + dir.string());
  std::vector<Task> tasks;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (entry.path().filename() == "manifest.json") continue;
    tasks.push_back(load_task_file(entry.path()));
  }
  std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < tasks.size(); ++i) {
    if (tasks[i].id == tasks[i - 1].id) throw SchemaError("duplicate task id '" + tasks[i].id + "' in dataset");
  }
  return tasks;
}

// Geometry

Grid rotate90(const Grid& g, Rotation direction) {
  const int h = g.height();
  const int w = g.width();
  Grid out = Grid::filled(w, h);
  for (int r = 0; r < w; ++r) {
    for (int c = 0; c < h; ++c) {
      out.set(r, c, direction == Rotation::Clockwise ? g.at(h - 1 - c, r) : g.at(c, w - 1 - r));
    }
  }
  return out;
}

std::string rotation_suffix(Rotation direction) {
  return direction == Rotation::Clockwise ? "__rot90cw" : "__rot90ccw";
}

Task rotate_task(const Task& t, Rotation direction) {
  Task out;
  out.id = t.id + rotation_suffix(direction);
  auto rot = [direction](const std::vector<TaskPair>& ps) {
    std::vector<TaskPair> r;
    r.reserve(ps.size());
    for (const auto& p : ps) r.push_back({rotate90(p.input, direction), rotate90(p.output, direction)});
    return r;
  };
  out.train = rot(t.train);
  out.test = rot(t.test);
  return out;
}

bool grids_equal(const Grid& a, const Grid& b) { return a == b; }

}  // namespace arcllm
