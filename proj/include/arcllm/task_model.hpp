#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arcllm {

/// Raised when an ARC task document does not match the expected schema.
/// The message always names the offending JSON path.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One of the ten ARC colors. Code 0 is the conventional background.
class Color {
 public:
  constexpr Color() = default;
  constexpr explicit Color(int code) : code_(static_cast<std::uint8_t>(code)) {
    if (code < 0 || code > 9) throw std::out_of_range("color code outside 0-9: " + std::to_string(code));
  }

  constexpr int code() const { return code_; }

  friend constexpr auto operator<=>(Color, Color) = default;

 private:
  std::uint8_t code_ = 0;
};

inline constexpr Color kBlack{0};

inline constexpr int kMaxGridSide = 30;

struct Cell {
  int row = 0;
  int col = 0;
  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

struct GridDims {
  int height = 1;
  int width = 1;
  friend constexpr bool operator==(const GridDims&, const GridDims&) = default;
};

/// Rectangular matrix of colors, stored row-major. Both sides are in [1, 30].
class Grid {
 public:
  Grid(int height, int width, std::vector<Color> cells);

  static Grid filled(int height, int width, Color color = kBlack);
  /// Throws SchemaError on ragged rows, bad codes or out-of-range dimensions.
  static Grid from_rows(const std::vector<std::vector<int>>& rows);

  int height() const { return height_; }
  int width() const { return width_; }
  GridDims dims() const { return {height_, width_}; }
  const std::vector<Color>& cells() const { return cells_; }

  Color at(int row, int col) const { return cells_[index(row, col)]; }
  void set(int row, int col, Color c) { cells_[index(row, col)] = c; }
  bool contains(Cell c) const { return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_; }

  std::vector<std::vector<int>> rows() const;
  /// Count of each color code.
  std::array<int, 10> histogram() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int row, int col) const;

  int height_;
  int width_;
  std::vector<Color> cells_;
};

struct TaskPair {
  Grid input;
  Grid output;
  friend bool operator==(const TaskPair&, const TaskPair&) = default;
};

struct Task {
  std::string id;
  std::vector<TaskPair> train;
  std::vector<TaskPair> test;
  friend bool operator==(const Task&, const Task&) = default;
};

/// Color code to lowercase word. Total and injective; words are purely alphabetic.
class Palette {
 public:
  /// 0 black, 1 blue, 2 red, 3 green, 4 yellow, 5 grey, 6 purple, 7 orange, 8 cyan, 9 brown.
  static const Palette& canonical();
  /// Validates totality, injectivity and word shape; throws SchemaError otherwise.
  explicit Palette(std::array<std::string, 10> words);
  /// Parses a {"0":"black",...} override document.
  static Palette from_json(std::string_view json_text);
  static Palette load(const std::filesystem::path& path);

  const std::string& word(Color c) const { return words_[c.code()]; }
  /// Case-insensitive reverse lookup.
  std::optional<Color> lookup(std::string_view word) const;

 private:
  std::array<std::string, 10> words_;
};

enum class Rotation { Clockwise, Counterclockwise };

/// Parses an ARC task document. `id` is usually the filename stem.
Task load_task(std::string_view json_text, std::string id = {});
Task load_task_file(const std::filesystem::path& path);

/// Canonical serialization: {"train":[...],"test":[...]} with no whitespace.
/// The id is not part of the document.
std::string save_task(const Task& t);
void save_task_file(const Task& t, const std::filesystem::path& path);

/// Loads every *.json task under `dir` recursively (manifest.json excluded), sorted by id.
std::vector<Task> load_dataset(const std::filesystem::path& dir);

Grid rotate90(const Grid& g, Rotation direction);
Task rotate_task(const Task& t, Rotation direction);
std::string rotation_suffix(Rotation direction);

bool grids_equal(const Grid& a, const Grid& b);

}  // namespace arcllm
