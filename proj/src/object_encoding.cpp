#include "arcllm/object_encoding.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "text_util.hpp"

namespace arcllm {

namespace {

using ordered_json = nlohmann::ordered_json;

// Minimal scanner over one line of descriptor text.
class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && text::is_space(s_[pos_])) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept_word(std::string_view w) {
    skip_ws();
    if (!text::istarts_with(s_.substr(pos_), w)) return false;
    pos_ += w.size();
    return true;
  }
  std::optional<int> integer() {
    skip_ws();
    std::size_t start = pos_;
    int v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      if (pos_ - start >= 6) return std::nullopt;
      v = v * 10 + (s_[pos_++] - '0');
    }
    if (pos_ == start) return std::nullopt;
    return v;
  }
  std::string_view token() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(start, pos_ - start);
  }
  std::string_view key() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return s_.substr(start, pos_ - start);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

struct ParsedObject {
  Color color;
  std::vector<Cell> pixels;
};

std::optional<Color> parse_color_token(std::string_view tok, const Palette& palette) {
  if (tok.size() == 1 && tok[0] >= '0' && tok[0] <= '9') return Color(tok[0] - '0');
  return palette.lookup(tok);
}

bool is_object_line(std::string_view line) {
  Cursor c(line);
  c.accept('-') || c.accept('*');
  return c.accept_word("object") && c.integer().has_value() && c.accept(':');
}

// "Object 3: color=red, size=2, coordinates=[(0,1),(0,2)]"
std::optional<ParsedObject> parse_object_line(std::string_view line, const Palette& palette) {
  Cursor c(line);
  c.accept('-') || c.accept('*');
  if (!c.accept_word("object") || !c.integer() || !c.accept(':')) return std::nullopt;
  std::optional<Color> color;
  std::optional<std::vector<Cell>> pixels;
  do {
    auto key = c.key();
    if (!c.accept('=')) return std::nullopt;
    if (key == "color") {
      color = parse_color_token(c.token(), palette);
      if (!color) return std::nullopt;
    } else if (key == "size") {
      if (!c.integer()) return std::nullopt;
    } else if (key == "coordinates") {
      if (!c.accept('[')) return std::nullopt;
      std::vector<Cell> px;
      if (!c.accept(']')) {
        do {
          if (!c.accept('(')) return std::nullopt;
          auto r = c.integer();
          if (!r || !c.accept(',')) return std::nullopt;
          auto col = c.integer();
          if (!col || !c.accept(')')) return std::nullopt;
          px.push_back({*r, *col});
        } while (c.accept(','));
        if (!c.accept(']')) return std::nullopt;
      }
      pixels = std::move(px);
    } else {
      return std::nullopt;
    }
  } while (c.accept(','));
  if (!c.done() || !color || !pixels) return std::nullopt;
  return ParsedObject{*color, std::move(*pixels)};
}

// Dimensions from a line containing "Grid size: HxW".
std::optional<GridDims> parse_grid_size(std::string_view line) {
  for (std::size_t i = 0; i + 9 <= line.size(); ++i) {
    if (!text::istarts_with(line.substr(i), "grid size")) continue;
    Cursor c(line.substr(i + 9));
    if (!c.accept(':')) return std::nullopt;
    auto h = c.integer();
    if (!h || !(c.accept('x') || c.accept('X'))) return std::nullopt;
    auto w = c.integer();
    if (!w) return std::nullopt;
    return GridDims{*h, *w};
  }
  return std::nullopt;
}

DecodeResult render_parsed(GridDims dims, std::vector<ParsedObject> objects, Color background,
                           const std::string& where) {
  if (dims.height < 1 || dims.height > kMaxGridSide || dims.width < 1 || dims.width > kMaxGridSide) {
    return DecodeResult::failure("grid size " + std::to_string(dims.height) + "x" + std::to_string(dims.width) +
                                 " outside 1..30 in " + where);
  }
  ObjectGraph graph;
  graph.grid_height = dims.height;
  graph.grid_width = dims.width;
  graph.background = background;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    graph.nodes.push_back({static_cast<int>(i), objects[i].color, std::move(objects[i].pixels)});
  }
  try {
    return DecodeResult::success(render(graph), "rendered " + std::to_string(graph.nodes.size()) +
                                                    " objects from " + where);
  } catch (const RenderError& e) {
    return DecodeResult::failure(std::string(e.what()) + " in " + where);
  }
}

DecodeResult decode_descriptors(std::string_view text, GridDims fallback, Color background, const Palette& palette) {
  struct Block {
    std::optional<GridDims> dims;
    std::vector<ParsedObject> objects;
    std::size_t first_line = 0;
    bool malformed = false;
    bool open = true;
  };
  std::vector<Block> blocks;
  const auto lines = text::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty() || text::starts_with(line, "```") || text::istarts_with(line, "edges:")) continue;
    if (auto dims = parse_grid_size(line)) {
      blocks.push_back({dims, {}, i, false, true});
    } else if (is_object_line(line)) {
      if (blocks.empty() || !blocks.back().open) blocks.push_back({std::nullopt, {}, i, false, true});
      if (auto obj = parse_object_line(line, palette)) {
        blocks.back().objects.push_back(std::move(*obj));
      } else {
        blocks.back().malformed = true;
      }
    } else if (!blocks.empty()) {
      blocks.back().open = false;
    }
  }
  if (blocks.empty()) return DecodeResult::failure("no object block found");
  auto& last = blocks.back();
  const std::string where = "object block at line " + std::to_string(last.first_line + 1);
  if (last.malformed) return DecodeResult::failure("malformed object line in " + where);
  return render_parsed(last.dims.value_or(fallback), std::move(last.objects), background, where);
}

// End (exclusive) of the balanced {...} starting at `open`, honoring JSON strings.
std::optional<std::size_t> match_brace(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_string) {
      if (ch == '\\') {
        ++i;
      } else if (ch == '"') {
        in_string = false;
      }
    } else if (ch == '"') {
      in_string = true;
    } else if (ch == '{') {
      ++depth;
    } else if (ch == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

std::optional<int> small_int(const nlohmann::json& v) {
  if (!v.is_number_integer()) return std::nullopt;
  const auto x = v.get<long long>();
  if (x < 0 || x > 1000) return std::nullopt;
  return static_cast<int>(x);
}

DecodeResult decode_json(std::string_view text, GridDims fallback, Color background, const Palette& palette) {
  for (std::size_t pos = text.rfind('{'); pos != std::string_view::npos; pos = pos == 0 ? std::string_view::npos
                                                                                          : text.rfind('{', pos - 1)) {
    auto end = match_brace(text, pos);
    if (!end) continue;
    const auto candidate = text.substr(pos, *end - pos);
    if (candidate.find("\"objects\"") == std::string_view::npos) continue;
    auto doc = nlohmann::json::parse(candidate, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("objects")) continue;

    const std::string where = "JSON object at offset " + std::to_string(pos);
    GridDims dims = fallback;
    if (doc.contains("grid_size")) {
      const auto& gs = doc["grid_size"];
      if (!gs.is_array() || gs.size() != 2 || !small_int(gs[0]) || !small_int(gs[1])) {
        return DecodeResult::failure("bad grid_size in " + where);
      }
      dims = {*small_int(gs[0]), *small_int(gs[1])};
    }
    const auto& objs = doc["objects"];
    if (!objs.is_array()) return DecodeResult::failure("\"objects\" is not a list in " + where);
    std::vector<ParsedObject> parsed;
    for (const auto& o : objs) {
      if (!o.is_object() || !o.contains("color") || !o.contains("coordinates")) {
        return DecodeResult::failure("object without color/coordinates in " + where);
      }
      std::optional<Color> color;
      if (o["color"].is_string()) {
        color = parse_color_token(o["color"].get<std::string>(), palette);
      } else if (auto code = small_int(o["color"]); code && *code <= 9) {
        color = Color(*code);
      }
      if (!color) return DecodeResult::failure("unknown color in " + where);
      const auto& coords = o["coordinates"];
      if (!coords.is_array()) return DecodeResult::failure("coordinates not a list in " + where);
      ParsedObject po{*color, {}};
      for (const auto& rc : coords) {
        if (!rc.is_array() || rc.size() != 2 || !small_int(rc[0]) || !small_int(rc[1])) {
          return DecodeResult::failure("bad coordinate in " + where);
        }
        po.pixels.push_back({*small_int(rc[0]), *small_int(rc[1])});
      }
      parsed.push_back(std::move(po));
    }
    return render_parsed(dims, std::move(parsed), background, where);
  }
  return DecodeResult::failure("no JSON object with \"objects\" found");
}

std::vector<ObjectEdge> edges_for(const ObjectGraph& graph) { return build_edges(graph).edges; }

}  // namespace

ObjectEncodingConfig ObjectEncodingConfig::from_tag(std::string_view tag) {
  if (tag == "object-desc") return {ObjectStyle::Descriptors, false};
  if (tag == "object-desc-edges") return {ObjectStyle::Descriptors, true};
  if (tag == "object-json") return {ObjectStyle::Json, false};
  if (tag == "object-json-edges") return {ObjectStyle::Json, true};
  throw std::invalid_argument("unknown object encoding tag '" + std::string(tag) + "'");
}

std::string ObjectEncodingConfig::tag() const {
  std::string t = style == ObjectStyle::Descriptors ? "object-desc" : "object-json";
  return include_edges ? t + "-edges" : t;
}

std::string encode_object_text(const ObjectGraph& graph, const ObjectEncodingConfig& cfg, const Palette& palette) {
  if (cfg.style == ObjectStyle::Json) {
    ordered_json doc;
    doc["grid_size"] = {graph.grid_height, graph.grid_width};
    auto objects = ordered_json::array();
    for (const auto& node : graph.nodes) {
      ordered_json o;
      o["id"] = node.id;
      o["color"] = palette.word(node.color);
      o["size"] = node.size();
      auto coords = ordered_json::array();
      for (auto p : node.pixels) coords.push_back({p.row, p.col});
      o["coordinates"] = std::move(coords);
      objects.push_back(std::move(o));
    }
    doc["objects"] = std::move(objects);
    if (cfg.include_edges) {
      auto edges = ordered_json::array();
      for (const auto& e : edges_for(graph)) edges.push_back({e.a, e.b, to_string(e.relation)});
      doc["edges"] = std::move(edges);
    }
    return doc.dump();
  }

  std::string out = "Grid size: " + std::to_string(graph.grid_height) + "x" + std::to_string(graph.grid_width);
  for (const auto& node : graph.nodes) {
    out += "\nObject " + std::to_string(node.id) + ": color=" + palette.word(node.color) +
           ", size=" + std::to_string(node.size()) + ", coordinates=[";
    for (std::size_t i = 0; i < node.pixels.size(); ++i) {
      if (i > 0) out += ',';
      out += "(" + std::to_string(node.pixels[i].row) + "," + std::to_string(node.pixels[i].col) + ")";
    }
    out += "]";
  }
  if (cfg.include_edges) {
    out += "\nEdges:";
    for (const auto& e : edges_for(graph)) {
      out += " (" + std::to_string(e.a) + "," + std::to_string(e.b) + "," + to_string(e.relation) + ")";
    }
  }
  return out;
}

DecodeResult decode_object_answer(std::string_view text, const ObjectEncodingConfig& cfg, GridDims fallback_dims,
                                  Color background, const Palette& palette) {
  return cfg.style == ObjectStyle::Json ? decode_json(text, fallback_dims, background, palette)
                                        : decode_descriptors(text, fallback_dims, background, palette);
}

}  // namespace arcllm
