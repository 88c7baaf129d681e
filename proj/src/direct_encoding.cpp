#include "arcllm/direct_encoding.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <stdexcept>
#include <vector>

#include "text_util.hpp"

namespace arcllm {

namespace {

char delimiter_char(Delimiter d) {
  switch (d) {
    case Delimiter::Comma:
      return ',';
    case Delimiter::Pipe:
      return '|';
    case Delimiter::None:
      break;
  }
  return '\0';
}

std::optional<Color> parse_digit(std::string_view tok) {
  if (tok.size() != 1 || tok[0] < '0' || tok[0] > '9') return std::nullopt;
  return Color(tok[0] - '0');
}

// A single line as a row of cells, or nullopt if it is not a row under cfg.
std::optional<std::vector<Color>> parse_row(std::string_view line, const DirectEncodingConfig& cfg,
                                            const Palette& palette) {
  std::vector<Color> row;
  if (cfg.delimiter() == Delimiter::None) {
    for (char ch : line) {
      if (ch >= '0' && ch <= '9') {
        row.emplace_back(ch - '0');
      } else if (ch != ' ' && ch != '\t') {
        return std::nullopt;
      }
    }
  } else {
    for (auto tok : text::split(line, delimiter_char(cfg.delimiter()))) {
      tok = text::trim(tok);
      auto c = cfg.pixel() == PixelRepr::Number ? parse_digit(tok) : palette.lookup(tok);
      if (!c) return std::nullopt;
      row.push_back(*c);
    }
  }
  if (row.empty() || row.size() > static_cast<std::size_t>(kMaxGridSide)) return std::nullopt;
  return row;
}

// Drops a leading "Output Grid 1:" / "Test Output Grid:" style label.
std::string_view strip_label(std::string_view line) {
  static constexpr std::string_view kLabels[] = {"output", "test", "grid", "answer"};
  for (auto label : kLabels) {
    if (text::istarts_with(line, label)) {
      auto colon = line.find(':');
      if (colon != std::string_view::npos) return text::trim(line.substr(colon + 1));
      break;
    }
  }
  return line;
}

}  // namespace

DirectEncodingConfig::DirectEncodingConfig(PixelRepr pixel, Delimiter delim) : pixel_(pixel), delim_(delim) {
  const bool ok = pixel == PixelRepr::Number ? (delim == Delimiter::None || delim == Delimiter::Pipe)
                                             : (delim == Delimiter::Comma || delim == Delimiter::Pipe);
  if (!ok) throw std::invalid_argument("unsupported direct encoding: " + tag());
}

DirectEncodingConfig DirectEncodingConfig::parse(std::string_view pixel, std::string_view delim) {
  PixelRepr p;
  if (pixel == "number") {
    p = PixelRepr::Number;
  } else if (pixel == "word") {
    p = PixelRepr::Word;
  } else {
    throw std::invalid_argument("unknown pixel representation '" + std::string(pixel) + "'");
  }
  Delimiter d;
  if (delim == "none") {
    d = Delimiter::None;
  } else if (delim == "comma") {
    d = Delimiter::Comma;
  } else if (delim == "pipe") {
    d = Delimiter::Pipe;
  } else {
    throw std::invalid_argument("unknown delimiter '" + std::string(delim) + "'");
  }
  return DirectEncodingConfig(p, d);
}

DirectEncodingConfig DirectEncodingConfig::from_tag(std::string_view tag) {
  auto dash = tag.find('-');
  if (dash == std::string_view::npos) throw std::invalid_argument("bad direct encoding tag '" + std::string(tag) + "'");
  return parse(tag.substr(0, dash), tag.substr(dash + 1));
}

std::string DirectEncodingConfig::tag() const {
  std::string t = pixel_ == PixelRepr::Number ? "number-" : "word-";
  switch (delim_) {
    case Delimiter::None:
      return t + "none";
    case Delimiter::Comma:
      return t + "comma";
    case Delimiter::Pipe:
      return t + "pipe";
  }
  return t;
}

std::string encode_grid(const Grid& g, const DirectEncodingConfig& cfg, const Palette& palette) {
  const char delim = delimiter_char(cfg.delimiter());
  std::string out;
  for (int r = 0; r < g.height(); ++r) {
    if (r > 0) out += '\n';
    for (int c = 0; c < g.width(); ++c) {
      if (c > 0 && delim != '\0') out += delim;
      const Color color = g.at(r, c);
      if (cfg.pixel() == PixelRepr::Number) {
        out += static_cast<char>('0' + color.code());
      } else {
        out += palette.word(color);
      }
    }
  }
  return out;
}

DecodeResult decode_grid(std::string_view text, const DirectEncodingConfig& cfg, const Palette& palette) {
  const auto lines = text::split_lines(text);

  // Last maximal run of consecutive row lines.
  std::vector<std::vector<Color>> block;
  std::vector<std::vector<Color>> current;
  std::size_t block_first = 0, current_first = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = text::trim(lines[i]);
    std::optional<std::vector<Color>> row;
    if (!text::starts_with(line, "```")) row = parse_row(strip_label(line), cfg, palette);
    if (row) {
      if (current.empty()) current_first = i;
      current.push_back(std::move(*row));
    } else if (!current.empty()) {
      block = std::move(current);
      block_first = current_first;
      current.clear();
    }
  }
  if (!current.empty()) {
    block = std::move(current);
    block_first = current_first;
  }

  if (block.empty()) return DecodeResult::failure("no grid block found");
  const std::string where =
      "lines " + std::to_string(block_first + 1) + "-" + std::to_string(block_first + block.size());
  const std::size_t width = block.front().size();
  for (const auto& row : block) {
    if (row.size() != width) return DecodeResult::failure("ragged rows in grid block at " + where);
  }
  if (block.size() > static_cast<std::size_t>(kMaxGridSide)) {
    return DecodeResult::failure("grid block at " + where + " exceeds 30 rows");
  }
  std::vector<Color> cells;
  cells.reserve(block.size() * width);
  for (const auto& row : block) cells.insert(cells.end(), row.begin(), row.end());
  return DecodeResult::success(Grid(static_cast<int>(block.size()), static_cast<int>(width), std::move(cells)),
                               "last grid block at " + where);
}

}  // namespace arcllm
