#pragma once

#include <string>
#include <string_view>

#include "arcllm/decode_result.hpp"
#include "arcllm/task_model.hpp"

namespace arcllm {

enum class PixelRepr { Number, Word };
enum class Delimiter { None, Comma, Pipe };

/// One of the four cell-by-cell text encodings: number/none, number/pipe,
/// word/comma and word/pipe. Other combinations are rejected.
class DirectEncodingConfig {
 public:
  DirectEncodingConfig(PixelRepr pixel, Delimiter delim);

  /// Accepts "number|word" and "none|comma|pipe".
  static DirectEncodingConfig parse(std::string_view pixel, std::string_view delim);
  /// Accepts the short tags used on the command line, e.g. "word-pipe".
  static DirectEncodingConfig from_tag(std::string_view tag);

  PixelRepr pixel() const { return pixel_; }
  Delimiter delimiter() const { return delim_; }
  std::string tag() const;

  friend bool operator==(const DirectEncodingConfig&, const DirectEncodingConfig&) = default;

 private:
  PixelRepr pixel_;
  Delimiter delim_;
};

/// One line per row, cells joined by the delimiter (or nothing), rows joined by '\n'.
std::string encode_grid(const Grid& g, const DirectEncodingConfig& cfg,
                        const Palette& palette = Palette::canonical());

/// Extracts the last contiguous block of lines that parse as grid rows. Total:
/// any input yields either a grid or a ParseFailure.
DecodeResult decode_grid(std::string_view text, const DirectEncodingConfig& cfg,
                         const Palette& palette = Palette::canonical());

}  // namespace arcllm
