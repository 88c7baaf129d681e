#pragma once

#include <string>
#include <utility>
#include <variant>

#include "arcllm/task_model.hpp"

namespace arcllm {

/// A model answer that could not be turned into a grid. Never thrown; scored as a failure.
struct ParseFailure {
  std::string reason;
};

/// Outcome of decoding free-form model output. `note` describes where the answer
/// was found (or why not) so the extraction heuristic can be audited from logs.
class DecodeResult {
 public:
  static DecodeResult success(Grid g, std::string note) { return DecodeResult(std::move(g), std::move(note)); }
  static DecodeResult failure(std::string reason) { return DecodeResult(ParseFailure{std::move(reason)}); }

  bool ok() const { return std::holds_alternative<Grid>(value_); }
  const Grid& grid() const { return std::get<Grid>(value_); }
  const ParseFailure& failure() const { return std::get<ParseFailure>(value_); }
  const std::string& note() const { return ok() ? note_ : failure().reason; }

 private:
  DecodeResult(Grid g, std::string note) : value_(std::move(g)), note_(std::move(note)) {}
  explicit DecodeResult(ParseFailure f) : value_(std::move(f)) {}

  std::variant<Grid, ParseFailure> value_;
  std::string note_;
};

}  // namespace arcllm
