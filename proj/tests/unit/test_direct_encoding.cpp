#include <doctest.h>

#include <algorithm>

#include "arcllm/direct_encoding.hpp"
#include "random_inputs.hpp"

using namespace arcllm;

namespace {

Grid rows(std::vector<std::vector<int>> r) { return Grid::from_rows(r); }

const DirectEncodingConfig kNumberNone{PixelRepr::Number, Delimiter::None};
const DirectEncodingConfig kNumberPipe{PixelRepr::Number, Delimiter::Pipe};
const DirectEncodingConfig kWordComma{PixelRepr::Word, Delimiter::Comma};
const DirectEncodingConfig kWordPipe{PixelRepr::Word, Delimiter::Pipe};
const DirectEncodingConfig kAll[] = {kNumberNone, kNumberPipe, kWordComma, kWordPipe};

}  // namespace

TEST_CASE("only the four table configurations are accepted") {
  CHECK_THROWS_AS(DirectEncodingConfig(PixelRepr::Number, Delimiter::Comma), std::invalid_argument);
  CHECK_THROWS_AS(DirectEncodingConfig(PixelRepr::Word, Delimiter::None), std::invalid_argument);
  CHECK(DirectEncodingConfig::parse("word", "pipe") == kWordPipe);
  CHECK(DirectEncodingConfig::from_tag("number-none") == kNumberNone);
  CHECK_THROWS(DirectEncodingConfig::from_tag("word"));
  for (const auto& cfg : kAll) CHECK(DirectEncodingConfig::from_tag(cfg.tag()) == cfg);
}

TEST_CASE("encode_grid examples") {
  CHECK(encode_grid(rows({{1, 1, 1}, {0, 0, 0}, {0, 0, 0}}), kNumberNone) == "111\n000\n000");
  CHECK(encode_grid(rows({{0, 1, 2}}), kWordPipe) == "black|blue|red");
  CHECK(encode_grid(rows({{5}, {5}}), kNumberPipe) == "5\n5");
  CHECK(encode_grid(rows({{8, 9}}), kWordComma) == "cyan,brown");
  CHECK(encode_grid(rows({{1, 2}, {3, 4}}), kNumberPipe) == "1|2\n3|4");
}

TEST_CASE("decode_grid examples") {
  auto r = decode_grid("Output Grid:\n111\n000\n000", kNumberNone);
  REQUIRE(r.ok());
  CHECK(r.grid() == rows({{1, 1, 1}, {0, 0, 0}, {0, 0, 0}}));

  // The expected grid is whatever encodes to the two rows in the completion.
  const Grid expected = rows({{0, 1}, {1, 0}});
  REQUIRE(encode_grid(expected, kWordPipe) == "black|blue\nblue|black");
  r = decode_grid("The answer is:\n\nblack|blue\nblue|black\nHope this helps!", kWordPipe);
  REQUIRE(r.ok());
  CHECK(r.grid() == expected);

  r = decode_grid("I cannot solve this.", kNumberNone);
  CHECK_FALSE(r.ok());
}

TEST_CASE("decode_grid takes the last block") {
  const std::string text =
      "Input Grid 1: 100\n010\n001\nOutput Grid 1: 200\n020\n002\n\nSo the answer is\nTest Output Grid: 220\n000\n022\n";
  const auto r = decode_grid(text, kNumberNone);
  REQUIRE(r.ok());
  CHECK(r.grid() == rows({{2, 2, 0}, {0, 0, 0}, {0, 2, 2}}));
  CHECK(r.note().find("lines 9-11") != std::string::npos);
}

TEST_CASE("decode_grid tolerates fences, labels, case and spacing") {
  auto r = decode_grid("```\nBlack | BLUE\n blue|black \n```", kWordPipe);
  REQUIRE(r.ok());
  CHECK(r.grid() == rows({{0, 1}, {1, 0}}));

  r = decode_grid("Answer: 1 2 3\n4 5 6", kNumberNone);
  REQUIRE(r.ok());
  CHECK(r.grid() == rows({{1, 2, 3}, {4, 5, 6}}));

  r = decode_grid("red , green\r\nyellow,grey\r\n", kWordComma);
  REQUIRE(r.ok());
  CHECK(r.grid() == rows({{2, 3}, {4, 5}}));

  r = decode_grid("Test Output Grid:\n1|2\n3|4", kNumberPipe);
  REQUIRE(r.ok());
  CHECK(r.grid() == rows({{1, 2}, {3, 4}}));
}

TEST_CASE("decode_grid failures") {
  CHECK_FALSE(decode_grid("111\n00\n111", kNumberNone).ok());
  CHECK(decode_grid("111\n00\n111", kNumberNone).failure().reason.find("ragged") != std::string::npos);
  CHECK_FALSE(decode_grid("", kWordPipe).ok());
  CHECK_FALSE(decode_grid("black|magenta", kWordPipe).ok());
  CHECK_FALSE(decode_grid("1||2", kNumberPipe).ok());
  std::string tall;
  for (int i = 0; i < 31; ++i) tall += "1\n";
  CHECK_FALSE(decode_grid(tall, kNumberNone).ok());
  CHECK_FALSE(decode_grid(std::string(31, '1'), kNumberNone).ok());
}

TEST_CASE("round trip over random grids") {
  Rng rng(2024);
  for (int i = 0; i < 400; ++i) {
    const Grid g = testing::random_grid(rng, 30, 30);
    for (const auto& cfg : kAll) {
      const std::string text = encode_grid(g, cfg);
      CHECK(std::count(text.begin(), text.end(), '\n') == g.height() - 1);
      const auto r = decode_grid(text, cfg);
      REQUIRE(r.ok());
      CHECK(r.grid() == g);
    }
  }
}

TEST_CASE("decode_grid is total on random input") {
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const std::string s = i % 2 ? testing::random_bytes(rng, 200) : testing::random_gridlike_text(rng, 80);
    for (const auto& cfg : kAll) {
      const auto r = decode_grid(s, cfg);
      if (r.ok()) {
        CHECK(r.grid().height() >= 1);
      } else {
        CHECK_FALSE(r.failure().reason.empty());
      }
    }
  }
}
