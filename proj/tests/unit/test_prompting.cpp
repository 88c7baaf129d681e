#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "arcllm/prompting.hpp"

using namespace arcllm;
namespace fs = std::filesystem;

namespace {

const PromptTemplates& bundled() {
  static const PromptTemplates t = PromptTemplates::load(PromptTemplates::default_dir());
  return t;
}

Task sample_task() {
  const Grid a = Grid::from_rows({{1, 1, 1}, {0, 0, 0}, {0, 0, 0}});
  const Grid b = Grid::from_rows({{0, 0, 0}, {1, 1, 1}, {0, 0, 0}});
  const Grid c = Grid::from_rows({{0, 0, 0}, {0, 0, 0}, {1, 1, 1}});
  const Grid d = Grid::from_rows({{2, 0, 0}, {0, 0, 0}, {0, 0, 0}});
  const Grid e = Grid::from_rows({{0, 0, 0}, {2, 0, 0}, {0, 0, 0}});
  return Task{"sample", {{a, b}, {b, c}}, {{d, e}, {e, Grid::from_rows({{0, 0, 0}, {0, 0, 0}, {2, 0, 0}})}}};
}

// Copies the bundled templates into a scratch directory for mutation.
fs::path scratch_templates(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("arcllm_tpl_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const auto& entry : fs::directory_iterator(PromptTemplates::default_dir())) {
    fs::copy_file(entry.path(), dir / entry.path().filename());
  }
  return dir;
}

void write(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << body;
}

const EncoderConfig kNumberNone = DirectEncodingConfig(PixelRepr::Number, Delimiter::None);
const EncoderConfig kWordPipe = DirectEncodingConfig(PixelRepr::Word, Delimiter::Pipe);
const EncoderConfig kObjJson = ObjectEncodingConfig{ObjectStyle::Json, false};
const EncoderConfig kObjDesc = ObjectEncodingConfig{ObjectStyle::Descriptors, true};

}  // namespace

TEST_CASE("tags parse") {
  CHECK(parse_prompt_strategy("fewshot") == PromptStrategy::FewShot);
  CHECK(parse_prompt_strategy("cot") == PromptStrategy::InContextCoT);
  CHECK_THROWS(parse_prompt_strategy("zero"));
  for (const auto& e : {kNumberNone, kWordPipe, kObjJson, kObjDesc}) {
    CHECK(encoding_tag(parse_encoding(encoding_tag(e))) == encoding_tag(e));
  }
  CHECK(kind_of(parse_encoding("object-desc")) == EncoderKind::Object);
  CHECK(kind_of(parse_encoding("number-pipe")) == EncoderKind::Direct);
}

TEST_CASE("bundled templates load") {
  const auto& t = bundled();
  CHECK(t.examples().size() == 2);
  CHECK(t.hash().size() == 64);
  for (auto s : {PromptStrategy::FewShot, PromptStrategy::InContextCoT}) {
    for (auto k : {EncoderKind::Direct, EncoderKind::Object}) {
      CHECK_FALSE(t.instructions(s, k).empty());
      CHECK(t.instructions(s, k).find("{{") == std::string::npos);
    }
  }
}

TEST_CASE("few-shot prompt layout") {
  const Prompt p = build_prompt(sample_task(), PromptStrategy::FewShot, kNumberNone, bundled());
  CHECK_FALSE(p.examples.has_value());
  CHECK(p.instructions == bundled().instructions(PromptStrategy::FewShot, EncoderKind::Direct));
  CHECK(p.task ==
        "Demonstrations:\n"
        "Input Grid 1: 111\n000\n000\n"
        "Output Grid 1: 000\n111\n000\n"
        "Input Grid 2: 000\n111\n000\n"
        "Output Grid 2: 000\n000\n111\n"
        "Test Input Grid: 200\n000\n000\n");
  CHECK(p.answer_cue == "Test Output Grid:");
  CHECK(p.text() == p.instructions + p.task + p.answer_cue);
  CHECK(p.text().rfind(p.instructions + "Demonstrations:\nInput Grid 1: 111\n000\n000", 0) == 0);
  // The test output never leaks into the prompt.
  CHECK(p.text().find("020") == std::string::npos);
}

TEST_CASE("test index selects the test input") {
  const Prompt p = build_prompt(sample_task(), PromptStrategy::FewShot, kNumberNone, bundled(), std::nullopt, 1);
  CHECK(p.task.find("Test Input Grid: 000\n200\n000\n") != std::string::npos);
  CHECK_THROWS(build_prompt(sample_task(), PromptStrategy::FewShot, kNumberNone, bundled(), std::nullopt, 2));
}

TEST_CASE("cot prompts carry both worked examples") {
  for (const auto& enc : {kWordPipe, kObjJson}) {
    const Prompt p = build_prompt(sample_task(), PromptStrategy::InContextCoT, enc, bundled());
    REQUIRE(p.examples.has_value());
    CHECK(p.examples->rfind("Example 1:\nDemonstrations:\n", 0) == 0);
    CHECK(p.examples->find("Example 2:\n") != std::string::npos);
    CHECK(p.examples->find("Example 3:") == std::string::npos);
    const auto& ex = bundled().examples();
    const auto& reasoning = kind_of(enc) == EncoderKind::Direct ? ex[0].reasoning_direct : ex[0].reasoning_object;
    CHECK(p.examples->find(reasoning) != std::string::npos);
    CHECK(p.text() == p.instructions + *p.examples + p.task + p.answer_cue);
  }
}

TEST_CASE("object prompts use the chosen abstraction and a reply cue") {
  const Prompt p = build_prompt(sample_task(), PromptStrategy::FewShot, kObjJson, bundled(),
                                AbstractionStrategy::SinglePixels);
  CHECK(p.task.rfind("Demonstrations:\nInput Grid 1:\n{\"grid_size\":[3,3]", 0) == 0);
  CHECK(p.task.find("\"size\":1") != std::string::npos);
  CHECK(p.task.find("\"size\":3") == std::string::npos);
  CHECK(p.answer_cue.find("grid_size") != std::string::npos);
  CHECK(p.answer_cue.size() > std::string("Test Output Grid:").size());
  CHECK(p.answer_cue.substr(p.answer_cue.size() - 17) == "Test Output Grid:");

  const Prompt best = build_prompt(sample_task(), PromptStrategy::FewShot, kObjDesc, bundled());
  CHECK(best.text() == build_prompt(sample_task(), PromptStrategy::FewShot, kObjDesc, bundled(),
                                    select_best_fit(sample_task()))
                           .text());
  const Prompt blobs = build_prompt(sample_task(), PromptStrategy::FewShot, kObjDesc, bundled(),
                                    AbstractionStrategy::SameColor4);
  CHECK(blobs.task.find("Object 0: color=blue, size=3, coordinates=[(0,0),(0,1),(0,2)]") != std::string::npos);
  CHECK(best.answer_cue.find("Grid size") != std::string::npos);
}

TEST_CASE("prompts are deterministic and instructions do not depend on the task") {
  const Task t = sample_task();
  Task other = t;
  other.train.pop_back();
  for (auto s : {PromptStrategy::FewShot, PromptStrategy::InContextCoT}) {
    for (const auto& e : {kNumberNone, kWordPipe, kObjJson, kObjDesc}) {
      const Prompt a = build_prompt(t, s, e, bundled());
      CHECK(a.text() == build_prompt(t, s, e, bundled()).text());
      const Prompt b = build_prompt(other, s, e, bundled());
      CHECK(a.instructions == b.instructions);
      CHECK(a.examples == b.examples);
      CHECK(a.answer_cue == b.answer_cue);
    }
  }
}

TEST_CASE("token estimate") {
  CHECK(token_estimate(std::string_view("")) == 0);
  CHECK(token_estimate(std::string(100, 'x')) == 34);
  CHECK(token_estimate(std::string(99, 'x')) == 33);
  std::size_t prev = 0;
  for (int n = 0; n < 200; ++n) {
    const auto e = token_estimate(std::string(static_cast<std::size_t>(n), 'a'));
    CHECK(e >= prev);
    prev = e;
  }
  const Prompt p = build_prompt(sample_task(), PromptStrategy::FewShot, kNumberNone, bundled());
  CHECK(token_estimate(p) == token_estimate(p.text()));
}

TEST_CASE("template validation") {
  SUBCASE("missing task slot") {
    const auto dir = scratch_templates("missing");
    write(dir / "fewshot_direct.txt", "Instructions only.\n");
    CHECK_THROWS_AS(PromptTemplates::load(dir), TemplateError);
  }
  SUBCASE("examples slot in a few-shot template") {
    const auto dir = scratch_templates("fewshot_examples");
    write(dir / "fewshot_object.txt", "Hi\n{{EXAMPLES}}\n{{TASK}}\n");
    CHECK_THROWS_AS(PromptTemplates::load(dir), TemplateError);
  }
  SUBCASE("placeholders out of order") {
    const auto dir = scratch_templates("order");
    write(dir / "cot_direct.txt", "Hi\n{{TASK}}\n{{EXAMPLES}}\n");
    CHECK_THROWS_AS(PromptTemplates::load(dir), TemplateError);
  }
  SUBCASE("trailing text") {
    const auto dir = scratch_templates("trailing");
    write(dir / "cot_object.txt", "Hi\n{{EXAMPLES}}\n{{TASK}}\nmore words\n");
    CHECK_THROWS_AS(PromptTemplates::load(dir), TemplateError);
  }
  SUBCASE("wrong number of examples") {
    const auto dir = scratch_templates("one_example");
    write(dir / "incontext_examples.json", R"({"examples":[]})");
    CHECK_THROWS_AS(PromptTemplates::load(dir), TemplateError);
  }
  SUBCASE("missing file") {
    const auto dir = scratch_templates("gone");
    fs::remove(dir / "cot_direct.txt");
    CHECK_THROWS_AS(PromptTemplates::load(dir), TemplateError);
  }
  SUBCASE("any edit changes the hash") {
    const auto dir = scratch_templates("edit");
    write(dir / "fewshot_direct.txt", "Different words.\n{{TASK}}\n");
    const auto t = PromptTemplates::load(dir);
    CHECK(t.hash() != bundled().hash());
    CHECK(t.instructions(PromptStrategy::FewShot, EncoderKind::Direct) == "Different words.\n");
  }
}
