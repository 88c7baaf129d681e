#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "arcllm/task_model.hpp"
#include "random_inputs.hpp"

using namespace arcllm;

namespace {

Grid rows(std::vector<std::vector<int>> r) { return Grid::from_rows(r); }

std::string error_of(std::string_view doc) {
  try {
    load_task(doc);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("load_task reads the demonstration task") {
  const Task t = load_task(
      R"({"train":[{"input":[[1,1,1],[0,0,0],[0,0,0]],"output":[[0,0,0],[1,1,1],[0,0,0]]}],)"
      R"("test":[{"input":[[2,2,2],[0,0,0],[0,0,0]],"output":[[0,0,0],[2,2,2],[0,0,0]]}]})",
      "demo");
  CHECK(t.id == "demo");
  REQUIRE(t.train.size() == 1);
  REQUIRE(t.test.size() == 1);
  CHECK(t.train[0].input == rows({{1, 1, 1}, {0, 0, 0}, {0, 0, 0}}));
  CHECK(t.test[0].output.at(1, 2) == Color(2));
}

TEST_CASE("load_task errors name the offending path") {
  CHECK(error_of(R"({"train":[],"test":[{"input":[[1]],"output":[[1]]}]})").find("train") != std::string::npos);
  CHECK(error_of(R"({"train":[],"test":[{"input":[[1]],"output":[[1]]}]})").find("empty") != std::string::npos);
  const auto ragged = error_of(R"({"train":[{"input":[[1,1,1],[0,0],[0,0,0]],"output":[[1]]}],"test":[{"input":[[1]],"output":[[1]]}]})");
  CHECK(ragged.find("train[0].input[1]") != std::string::npos);
  CHECK(ragged.find("ragged") != std::string::npos);
  CHECK(error_of(R"({"train":[{"input":[[10]],"output":[[1]]}],"test":[{"input":[[1]],"output":[[1]]}]})")
            .find("train[0].input[0][0]") != std::string::npos);
  CHECK(error_of("{not json").find("malformed") != std::string::npos);
  CHECK(error_of(R"({"train":[{"input":[[1]],"output":[[1]]}],"test":[]})").find("test") != std::string::npos);
  CHECK(error_of(R"({"train":[{"input":[[1]]}],"test":[{"input":[[1]],"output":[[1]]}]})").find("output") !=
        std::string::npos);
}

TEST_CASE("grids are capped at 30x30") {
  CHECK_THROWS_AS(Grid::filled(31, 1), SchemaError);
  CHECK_THROWS_AS(Grid::filled(0, 3), SchemaError);
  CHECK_NOTHROW(Grid::filled(30, 30));
  CHECK_THROWS_AS(Color(10), std::exception);
  CHECK_THROWS_AS(Color(-1), std::exception);
}

TEST_CASE("save_task and load_task round trip") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    Task t;
    t.id = "t" + std::to_string(i);
    const int n_train = rng.uniform(1, 5);
    for (int k = 0; k < n_train; ++k) {
      t.train.push_back({testing::random_grid(rng, 30, 30), testing::random_grid(rng, 30, 30)});
    }
    t.test.push_back({testing::random_grid(rng, 30, 30), testing::random_grid(rng, 30, 30)});
    CHECK(load_task(save_task(t), t.id) == t);
  }
}

TEST_CASE("save_task is canonical and compact") {
  Task t{"x", {{rows({{1, 0}}), rows({{0, 1}})}}, {{rows({{2}}), rows({{3}})}}};
  CHECK(save_task(t) == R"({"train":[{"input":[[1,0]],"output":[[0,1]]}],"test":[{"input":[[2]],"output":[[3]]}]})");
}

TEST_CASE("rotate90 examples") {
  CHECK(rotate90(rows({{2, 2, 2}}), Rotation::Clockwise) == rows({{2}, {2}, {2}}));
  CHECK(rotate90(rows({{1, 0}, {0, 2}}), Rotation::Clockwise) == rows({{0, 1}, {2, 0}}));
  CHECK(rotate90(rows({{1, 2, 3}, {4, 5, 6}}), Rotation::Clockwise) == rows({{4, 1}, {5, 2}, {6, 3}}));
  CHECK(rotate90(rows({{1, 2, 3}, {4, 5, 6}}), Rotation::Counterclockwise) == rows({{3, 6}, {2, 5}, {1, 4}}));
}

TEST_CASE("rotation properties") {
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const Grid g = testing::random_grid(rng, 12, 12);
    Grid r = g;
    for (int k = 0; k < 4; ++k) r = rotate90(r, Rotation::Clockwise);
    CHECK(r == g);
    CHECK(rotate90(rotate90(g, Rotation::Clockwise), Rotation::Counterclockwise) == g);
    const Grid cw = rotate90(g, Rotation::Clockwise);
    CHECK(cw.height() == g.width());
    CHECK(cw.width() == g.height());
    CHECK(cw.histogram() == g.histogram());
    // clockwise: result[r][c] = g[h-1-c][r]
    for (int rr = 0; rr < cw.height(); ++rr) {
      for (int cc = 0; cc < cw.width(); ++cc) CHECK(cw.at(rr, cc) == g.at(g.height() - 1 - cc, rr));
    }
  }
}

TEST_CASE("rotate_task rotates every grid and tags the id") {
  Task t{"abc", {{rows({{1, 0, 0}}), rows({{0, 1, 0}})}}, {{rows({{7}}), rows({{8}})}}};
  const Task v = rotate_task(t, Rotation::Clockwise);
  CHECK(v.id == "abc__rot90cw");
  CHECK(v.train[0].input == rows({{1}, {0}, {0}}));
  CHECK(v.test[0].input == rows({{7}}));
  Task back = rotate_task(rotate_task(rotate_task(v, Rotation::Clockwise), Rotation::Clockwise), Rotation::Clockwise);
  CHECK(back.train == t.train);
  CHECK(back.test == t.test);
  CHECK(rotate_task(t, Rotation::Counterclockwise).id == "abc__rot90ccw");
}

TEST_CASE("grids_equal") {
  CHECK(grids_equal(rows({{1, 2}}), rows({{1, 2}})));
  CHECK_FALSE(grids_equal(rows({{1, 1, 1}}), rows({{1}, {1}, {1}})));
  CHECK_FALSE(grids_equal(rows({{1, 2}}), rows({{1, 3}})));
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Grid a = testing::random_grid(rng, 3, 3, 3);
    const Grid b = testing::random_grid(rng, 3, 3, 3);
    const Grid c = testing::random_grid(rng, 3, 3, 3);
    CHECK(grids_equal(a, a));
    CHECK(grids_equal(a, b) == grids_equal(b, a));
    if (grids_equal(a, b) && grids_equal(b, c)) CHECK(grids_equal(a, c));
  }
}

TEST_CASE("canonical palette") {
  const auto& p = Palette::canonical();
  const char* words[] = {"black", "blue", "red", "green", "yellow", "grey", "purple", "orange", "cyan", "brown"};
  for (int i = 0; i < 10; ++i) {
    CHECK(p.word(Color(i)) == words[i]);
    CHECK(p.lookup(words[i]) == Color(i));
  }
  CHECK(p.lookup("CYAN") == Color(8));
  CHECK_FALSE(p.lookup("magenta").has_value());
}

TEST_CASE("palette overrides are validated") {
  const Palette p = Palette::from_json(
      R"({"0":"noir","1":"bleu","2":"rouge","3":"vert","4":"jaune","5":"gris","6":"violet","7":"orange","8":"cyan","9":"marron"})");
  CHECK(p.word(Color(2)) == "rouge");
  CHECK_THROWS_AS(Palette::from_json(R"({"0":"black"})"), SchemaError);
  CHECK_THROWS_AS(Palette::from_json(
                      R"({"0":"a","1":"a","2":"c","3":"d","4":"e","5":"f","6":"g","7":"h","8":"i","9":"j"})"),
                  SchemaError);
  CHECK_THROWS_AS(Palette::from_json(
                      R"({"0":"a|b","1":"b","2":"c","3":"d","4":"e","5":"f","6":"g","7":"h","8":"i","9":"j"})"),
                  SchemaError);
  CHECK_THROWS_AS(Palette::from_json(
                      R"({"0":"a1","1":"b","2":"c","3":"d","4":"e","5":"f","6":"g","7":"h","8":"i","9":"j"})"),
                  SchemaError);
}

TEST_CASE("load_dataset uses file stems, skips the manifest and rejects duplicate ids") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "arcllm_dataset_test";
  fs::remove_all(dir);
  fs::create_directories(dir / "a");
  fs::create_directories(dir / "b");
  const std::string doc = R"({"train":[{"input":[[1]],"output":[[2]]}],"test":[{"input":[[1]],"output":[[2]]}]})";
  std::ofstream(dir / "a" / "t2.json") << doc;
  std::ofstream(dir / "b" / "t1.json") << doc;
  std::ofstream(dir / "manifest.json") << "{}";
  const auto tasks = load_dataset(dir);
  REQUIRE(tasks.size() == 2);
  CHECK(tasks[0].id == "t1");
  CHECK(tasks[1].id == "t2");
  std::ofstream(dir / "b" / "t2.json") << doc;
  CHECK_THROWS_AS(load_dataset(dir), SchemaError);
  std::ofstream(dir / "b" / "t2.json") << "[1,2";
  CHECK_THROWS_WITH_AS(load_dataset(dir), doctest::Contains("t2.json"), SchemaError);
  fs::remove_all(dir);
}
