// Copyright 2026 The geoperc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "geoperc/cli.h"

#include <sstream>

#include "doctest.h"
#include "geoperc/artifacts.h"
#include "test_support.h"

namespace geoperc {
namespace {

using testing::slurp;
using testing::spit;
using testing::TempDir;
using testing::tree_bytes;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "geoperc");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::vector<std::string> lines(const std::string &text) {
  std::vector<std::string> result;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) result.push_back(line);
  return result;
}

// A synthetic corpus and a model built from it, shared by the tests below.
struct Fixture {
  TempDir dir{"cli"};
  std::string posts = (dir / "posts.jsonl").string();
  std::string model = (dir / "model").string();
  const std::string bbox = "40.69,-74.03,40.75,-73.96";

  Fixture() {
    const Outcome s = call({"synth", "--out", posts, "--seed", "7", "--bbox", bbox,
                            "--posts-per-cell", "120", "--planted-row", "2", "--planted-col", "8"});
    REQUIRE(s.code == 0);
    const Outcome b = call({"build", "--in", posts, "--bbox", bbox, "--rows", "10", "--cols", "10",
                            "--out", model});
    REQUIRE(b.code == 0);
  }
};

TEST_CASE("build writes a model and reports") {
  Fixture f;
  CHECK(std::filesystem::exists(f.dir / "model/manifest.json"));
  const Outcome b = call({"build", "--in", f.posts, "--bbox", f.bbox, "--out",
                          (f.dir / "again").string()});
  CHECK(b.code == 0);
  CHECK(b.err.empty());
  CHECK(b.out.find("accepted posts: 12000") != std::string::npos);
  CHECK(b.out.find("misc-mapped words (mean per cell): ") != std::string::npos);
  CHECK(b.out.find("occupied cells: 100 of 100") != std::string::npos);
  // Defaults are 10x10 and the default build is deterministic.
  CHECK(tree_bytes(f.dir / "model") == tree_bytes(f.dir / "again"));
  const ModelManifest m = read_manifest(f.dir / "model");
  CHECK(m.rows == 10);
  CHECK(m.cols == 10);
  CHECK(m.prep.stopword_size == 200);
  CHECK(m.prep.singleton_threshold == 1);
  CHECK(m.config.mode == EstimatorMode::kMknNormalizing);
  CHECK(m.config.lambda1 == 0.5);
}

TEST_CASE("query prints ranked cells and renderings") {
  Fixture f;
  const Outcome q = call({"query", "--model", f.model, "--phrase", "power outage", "--top", "3"});
  REQUIRE(q.code == 0);
  const auto ranked = lines(q.out);
  REQUIRE(ranked.size() == 4);
  CHECK(ranked[0] == "phrase: power outage");
  CHECK(ranked[1].rfind("2\t8\t", 0) == 0);

  const Outcome ascii =
      call({"query", "--model", f.model, "--phrase", "power outage", "--format", "ascii"});
  CHECK(ascii.code == 0);
  const auto rows = lines(ascii.out);
  CHECK(rows.size() == 10);
  for (const auto &row : rows) CHECK(row.size() == 10);

  const std::string geo = (f.dir / "map.geojson").string();
  CHECK(call({"query", "--model", f.model, "--phrase", "power outage", "--format", "geojson",
              "--output", geo})
            .code == 0);
  CHECK(nlohmann::json::parse(slurp(geo)).at("features").size() == 100);

  const Outcome ppm = call({"query", "--model", f.model, "--phrase", "power outage", "--format",
                            "ppm", "--cell-px", "8"});
  CHECK(ppm.code == 0);
  CHECK(ppm.out.rfind("P6\n80 80\n255\n", 0) == 0);
  CHECK(ppm.out.size() == std::string("P6\n80 80\n255\n").size() + 80 * 80 * 3);

  // Same argv, same bytes.
  CHECK(call({"query", "--model", f.model, "--phrase", "power outage", "--format", "ppm",
              "--cell-px", "8"})
            .out == ppm.out);
}

TEST_CASE("error exits") {
  Fixture f;
  Outcome o = call({"query", "--model", f.model, "--phrase", ""});
  CHECK(o.code == kExitData);
  CHECK(o.err.rfind("error[empty-query]:", 0) == 0);

  o = call({"query", "--model", f.model, "--phrase", "#only @tags"});
  CHECK(o.code == kExitData);
  CHECK(o.err.rfind("error[empty-query]:", 0) == 0);

  o = call({"build", "--in", (f.dir / "absent.jsonl").string(), "--bbox", f.bbox, "--out",
            (f.dir / "x").string()});
  CHECK(o.code == kExitIo);
  CHECK(o.err.rfind("error[", 0) == 0);

  o = call({"query", "--model", (f.dir / "nowhere").string(), "--phrase", "power"});
  CHECK(o.code == kExitIo);
  CHECK(o.err.rfind("error[", 0) == 0);

  std::filesystem::create_directories(f.dir / "hollow");
  o = call({"query", "--model", (f.dir / "hollow").string(), "--phrase", "power"});
  CHECK(o.code == kExitIo);
  CHECK(o.err.rfind("error[missing-manifest]:", 0) == 0);

  o = call({"build", "--in", f.posts, "--bbox", "41,-73,40,-74", "--out", (f.dir / "x").string()});
  CHECK(o.code == kExitUsage);
  CHECK(o.err.rfind("error[", 0) == 0);

  o = call({"build", "--in", f.posts, "--bbox", "1,2,3", "--out", (f.dir / "x").string()});
  CHECK(o.code == kExitUsage);

  o = call({"build", "--in", f.posts, "--bbox", "0,0,1,1", "--out", (f.dir / "x").string()});
  CHECK(o.code == kExitData);
  CHECK(o.err.rfind("error[empty-corpus]:", 0) == 0);

  o = call({"query", "--model", f.model, "--phrase", "power", "--format", "svg"});
  CHECK(o.code == kExitUsage);

  o = call({"build", "--rows", "3"});
  CHECK(o.code == kExitUsage);
  CHECK(o.err.rfind("error[usage]:", 0) == 0);

  o = call({});
  CHECK(o.code == kExitUsage);

  o = call({"frobnicate"});
  CHECK(o.code == kExitUsage);

  const std::string bad_lines = (f.dir / "bad.jsonl").string();
  spit(bad_lines, "garbage\n{\"text\":\"x\"}\n");
  o = call({"build", "--in", bad_lines, "--bbox", f.bbox, "--out", (f.dir / "x").string()});
  CHECK(o.code == kExitData);
  CHECK(o.err.rfind("error[empty-corpus]:", 0) == 0);
}

TEST_CASE("help on every subcommand") {
  const std::map<std::string, std::vector<std::string>> flags = {
      {"build",
       {"--in", "--bbox", "--rows", "--cols", "--out", "--mode", "--lambda1",
        "--unigram-denominator", "--single-token-rule", "--stopwords", "--singleton-threshold",
        "--lang", "--dedupe", "--created"}},
      {"query", {"--model", "--phrase", "--top", "--format", "--output", "--cell-px", "--mode"}},
      {"zoom", {"--model", "--row", "--col", "--rows", "--cols", "--out"}},
      {"synth",
       {"--out", "--seed", "--bbox", "--rows", "--cols", "--posts-per-cell", "--planted-row",
        "--planted-col", "--planted-factor"}},
      {"inspect", {"--model", "--row", "--col", "--top"}},
      {"serve", {"--model", "--bind", "--port", "--zoom-cache", "--no-cors"}},
  };
  const Outcome top = call({"--help"});
  CHECK(top.code == 0);
  for (const auto &[name, expected] : flags) {
    CAPTURE(name);
    CHECK(top.out.find(name) != std::string::npos);
    const Outcome help = call({name, "--help"});
    CHECK(help.code == 0);
    for (const auto &flag : expected) {
      CAPTURE(flag);
      CHECK(help.out.find(flag) != std::string::npos);
    }
  }
}

TEST_CASE("zoom and inspect") {
  Fixture f;
  const std::string child = (f.dir / "child").string();
  const Outcome z = call({"zoom", "--model", f.model, "--row", "2", "--col", "8", "--out", child});
  REQUIRE(z.code == 0);
  const ModelManifest parent = read_manifest(f.model);
  const ModelManifest zoomed = read_manifest(child);
  CHECK(zoomed.rows == 10);
  CHECK(zoomed.post_count == 120);
  CHECK(zoomed.created == parent.created);
  CHECK(zoomed.bbox == cell_bbox(make_grid(parent.bbox, 10, 10), {2, 8}));

  const Outcome again =
      call({"zoom", "--model", f.model, "--row", "2", "--col", "8", "--out", child + "2"});
  CHECK(again.code == 0);
  CHECK(tree_bytes(child) == tree_bytes(child + "2"));

  CHECK(call({"zoom", "--model", f.model, "--row", "10", "--col", "0", "--out", child + "3"})
            .code == kExitUsage);

  const Outcome i = call({"inspect", "--model", f.model, "--row", "2", "--col", "8", "--top", "5"});
  CHECK(i.code == 0);
  CHECK(i.out.find("cell 2,8: ") == 0);
  CHECK(i.out.find("power\toutage\t") != std::string::npos);
}

TEST_CASE("synth output is deterministic") {
  TempDir dir("synth");
  const Outcome a = call({"synth", "--out", (dir / "a.jsonl").string(), "--seed", "3", "--rows",
                          "4", "--cols", "4", "--posts-per-cell", "10"});
  const Outcome b = call({"synth", "--out", (dir / "b.jsonl").string(), "--seed", "3", "--rows",
                          "4", "--cols", "4", "--posts-per-cell", "10"});
  CHECK(a.code == 0);
  CHECK(a.out.find("planted cell: ") != std::string::npos);
  CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
  CHECK(lines(slurp(dir / "a.jsonl")).size() == 160);
}

}  // namespace
}  // namespace geoperc
