// SPDX-License-Identifier: Apache-2.0
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;  // stdout and stderr interleaved
};

Run run(const std::string& args) {
  const std::string cmd = std::string(XLT_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("xlt_cli_" + std::to_string(getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const char* kTinyConfig =
    "num_layers = 2\nhidden_dim = 8\nnum_heads = 2\nffn_dim = 16\n"
    "max_epochs = 2\npatience = 2\nbatch_size = 8\nteacher_warmup_epochs = 1\n";

}  // namespace

TEST_CASE("help exits zero") {
  auto r = run("--help");
  CHECK(r.code == 0);
  CHECK(r.out.find("train") != std::string::npos);
  CHECK(r.out.find("gradcheck") != std::string::npos);
}

TEST_CASE("usage errors exit nonzero with a useful message") {
  auto missing = run("train --config /nonexistent/run.cfg --in a --val b --out c");
  CHECK(missing.code != 0);
  CHECK(missing.out.find("/nonexistent/run.cfg") != std::string::npos);

  auto flag = run("train --bogus 1 --in a --val b --out c");
  CHECK(flag.code != 0);
  CHECK(flag.out.find("--bogus") != std::string::npos);

  CHECK(run("").code != 0);

  TempDir tmp;
  std::ofstream(tmp / "bad.cfg") << "seed = 1\nlearning_rat = 0.1\n";
  auto bad = run("train --config " + tmp / "bad.cfg" + " --in a --val b --out c");
  CHECK(bad.code != 0);
  CHECK(bad.out.find("bad.cfg:2") != std::string::npos);
}

TEST_CASE("translit subcommand") {
  TempDir tmp;
  std::ofstream(tmp / "in.txt") << "मदद चाहिए।\nबारिश\n";
  auto r = run("translit --table " + std::string(XLT_DATA_DIR) + "/tables/devanagari_latin.tsv --in " +
               tmp / "in.txt" + " --out " + tmp / "out.txt");
  CHECK(r.code == 0);
  CHECK(slurp(tmp / "out.txt") == "madad chaahie.\nbaarish\n");
  CHECK(r.out.find("unmapped codepoints: 0") != std::string::npos);

  auto retain = run("translit --schwa retain --table " + std::string(XLT_DATA_DIR) +
                    "/tables/devanagari_latin.tsv --in " + tmp / "in.txt");
  CHECK(retain.out.find("madada") != std::string::npos);
}

TEST_CASE("end-to-end pipeline on a small synthetic task") {
  TempDir tmp;
  std::ofstream(tmp / "tiny.cfg") << kTinyConfig;
  REQUIRE(run("synth --seed 3 --train 40 --val 16 --test 16 --out " + tmp / "task").code == 0);

  // Re-deriving the triplets from the raw corpus reproduces the shipped ones.
  auto aug = run("augment --in " + tmp / "task/train_corpus.jsonl" + " --lexicon " + tmp / "task/lexicon.tsv" +
                 " --table " + tmp / "task/cipher_table.tsv" + " --out " + tmp / "train.jsonl");
  REQUIRE(aug.code == 0);
  CHECK(slurp(tmp / "train.jsonl") == slurp(tmp / "task/train.jsonl"));

  const std::string train_args = "train --config " + tmp / "tiny.cfg" + " --mode joint_ts --alpha 0.5 --seed 4 --in " +
                                 tmp / "train.jsonl" + " --val " + tmp / "task/val.jsonl";
  auto tr = run(train_args + " --out " + tmp / "run");
  REQUIRE(tr.code == 0);
  CHECK(tr.out.find("alpha = 0.5") != std::string::npos);
  CHECK(tr.out.find("mode = joint_ts") != std::string::npos);
  for (const char* f : {"checkpoint.json", "teacher.json", "warm_start.json", "history.jsonl", "config.txt"}) {
    CHECK(fs::exists(tmp.path / "run" / f));
  }
  REQUIRE(run(train_args + " --out " + tmp / "run2").code == 0);
  CHECK(slurp(tmp / "run/checkpoint.json") == slurp(tmp / "run2/checkpoint.json"));
  CHECK(slurp(tmp / "run/history.jsonl") == slurp(tmp / "run2/history.jsonl"));

  auto ev = run("eval --checkpoint " + tmp / "run/checkpoint.json" + " --in " + tmp / "task/test.jsonl" +
                " --out " + tmp / "metrics.json");
  REQUIRE(ev.code == 0);
  auto metrics = nlohmann::json::parse(slurp(tmp / "metrics.json"));
  CHECK(metrics.contains("weighted_f1"));
  CHECK(metrics["n"] == 16);

  auto pr = run("project --checkpoint " + tmp / "run/checkpoint.json" + " --in " + tmp / "task/test.jsonl" +
                " --out " + tmp / "proj.csv");
  REQUIRE(pr.code == 0);
  const auto csv = slurp(tmp / "proj.csv");
  CHECK(csv.rfind("x,y,tag\n", 0) == 0);
  CHECK(csv.find(",romanized\n") != std::string::npos);

  auto sw = run("sweep --config " + tmp / "tiny.cfg" + " --mode tl --in " + tmp / "train.jsonl" + " --val " +
                tmp / "task/val.jsonl" + " --test " + tmp / "task/test.jsonl" + " --out " + tmp / "sweep.jsonl");
  REQUIRE(sw.code == 0);
  std::ifstream rows(tmp / "sweep.jsonl");
  std::string line;
  std::size_t k = 0;
  while (std::getline(rows, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j["k"] == k++);
    CHECK(j["weighted_f1"].is_number());
  }
  CHECK(k == 3);
}

TEST_CASE("gradcheck subcommand") {
  auto r = run("gradcheck --instances 2");
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS pipeline") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
