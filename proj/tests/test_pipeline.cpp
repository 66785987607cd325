#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "unemap/pipeline.hpp"
#include "unemap/text_io.hpp"

using namespace unemap;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("unemap_test_pipeline_" + name);
  fs::remove_all(d);
  return d;
}

PipelineConfig small_config(const fs::path& dir) {
  auto c = parse_config("[run]\nseed = 3\n[synthetic]\nn = 600\n[som]\nepochs = 8\n");
  c.output_dir = dir;
  return c;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "timings.json")
      files[e.path().filename().string()] = text::read_file(e.path());
  return files;
}

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = haystack.find(needle); p != std::string::npos; p = haystack.find(needle, p + 1)) ++n;
  return n;
}

std::size_t lines(const std::string& s) { return count_of(s, "\n"); }

}  // namespace

TEST_CASE("stage names and seeds") {
  for (auto n : {"ingest", "synth", "code", "train", "cluster", "profile", "transitions", "mca", "plot", "all"})
    CHECK(name_of(*stage_from_name(n)) == n);
  CHECK_FALSE(stage_from_name("bogus"));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(derive_seed(1, "synth") != derive_seed(2, "synth"));
  CHECK(derive_seed(1, "synth") != derive_seed(1, "train.init"));
  CHECK(derive_seed(5, "synth") == derive_seed(5, "synth"));
  const auto c = small_config("x");
  CHECK(expand(Stage::all, c).front() == Stage::synth);
  CHECK(expand(Stage::all, c).back() == Stage::plot);
  CHECK(expand(Stage::mca, c).size() == 1);
}

TEST_CASE("missing upstream artifacts exit with status 2") {
  const auto dir = fresh_dir("missing");
  const auto c = small_config(dir);
  std::ostringstream log;
  CHECK(run_command(Stage::train, c, log) == 2);
  CHECK(log.str().find("missing stage: code") != std::string::npos);
  log.str("");
  CHECK(run_command(Stage::code, c, log) == 2);
  CHECK(log.str().find("missing stage: synth") != std::string::npos);
}

TEST_CASE("invalid configuration exits with status 1") {
  auto c = small_config(fresh_dir("invalid"));
  c.k = 0;
  std::ostringstream log;
  CHECK(run_command(Stage::synth, c, log) == 1);
}

TEST_CASE("full run is deterministic and stages are idempotent") {
  const auto a = fresh_dir("a"), b = fresh_dir("b");
  std::ostringstream log;
  REQUIRE_MESSAGE(run_command(Stage::all, small_config(a), log) == 0, log.str());
  REQUIRE(run_command(Stage::all, small_config(b), log) == 0);
  const auto first = snapshot(a);
  CHECK(first == snapshot(b));

  const std::string partition = first.at("partition.csv");
  CHECK(lines(partition) == 101);
  for (const char* f : {"manifest.json", "spells.csv", "features.csv", "som.txt", "class_profiles.csv",
                        "mca_coordinates.csv", "significant_cells.csv", "fig_mca_1_2.svg"})
    CHECK(first.contains(f));
  CHECK(fs::exists(a / "timings.json"));
  for (const char* plane : {"fig_mca_1_2.svg", "fig_mca_1_3.svg"})
    CHECK(count_of(first.at(plane), "<circle class=\"modality\"") == 32);

  // rerunning a single stage rewrites identical files
  REQUIRE(run_command(Stage::cluster, small_config(a), log) == 0);
  CHECK(snapshot(a) == first);

  // a different seed changes the data
  auto other = small_config(b);
  other.seed = 4;
  REQUIRE(run_command(Stage::synth, other, log) == 0);
  CHECK(snapshot(b).at("spells.csv") != first.at("spells.csv"));
}

TEST_CASE("ingest from a file") {
  const auto src = fresh_dir("src");
  std::ostringstream log;
  REQUIRE(run_command(Stage::synth, small_config(src), log) == 0);
  const auto dir = fresh_dir("ingest");
  auto c = parse_config("[input]\npath = " + (src / "spells.csv").string() + "\n[som]\nepochs = 4\n");
  c.output_dir = dir;
  REQUIRE(run_command(Stage::ingest, c, log) == 0);
  REQUIRE(run_command(Stage::code, c, log) == 0);
  CHECK(text::read_file(dir / "spells.csv") == text::read_file(src / "spells.csv"));
  CHECK(lines(text::read_file(dir / "rejections.csv")) == 1);
}

#ifdef UNEMAP_CLI_PATH
TEST_CASE("command-line exit codes") {
  const auto dir = fresh_dir("cli");
  fs::create_directories(dir);
  const auto ini = dir / "run.ini";
  std::ofstream(ini) << "[synthetic]\nn = 300\n[som]\nepochs = 3\n[output]\ndir = " << (dir / "out").string() << "\n";
  const std::string cli = UNEMAP_CLI_PATH;
  auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("synth -c " + ini.string()) == 0);
  CHECK(run("train -c " + ini.string()) == 2);
  CHECK(run("code -c " + ini.string() + " --seed 5") == 0);
  CHECK(run("synth -c " + (dir / "absent.ini").string()) == 1);
  std::ofstream(dir / "bad.ini") << "[synthetic]\n[som]\nepoch = 3\n";
  CHECK(run("synth -c " + (dir / "bad.ini").string()) == 1);
}
#endif
