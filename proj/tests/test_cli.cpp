#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "powidx/io.hpp"

using nlohmann::json;

namespace {

struct Run {
  int exit_code;
  std::string output;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(POWINDEX_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int status = pclose(pipe);
  return Run{WEXITSTATUS(status), out};
}

std::string tmp_path(const std::string& name) {
  return std::string("/tmp/powindex_test_") + name;
}

void write(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  f << content;
}

}  // namespace

TEST_CASE("indices: the EU-1957 game has a null player") {
  const std::string game = tmp_path("eu.json");
  write(game, R"({"weights":[4,4,4,2,2,1],"quota":12})");
  Run r = run_cli("indices --game " + game + " --kind shapley");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.output);
  CHECK(j["kind"] == "shapley");
  CHECK(j["values"][5] == 0.0);
}

TEST_CASE("indices: chow of majority, and the p = 1/2 reduction") {
  const std::string game = tmp_path("maj3.json");
  write(game, R"({"weights":[1,1,1],"threshold":0,"encoding":"pm1"})");
  Run chow = run_cli("indices --game " + game + " --kind chow");
  REQUIRE(chow.exit_code == 0);
  json a = json::parse(chow.output);
  CHECK(a["values"][1] == 0.5);
  Run half = run_cli("indices --game " + game + " --kind chow_p --p 0.5");
  json b = json::parse(half.output);
  for (int i = 0; i <= 3; ++i)
    CHECK(std::fabs(double(a["values"][i]) - double(b["values"][i])) <= 1e-12);
}

TEST_CASE("csv export carries the header") {
  const std::string game = tmp_path("g.json");
  const std::string csv = tmp_path("g.csv");
  write(game, R"({"weights":[2,1],"quota":2})");
  Run r = run_cli("indices --game " + game + " --kind shapley --csv " + csv +
                  " --out " + tmp_path("g_out.json"));
  REQUIRE(r.exit_code == 0);
  std::string text = powidx::io::read_file(csv);
  CHECK(text.rfind("index,value\n", 0) == 0);
}

TEST_CASE("reconstruct round trip: indices -> mask -> reconstruct") {
  const std::string game = tmp_path("dict.json");
  write(game, R"({"weights":[1,0,0,0,0,0],"threshold":0.5,"encoding":"pm1"})");
  const std::string idx = tmp_path("dict_chow.json");
  Run r1 = run_cli("indices --game " + game + " --kind chow --out " + idx);
  REQUIRE(r1.exit_code == 0);
  json chow = json::parse(powidx::io::read_file(idx));
  json partial;
  partial["kind"] = "chow";
  partial["n"] = 6;
  partial["indices"] = {1};
  partial["values"] = {chow["values"][1]};
  const std::string pfile = tmp_path("dict_partial.json");
  write(pfile, partial.dump());
  Run r2 = run_cli("reconstruct chow --input " + pfile + " --n 6 --eps 0.2 --seed 5");
  CHECK(r2.exit_code == 0);  // certified
  json res = json::parse(r2.output);
  CHECK(res["certified"] == true);
  CHECK(double(res["achieved_distance"]) <= 0.4);
}

TEST_CASE("reconstruct --paper-exact prints the parameter table and exits 0") {
  const std::string pfile = tmp_path("pp.json");
  write(pfile, R"({"kind":"shapley","n":8,"indices":[1],"values":[0.3]})");
  Run r = run_cli("reconstruct shapley --input " + pfile +
                  " --n 8 --eps 0.25 --paper-exact");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("tau*") != std::string::npos);
}

TEST_CASE("malformed JSON exits 2 with a location") {
  const std::string bad = tmp_path("bad.json");
  write(bad, "{\"weights\":[1,2\n");
  Run r = run_cli("indices --game " + bad + " --kind chow");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("line") != std::string::npos);
  CHECK(r.output.find("column") != std::string::npos);
}

TEST_CASE("sample-dshap writes the requested number of rows") {
  const std::string out = tmp_path("samples.csv");
  Run r = run_cli("sample-dshap -n 5 --count 37 --seed 3 --out " + out);
  REQUIRE(r.exit_code == 0);
  std::ifstream f(out);
  std::string line;
  int rows = 0;
  while (std::getline(f, line)) {
    ++rows;
    CHECK(line.find("1") != std::string::npos);
  }
  CHECK(rows == 37);
}

TEST_CASE("distance: identical games are at distance zero, and maj vs dictator") {
  const std::string a = tmp_path("a.json"), b = tmp_path("b.json");
  write(a, R"({"weights":[1,1,1],"threshold":0,"encoding":"pm1"})");
  write(b, R"({"weights":[1,0,0],"threshold":0.5,"encoding":"pm1"})");
  Run same = run_cli("distance --f " + a + " --g " + a + " --metric chow");
  CHECK(std::stod(same.output) == 0.0);
  Run d = run_cli("distance --f " + a + " --g " + b + " --metric chow");
  CHECK(std::stod(d.output) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
  Run h = run_cli("distance --f " + a + " --g " + b + " --metric hamming");
  CHECK(std::stod(h.output) == doctest::Approx(0.25));
}

TEST_CASE("determinism: identical inputs, seed, and config reproduce outputs") {
  const std::string game = tmp_path("det.json");
  write(game, R"({"weights":[3,2,2,1],"quota":5})");
  Run r1 = run_cli("indices --game " + game + " --kind shapley --estimate --gamma 0.3 "
                   "--delta 0.2 --seed 42");
  Run r2 = run_cli("indices --game " + game + " --kind shapley --estimate --gamma 0.3 "
                   "--delta 0.2 --seed 42");
  CHECK(r1.output == r2.output);
  Run r3 = run_cli("indices --game " + game + " --kind shapley --estimate --gamma 0.3 "
                   "--delta 0.2 --seed 43");
  CHECK(r1.output != r3.output);
  // thread-count invariance of the exact path
  Run t1 = run_cli("indices --game " + game + " --kind chow --threads 1");
  Run t2 = run_cli("indices --game " + game + " --kind chow --threads 4");
  CHECK(t1.output == t2.output);
}

TEST_CASE("manifest records the run") {
  const std::string game = tmp_path("man_game.json");
  const std::string out = tmp_path("man_out.json");
  const std::string manifest = tmp_path("manifest.json");
  write(game, R"({"weights":[2,1,1],"quota":3})");
  Run r = run_cli("--manifest " + manifest + " indices --game " + game +
                  " --kind chow --out " + out);
  REQUIRE(r.exit_code == 0);
  json m = json::parse(powidx::io::read_file(manifest));
  CHECK(m.contains("command"));
  CHECK(m.contains("input_digest"));
  CHECK(m["outputs"].size() == 1);
  // the recorded digest matches the bytes on disk
  CHECK(m["outputs"][0]["digest"] ==
        powidx::io::digest_hex(powidx::io::read_file(out)));
}

TEST_CASE("estimate subcommand") {
  const std::string game = tmp_path("est.json");
  write(game, R"({"weights":[1,1,1],"threshold":0,"encoding":"pm1"})");
  Run r = run_cli("estimate --game " + game + " --kind chow --indices 1,2 --eps 0.2 "
                  "--delta 0.1 --seed 9");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.output);
  CHECK(j["indices"].size() == 2);
}

TEST_CASE("config file sets defaults, flags win") {
  const std::string game = tmp_path("cfg_game.json");
  write(game, R"({"weights":[2,1,1],"quota":3})");
  const std::string cfg = tmp_path("powindex.cfg");
  write(cfg, "seed=7\n");
  Run a = run_cli("--config " + cfg + " indices --game " + game +
                  " --kind shapley --estimate --gamma 0.4 --delta 0.2");
  Run b = run_cli("indices --game " + game +
                  " --kind shapley --estimate --gamma 0.4 --delta 0.2 --seed 7");
  CHECK(a.output == b.output);
  Run c = run_cli("--config " + cfg + " --seed 8 indices --game " + game +
                  " --kind shapley --estimate --gamma 0.4 --delta 0.2");
  CHECK(a.output != c.output);  // the explicit flag overrides the file
}

TEST_CASE("selftest runs the requested criteria") {
  Run r = run_cli("selftest --criteria 1,2");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("PASS  1") != std::string::npos);
  CHECK(r.output.find("PASS  2") != std::string::npos);
}

TEST_CASE("reconstruct is reproducible run to run") {
  const std::string game = tmp_path("rr.json");
  write(game, R"({"weights":[3,3,1,1,1,1],"quota":6})");
  const std::string idx = tmp_path("rr_sh.json");
  REQUIRE(run_cli("indices --game " + game + " --kind shapley --out " + idx).exit_code == 0);
  json sh = json::parse(powidx::io::read_file(idx));
  json partial;
  partial["kind"] = "shapley";
  partial["n"] = 6;
  partial["indices"] = {1, 2, 3};
  partial["values"] = {sh["values"][0], sh["values"][1], sh["values"][2]};
  const std::string pfile = tmp_path("rr_partial.json");
  write(pfile, partial.dump());
  Run r1 = run_cli("reconstruct shapley --input " + pfile + " --n 6 --seed 11");
  Run r2 = run_cli("reconstruct shapley --input " + pfile + " --n 6 --seed 11");
  CHECK(r1.output == r2.output);
  CHECK(r1.exit_code == r2.exit_code);
}

TEST_CASE("kernel override is accepted") {
  const std::string game = tmp_path("k.json");
  write(game, R"({"weights":[1,1,1,1,1],"quota":3})");
  Run scalar = run_cli("indices --game " + game + " --kind chow --kernel scalar");
  Run avx = run_cli("indices --game " + game + " --kind chow --kernel avx2");
  CHECK(scalar.exit_code == 0);
  CHECK(avx.exit_code == 0);
  CHECK(scalar.output == avx.output);  // integer-exact path
}
