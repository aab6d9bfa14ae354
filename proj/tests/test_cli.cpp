#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bibd/design.hpp"
#include "bibd/sstensor.hpp"
#include "doctest.h"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(BIBD_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

using Record = std::map<std::string, std::string>;

// One record per line of space-separated key=value tokens; throws on anything else.
std::vector<Record> parse_machine(const std::string& text) {
  std::vector<Record> out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    Record rec;
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0) throw std::runtime_error("bad token '" + tok + "'");
      rec[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("bibd_cli_test_" + name);
}

}  // namespace

TEST_CASE("cli catalog") {
  const auto r = run_cli("catalog --format machine");
  CHECK(r.code == 0);
  const auto recs = parse_machine(r.out);
  REQUIRE(recs.size() == 6);
  for (const auto& rec : recs) {
    const auto& d = bibd::catalog(rec.at("name"));
    CHECK(std::stoi(rec.at("r")) == d.r());
    CHECK(std::stoi(rec.at("b")) == d.b());
  }
}

TEST_CASE("cli validate") {
  CHECK(run_cli("validate fano-7-3-1").code == 0);

  const auto path = temp_file("broken.bibd");
  std::ofstream(path) << "4 2 1\n0 1\n0 1\n0 2\n0 3\n1 2\n1 3\n";
  const auto r = run_cli("validate " + path.string() + " --format machine");
  CHECK(r.code == 1);
  const auto recs = parse_machine(r.out);
  REQUIRE_FALSE(recs.empty());
  CHECK(recs[0].at("valid") == "false");
  bool dup = false;
  for (const auto& rec : recs)
    if (rec.count("violation") && rec.at("violation") == "duplicate-block") dup = true;
  CHECK(dup);
  std::filesystem::remove(path);
}

TEST_CASE("cli usage errors") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("verify fano-7-3-1 --no-such-flag").code == 2);
  CHECK(run_cli("verify no-such-design").code == 2);
  CHECK(run_cli("tensors fano-7-3-1 X").code == 2);
  CHECK(run_cli("verify fano-7-3-1 --format yaml").code == 2);
}

TEST_CASE("cli generate") {
  const auto path = temp_file("gen.bibd");
  const auto r = run_cli("generate --v 7 --k 3 --lambda 1 --seed 2 --out " + path.string());
  CHECK(r.code == 0);
  const auto d = bibd::Design::from_raw(bibd::read_design_file(path.string()));
  CHECK(d.params() == bibd::derive_parameters(7, 3, 1));
  CHECK(run_cli("generate --v 6 --k 3 --lambda 2 --budget 10").code == 1);
  std::filesystem::remove(path);
}

TEST_CASE("cli tensors") {
  const auto r = run_cli("tensors pairs-4-2-1 P");
  CHECK(r.code == 0);
  const auto t = bibd::parse_tensor_dump(r.out);
  CHECK(t.nnz() == 4);
  for (const auto& [key, value] : t.entries()) {
    CHECK(key[0] == key[1]);
    CHECK(value == 6.0);
  }
  const auto q = bibd::parse_tensor_dump(run_cli("tensors fano-7-3-1 Q").out);
  CHECK(q == bibd::signless_characterization_tensor(bibd::catalog("fano-7-3-1")));
}

TEST_CASE("cli spectra") {
  const auto r = run_cli("spectra fano-7-3-1 Q --method nqz --format machine");
  CHECK(r.code == 0);
  const auto recs = parse_machine(r.out);
  REQUIRE_FALSE(recs.empty());
  CHECK(recs[0].at("value") == "24.0");
  CHECK(recs[0].at("seed") == "0");

  const auto p = parse_machine(run_cli("spectra fano-7-3-1 P --method nqz").out);
  REQUIRE(p.size() == 1);
  CHECK(p[0].at("status") == "no-h-eigenpair-found");

  const auto all = parse_machine(run_cli("spectra pairs-4-2-1 Q --restarts 2 --seed 3").out);
  int jacobi = 0;
  for (const auto& rec : all) {
    if (rec.count("seed")) CHECK(rec.at("seed") == "3");
    jacobi += rec.at("method") == "jacobi";
  }
  CHECK(jacobi == 4);
}

TEST_CASE("cli verify machine output round-trips and is deterministic") {
  const auto a = run_cli("verify fano-7-3-1 --seed 7 --format machine");
  CHECK(a.code == 0);
  const auto recs = parse_machine(a.out);
  REQUIRE(recs.size() == 4);
  const char* clauses[] = {"a", "b", "c", "d"};
  for (int i = 0; i < 4; ++i) {
    CHECK(recs[i].at("clause") == clauses[i]);
    CHECK(recs[i].at("seed") == "7");
    for (const char* key : {"verdict", "measured", "expected", "tol", "method"}) CHECK(recs[i].count(key) == 1);
  }
  CHECK(recs[1].at("measured") == "24.0");
  CHECK(recs[1].at("expected") == "24.0");
  CHECK(run_cli("verify fano-7-3-1 --seed 7 --format machine").out == a.out);
}

TEST_CASE("cli config file") {
  const auto path = temp_file("run.cfg");
  std::ofstream(path) << "# solver settings\nseed = 5\nrestarts=4\n";
  const auto recs = parse_machine(run_cli("verify pairs-4-2-1 --format machine --config " + path.string()).out);
  REQUIRE(recs.size() == 4);
  CHECK(recs[0].at("seed") == "5");
  const auto over = parse_machine(
      run_cli("verify pairs-4-2-1 --format machine --seed 9 --config " + path.string()).out);
  REQUIRE(over.size() == 4);
  CHECK(over[0].at("seed") == "9");

  std::ofstream(path) << "colour=blue\n";
  CHECK(run_cli("verify pairs-4-2-1 --config " + path.string()).code == 2);
  std::filesystem::remove(path);
}
