#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "hornlab/render.hpp"
#include "hornlab/run.hpp"

using namespace hornlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
  json report() const { return json::parse(out); }
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hornlab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run_cli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hornlab_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("residue: success and JSON report") {
  const auto r = cli({"residue", "--map", "cauliflower"});
  CHECK(r.code == kExitOk);
  const auto doc = r.report();
  CHECK(doc.at("passed") == true);
  CHECK(doc.at("contour").size() == 3);
  CHECK(doc.at("config_hash").get<std::string>().size() == 16);
  CHECK(doc.at("gamma_formula") == json::array({1.0, 0.0}));
}

TEST_CASE("residue of a degenerate germ is a failure, not a usage error") {
  CHECK(cli({"residue", "--map", "blaschke-2"}).code == kExitFailure);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({"residue", "--map", "no-such-map"}).code == kExitUsage);
  CHECK(cli({"residue"}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"residue", "--map", "cauliflower", "--config", "{not json"}).code == kExitUsage);
  CHECK(cli({"residue", "--map", "cauliflower", "--config", R"({"bogus_key": 1})"}).code == kExitUsage);
  CHECK(cli({"residue", "--map", "cauliflower", "--config", R"({"series_order": 40})"}).code == kExitUsage);
  CHECK(cli({"conjugacy-verify", "--pair", "missing-pair"}).code == kExitUsage);
  CHECK(cli({"render", "--map", "cauliflower"}).code == kExitUsage);  // no --out
  CHECK(cli({"render", "--map", "cauliflower", "--kind", "spiral", "--out", scratch("kind").string()}).code ==
        kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("verification and domain failures exit with 1") {
  const auto r = cli({"expansion", "--map", "cauliflower", "--levels", "1.5,2,2.5"});
  CHECK(r.code == kExitFailure);
  CHECK(cli({"horn", "--map", "cauliflower", "--w", "0.3,0.5"}).code == kExitFailure);
}

TEST_CASE("horn, expansion, domain and fatou-check commands") {
  const auto h = cli({"horn", "--map", "cauliflower", "--w", "0.3,5"});
  CHECK(h.code == kExitOk);
  const auto e = cli({"expansion", "--map", "cauliflower", "--end", "minus", "--levels", "3.5,4,4.5"});
  CHECK(e.code == kExitOk);
  CHECK(e.report().at("passed") == true);
  const auto d = cli({"domain", "--map", "cauliflower", "--im-min", "3", "--im-max", "5", "--columns", "8", "--rows",
                      "8"});
  CHECK(d.code == kExitOk);
  CHECK(d.report().at("counts").at("converged") == 64);
  const auto f = cli({"fatou-check", "--map", "half-quadratic", "--samples", "100"});
  CHECK(f.code == kExitOk);
}

TEST_CASE("pair commands") {
  const auto v = cli({"conjugacy-verify", "--pair", "iterate2-cauliflower", "--im-min", "3", "--im-max", "4",
                      "--levels", "2", "--columns", "4", "--threads", "2"});
  CHECK(v.code == kExitOk);
  const auto b = cli({"build-phi", "--pair", "ab-blaschke-lambda2", "--samples", "25"});
  CHECK(b.code == kExitOk);
}

TEST_CASE("output files and thread independence of hashes and bytes") {
  const auto dir1 = scratch("t1"), dir8 = scratch("t8");
  const std::vector<std::string> base = {"render", "--map", "cauliflower", "--pixels-x", "128", "--pixels-y", "128"};
  auto with = [&](const fs::path& dir, const char* threads) {
    auto args = base;
    args.insert(args.end(), {"--out", dir.string(), "--threads", threads});
    return cli(args);
  };
  REQUIRE(with(dir1, "1").code == kExitOk);
  REQUIRE(with(dir8, "8").code == kExitOk);
  const auto p1 = slurp(dir1 / "render-cauliflower-basin.ppm");
  const auto p8 = slurp(dir8 / "render-cauliflower-basin.ppm");
  CHECK(p1.size() > 128 * 128 * 3);
  CHECK(p1 == p8);

  const auto r = cli({"residue", "--map", "cauliflower", "--out", dir1.string()});
  CHECK(r.code == kExitOk);
  const auto written = json::parse(slurp(dir1 / "residue-cauliflower.json"));
  CHECK(written.at("config_hash") == r.report().at("config_hash"));
  fs::remove_all(dir1);
  fs::remove_all(dir8);
}

TEST_CASE("unwritable output location exits with 1") {
  const auto dir = scratch("blocked");
  const auto blocker = dir / "file";
  std::ofstream(blocker) << "x";
  CHECK(cli({"residue", "--map", "cauliflower", "--out", (blocker / "sub").string()}).code == kExitFailure);
  fs::remove_all(dir);
}

TEST_CASE("run descriptor: same hash as the flags, threads excluded") {
  const auto dir = scratch("run");
  const auto file = dir / "run.json";
  std::ofstream(file) << R"({"command": "residue", "map": "cauliflower", "threads": 3})";
  const auto via_file = cli({"--run", file.string()});
  CHECK(via_file.code == kExitOk);
  const auto via_flags = cli({"residue", "--map", "cauliflower", "--threads", "7"});
  CHECK(via_file.report().at("config_hash") == via_flags.report().at("config_hash"));

  RunDescriptor d;
  d.command = "residue";
  d.map = json{{"ref", "cauliflower"}};
  d.complete();
  const std::string h = d.hash();
  d.threads = 12;
  d.out_dir = "/elsewhere";
  CHECK(d.hash() == h);
  d.params["samples"] = 512;
  CHECK(d.hash() != h);

  std::ofstream(dir / "bad.json") << R"({"command": "residue", "map": "cauliflower", "colour": 1})";
  CHECK(cli({"--run", (dir / "bad.json").string()}).code == kExitUsage);
  CHECK(cli({"--run", (dir / "absent.json").string()}).code == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("catalog override through the environment") {
  const auto dir = scratch("catalog");
  const auto file = dir / "catalog.json";
  std::ofstream(file) << R"({"maps": [{"id": "custom", "variant": "polynomial",
    "coefficients": [[1, 0], [1, 0], [0.5, 0]], "evaluation_radius": 4.0}], "pairs": []})";
  ::setenv("HORNLAB_CATALOG", file.string().c_str(), 1);
  const auto r = cli({"residue", "--map", "custom"});
  const auto missing = cli({"residue", "--map", "cauliflower"});
  std::ofstream(dir / "broken.json") << "{";
  ::setenv("HORNLAB_CATALOG", (dir / "broken.json").string().c_str(), 1);
  const auto broken = cli({"residue", "--map", "custom"});
  ::unsetenv("HORNLAB_CATALOG");
  CHECK(r.code == kExitOk);
  CHECK(r.report().at("gamma_formula") == json::array({0.5, 0.0}));
  CHECK(missing.code == kExitUsage);
  CHECK(broken.code == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("installed binary: exit codes through the process boundary") {
  const std::string bin = HORNLAB_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("residue --map cauliflower") == 0);
  CHECK(status("residue --map nope") == 2);
  CHECK(status("expansion --map cauliflower") == 1);
  CHECK(status("--help") == 0);
}
