#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "sgspec/error.hpp"

using namespace sgspec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("sgspec_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

int invoke(std::vector<std::string> args, std::string* err = nullptr) {
  args.insert(args.begin(), "sgspec");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, e;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, e);
  if (err) *err = e.str();
  return code;
}

const char* bm_config = R"(
[potential]
family = buckingham_miller
[tolerances]
integrator = 1e-11
[output]
directory = out
prufer_csv = true
)";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing") {
    std::istringstream in(R"(
# comment
[potential]
family = breather_l1
peak = pi/2      # trailing comment
l1 = 2.5pi
[tolerances]
integrator = 1e-10
eigenvalue = 1e-9
[search]
region = annulus:0.1,10,0.02,3.1
symmetry = false
exclude = 0.0, 0.5, 0.1
[output]
directory = /tmp/x
trajectories = yes
)");
    const auto c = cli::parse_config(in);
    CHECK(c.potential.family == "breather_l1");
    CHECK(c.integrator_tol == 1e-10);
    CHECK(c.eigenvalue_threshold == 1e-9);
    CHECK_FALSE(c.use_symmetry);
    CHECK(c.region.r0 == 0.1);
    CHECK(c.region.excluded.size() == 1);
    CHECK(c.trajectories);
    CHECK(c.output_dir == "/tmp/x");
    const auto p = cli::build_potential(c.potential);
    CHECK(l1_sine_half(p).signed_value == doctest::Approx(2.5 * std::numbers::pi).epsilon(1e-9));
  }

  TEST_CASE("malformed configs are configuration errors") {
    const std::vector<std::string> bad{
        "[potential]\nfamily = nosuch\n",
        "[potential]\nfamily = sech_breather\npeak = 1.0\n",
        "[potential]\nfamily = sech_breather\npeak = one\nwidth = 1\n",
        "[potential]\nfamily = zero\nfamily = zero\n",
        "[potentials]\nfamily = zero\n",
        "family = zero\n",
        "[potential]\nfamily = zero\n[tolerances]\nintegrator = -1\n",
        "[potential]\nfamily = zero\n[search]\nregion = annulus:0.01,2,0.1,1\n",
        "[potential]\nfamily = sech_breather\npeak = 4\nwidth = 1\n",
        "[potential]\nfamily = buckingham_miller\ncolour = red\n",
        "[tolerances]\nintegrator = 1e-9\n",
    };
    for (const auto& text : bad) {
      INFO(text);
      const auto dir = scratch("bad");
      std::string err;
      CHECK(invoke({"count", write_config(dir, text).string()}, &err) == 1);
      const auto j = nlohmann::json::parse(err);
      CHECK(j["error"] == "ConfigError");
      CHECK(!j["message"].get<std::string>().empty());
    }
    std::string err;
    CHECK(invoke({"spectrum", "/nonexistent/run.cfg"}, &err) == 1);
    CHECK(invoke({"frobnicate", "x.cfg"}, &err) == 1);
  }

  TEST_CASE("spectrum run writes artifacts and is deterministic") {
    const auto dir = scratch("bm");
    const auto cfg = write_config(dir, bm_config);
    REQUIRE(invoke({"spectrum", cfg.string()}) == 0);
    const auto first = slurp(dir / "out" / "spectrum.json");
    CHECK(fs::exists(dir / "out" / "count.json"));
    CHECK(fs::exists(dir / "out" / "prufer.csv"));
    CHECK(fs::exists(dir / "out" / "scatter.csv"));
    REQUIRE(invoke({"spectrum", cfg.string()}) == 0);
    CHECK(first == slurp(dir / "out" / "spectrum.json"));

    const auto j = nlohmann::json::parse(first);
    REQUIRE(j["points"].size() == 1);
    const double re = j["points"][0]["z"][0], im = j["points"][0]["z"][1];
    CHECK(std::abs(re) < 1e-9);
    CHECK(std::abs(im - 1.0) < 1e-9);
    CHECK(j["verification"]["all_passed"] == true);
    // Doubles reload exactly.
    CHECK(nlohmann::json::parse(j.dump()) == j);
  }

  TEST_CASE("overrides and the count verb") {
    const auto dir = scratch("override");
    const auto cfg = write_config(dir, bm_config);
    const auto out = dir / "elsewhere";
    REQUIRE(invoke({"count", cfg.string(), "--out", out.string(), "--tol", "1e-10"}) == 0);
    CHECK(fs::exists(out / "count.json"));
    CHECK_FALSE(fs::exists(out / "spectrum.json"));
    REQUIRE(invoke({"spectrum", cfg.string(), "--out", out.string(), "--region", "rect:-0.5,0.5,0.5,1.5"}) == 0);
    const auto j = nlohmann::json::parse(slurp(out / "spectrum.json"));
    CHECK(j["search"]["region"]["kind"] == "rectangle");
    CHECK(j["points"].size() == 1);
    std::string err;
    CHECK(invoke({"spectrum", cfg.string(), "--region", "disk:1,2,3,4"}, &err) == 1);
  }

  TEST_CASE("prufer verb with trajectories") {
    const auto dir = scratch("prufer");
    const auto cfg = write_config(dir, "[potential]\nfamily = breather_l1\npeak = pi/2\nl1 = 3.5pi\n[output]\ndirectory = out\ntrajectories = true\n");
    REQUIRE(invoke({"prufer", cfg.string()}) == 0);
    CHECK(fs::exists(dir / "out" / "prufer.csv"));
    CHECK(fs::exists(dir / "out" / "prufer_trajectory_0.csv"));
    CHECK(fs::exists(dir / "out" / "prufer_trajectory_1.csv"));
  }

  TEST_CASE("verification failure exits with 2") {
    const auto dir = scratch("fail");
    const auto cfg = write_config(dir, "[potential]\nfamily = buckingham_miller\n[tolerances]\neigenvalue = 1e-40\n[output]\ndirectory = out\n");
    CHECK(invoke({"spectrum", cfg.string()}) == 2);
  }

  TEST_CASE("tabulated and modified potentials") {
    const auto dir = scratch("tab");
    write_tabulated(make_buckingham_miller(), (dir / "bm.dat").string(), 3001);
    const auto cfg = write_config(dir, "[potential]\nfamily = tabulated\nfile = bm.dat\n[output]\ndirectory = out\n");
    REQUIRE(invoke({"count", cfg.string()}) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "out" / "count.json"));
    CHECK(j["charge"] == -1);
    const auto c2 = write_config(dir, "[potential]\nfamily = monotone_kink\nscale = 2.5\nreflect = true\ntranslate = 4\n[output]\ndirectory = out2\n");
    REQUIRE(invoke({"spectrum", c2.string()}) == 0);
    const auto s = nlohmann::json::parse(slurp(dir / "out2" / "spectrum.json"));
    CHECK(s["points"].size() == 3);
  }
}
