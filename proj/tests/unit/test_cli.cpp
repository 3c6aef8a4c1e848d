#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "slosh/cli.hpp"
#include "slosh/errors.hpp"

using namespace slosh;

namespace {

namespace fs = std::filesystem;

struct Workspace {
  fs::path dir;
  explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / ("slosh_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  fs::path config(const std::string& json) const {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << json;
    return p;
  }
};

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "slosh");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int line_count(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

const char* kDisk = R"({"container": {"shape": "disk", "radius": 1, "depth": 1, "resolution": 3}, "layers": 3, )";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing") {
    const auto cfg = parse_config(
        R"({"container": {"shape": "rectangle", "Lx": 2, "Ly": 1, "depth": 0.5, "resolution": 4},
            "Bo": 10, "modes": 3, "formulation": "reduced", "sweep_Bo": [1, "inf"], "seed": 7})");
    CHECK(cfg.container.shape == Shape::Rectangle);
    CHECK(cfg.container.lx == 2.0);
    CHECK(cfg.bond == BondNumber::finite(10.0));
    CHECK(cfg.modes == 3);
    CHECK(cfg.layers == default_layers(cfg.container));
    CHECK(cfg.layers == 1);
    CHECK(cfg.formulation == Formulation::Reduced);
    CHECK(cfg.sweep_bonds.size() == 2);
    CHECK(cfg.sweep_bonds[1].is_infinite());
    CHECK(cfg.seed == 7);

    const auto inf = parse_config(R"({"container": {"shape": "disk", "radius": 1, "depth": 1, "resolution": 4},
                                      "Bo": "inf"})");
    CHECK(inf.bond.is_infinite());
    CHECK(inf.layers == 4);

    const std::vector<std::string> bad{
        "not json",
        R"({"container": {"shape": "disk", "radius": 1, "depth": 1, "resolution": 4}, "colour": 1})",
        R"({"container": {"shape": "cone", "radius": 1, "depth": 1, "resolution": 4}})",
        R"({"container": {"shape": "disk", "radius": -1, "depth": 1, "resolution": 4}})",
        R"({"container": {"shape": "disk", "radius": 1, "depth": 1, "resolution": 4}, "Bo": -3})",
        R"({"container": {"shape": "disk", "radius": 1, "depth": 1, "resolution": 4}, "modes": 0})",
        R"({"container": {"shape": "disk", "radius": 1, "depth": 1, "resolution": 4}, "modes": 2.5})",
        R"({"container": {"shape": "disk", "radius": 1, "depth": 1, "resolution": 4}, "refinements": 6})",
        R"({"container": {"shape": "disk", "radius": 1, "depth": 1, "resolution": 4}, "formulation": "mixed"})",
        R"({"container": {"shape": "disk", "radius": 1, "depth": 1, "resolution": 4}, "sweep_Bo": []})",
        R"({"Bo": 1})"};
    for (const auto& text : bad) {
      CAPTURE(text);
      CHECK_THROWS_AS(parse_config(text), InvalidSpec);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), InvalidSpec);
  }

  TEST_CASE("solve writes the spectrum and agrees across formulations") {
    Workspace ws("solve");
    const auto cfg = ws.config(std::string(kDisk) + R"("Bo": 10, "modes": 5})");
    const auto r = run({"solve", "--config", cfg.string(), "--out", (ws.dir / "out").string()});
    CHECK(r.code == 0);
    const std::string csv = slurp(ws.dir / "out" / "spectrum.csv");
    CHECK(line_count(csv) == 6);
    CHECK(line_count(slurp(ws.dir / "out" / "spectrum_reduced.csv")) == 6);
    CHECK(fs::exists(ws.dir / "out" / "mode_005_surface.vtk"));
    CHECK(fs::exists(ws.dir / "out" / "mode_001_volume.vtk"));
    CHECK(slurp(ws.dir / "out" / "equivalence.txt").rfind("equivalence max_rel_diff=", 0) == 0);
    CHECK(line_count(slurp(ws.dir / "out" / "energy_report.txt")) == 5);

    // repeat runs are byte-identical
    const auto again = run({"solve", "--config", cfg.string(), "--out", (ws.dir / "again").string()});
    CHECK(again.code == 0);
    CHECK(slurp(ws.dir / "again" / "spectrum.csv") == csv);
    CHECK(slurp(ws.dir / "again" / "mode_002_surface.vtk") == slurp(ws.dir / "out" / "mode_002_surface.vtk"));
  }

  TEST_CASE("verify passes, and fails with an injected fault") {
    Workspace ws("verify");
    const auto good = ws.config(std::string(kDisk) + R"("Bo": 10, "modes": 4})");
    const auto r = run({"verify", "--config", good.string(), "--out", (ws.dir / "ok").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("CHECK cross-orthogonality PASS") != std::string::npos);
    CHECK(fs::exists(ws.dir / "ok" / "verify.json"));

    const auto faulty = ws.config(std::string(kDisk) + R"("Bo": 10, "modes": 4, "fault": "sign-flip"})");
    const auto f = run({"verify", "--config", faulty.string(), "--out", (ws.dir / "bad").string()});
    CHECK(f.code == 1);
    CHECK(f.out.find("CHECK cross-orthogonality FAIL") != std::string::npos);
  }

  TEST_CASE("usage and config errors exit with 2") {
    Workspace ws("usage");
    const auto cfg = ws.config(std::string(kDisk) + R"("modes": 0})");
    CHECK(run({"solve", "--config", cfg.string()}).code == 2);
    CHECK(run({"solve", "--config", (ws.dir / "missing.json").string()}).code == 2);
    CHECK(run({"solve"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    const auto ok = ws.config(std::string(kDisk) + R"("modes": 2})");
    CHECK(run({"solve", "--config", ok.string(), "--bo", "-1"}).code == 2);
    CHECK(run({"solve", "--config", ok.string(), "--formulation", "mixed"}).code == 2);
    CHECK(run({"convergence", "--config", ok.string(), "--out", (ws.dir / "c").string()}).code == 2);
  }

  TEST_CASE("sweep tracks modes and frequencies fall with the Bond number") {
    Workspace ws("sweep");
    const auto cfg = ws.config(std::string(kDisk) + R"("modes": 3, "sweep_Bo": [100, 1, "inf", 10]})");
    const auto r = run({"sweep", "--config", cfg.string(), "--out", ws.dir.string()});
    CHECK(r.code == 0);
    std::istringstream csv(slurp(ws.dir / "sweep.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "Bo,mode_index,omega,tracking_overlap");
    std::vector<std::string> bonds;
    std::vector<double> first;
    while (std::getline(csv, line)) {
      const auto c1 = line.find(','), c2 = line.find(',', c1 + 1), c3 = line.find(',', c2 + 1);
      if (line.substr(c1 + 1, c2 - c1 - 1) != "1") continue;
      bonds.push_back(line.substr(0, c1));
      first.push_back(std::stod(line.substr(c2 + 1, c3 - c2 - 1)));
    }
    CHECK(bonds == std::vector<std::string>{"1", "10", "100", "inf"});
    REQUIRE(first.size() == 4);
    for (std::size_t i = 1; i < first.size(); ++i) CHECK(first[i] < first[i - 1]);
  }

  TEST_CASE("perturb writes one row per simple mode") {
    Workspace ws("perturb");
    const auto cfg = ws.config(std::string(kDisk) + R"("modes": 2})");
    const auto r = run({"perturb", "--config", cfg.string(), "--out", ws.dir.string()});
    CAPTURE(r.out);
    CAPTURE(r.err);
    CHECK((r.code == 0 || r.code == 1));
    const std::string csv = slurp(ws.dir / "perturbation.csv");
    CHECK(csv.rfind("mode_index,omega0,slope_formula,slope_fd,rel_error\n", 0) == 0);
    CHECK(line_count(csv) >= 2);
  }

  TEST_CASE("convergence reaches second order on disk and rectangle") {
    Workspace ws("convergence");
    const auto disk = ws.config(
        R"({"container": {"shape": "disk", "radius": 1, "depth": 1, "resolution": 2}, "layers": 2, "refinements": 2})");
    const auto r = run({"convergence", "--config", disk.string(), "--out", (ws.dir / "disk").string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(ws.dir / "disk" / "dispersion.csv"));
    CHECK(line_count(slurp(ws.dir / "disk" / "convergence.csv")) == 4);
    const auto pos = r.out.find("fitted_order=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(r.out.substr(pos + 13)) >= 1.5);

    const auto rect = convergence_study(ContainerSpec::rectangle(2, 1, 1, 2), 2, BondNumber::finite(10.0), 2);
    CHECK(rect.levels.back().rel_error < rect.levels.front().rel_error);
    CHECK(rect.fitted_order >= 1.5);
    CHECK_THROWS_AS(convergence_study(ContainerSpec::rectangle(2, 1, 1, 2), 2, BondNumber::infinite(), 0),
                    InvalidArgument);
  }

  TEST_CASE("monotonicity command") {
    Workspace ws("monotonicity");
    const auto cfg = ws.config(std::string(kDisk) + R"("Bo": 10, "compare_depth": 0.4})");
    const auto r = run({"monotonicity", "--config", cfg.string(), "--out", ws.dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("CHECK domain-monotonicity PASS") != std::string::npos);
    CHECK(r.out.rfind("h_shallow=0.40000000000000002", 0) == 0);
  }
}
