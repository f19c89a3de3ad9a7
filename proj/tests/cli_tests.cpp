// End-to-end checks of the relsim binary: exit codes, artifact presence,
// byte-identical reruns under --deterministic.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kScratch = RELSIM_TEST_TMPDIR;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RELSIM_CLI_PATH) + " " + args +
                          " > /dev/null 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = kScratch / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("satfit on the bundled fixture recovers the reference parameters") {
  const fs::path dir = fresh_dir("satfit");
  REQUIRE(run_cli("satfit --deterministic --out " + dir.string()) == 0);
  const json summary = json::parse(slurp(dir / "satfit.json"));
  CHECK(std::abs(summary["fit"]["A"].get<double>() - 31.0) < 0.5);
  CHECK(std::abs(summary["fit"]["I0"].get<double>() - 13.7) < 0.5);
  CHECK(summary["fit"]["converged"].get<bool>());
}

TEST_CASE("deplete with a zero intensity list yields a zero modulation column") {
  const fs::path dir = fresh_dir("deplete0");
  const fs::path cfg = dir / "cfg.json";
  write_file(cfg, R"({"schema":"relsim/1","deplete":{"fir_intensities":[0.0]}})");
  REQUIRE(run_cli("deplete --deterministic --config " + cfg.string() +
                  " --out " + dir.string()) == 0);
  const std::string csv = slurp(dir / "deplete.csv");
  CHECK(csv ==
        "fir_intensity_mw_cm2,depletion,modulation_percent\n0,0,0\n");
}

TEST_CASE("levels reports derived and override binding energies") {
  const fs::path dir = fresh_dir("levels");
  REQUIRE(run_cli("levels --deterministic --out " + dir.string()) == 0);
  const json report = json::parse(slurp(dir / "levels.json"));
  CHECK(std::abs(report["binding_mev"]["derived_hydrogenic"].get<double>() -
                 5.478) < 0.01);
  CHECK(report["binding_mev"]["effective"].get<double>() == 5.9);
  const auto& cls = report["classifications"];
  REQUIRE(cls.size() == 3);
  CHECK(cls[0]["class"] == "ionizing");
  CHECK(cls[1]["class"] != "ionizing");
  CHECK(cls[2]["class"] == "bound-bound-detuned");
}

TEST_CASE("levels with the hydrogen preset reports the free Rydberg") {
  const fs::path dir = fresh_dir("hydrogen");
  const fs::path cfg = dir / "cfg.json";
  write_file(cfg, R"({"schema":"relsim/1","material":{"preset":"hydrogen"},)"
                  R"("classify_mev":[14000.0]})");
  REQUIRE(run_cli("levels --deterministic --config " + cfg.string() +
                  " --out " + dir.string()) == 0);
  const json report = json::parse(slurp(dir / "levels.json"));
  CHECK(report["binding_mev"]["effective"].get<double>() ==
        doctest::Approx(13606.0));  // 13.606 eV
  CHECK(report["classifications"][0]["class"] == "ionizing");
}

TEST_CASE("readout default preset collects the photon budget") {
  const fs::path dir = fresh_dir("readout");
  REQUIRE(run_cli("readout --deterministic --trials 10000 --out " +
                  dir.string()) == 0);
  const json summary = json::parse(slurp(dir / "readout.json"));
  CHECK(std::abs(summary["mean_bright"].get<double>() - 10.0) < 0.5);
  CHECK(summary["result"]["fidelity"].get<double>() > 0.9);
}

TEST_CASE("reruns are byte-identical under --deterministic") {
  const fs::path a = fresh_dir("golden_a");
  const fs::path b = fresh_dir("golden_b");
  for (const std::string cmd :
       {std::string("spectrum"), std::string("scan"), std::string("deplete"),
        std::string("readout --trials 2000"), std::string("thermal"),
        std::string("relax")}) {
    REQUIRE(run_cli(cmd + " --deterministic --seed 5 --out " + a.string()) == 0);
    REQUIRE(run_cli(cmd + " --deterministic --seed 5 --out " + b.string()) == 0);
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const fs::path other = b / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
    ++compared;
  }
  CHECK(compared >= 12);  // csv + json per command
}

TEST_CASE("thermal CSV content is frozen") {
  const fs::path dir = fresh_dir("thermal");
  const fs::path cfg = dir / "cfg.json";
  write_file(cfg,
             R"({"schema":"relsim/1","thermal":{"temperatures_k":[2.0,5.0,15.0,20.0]}})");
  REQUIRE(run_cli("thermal --deterministic --config " + cfg.string() +
                  " --out " + dir.string()) == 0);
  CHECK(slurp(dir / "thermal.csv") ==
        "temperature_k,scale_factor\n"
        "2,1\n"
        "5,1\n"
        "15,0.142857142857\n"
        "20,0.1\n");
  const json summary = json::parse(slurp(dir / "thermal_summary.json"));
  CHECK(summary["delta_t_k"].get<double>() == doctest::Approx(0.2));
}

TEST_CASE("config errors exit with code 2") {
  const fs::path dir = fresh_dir("bad");
  const fs::path cfg = dir / "bad.json";
  write_file(cfg, R"({"schema":"relsim/1","rates":{"p_auger":2.0}})");
  CHECK(run_cli("deplete --config " + cfg.string() + " --out " + dir.string()) ==
        2);
  write_file(cfg, R"({"schema":"relsim/1","unknown_block":{}})");
  CHECK(run_cli("levels --config " + cfg.string() + " --out " + dir.string()) ==
        2);
  write_file(cfg, "{not json");
  CHECK(run_cli("levels --config " + cfg.string() + " --out " + dir.string()) ==
        2);
  CHECK(run_cli("levels --config " + (dir / "missing.json").string() +
                " --out " + dir.string()) == 2);
}

TEST_CASE("numerical failures exit with code 3") {
  const fs::path dir = fresh_dir("numfail");
  const fs::path cfg = dir / "cfg.json";
  // exactly linear data pushes the saturation fit to an infinite-I0 ridge;
  // the fitter flags non-convergence and the CLI maps it to exit code 3
  write_file(cfg,
             R"({"schema":"relsim/1","satfit":{"points":[[1,1],[2,2],[5,5],[10,10],[20,20],[40,40]]}})");
  CHECK(run_cli("satfit --config " + cfg.string() + " --out " + dir.string()) ==
        3);
}

TEST_CASE("unstable integration steps are rejected as config errors") {
  const fs::path dir = fresh_dir("unstable");
  const fs::path cfg = dir / "cfg.json";
  write_file(cfg,
             R"({"schema":"relsim/1","relax":{"initial":"excited","t_end_ns":10.0,"dt_ns":5.0}})");
  CHECK(run_cli("relax --config " + cfg.string() + " --out " + dir.string()) ==
        2);
}

TEST_SUITE_END();
