#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "resdeloc/errors.hpp"
#include "resdeloc/runner.hpp"

using namespace resdeloc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("resdeloc_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("sha256 and number formatting") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-2.0) == "-2");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("atomic file and csv writer") {
  const fs::path dir = scratch("atomic");
  fs::create_directories(dir);
  const fs::path target = dir / "out.csv";
  {
    AtomicFile f(target);
    CsvWriter w(f, {"a", "b"});
    w.cell(1).cell(0.5);
    w.end_row();
    CHECK_FALSE(fs::exists(target));
    CHECK(fs::exists(f.temp()));
    w.cell("x");
    CHECK_THROWS(w.end_row());
  }
  CHECK_FALSE(fs::exists(target));
  CHECK(fs::is_empty(dir));
  {
    AtomicFile f(target);
    CsvWriter w(f, {"a", "b"});
    w.cell(std::size_t{3}).cell("y");
    w.end_row();
    f.commit();
  }
  CHECK(slurp(target) == "a,b\n3,y\n");
  CHECK(sha256_file(target) == sha256_hex("a,b\n3,y\n"));
}

TEST_CASE("green run writes csv, summary and manifest") {
  const fs::path dir = scratch("green");
  RunConfig c = parse_config(R"({"command": "green", "topology": {"kind": "box", "dims": [3, 3]},
                                 "green": {"E": 0.2, "eta": 0.01, "replicates": 2}})");
  const RunResult r = run(c, {dir, {}});
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(dir / "green.csv");
  CHECK(csv.rfind("replicate,y,distance,re_G,im_G,abs_G\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 9);
  const auto summary = read_json(dir / "green.summary.json");
  CHECK(summary.at("command") == "green");
  CHECK(summary.at("status") == "ok");
  CHECK(summary.at("config_digest") == sha256_hex(c.canonical.dump()));
  const auto manifest = read_json(dir / "manifest.json");
  CHECK(manifest.at("exit_code") == 0);
  REQUIRE(manifest.at("files").size() == 2);
  for (const auto& f : manifest.at("files"))
    CHECK(f.at("sha256") == sha256_file(dir / f.at("name").get<std::string>()));
}

TEST_CASE("reference values for plots") {
  RunConfig c = parse_config(R"({"command": "lyapunov", "topology": {"kind": "tree", "K": 3, "D": 8},
                                 "lambda": 2, "lyapunov": {"d_min": 2, "d_max": 6}})");
  const auto ref = reference_values(c);
  CHECK(ref.at("K") == 3);
  CHECK(ref.at("log_sqrt_K").get<double>() == doctest::Approx(0.5 * std::log(3.0)));
  CHECK(ref.at("log_K").get<double>() == doctest::Approx(std::log(3.0)));
  CHECK(ref.at("spectrum_edges")[1].get<double>() == doctest::Approx(2 * std::sqrt(3.0)));
  CHECK(ref.at("wegner_line").get<double>() == doctest::Approx(0.5));
  c.lambda = 0;
  CHECK(reference_values(c).at("wegner_line").is_null());
}

TEST_CASE("lyapunov run is independent of the worker count") {
  RunConfig c = parse_config(R"({"command": "lyapunov", "topology": {"kind": "tree", "K": 2, "D": 9},
                                 "lambda": 1, "lyapunov": {"energies": [0, 0.5], "replicates": 6, "d_min": 3, "d_max": 7}})");
  c.workers = 1;
  const fs::path a = scratch("w1"), b = scratch("w4");
  CHECK(run(c, {a, {}}).exit_code == 0);
  c.workers = 4;
  CHECK(run(c, {b, {}}).exit_code == 0);
  CHECK(slurp(a / "lyapunov.csv") == slurp(b / "lyapunov.csv"));
  CHECK(slurp(a / "lyapunov.summary.json") == slurp(b / "lyapunov.summary.json"));
}

TEST_CASE("corrupted g trips exit code 2") {
  const fs::path dir = scratch("gfail");
  RunConfig c = parse_config(R"({"command": "resonance", "topology": {"kind": "tree", "K": 2, "D": 7},
                                 "lambda": 0.2, "resonance": {"R": 5, "replicates": 20, "calibration_replicates": 20,
                                 "ct_replicates": 2}})");
  RunOptions opt{dir, [](cplx) { return cplx(0.0); }};
  const RunResult r = run(c, opt);
  CHECK(r.exit_code == 2);
  const auto summary = read_json(dir / "resonance.summary.json");
  CHECK(summary.at("status") == "integrity_failure");
  CHECK(summary.at("error").get<std::string>().find("0.49") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "resonance.csv"));
  CHECK(read_json(dir / "manifest.json").at("exit_code") == 2);
}

TEST_CASE("bad inputs map to exit codes") {
  CHECK_THROWS_AS(parse_config(R"({"command": "green", "topology": {"kind": "box", "dims": [3]}, "green": {"x": 7}})"),
                  ConfigError);
  RunConfig c = parse_config(R"({"command": "green", "topology": {"kind": "box", "dims": [3]}})");
  c.green.x = 7;
  const RunResult bad = run(c, {scratch("badx"), {}});
  CHECK(bad.exit_code == 1);
  CHECK(bad.message.find("green.x") != std::string::npos);
  const fs::path blocker = scratch("blocked");
  std::ofstream(blocker) << "file";
  RunConfig ok = parse_config(R"({"command": "green", "topology": {"kind": "box", "dims": [3]}})");
  CHECK(run(ok, {blocker / "sub", {}}).exit_code == 3);
  fs::remove(blocker);
}

TEST_CASE("small verify-all passes") {
  const fs::path dir = scratch("verify");
  RunConfig c = parse_config(R"({"command": "verify-all", "topology": {"kind": "tree", "K": 2, "D": 6}, "lambda": 0.5,
      "verify_all": {"identity_instances": 4, "rank_one_instances": 4, "mobius_scans": 2, "two_site_draws": 4,
                     "delta_replicates": 50000, "simplicity_replicates": 50, "null_average_replicates": 200}})");
  const RunResult r = run(c, {dir, {}});
  CHECK(r.exit_code == 0);
  const auto summary = read_json(dir / "verify-all.summary.json");
  CHECK(summary.at("status") == "ok");
  const std::string csv = slurp(dir / "verify-all.csv");
  CHECK(csv.rfind("name,status,observed,bound,tolerance\n", 0) == 0);
  CHECK(csv.find(",fail,") == std::string::npos);
}
