#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "profdec/cli.hpp"
#include "profdec/errors.hpp"
#include "profdec/io.hpp"
#include "support/oracles.hpp"

using namespace profdec;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("profdec_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Run {
  int code;
  std::string out, err;
};

Run cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kTwoBumpSpec = R"({
  "dimension": 1, "p": 4, "n_count": 10,
  "profiles": [
    {"entries": [{"i": 1, "j": 0, "k": [0], "amp": 1.0}], "law": {"kind": "constant"}},
    {"entries": [{"i": 1, "j": 0, "k": [0], "amp": 0.5}], "law": {"kind": "translation", "velocity": [8]}}
  ]
})";

}  // namespace

TEST_CASE("field files round-trip exactly") {
  oracle::Gen g(51);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = oracle::random_field(g, {static_cast<std::size_t>(g.integer(1, 3)), g.real(2.0, 7.0), 30, -4, 4, 9, 3});
    f.assign({1, 1, DyadicVec::zeros(f.dim())}, g.real(-1, 1) * 1e-300);
    const auto text = io::field_to_json(f);
    const auto back = io::field_from_json(text);
    CHECK(back == f);
    CHECK(io::field_to_json(back) == text);
  }
}

TEST_CASE("field file validation") {
  CHECK_THROWS_AS(io::field_from_json("{"), ValidationError);
  CHECK_THROWS_AS(io::field_from_json(R"({"dimension":1,"p":4,"entries":[{"i":1,"j":0,"k":[0],"amp":0}]})"),
                  ValidationError);
  CHECK_THROWS_AS(io::field_from_json(R"({"dimension":1,"p":4,"entries":[{"i":1,"j":0,"k":[0],"amp":1},
                                         {"i":1,"j":0,"k":[0],"amp":2}]})"),
                  ValidationError);
  CHECK_THROWS_AS(io::field_from_json(R"({"dimension":1,"p":4,"entries":[{"i":2,"j":0,"k":[0],"amp":1}]})"),
                  ValidationError);
  CHECK_THROWS_AS(io::field_from_json(R"({"dimension":1,"p":4,"entries":[{"i":1,"j":0.5,"k":[0],"amp":1}]})"),
                  ValidationError);
  CHECK_THROWS_AS(io::field_from_json(R"({"dimension":1,"p":"inf","entries":[]})"), ValidationError);
  const auto f = io::field_from_json(R"({"dimension":1,"p":4,"entries":[{"i":1,"j":0,"k":[6],"denom_exp":2,"amp":1}]})");
  CHECK(f.entries().begin()->first.shift == DyadicVec({3}, 1));
}

TEST_CASE("config and spec round-trip") {
  ExtractConfig cfg;
  cfg.input = {SpaceMode::besov, 3.0, 1.5, 2.0};
  cfg.remainder = {kInf, kInf};
  cfg.tail_window = 5;
  cfg.conv_tol = 1.0 / 3.0;
  CHECK(io::config_from_json(io::config_to_json(cfg)) == cfg);

  const auto spec = io::spec_from_json(kTwoBumpSpec);
  CHECK(spec.profiles.size() == 2);
  CHECK(spec.profiles[1].law.velocity == DyadicVec({8}));
  CHECK(io::spec_from_json(io::spec_to_json(spec)) == spec);
  auto noisy = spec;
  noisy.noise = NoiseSpec{1e-3, 4, -1, 3, 5};
  noisy.seed = 12345678901234ULL;
  CHECK(io::spec_from_json(io::spec_to_json(noisy)) == noisy);
}

TEST_CASE("report files round-trip losslessly") {
  auto spec = io::spec_from_json(kTwoBumpSpec);
  spec.noise = NoiseSpec{1e-4, 3};
  spec.seed = 8;
  const auto syn = generate(spec);
  ExtractConfig cfg;
  cfg.tail_window = 5;
  cfg.stop_epsilon = 1e-4;
  io::ReportFile rep{cfg, extract_profiles(syn.sequence, cfg), std::nullopt};
  rep.verification = verify(rep.decomposition, cfg);
  rep.decomposition.sequence.clear();
  const auto text = io::report_to_json(rep);
  const auto back = io::report_from_json(text);
  CHECK(back == rep);
  CHECK(io::report_to_json(back) == text);
}

TEST_CASE("cli generate, decompose, verify, norms") {
  TempDir tmp("cli");
  io::write_text(tmp.path / "spec.json", kTwoBumpSpec);
  auto r = cli_run({"generate", "--config", (tmp.path / "spec.json").string(), "--out", (tmp.path / "c").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(tmp.path / "c" / "u_0009.json"));
  CHECK(fs::exists(tmp.path / "c" / "truth.json"));
  const auto u2 = io::field_from_json(io::read_text(tmp.path / "c" / "u_0002.json"));
  CHECK(u2.amplitude({1, 0, DyadicVec({24})}) == 0.5);

  const auto report = (tmp.path / "r.json").string();
  r = cli_run({"decompose", (tmp.path / "c").string(), "--out", report, "--tail-window", "5"});
  REQUIRE(r.code == 0);
  const auto rep = io::report_from_json(io::read_text(report));
  CHECK(rep.decomposition.groups.size() == 2);
  REQUIRE(rep.verification);
  CHECK(rep.verification->gaps_pass);
  CHECK(rep.verification->stability_pass);
  CHECK(rep.verification->reconstruction_exact);
  CHECK(rep.verification->remainder_nonincreasing);

  r = cli_run({"verify", report, (tmp.path / "c").string()});
  CHECK(r.code == 0);
  CHECK(r.out == io::read_text(report));

  r = cli_run({"norms", (tmp.path / "c" / "u_0000.json").string(), "--besov", "0,4,inf", "--besov", "-0.25,inf,inf"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"lp_tilde\"") != std::string::npos);

  r = cli_run({"decompose", (tmp.path / "c").string(), "--space", "besov", "--a", "2", "--q", "2", "--b", "8",
               "--r", "8", "--tail-window", "5"});
  CHECK(r.code == 0);
}

TEST_CASE("cli norms values") {
  TempDir tmp("norms");
  io::write_text(tmp.path / "one.json", R"({"dimension":1,"p":4,"entries":[{"i":1,"j":3,"k":[2],"amp":1}]})");
  io::write_text(tmp.path / "empty.json", R"({"dimension":2,"p":3,"entries":[]})");
  io::write_text(tmp.path / "p2.json",
                 R"({"dimension":1,"p":2,"entries":[{"i":1,"j":0,"k":[0],"amp":3},{"i":1,"j":1,"k":[0],"amp":4}]})");
  auto r = cli_run({"norms", (tmp.path / "one.json").string()});
  CHECK(r.out.find("\"lp_tilde\": 1.0") != std::string::npos);
  CHECK(r.out.find("\"sup_tilde\": 1.0") != std::string::npos);
  r = cli_run({"norms", (tmp.path / "empty.json").string()});
  CHECK(r.out.find("\"lp_tilde\": 0.0") != std::string::npos);
  CHECK(r.out.find("\"coeff_lp\": 0.0") != std::string::npos);
  r = cli_run({"norms", (tmp.path / "p2.json").string()});
  CHECK(r.out.find("\"lp_tilde\": 5.0") != std::string::npos);
  r = cli_run({"norms", (tmp.path / "one.json").string(), "--besov", "1,2"});
  CHECK(r.code == 2);
  r = cli_run({"norms", (tmp.path / "one.json").string(), "--besov", "0,0.5,2"});
  CHECK(r.code == 2);
}

TEST_CASE("cli exit codes") {
  TempDir tmp("exit");
  CHECK(cli_run({}).code == 2);
  CHECK(cli_run({"--help"}).code == 0);
  CHECK(cli_run({"frobnicate"}).code == 2);
  fs::create_directories(tmp.path / "empty");
  CHECK(cli_run({"decompose", (tmp.path / "empty").string()}).code == 2);

  std::string bad = kTwoBumpSpec;
  bad.replace(bad.find("\"velocity\": [8]"), 15, "\"velocity\": [0]");
  io::write_text(tmp.path / "bad.json", bad);
  const auto r = cli_run({"generate", "--config", (tmp.path / "bad.json").string(), "--out", (tmp.path / "o").string()});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());

  auto noisy = io::spec_from_json(kTwoBumpSpec);
  noisy.noise = NoiseSpec{1e-3, 2};
  io::write_text(tmp.path / "noisy.json", io::spec_to_json(noisy));
  CHECK(cli_run({"generate", "--config", (tmp.path / "noisy.json").string(), "--out", (tmp.path / "n").string()}).code ==
        2);
  CHECK(cli_run({"generate", "--config", (tmp.path / "noisy.json").string(), "--out", (tmp.path / "n").string(),
                 "--seed", "3"})
            .code == 0);
  CHECK(cli_run({"decompose", (tmp.path / "n").string(), "--tail-window", "64"}).code == 2);
  CHECK(cli_run({"decompose", (tmp.path / "n").string(), "--space", "lp", "--r", "3"}).code == 2);
}
