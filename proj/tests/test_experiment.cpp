#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/experiment.hpp"

using namespace peakon;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("peakon_experiment_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorKind kind_of(const std::string& text, std::string* msg = nullptr) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorKind::InvalidArgument;
}

const char* kBlowup = R"(# blow-up datum
scenario = blowup
eps = 0.05   # comparison constant
datum = peaked_exponential
amplitude = 0
beta = 10
slope_right = -2
dt = 1e-2
)";

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
  const auto c = parse_config("");
  EXPECT_EQ(c.scenario, Scenario::Identities);
  EXPECT_EQ(c.L, 25.0);
  EXPECT_EQ(c.N, 2000);
  EXPECT_EQ(c.ratio, 1.003);
  EXPECT_FALSE(c.eps.has_value());
  EXPECT_EQ(c.datum.family, DatumFamily::Zero);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(parse_config("# only a comment\n\n   \n").N, 2000);
}

TEST(Config, ParsesValuesAndComments) {
  const auto c = parse_config(kBlowup);
  EXPECT_EQ(c.scenario, Scenario::Blowup);
  EXPECT_EQ(*c.eps, 0.05);
  EXPECT_EQ(c.datum.family, DatumFamily::PeakedExponential);
  EXPECT_EQ(c.datum.beta, 10.0);
  EXPECT_EQ(c.datum.slope_right, -2.0);
  EXPECT_EQ(c.dt, 1e-2);
}

TEST(Config, NegativeStepIsValidationError) {
  std::string msg;
  EXPECT_EQ(kind_of("dt = -1", &msg), ErrorKind::Validation);
  EXPECT_NE(msg.find("dt"), std::string::npos) << msg;
}

TEST(Config, UnknownKeyReportsLine) {
  std::string msg;
  EXPECT_EQ(kind_of("scenario = linear\n\nwidth = 3\n", &msg), ErrorKind::Parse);
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("width"), std::string::npos) << msg;
}

TEST(Config, MalformedLines) {
  std::string msg;
  EXPECT_EQ(kind_of("dt 0.1\n", &msg), ErrorKind::Parse);
  EXPECT_NE(msg.find("line 1"), std::string::npos);
  EXPECT_EQ(kind_of("dt =\n"), ErrorKind::Parse);
  EXPECT_EQ(kind_of("= 3\n"), ErrorKind::Parse);
  EXPECT_EQ(kind_of("dt = 0.1\ndt = 0.2\n", &msg), ErrorKind::Parse);
  EXPECT_NE(msg.find("line 2"), std::string::npos);
  EXPECT_EQ(kind_of("dt = 0.1x\n", &msg), ErrorKind::Validation);
  EXPECT_NE(msg.find("line 1: dt"), std::string::npos) << msg;
  EXPECT_EQ(kind_of("N = 2.5\n"), ErrorKind::Validation);
  EXPECT_EQ(kind_of("scenario = shock\n"), ErrorKind::Validation);
  EXPECT_EQ(kind_of("datum = square\n"), ErrorKind::Validation);
  EXPECT_EQ(kind_of("seed = -4\n"), ErrorKind::Validation);
}

TEST(Config, FieldValidation) {
  std::string msg;
  EXPECT_EQ(kind_of("scenario = blowup\n", &msg), ErrorKind::Validation);
  EXPECT_NE(msg.find("eps"), std::string::npos);
  EXPECT_EQ(kind_of("eps = 0.09\n"), ErrorKind::Validation);  // above 1/12
  EXPECT_EQ(kind_of("L = 10\n"), ErrorKind::Validation);
  EXPECT_EQ(kind_of("N = 8\n"), ErrorKind::Validation);
  EXPECT_EQ(kind_of("ratio = 0.99\n"), ErrorKind::Validation);
  EXPECT_EQ(kind_of("t_end = 0\n"), ErrorKind::Validation);
  EXPECT_EQ(kind_of("beta = 0\n"), ErrorKind::Validation);
  EXPECT_EQ(kind_of("oracle_levels = 1\n"), ErrorKind::Validation);
  EXPECT_EQ(kind_of("dt = nan\n"), ErrorKind::Validation);
  EXPECT_EQ(kind_of("h1_norm = -1\n"), ErrorKind::Validation);
}

TEST(Config, RoundTrip) {
  const auto once = normalize(kBlowup);
  EXPECT_EQ(normalize(once), once);
  EXPECT_EQ(serialize(parse_config(once)), once);
  // one line per key, in key order
  std::istringstream in(once);
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    ASSERT_LT(i, kConfigKeys.size());
    EXPECT_EQ(line.substr(0, line.find(" = ")), kConfigKeys[i++]);
  }
  EXPECT_EQ(i, kConfigKeys.size());
}

TEST(Config, RoundTripIsLosslessForFloats) {
  ExperimentConfig c;
  c.dt = 0.1 + 0.2;
  c.datum.sigma = 1.0 / 3.0;
  c.eps = 0.07000000000000001;
  const auto back = parse_config(serialize(c));
  EXPECT_EQ(back.dt, c.dt);
  EXPECT_EQ(back.datum.sigma, c.datum.sigma);
  EXPECT_EQ(*back.eps, *c.eps);
  EXPECT_FALSE(parse_config("eps = none\n").eps.has_value());
}

TEST(Config, SetValueOverrides) {
  auto c = parse_config(kBlowup);
  set_config_value(c, "dt", "0.005");
  set_config_value(c, "output_dir", "elsewhere");
  EXPECT_EQ(c.dt, 0.005);
  EXPECT_EQ(c.output_dir, "elsewhere");
  EXPECT_THROW(set_config_value(c, "bogus", "1"), Error);
}

TEST(Run, WritesManifestReportAndCsv) {
  auto c = parse_config("scenario = identities\nidentity_cases = 2\n");
  const auto dir = scratch("identities");
  c.output_dir = dir.string();
  const auto r = run_experiment(c);
  EXPECT_TRUE(r.passed()) << r.first_failure();
  EXPECT_EQ(slurp(dir / "manifest.txt"), serialize(c));
  const auto report = slurp(dir / "report.txt");
  for (const char* key : {"rate = ", "r2 = ", "t0_estimate = ", "T_num = ", "T_riccati = ", "pq_max = ", "E_drift = ",
                          "F_drift = ", "audit.identity_residuals = pass", "status = pass"}) {
    EXPECT_NE(report.find(key), std::string::npos) << key;
  }
  const auto csv = slurp(dir / "identities.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "case,linear,calc,quadratic,linear_refined,calc_refined,quadratic_refined");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);  // header, peakon, 2 seeds
}

TEST(Run, FailedAuditIsNamed) {
  auto c = parse_config("scenario = identities\nidentity_cases = 1\nidentity_tol = 1e-9\n");
  c.output_dir = scratch("strict").string();
  const auto r = run_experiment(c);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.first_failure().rfind("identity_residuals", 0), 0u) << r.first_failure();
  EXPECT_NE(slurp(fs::path(c.output_dir) / "report.txt").find("status = fail"), std::string::npos);
}

TEST(Run, LinearScenarioPasses) {
  auto c = parse_config(
      "scenario = linear\ndatum = peaked_exponential\namplitude = 0\nbeta = 2\nslope_right = -0.01\n"
      "N = 500\nratio = 1.012\nt_end = 2\nrecord_interval = 0.5\n");
  c.output_dir = scratch("linear").string();
  const auto r = run_experiment(c);
  EXPECT_TRUE(r.passed()) << r.first_failure();
  ASSERT_TRUE(r.report.rate.has_value());
  EXPECT_NEAR(*r.report.rate, 1.0, 1e-9);
  const auto csv = slurp(fs::path(c.output_dir) / "linear.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);  // header + t = 0, 0.5, .., 2
}

TEST(Run, NonlinearScenarioArtifacts) {
  auto c = parse_config(
      "scenario = nonlinear\ndatum = gaussian\namplitude = 0.01\ncenter = 2\nN = 400\nratio = 1.01\n"
      "dt = 0.02\nt_end = 0.2\n");
  c.output_dir = scratch("nonlinear").string();
  const auto r = run_experiment(c);
  EXPECT_TRUE(r.passed()) << r.first_failure();
  for (const char* f : {"manifest.txt", "trajectory.csv", "v_initial.csv", "v_final.csv", "u_final.csv", "report.txt"}) {
    EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / f)) << f;
  }
  const auto traj = slurp(fs::path(c.output_dir) / "trajectory.csv");
  EXPECT_EQ(traj.substr(0, traj.find('\n')), "t,E,F,H1_v,Linf_vx_plus,Linf_vx_minus,V0,W0_plus,W0_minus,a,qs_min,PQ0");
}

TEST(Run, Deterministic) {
  const char* text =
      "scenario = nonlinear\ndatum = peaked_exponential\namplitude = 0.02\nbeta = 3\nslope_right = -0.05\n"
      "N = 300\nratio = 1.01\ndt = 0.02\nt_end = 0.3\n";
  auto a = parse_config(text), b = a;
  a.output_dir = scratch("det_a").string();
  b.output_dir = scratch("det_b").string();
  const auto ra = run_experiment(a);
  run_experiment(b);
  for (const auto& f : ra.files) {
    if (f == "manifest.txt") continue;  // echoes output_dir
    EXPECT_EQ(slurp(fs::path(a.output_dir) / f), slurp(fs::path(b.output_dir) / f)) << f;
  }
}

TEST(Run, UnwritableOutputIsIoError) {
  auto c = parse_config("identity_cases = 0\n");
  const auto file = scratch("blocker");
  std::ofstream(file) << "x";
  c.output_dir = (file / "sub").string();
  try {
    run_experiment(c);
    ADD_FAILURE() << "expected Io error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}
