#include <charconv>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "zzaloha/serialize.hpp"

using namespace zzaloha;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  return fields;
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

double parse_double(const std::string& text) {
  double value = 0;
  std::from_chars(text.data(), text.data() + text.size(), value);
  return value;
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  std::mt19937_64 gen(4242);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double x = uni(gen);
    CHECK(parse_double(format_double(x)) == x);
  }
  for (double x : {0.0, 1.0, 1e-300, 0.1, 2.0 / 3.0}) CHECK(parse_double(format_double(x)) == x);
}

TEST_CASE("matrix CSV reproduces every entry bit for bit") {
  const auto chain = build_zigzag_paper(validate_params(6, 0.13, 0.57, Variant::ZigzagPaper));
  std::ostringstream out;
  write_matrix_csv(out, chain);
  const auto lines = data_lines(out.str());
  REQUIRE(lines.size() == 7);
  for (int n = 0; n < 7; ++n) {
    const auto fields = split(lines[n], ',');
    REQUIRE(fields.size() == 7);
    for (int n2 = 0; n2 < 7; ++n2) CHECK(parse_double(fields[n2]) == chain.probs(n, n2));
  }
}

TEST_CASE("sweep emits one row per variant and axis point") {
  SweepSpec spec;
  spec.axis = SweepAxis::ArrivalProbability;
  spec.start = 0.01;
  spec.stop = 0.5;
  spec.step = 0.01;
  spec.users = 5;
  spec.fixed_probability = 0.5;
  spec.variants = {Variant::AlohaBaseline, Variant::ZigzagPaper, Variant::ZigzagStrict};
  const auto rows = run_sweep(spec);
  CHECK(rows.size() == 150);
  const auto lines = data_lines(sweep_csv(spec, rows));
  REQUIRE(lines.size() == 151);  // header + 150 data rows
  CHECK(lines[0] ==
        "variant,axis_value,throughput,avg_backlog,delay,throughput_new,"
        "throughput_backlogged,delay_backlogged");

  SweepSpec single = spec;
  single.stop = spec.start;
  CHECK(run_sweep(single).size() == 3);
}

TEST_CASE("sweep rows can be recomputed from their inputs") {
  SweepSpec spec;
  spec.axis = SweepAxis::RetransmissionProbability;
  spec.start = 0.1;
  spec.stop = 0.9;
  spec.step = 0.2;
  spec.users = 6;
  spec.fixed_probability = 0.07;
  spec.variants = {Variant::ZigzagPaper, Variant::AlohaBaseline};
  const auto csv = sweep_csv(spec, run_sweep(spec));
  const auto lines = data_lines(csv);
  REQUIRE(lines.size() == 1 + 2 * 5);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    REQUIRE(fields.size() >= 7);
    const auto params = validate_params(6, 0.07, parse_double(fields[1]), fields[0]);
    const auto dist = solve_stationary_direct(build_transition_matrix(params));
    const auto report = compute_metrics(dist, params);
    CHECK(std::abs(parse_double(fields[2]) - report.throughput_total) <= 1e-12);
    CHECK(std::abs(parse_double(fields[3]) - report.avg_backlog) <= 1e-12);
    CHECK(std::abs(parse_double(fields[5]) - report.throughput_new) <= 1e-12);
  }
}

TEST_CASE("undefined delays serialize as empty CSV fields") {
  SweepSpec spec;
  spec.axis = SweepAxis::ArrivalProbability;
  spec.start = 0.3;
  spec.stop = 0.3;
  spec.step = 0.1;
  spec.users = 1;  // no backlogged traffic ever, so delay_backlogged is undefined
  spec.fixed_probability = 0.5;
  spec.variants = {Variant::ZigzagPaper};
  const auto lines = data_lines(sweep_csv(spec, run_sweep(spec)));
  REQUIRE(lines.size() == 2);
  CHECK(lines[1].back() == ',');  // trailing empty delay_backlogged
  const auto fields = split(lines[1], ',');
  CHECK(parse_double(fields[2]) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("sweep validation rejects malformed ranges") {
  SweepSpec spec;
  spec.axis = SweepAxis::ArrivalProbability;
  spec.start = 0.0;  // boundary not allowed
  spec.stop = 0.5;
  spec.step = 0.01;
  spec.users = 5;
  spec.fixed_probability = 0.5;
  spec.variants = {Variant::ZigzagPaper};
  CHECK_THROWS_AS(validate_sweep(spec), InvalidConfigError);
  spec.start = 0.6;
  CHECK_THROWS_AS(validate_sweep(spec), InvalidConfigError);  // start > stop
  spec.start = 0.01;
  spec.step = 0.0;
  CHECK_THROWS_AS(validate_sweep(spec), InvalidConfigError);
  spec.step = 1e-7;
  CHECK_THROWS_AS(validate_sweep(spec), InvalidConfigError);  // too many points
  spec.step = 0.01;
  spec.variants.clear();
  CHECK_THROWS_AS(validate_sweep(spec), InvalidConfigError);
}

TEST_CASE("solve report carries the full analytic picture") {
  const auto params = validate_params(10, 0.04, 0.8, Variant::ZigzagPaper);
  const auto report = solve_report_json(params);
  CHECK(report["params"]["users"] == 10);
  CHECK(report["params"]["variant"] == "zigzag-paper");
  CHECK(report["stationary"]["pi"].size() == 11);
  CHECK(report["stationary"]["method"] == "direct");
  CHECK(report["drift"]["values"].size() == 11);
  CHECK(report["drift"]["chain_exact"].size() == 11);
  CHECK(report["stability"] == "bistable");
  CHECK(report["metrics"].contains("delay_backlogged"));
}

TEST_CASE("stability CSV lists drift rows and verdict summaries") {
  const auto csv = stability_csv(10, 0.04, {0.5, 0.8},
                                 {Variant::AlohaBaseline, Variant::ZigzagPaper});
  const auto lines = data_lines(csv);
  REQUIRE(lines.size() == 1 + 2 * 2 * 11);
  int verdicts = 0;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (line.find("verdict=") != std::string::npos) ++verdicts;
  CHECK(verdicts == 4);
  // the drift at a fully backlogged system can never be positive
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields[2] == "10") CHECK(parse_double(fields[3]) <= 0.0);
  }
}

TEST_CASE("simulation JSON is self-describing") {
  SimConfig cfg;
  cfg.params = validate_params(3, 0.2, 0.5, Variant::ZigzagStrict);
  cfg.frames = 5'000;
  cfg.replications = 2;
  cfg.seed = 31;
  const auto result = simulate(cfg);
  const auto j = sim_result_json(cfg, result);
  CHECK(j["config"]["frames"] == 5'000);
  CHECK(j["config"]["warmup_frames"] == 500);
  CHECK(j["result"]["empirical_occupancy"].size() == 4);
  CHECK(j["result"]["replications"].size() == 2);
  CHECK(j["result"]["seed"] == 31);
}
