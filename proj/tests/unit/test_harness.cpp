#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "fdiscc/harness.hpp"
#include "support.hpp"

using namespace fdiscc;
using namespace fdiscc::test;

namespace {

SweepSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_sweep(in);
}

std::string error_key(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

int count_fields(const std::string& line) { return 1 + static_cast<int>(std::count(line.begin(), line.end(), ',')); }

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("sweep files parse every key") {
  const SweepSpec s = parse(
      "# comment\n"
      "parameter = p_bs_dbm\n"
      "values = 20, 25, 30\n"
      "schemes = proposed, hd\n"
      "n_seeds = 4\n"
      "first_seed = 7\n"
      "max_iter = 12\n"
      "output = out.csv\n"
      "config = default\n"
      "paper_scale = true\n");
  CHECK(s.parameter == SweepParameter::p_bs_dbm);
  CHECK(s.values == std::vector<double>{20.0, 25.0, 30.0});
  CHECK(s.schemes == std::vector<Scheme>{Scheme::proposed, Scheme::hd});
  CHECK(s.n_seeds == 4);
  CHECK(s.first_seed == 7);
  CHECK(s.max_iter == 12);
  CHECK(s.output == "out.csv");
  CHECK(s.paper_scale);
  CHECK(parse("parameter = skew\nvalues = 1\nschemes = all\n").schemes.size() == all_schemes().size());
  for (const char* name : {"m_passive", "p_bs_dbm", "gamma_tar_db", "backhaul_mbps", "skew", "n_tx"}) {
    CHECK(to_string(parse_sweep_parameter(name)) == name);
  }
}

TEST_CASE("sweep errors name the key") {
  CHECK(error_key("parameter = m_passive\nvalues = 8\nbogus = 1\n") == "bogus");
  CHECK(error_key("parameter = m_passive\nvalues = 8\nschemes = nope\n") == "schemes");
  CHECK(error_key("parameter = m_passive\nvalues = 8\nn_seeds = 1.5\n") == "n_seeds");
  CHECK(error_key("parameter = m_passive\nvalues = 8.5\n") == "values");
  CHECK(error_key("parameter = m_passive\nvalues = 8, x\n") == "values");
  CHECK(error_key("parameter = m_passive\nn_seeds = 0\nvalues = 8\n") == "n_seeds");
  CHECK(error_key("parameter = m_passive\n") == "values");
  CHECK(error_key("parameter = m_passive\nvalues = 8\npaper_scale = maybe\n") == "paper_scale");
  CHECK(error_key("parameter = m_passive\nvalues = 8\n") == "<none>");
  CHECK_THROWS_AS(load_sweep("/nonexistent/x.sweep"), ConfigError);
}

TEST_CASE("sweep values are applied in their units") {
  SystemConfig c = default_config();
  apply_sweep_value(c, SweepParameter::p_bs_dbm, 20.0);
  CHECK(c.p_bs_watt == doctest::Approx(0.1));
  apply_sweep_value(c, SweepParameter::gamma_tar_db, 10.0);
  CHECK(c.gamma_tar_linear == doctest::Approx(10.0));
  apply_sweep_value(c, SweepParameter::backhaul_mbps, 50.0);
  CHECK(c.cache.backhaul_rate[0] == doctest::Approx(5e7));
  apply_sweep_value(c, SweepParameter::m_passive, 24.0);
  CHECK(c.m_passive == 24);
  CHECK_THROWS_AS(apply_sweep_value(c, SweepParameter::n_tx, 0.0), ConfigError);
}

TEST_CASE("sweep yields one row per value, scheme and seed in order") {
  SweepSpec spec;
  spec.parameter = SweepParameter::p_bs_dbm;
  spec.values = {20.0, 25.0, 30.0};
  spec.schemes = {Scheme::proposed, Scheme::no_caching};
  spec.n_seeds = 2;
  spec.first_seed = 3;
  spec.max_iter = 2;
  const std::vector<RunRow> rows = run_sweep(spec, default_config(), 2);
  REQUIRE(rows.size() == 12);
  std::size_t i = 0;
  for (double v : spec.values)
    for (Scheme s : spec.schemes)
      for (std::uint64_t seed = 3; seed < 5; ++seed, ++i) {
        CHECK(rows[i].value == v);
        CHECK(rows[i].scheme == s);
        CHECK(rows[i].seed == seed);
        CHECK(rows[i].parameter == "p_bs_dbm");
      }
  const std::vector<RunRow> again = run_sweep(spec, default_config(), 1);
  for (std::size_t j = 0; j < rows.size(); ++j) CHECK(rows[j].utility == again[j].utility);

  const std::vector<Aggregate> agg = aggregate(rows);
  REQUIRE(agg.size() == 6);
  CHECK(agg[0].count == 2);
  CHECK(agg[0].median_utility == doctest::Approx(0.5 * (rows[0].utility + rows[1].utility)));

  std::ostringstream csv;
  write_csv_header(csv);
  for (const auto& r : rows) write_csv_row(csv, r);
  std::istringstream lines(csv.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    CHECK(count_fields(line) == static_cast<int>(run_csv_header().size()));
    ++n;
  }
  CHECK(n == 13);
}

TEST_CASE("median and quantiles agree with a sorting oracle") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 25);
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(-5.0, 5.0, rng);
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    const double oracle = n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
    CHECK(median(v) == doctest::Approx(oracle).epsilon(1e-15));
    CHECK(quantile(v, 0.0) == s.front());
    CHECK(quantile(v, 1.0) == s.back());
  }
  CHECK(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.25) == doctest::Approx(2.0));
  CHECK_THROWS_AS(median({}), InvalidArgument);
  CHECK_THROWS_AS(quantile({1.0}, 1.5), InvalidArgument);
}

TEST_CASE("run outputs carry the header and one trace row per iteration") {
  const Scenario sc = scenario(2);
  RunOptions o;
  o.max_iter = 3;
  const RunResult r = run(sc, o);
  std::ostringstream trace;
  write_trace_csv(trace, r);
  const std::string t = trace.str();
  CHECK(static_cast<std::size_t>(std::count(t.begin(), t.end(), '\n')) == r.trace.size() + 1);
  const std::string json = run_result_json(r);
  CHECK(json.find("\"utility\"") != std::string::npos);
  CHECK(json.find("\"status\"") != std::string::npos);
  const RunRow row = make_row(r, 2, "none", 0.0);
  CHECK(row.utility == r.metrics.utility);
  CHECK(row.iterations == r.iterations);
}

}
