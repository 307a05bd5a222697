#include <doctest.h>

#include <cmath>

#include "bounded/core/errors.hpp"
#include "bounded/harness/trial.hpp"
#include "support.hpp"

using namespace bounded;
using namespace bounded::harness;

namespace {

// Direct two-sided binomial p-value: sum of P(X = i) over outcomes no more
// likely than the observed one.
double brute_binomial(int k, int n, double p) {
  std::vector<double> pmf(n + 1);
  for (int i = 0; i <= n; ++i) {
    double c = 1;
    for (int j = 1; j <= i; ++j) c = c * (n - i + j) / j;
    pmf[i] = c * std::pow(p, i) * std::pow(1 - p, n - i);
  }
  double out = 0;
  for (int i = 0; i <= n; ++i) {
    if (pmf[i] <= pmf[k] * (1 + 1e-7)) out += pmf[i];
  }
  return std::min(out, 1.0);
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("binomial test matches direct summation") {
    for (int n : {1, 5, 10, 20, 37}) {
      for (int k = 0; k <= n; ++k) {
        for (double p : {0.5, 0.3}) {
          CAPTURE(n);
          CAPTURE(k);
          CHECK(binomial_two_sided(k, n, p) == doctest::Approx(brute_binomial(k, n, p)).epsilon(1e-9));
        }
      }
    }
    CHECK(binomial_two_sided(20, 20) == doctest::Approx(2.0 / 1048576.0));
    CHECK(binomial_two_sided(10, 20) == doctest::Approx(1.0));
  }

  TEST_CASE("summary statistics") {
    const auto s = summarize({2, 4, 4, 4, 5, 5, 7, 9});
    CHECK(s.mean == doctest::Approx(5.0));
    CHECK(s.sd == doctest::Approx(std::sqrt(32.0 / 7.0)));
    CHECK(s.min == 2);
    CHECK(s.max == 9);
    CHECK(summarize({3}).sd == 0.0);
  }

  TEST_CASE("autonomy share counts source-1 events") {
    std::vector<Event> trace(4);
    trace[0].source = 0;
    trace[1].source = 1;
    trace[2].source = 2;
    trace[3].source = 1;
    CHECK(compute_autonomy_share(trace) == doctest::Approx(0.5));
    try {
      compute_autonomy_share({});
      FAIL("empty trace accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::empty_trace);
    }
  }

  TEST_CASE("total variation") {
    CHECK(total_variation({{2, 0.5}, {3, 0.5}}, {{2, 0.5}, {3, 0.5}}) == 0.0);
    CHECK(total_variation({{2, 1.0}}, {{3, 1.0}}) == doctest::Approx(1.0));
    CHECK(total_variation({{2, 0.6}, {3, 0.4}}, {{2, 0.5}, {3, 0.4}, {4, 0.1}}) == doctest::Approx(0.1));
  }

  TEST_CASE("setup table") {
    CHECK(make_trial_config(Setup::s1, true, 10, 1).actor == "B");
    CHECK(make_trial_config(Setup::s2, true, 10, 1).target == "D");
    CHECK(make_trial_config(Setup::s3, true, 10, 1).actor == "E");
    CHECK(make_trial_config(Setup::s4, true, 10, 1).trigger == "talk_common_interests");
    CHECK(parse_setup("S3") == Setup::s3);
    CHECK(parse_setup("baseline") == Setup::baseline);
    CHECK_FALSE(parse_setup("s5"));
  }

  TEST_CASE("trial metrics are consistent with the trace") {
    const auto inputs = testing::trial_inputs();
    auto cfg = make_trial_config(Setup::baseline, true, 1, 3);
    cfg.room = testing::app_config().room;
    runtime::MemoryTraceSink sink;
    const auto m = run_trial(cfg, inputs, trial_seed(3, 0), &sink);
    CHECK(m.termination == Termination::natural);
    int total = 0;
    for (const auto& [s, n] : m.events_by_source) total += n;
    CHECK(total == m.n_events);
    CHECK(m.autonomy_share == doctest::Approx(static_cast<double>(m.events_by_source.at(1)) / m.n_events));
    int events = 0;
    for (const auto& l : sink.lines()) events += l.find("\"type\":\"event\"") != std::string::npos ? 1 : 0;
    CHECK(events == m.n_events);
    CHECK(m.chain_events == m.max_depth);
  }

  TEST_CASE("batch reports are reproducible and serializable") {
    const auto inputs = testing::trial_inputs();
    auto cfg = make_trial_config(Setup::s2, true, 5, 9);
    cfg.room = testing::app_config().room;
    cfg.horizon = 200;
    BatchReport a{200, 9, {run_trial_batch(cfg, inputs)}};
    BatchReport b{200, 9, {run_trial_batch(cfg, inputs)}};
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(format_table(a) == format_table(b));
    const auto j = to_json(a);
    CHECK(j["conditions"][0]["setup"] == "S2");
    CHECK(j["conditions"][0]["trials"].size() == 5);
    CHECK(format_table(a).find("C->D") != std::string::npos);
  }
}
