#include <doctest.h>

#include <cmath>
#include <functional>

#include "error.hpp"
#include "time_series.hpp"

using namespace nhqm;

namespace {

TimeSeries sampled(double t0, double t1, int n, const std::function<cplx(double)>& f, const std::string& label = "s",
                   Formalism form = Formalism::FP) {
  TimeSeries s;
  s.label = label;
  s.formalism = form;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + (t1 - t0) * i / (n - 1);
    s.times.push_back(t);
    s.values.push_back(f(t));
  }
  return s;
}

}  // namespace

TEST_CASE("validation of series") {
  TimeSeries s{{0.0, 1.0, 1.0}, {1.0, 2.0, 3.0}, "dup", Formalism::QM};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  TimeSeries m{{0.0, 1.0}, {1.0}, "short", Formalism::QM};
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  TimeSeries nan{{0.0, NAN}, {1.0, 1.0}, "nan", Formalism::QM};
  CHECK_THROWS_AS(nan.validate(), InvalidArgument);
  CHECK(std::string(to_string(Formalism::NP)) == "NP");
}

TEST_CASE("effective decay rate of an exponential") {
  const TimeSeries s = sampled(0.0, 10.0, 1001, [](double t) { return cplx(std::exp(-0.3 * t)); });
  const TimeSeries k = effective_decay_rate(s);
  REQUIRE(k.size() == s.size());
  for (const cplx& v : k.values) CHECK(std::abs(v - 0.3) < 1e-12);
  TimeSeries z = s;
  z.values[5] = 0.0;
  CHECK_THROWS_AS(effective_decay_rate(z), InvalidArgument);
}

TEST_CASE("linear interpolation") {
  const TimeSeries s{{0.0, 1.0, 3.0}, {0.0, cplx(2.0, 1.0), 6.0}, "i", Formalism::QM};
  CHECK(interpolate(s, 1.0) == cplx(2.0, 1.0));
  CHECK(std::abs(interpolate(s, 0.5) - cplx(1.0, 0.5)) < 1e-15);
  CHECK(std::abs(interpolate(s, 2.0) - cplx(4.0, 0.5)) < 1e-15);
  CHECK_THROWS_AS(interpolate(s, 3.5), InvalidArgument);
  CHECK_THROWS_AS(interpolate(s, -0.1), InvalidArgument);
}

TEST_CASE("pointwise comparison") {
  const TimeSeries a = sampled(0.0, 20.0, 201, [](double t) { return cplx(std::exp(-t)); }, "a");
  const TimeSeries b = sampled(0.0, 20.0, 201, [](double t) { return cplx(1.04 * std::exp(-t)); }, "b", Formalism::QM);
  CompareOptions o;
  o.t_star = 2.0;
  ComparisonReport r = compare_series(a, b, o);
  CHECK(r.samples == 180);
  CHECK(r.max_deviation == doctest::Approx(0.04 / 1.04).epsilon(1e-10));
  CHECK(r.mean_deviation == doctest::Approx(0.04 / 1.04).epsilon(1e-10));
  CHECK(r.passed);
  CHECK(r.has_rates);
  CHECK(r.a_mean_rate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.b_mean_rate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.a_formalism == Formalism::FP);
  CHECK(r.b_formalism == Formalism::QM);
  o.threshold = 0.03;
  CHECK_FALSE(compare_series(a, b, o).passed);
}

TEST_CASE("comparison interpolates a differently sampled reference") {
  const TimeSeries a = sampled(0.0, 10.0, 11, [](double t) { return cplx(1.0 + t); });
  const TimeSeries b = sampled(0.0, 10.0, 7, [](double t) { return cplx(1.0 + t); });
  const ComparisonReport r = compare_series(a, b, {});
  CHECK(r.samples == 10);
  CHECK(r.max_deviation < 1e-14);
}

TEST_CASE("scaled comparison tolerates zero crossings") {
  const TimeSeries a = sampled(0.0, 30.0, 301, [](double t) { return cplx(std::sin(t) + 0.01); });
  const TimeSeries b = sampled(0.0, 30.0, 301, [](double t) { return cplx(std::sin(t)); });
  CompareOptions o;
  o.threshold = 0.05;
  CHECK_FALSE(compare_series(a, b, o).passed);
  o.mode = DeviationMode::scaled;
  const ComparisonReport r = compare_series(a, b, o);
  double bmax = 0.0;
  for (const cplx& v : b.values) bmax = std::max(bmax, std::abs(v));
  CHECK(r.max_deviation == doctest::Approx(0.01 / bmax).epsilon(1e-12));
  CHECK(r.passed);
}

TEST_CASE("magnitude comparison and worst time") {
  const TimeSeries a{{0.0, 1.0, 2.0, 3.0}, {1.0, -0.5, 0.3, 0.2}, "a", Formalism::FP};
  const TimeSeries b{{0.0, 1.0, 2.0, 3.0}, {1.0, 0.5, 0.2, 0.2}, "b", Formalism::QM};
  CompareOptions o;
  o.magnitudes = true;
  const ComparisonReport r = compare_series(a, b, o);
  CHECK(r.max_deviation == doctest::Approx(0.5));
  CHECK(r.worst_time == 2.0);
  CHECK_FALSE(r.passed);
  o.t_star = 5.0;
  CHECK_THROWS_AS(compare_series(a, b, o), InvalidArgument);
  o.t_star = 0.0;
  o.threshold = -1.0;
  CHECK_THROWS_AS(compare_series(a, b, o), InvalidArgument);
}

TEST_CASE("phase jumps of a real oscillating series sit at sign changes") {
  const TimeSeries s = sampled(0.0, 20.0, 401, [](double t) { return cplx(std::cos(t), 1e-6); });
  const auto jumps = detect_phase_jumps(s);
  // cos changes sign at pi/2 + m pi: six times in [0, 20].
  CHECK(jumps.size() == 6);
  for (const PhaseJump& j : jumps) {
    CHECK(j.aligned);
    CHECK(std::abs(std::abs(j.jump) - kPi) < 1e-3);
    const double nearest = kPi / 2.0 + kPi * std::round((j.t - kPi / 2.0) / kPi);
    CHECK(std::abs(j.t - nearest) <= 0.05 + 1e-12);
  }
}

TEST_CASE("phase jump without a sign change is flagged") {
  const TimeSeries s{{0.0, 1.0, 2.0, 3.0},
                     {std::polar(1.0, -1.0), std::polar(1.0, -1.0), std::polar(1.0, 0.8), std::polar(1.0, 0.8)},
                     "p",
                     Formalism::FP};
  const auto jumps = detect_phase_jumps(s);
  REQUIRE(jumps.size() == 1);
  CHECK(jumps[0].index == 2);
  CHECK_FALSE(jumps[0].aligned);
  CHECK(jumps[0].jump == doctest::Approx(1.8));
  CHECK(detect_phase_jumps(s, 2.0).empty());
}

TEST_CASE("imaginary ratio skips samples next to sign changes") {
  TimeSeries s{{0.0, 1.0, 2.0, 3.0, 4.0, 5.0}, {cplx(2.0, 1e-4), cplx(1.0, 0.0), cplx(0.5, 0.3), cplx(-0.5, 0.3), cplx(-1.0, 2e-4), cplx(-1.5, 0.0)}, "r", Formalism::FP};
  const RealityReport r = imaginary_ratio(s);
  CHECK(r.series_max == doctest::Approx(2.0));
  CHECK(r.max_imag == doctest::Approx(2e-4));
  CHECK(r.ratio == doctest::Approx(1e-4));
  CHECK(r.samples_used == 4);
}

TEST_CASE("CSV round trips") {
  const TimeSeries s = sampled(0.0, 1.0, 11, [](double t) { return cplx(std::exp(-t) / 3.0, std::sin(t) / 7.0); });
  SUBCASE("norm layout keeps the real part") {
    const TimeSeries r = parse_series_csv(norm_csv(s), "n");
    REQUIRE(r.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(r.times[i] == s.times[i]);
      CHECK(r.values[i] == cplx(s.values[i].real(), 0.0));
    }
    const TimeSeries m = parse_series_csv(norm_csv(s, true), "m");
    CHECK(m.values[3].real() == std::abs(s.values[3]));
  }
  SUBCASE("observable layout keeps both parts") {
    const std::string csv = observable_csv(s);
    CHECK(csv.rfind("t,re_value,im_value,phase\n", 0) == 0);
    const TimeSeries r = parse_series_csv(csv, "o", Formalism::QM);
    CHECK(r.formalism == Formalism::QM);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(r.values[i] == s.values[i]);
  }
  SUBCASE("file round trip") {
    write_text_file("ts_roundtrip.csv", observable_csv(s));
    const TimeSeries r = read_series_csv("ts_roundtrip.csv");
    CHECK(r.label == "ts_roundtrip.csv");
    CHECK(r.size() == s.size());
  }
}

TEST_CASE("CSV errors") {
  CHECK_THROWS_AS(parse_series_csv("", "e"), InvalidArgument);
  CHECK_THROWS_AS(parse_series_csv("time,value\n0,1\n", "e"), InvalidArgument);
  CHECK_THROWS_AS(parse_series_csv("t,value\n0,abc\n", "e"), InvalidArgument);
  CHECK_THROWS_AS(parse_series_csv("t,value\n0,1,2\n", "e"), InvalidArgument);
  CHECK_THROWS_AS(parse_series_csv("t,value\n1,1\n0,1\n", "e"), InvalidArgument);
  CHECK_NOTHROW(parse_series_csv("t,value\r\n0,1\r\n\r\n1,2\r\n", "crlf"));
  CHECK_THROWS_AS(read_series_csv("no/such/file.csv"), IoError);
  CHECK_THROWS_AS(write_text_file("no/such/dir/x.csv", "x"), IoError);
}
