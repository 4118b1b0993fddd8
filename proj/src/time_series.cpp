#include "time_series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace nhqm {
namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double wrap_phase(double d) {
  while (d > kPi) d -= 2.0 * kPi;
  while (d <= -kPi) d += 2.0 * kPi;
  return d;
}

bool sign_change(const TimeSeries& s, std::size_t i) {  // between i and i+1
  if (i + 1 >= s.size()) return false;
  const double a = s.values[i].real();
  const double b = s.values[i + 1].real();
  return (a <= 0.0 && b > 0.0) || (a >= 0.0 && b < 0.0) || (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() && s.find_first_not_of(" \t\r", pos) != std::string::npos) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(where + ": cannot parse number '" + s + "'");
  }
}

}  // namespace

const char* to_string(Formalism f) noexcept {
  switch (f) {
    case Formalism::FP: return "FP";
    case Formalism::QM: return "QM";
    case Formalism::NP: return "NP";
  }
  return "unknown";
}

void TimeSeries::validate() const {
  if (times.size() != values.size())
    throw InvalidArgument("time series '" + label + "': times and values differ in length");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw InvalidArgument("time series '" + label + "': non-finite time");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InvalidArgument("time series '" + label + "': times are not strictly increasing");
  }
}

TimeSeries effective_decay_rate(const TimeSeries& s) {
  s.validate();
  if (s.size() < 2) throw InvalidArgument("effective_decay_rate: need at least two samples");
  std::vector<double> lg(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double m = std::abs(s.values[i]);
    if (!(m > 0.0)) throw InvalidArgument("effective_decay_rate: non-positive magnitude at t = " + fmt17(s.times[i]));
    lg[i] = std::log(m);
  }
  TimeSeries out;
  out.times = s.times;
  out.label = "rate(" + s.label + ")";
  out.formalism = s.formalism;
  out.values.resize(s.size());
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    out.values[i] = -(lg[hi] - lg[lo]) / (s.times[hi] - s.times[lo]);
  }
  return out;
}

cplx interpolate(const TimeSeries& s, double t) {
  if (s.size() == 0 || t < s.times.front() || t > s.times.back())
    throw InvalidArgument("interpolate: time outside the series range");
  const auto it = std::lower_bound(s.times.begin(), s.times.end(), t);
  const auto j = static_cast<std::size_t>(it - s.times.begin());
  if (s.times[j] == t) return s.values[j];
  const double w = (t - s.times[j - 1]) / (s.times[j] - s.times[j - 1]);
  return (1.0 - w) * s.values[j - 1] + w * s.values[j];
}

ComparisonReport compare_series(const TimeSeries& a, const TimeSeries& b, const CompareOptions& options) {
  a.validate();
  b.validate();
  if (!(options.threshold >= 0.0)) throw InvalidArgument("compare_series: threshold must be non-negative");
  ComparisonReport r;
  r.t_star = options.t_star;
  r.threshold = options.threshold;
  r.mode = options.mode;
  r.magnitudes = options.magnitudes;
  r.a_label = a.label;
  r.b_label = b.label;
  r.a_formalism = a.formalism;
  r.b_formalism = b.formalism;
  if (a.size() == 0 || b.size() == 0) throw InvalidArgument("compare_series: empty series");

  std::vector<double> ts;
  std::vector<cplx> va;
  std::vector<cplx> vb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a.times[i];
    if (!(t > options.t_star) || t < b.times.front() || t > b.times.back()) continue;
    cplx x = a.values[i];
    cplx y = interpolate(b, t);
    if (options.magnitudes) {
      x = std::abs(x);
      y = std::abs(y);
    }
    ts.push_back(t);
    va.push_back(x);
    vb.push_back(y);
  }
  if (ts.empty()) throw InvalidArgument("compare_series: no common samples beyond t* = " + fmt17(options.t_star));

  double scale = 0.0;
  for (const cplx& y : vb) scale = std::max(scale, std::abs(y));
  double sum = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double denom = options.mode == DeviationMode::pointwise ? std::abs(vb[i]) : scale;
    const double diff = std::abs(va[i] - vb[i]);
    const double dev = denom > 0.0 ? diff / denom : (diff == 0.0 ? 0.0 : INFINITY);
    sum += dev;
    if (i == 0 || dev > r.max_deviation) {
      r.max_deviation = dev;
      r.worst_time = ts[i];
    }
  }
  r.samples = ts.size();
  r.mean_deviation = sum / static_cast<double>(ts.size());
  r.passed = r.max_deviation < options.threshold;

  if (ts.size() >= 2) {
    TimeSeries sa{ts, va, a.label, a.formalism};
    TimeSeries sb{ts, vb, b.label, b.formalism};
    try {
      const TimeSeries ka = effective_decay_rate(sa);
      const TimeSeries kb = effective_decay_rate(sb);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        r.a_mean_rate += ka.values[i].real();
        r.b_mean_rate += kb.values[i].real();
      }
      r.a_mean_rate /= static_cast<double>(ts.size());
      r.b_mean_rate /= static_cast<double>(ts.size());
      r.has_rates = true;
    } catch (const InvalidArgument&) {
      r.has_rates = false;
    }
  }
  return r;
}

std::vector<PhaseJump> detect_phase_jumps(const TimeSeries& s, double min_jump) {
  s.validate();
  std::vector<PhaseJump> out;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s.values[i] == cplx(0.0) || s.values[i - 1] == cplx(0.0)) continue;
    const double d = wrap_phase(std::arg(s.values[i]) - std::arg(s.values[i - 1]));
    if (std::abs(d) <= min_jump) continue;
    PhaseJump j;
    j.index = i;
    j.t = s.times[i];
    j.jump = d;
    j.aligned = sign_change(s, i - 1) || (i >= 2 && sign_change(s, i - 2)) || sign_change(s, i);
    out.push_back(j);
  }
  return out;
}

RealityReport imaginary_ratio(const TimeSeries& s) {
  s.validate();
  RealityReport r;
  for (const cplx& v : s.values) r.series_max = std::max(r.series_max, std::abs(v));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool near_zero = sign_change(s, i) || (i > 0 && sign_change(s, i - 1));
    if (near_zero) continue;
    r.max_imag = std::max(r.max_imag, std::abs(s.values[i].imag()));
    ++r.samples_used;
  }
  r.ratio = r.series_max > 0.0 ? r.max_imag / r.series_max : 0.0;
  return r;
}

std::string norm_csv(const TimeSeries& s, bool magnitudes) {
  s.validate();
  std::string out = "t,value\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out += fmt17(s.times[i]) + ',' + fmt17(magnitudes ? std::abs(s.values[i]) : s.values[i].real()) + '\n';
  return out;
}

std::string observable_csv(const TimeSeries& s) {
  s.validate();
  std::string out = "t,re_value,im_value,phase\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out += fmt17(s.times[i]) + ',' + fmt17(s.values[i].real()) + ',' + fmt17(s.values[i].imag()) + ',' +
           fmt17(std::arg(s.values[i])) + '\n';
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw IoError("write failed for " + path);
}

TimeSeries parse_series_csv(const std::string& text, const std::string& label, Formalism formalism) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(label + ": empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  bool observable = false;
  if (header == std::vector<std::string>{"t", "value"}) {
    observable = false;
  } else if (header == std::vector<std::string>{"t", "re_value", "im_value", "phase"}) {
    observable = true;
  } else {
    throw InvalidArgument(label + ": unrecognized CSV header '" + line + "'");
  }
  TimeSeries s;
  s.label = label;
  s.formalism = formalism;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    const std::string where = label + ":" + std::to_string(lineno);
    if (f.size() != header.size()) throw InvalidArgument(where + ": expected " + std::to_string(header.size()) + " columns");
    s.times.push_back(parse_double(f[0], where));
    if (observable)
      s.values.emplace_back(parse_double(f[1], where), parse_double(f[2], where));
    else
      s.values.emplace_back(parse_double(f[1], where), 0.0);
  }
  s.validate();
  return s;
}

TimeSeries read_series_csv(const std::string& path, Formalism formalism) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_series_csv(ss.str(), path, formalism);
}

}  // namespace nhqm
