#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "types.hpp"

namespace nhqm {

enum class Formalism { FP, QM, NP };

const char* to_string(Formalism f) noexcept;

/// Sampled scalar quantity with the formalism that produced it.
struct TimeSeries {
  std::vector<double> times;
  std::vector<cplx> values;
  std::string label;
  Formalism formalism = Formalism::FP;

  std::size_t size() const noexcept { return times.size(); }
  /// Strictly increasing finite times, one value per time.
  void validate() const;
};

/// -d/dt ln|value| by centered differences, one-sided at the ends. Throws on
/// a non-positive magnitude.
TimeSeries effective_decay_rate(const TimeSeries& s);

/// Linear interpolation of s at time t (t inside the sampled range).
cplx interpolate(const TimeSeries& s, double t);

enum class DeviationMode {
  pointwise,  // |a - b| / |b| at each sample
  scaled,     // |a - b| / max |b| over the compared window
};

struct CompareOptions {
  double t_star = 0.0;
  double threshold = 0.05;
  DeviationMode mode = DeviationMode::pointwise;
  bool magnitudes = false;  // compare |a| with |b|
};

struct ComparisonReport {
  double t_star = 0.0;
  double threshold = 0.0;
  DeviationMode mode = DeviationMode::pointwise;
  bool magnitudes = false;
  std::size_t samples = 0;
  double max_deviation = 0.0;
  double mean_deviation = 0.0;
  double worst_time = 0.0;
  bool passed = false;
  std::string a_label;
  std::string b_label;
  Formalism a_formalism = Formalism::FP;
  Formalism b_formalism = Formalism::QM;
  // Mean effective decay rates over t > t* when both series are positive.
  bool has_rates = false;
  double a_mean_rate = 0.0;
  double b_mean_rate = 0.0;
};

/// Deviations of a from b at a's sample times with t > t*, b linearly
/// interpolated when the samplings differ. Throws when no sample of a past t*
/// falls inside b's range.
ComparisonReport compare_series(const TimeSeries& a, const TimeSeries& b, const CompareOptions& options);

struct PhaseJump {
  std::size_t index = 0;  // jump between samples index-1 and index
  double t = 0.0;
  double jump = 0.0;      // principal phase difference
  bool aligned = false;   // a sign change of Re lies within one sample
};

/// Adjacent samples whose principal phase difference exceeds min_jump.
std::vector<PhaseJump> detect_phase_jumps(const TimeSeries& s, double min_jump = kPi / 2.0);

struct RealityReport {
  double max_imag = 0.0;
  double series_max = 0.0;
  double ratio = 0.0;  // max_imag / series_max
  std::size_t samples_used = 0;
};

/// max |Im v| over samples not adjacent to a sign change of Re v, relative to
/// max |v| over the whole series.
RealityReport imaginary_ratio(const TimeSeries& s);

/// CSV writers. Norms: header "t,value" (real part, or |value| with
/// magnitudes). Observables: "t,re_value,im_value,phase". 17 significant digits.
std::string norm_csv(const TimeSeries& s, bool magnitudes = false);
std::string observable_csv(const TimeSeries& s);
void write_text_file(const std::string& path, const std::string& text);

/// Reads either CSV layout back; label is the file path.
TimeSeries read_series_csv(const std::string& path, Formalism formalism = Formalism::FP);
TimeSeries parse_series_csv(const std::string& text, const std::string& label, Formalism formalism = Formalism::FP);

}  // namespace nhqm
