#include "magcas/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>

namespace magcas {

namespace {

using Code = AnalysisError::Code;

constexpr int kOversampling = 64;  // frequency grid points per DFT bin

struct Samples {
  std::vector<double> n;
  std::vector<double> y;
};

double part_of(std::complex<double> z, SeriesPart part) { return part == SeriesPart::real ? z.real() : z.imag(); }

// Period of the EP that forms first as alpha grows, if it exists.
std::optional<double> first_ep_period(const SweepSeries& s) {
  if (const auto k = critical_wavenumber(s.material, Mode::plus, s.alpha)) return std::numbers::pi / *k;
  return std::nullopt;
}

void require_span(const SweepSeries& s, double period) {
  const double span = s.points.back().n_z - s.points.front().n_z;
  if (span < 3.0 * period) {
    throw AnalysisError(Code::insufficient_span, "series spans " + std::to_string(span) +
                                                     " unit cells, fewer than three periods of " +
                                                     std::to_string(period));
  }
}

// The transient below the first EP period is not part of the oscillation.
Samples stationary_part(const SweepSeries& s, SeriesPart part) {
  const double start = first_ep_period(s).value_or(0.0);
  Samples out;
  for (const CasimirPoint& p : s.points) {
    if (p.n_z < start) continue;
    out.n.push_back(p.n_z);
    out.y.push_back(part_of(p.coeff, part));
  }
  if (out.n.size() < 8) throw AnalysisError(Code::insufficient_span, "fewer than 8 points after the transient");
  return out;
}

// Removes the least-squares line.
std::vector<double> detrended(const Samples& s) {
  const double count = static_cast<double>(s.n.size());
  double mean_n = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < s.n.size(); ++i) {
    mean_n += s.n[i];
    mean_y += s.y[i];
  }
  mean_n /= count;
  mean_y /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < s.n.size(); ++i) {
    sxy += (s.n[i] - mean_n) * (s.y[i] - mean_y);
    sxx += (s.n[i] - mean_n) * (s.n[i] - mean_n);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  std::vector<double> out(s.n.size());
  for (std::size_t i = 0; i < s.n.size(); ++i) out[i] = s.y[i] - mean_y - slope * (s.n[i] - mean_n);
  return out;
}

struct Spectrum {
  std::vector<double> freq;
  std::vector<double> magnitude;
  double bin = 0.0;  // 1 / span
};

// |sum_j h_j y_j exp(-2 pi i f n_j)| with a Hann taper h, on an oversampled grid
// from one bin up to Nyquist.
Spectrum spectrum(const Samples& s) {
  std::vector<double> y = detrended(s);
  if (y.size() > 1) {
    const double last = static_cast<double>(y.size() - 1);
    for (std::size_t j = 0; j < y.size(); ++j) y[j] *= 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * j / last);
  }
  Spectrum out;
  out.bin = 1.0 / (s.n.back() - s.n.front() + 1.0);
  const double step = out.bin / kOversampling;
  for (double f = out.bin; f <= 0.5; f += step) {
    std::complex<double> sum;
    for (std::size_t j = 0; j < y.size(); ++j) sum += y[j] * std::polar(1.0, -2.0 * std::numbers::pi * f * s.n[j]);
    out.freq.push_back(f);
    out.magnitude.push_back(std::abs(sum));
  }
  return out;
}

// Vertex offset, in grid steps, of the parabola through three equally spaced values.
double parabolic_offset(double left, double mid, double right) {
  const double denom = left - 2.0 * mid + right;
  return denom < 0.0 ? 0.5 * (left - right) / denom : 0.0;
}

std::vector<SpectralPeak> peaks_of(const Spectrum& sp, double relative_floor) {
  std::vector<SpectralPeak> peaks;
  const std::size_t size = sp.magnitude.size();
  for (std::size_t i = 1; i + 1 < size; ++i) {
    const double m = sp.magnitude[i];
    if (!(m > sp.magnitude[i - 1] && m >= sp.magnitude[i + 1])) continue;
    const double step = sp.freq[i + 1] - sp.freq[i];
    const double f = sp.freq[i] + step * parabolic_offset(sp.magnitude[i - 1], m, sp.magnitude[i + 1]);
    peaks.push_back(SpectralPeak{1.0 / f, m, sp.bin / (f * f)});
  }
  std::sort(peaks.begin(), peaks.end(), [](const SpectralPeak& a, const SpectralPeak& b) {
    return a.magnitude > b.magnitude;
  });
  if (!peaks.empty()) {
    const double floor = relative_floor * peaks.front().magnitude;
    std::erase_if(peaks, [floor](const SpectralPeak& p) { return p.magnitude < floor; });
  }
  return peaks;
}

PeriodEstimate dominant_frequency(const Samples& s) {
  const Spectrum sp = spectrum(s);
  const std::vector<SpectralPeak> peaks = peaks_of(sp, 0.0);
  if (peaks.empty()) throw AnalysisError(Code::insufficient_span, "spectrum has no interior maximum");
  return PeriodEstimate{peaks.front().period, PeriodMethod::dominant_frequency, peaks.front().uncertainty};
}

PeriodEstimate peak_spacing(const Samples& s) {
  std::vector<double> maxima;
  for (std::size_t i = 1; i + 1 < s.y.size(); ++i) {
    if (s.y[i] > s.y[i - 1] && s.y[i] >= s.y[i + 1]) {
      const double step = s.n[i + 1] - s.n[i];
      maxima.push_back(s.n[i] + step * parabolic_offset(s.y[i - 1], s.y[i], s.y[i + 1]));
    }
  }
  if (maxima.size() < 2) throw AnalysisError(Code::insufficient_span, "fewer than two maxima");
  const double period = (maxima.back() - maxima.front()) / static_cast<double>(maxima.size() - 1);
  const double sampling = s.n[1] - s.n[0];
  return PeriodEstimate{period, PeriodMethod::peak_spacing, 0.5 * sampling};
}

}  // namespace

const char* to_string(AnalysisError::Code code) {
  switch (code) {
    case Code::no_ep: return "NoEP";
    case Code::no_beat: return "NoBeat";
    case Code::degenerate_beat: return "DegenerateBeat";
    case Code::insufficient_span: return "InsufficientSpan";
    case Code::not_converged: return "NotConverged";
    case Code::disagreement: return "Disagreement";
  }
  return "?";
}

const char* to_string(PeriodMethod method) {
  return method == PeriodMethod::peak_spacing ? "peak-spacing" : "dominant-frequency";
}

void SweepSeries::validate() const {
  material.validate();
  if (!std::isfinite(alpha) || alpha < 0.0) throw ValidationError("alpha must be finite and >= 0");
  if (points.empty()) throw ValidationError("sweep series must not be empty");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].n_z <= points[i - 1].n_z) throw ValidationError("sweep series n_z must be strictly ascending");
  }
}

double predicted_period(const MaterialParams& m, Mode mode, double alpha) {
  const auto k = critical_wavenumber(m, mode, alpha);
  if (!k) {
    throw AnalysisError(Code::no_ep, std::string("no exceptional point for mode ") + to_string(mode) +
                                         " at alpha=" + std::to_string(alpha));
  }
  return std::numbers::pi / *k;
}

double predicted_beat_period(const MaterialParams& m, double alpha) {
  const auto k_plus = critical_wavenumber(m, Mode::plus, alpha);
  const auto k_minus = critical_wavenumber(m, Mode::minus, alpha);
  if (!k_plus || !k_minus) throw AnalysisError(Code::no_beat, "beating needs exceptional points in both modes");
  // 1/Lambda = k / pi.
  const double diff = std::abs(*k_plus - *k_minus) / std::numbers::pi;
  if (diff <= 1e-12 * std::max(*k_plus, *k_minus) / std::numbers::pi) {
    throw AnalysisError(Code::degenerate_beat, "the two oscillation periods coincide");
  }
  return 1.0 / diff;
}

PeriodEstimate measure_period(const SweepSeries& s, SeriesPart part, PeriodMethod method) {
  s.validate();
  const Samples samples = stationary_part(s, part);
  const PeriodEstimate estimate = method == PeriodMethod::peak_spacing ? peak_spacing(samples)
                                                                       : dominant_frequency(samples);
  require_span(s, estimate.period);
  return estimate;
}

std::pair<PeriodEstimate, PeriodEstimate> measure_period_checked(const SweepSeries& s, SeriesPart part) {
  const PeriodEstimate peaks = measure_period(s, part, PeriodMethod::peak_spacing);
  const PeriodEstimate spectral = measure_period(s, part, PeriodMethod::dominant_frequency);
  if (std::abs(peaks.period - spectral.period) > peaks.uncertainty + spectral.uncertainty) {
    throw AnalysisError(Code::disagreement, "peak spacing " + std::to_string(peaks.period) +
                                                " and dominant frequency " + std::to_string(spectral.period) +
                                                " disagree beyond their uncertainties");
  }
  return {peaks, spectral};
}

std::vector<SpectralPeak> spectral_peaks(const SweepSeries& s, SeriesPart part, double relative_floor) {
  s.validate();
  return peaks_of(spectrum(stationary_part(s, part)), relative_floor);
}

SweepSeries beat_envelope(const SweepSeries& s) {
  s.validate();
  const double shortest = predicted_period(s.material, Mode::plus, s.alpha);
  const int window = std::max(1, static_cast<int>(std::lround(shortest)));
  const Samples rectified = [&] {
    Samples r = stationary_part(s, SeriesPart::real);
    for (double& v : r.y) v = std::abs(v);
    return r;
  }();
  if (rectified.y.size() < static_cast<std::size_t>(window)) {
    throw AnalysisError(Code::insufficient_span, "series shorter than one smoothing window");
  }
  SweepSeries out{s.material, s.alpha, s.b, {}};
  double running = 0.0;
  for (std::size_t i = 0; i < rectified.y.size(); ++i) {
    running += rectified.y[i];
    if (i >= static_cast<std::size_t>(window)) running -= rectified.y[i - window];
    if (i + 1 < static_cast<std::size_t>(window)) continue;
    // Label each average by the centre of its window, rounded down.
    const std::size_t centre = i + 1 - window + (window - 1) / 2;
    const double mean = running / window;
    const int n_z = static_cast<int>(rectified.n[centre]);
    out.points.push_back(CasimirPoint{n_z, {}, {mean, 0.0}, s.b});
  }
  return out;
}

PeriodEstimate measure_beat_period(const SweepSeries& s) {
  predicted_beat_period(s.material, s.alpha);  // throws when there is no beat to measure
  const SweepSeries envelope = beat_envelope(s);
  Samples samples;
  for (const CasimirPoint& p : envelope.points) {
    samples.n.push_back(p.n_z);
    samples.y.push_back(p.coeff.real());
  }
  if (samples.n.size() < 8) throw AnalysisError(Code::insufficient_span, "envelope has fewer than 8 points");
  return dominant_frequency(samples);
}

Asymptote estimate_asymptote(const SweepSeries& s) {
  s.validate();
  const std::size_t size = s.points.size();
  const std::size_t window = std::max<std::size_t>(1, (size + 4) / 5);
  const std::size_t first = size - window;

  std::complex<double> mean;
  for (std::size_t i = first; i < size; ++i) mean += s.points[i].coeff;
  mean /= static_cast<double>(window);

  double deviation = 0.0;
  for (std::size_t i = first; i < size; ++i) deviation = std::max(deviation, std::abs(s.points[i].coeff - mean));
  double largest = 0.0;
  for (const CasimirPoint& p : s.points) largest = std::max(largest, std::abs(p.coeff));

  if (deviation > 0.05 * largest) {
    throw AnalysisError(Code::not_converged, "final window varies by " + std::to_string(deviation) +
                                                 ", more than 5% of the series maximum " +
                                                 std::to_string(largest));
  }
  return Asymptote{mean, deviation, s.points[first].n_z};
}

std::vector<std::pair<int, int>> sign_changes(const SweepSeries& s) {
  s.validate();
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    const double a = s.points[i - 1].coeff.real();
    const double b = s.points[i].coeff.real();
    if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) out.emplace_back(s.points[i - 1].n_z, s.points[i].n_z);
  }
  return out;
}

EpSummary ep_summary(const MaterialParams& m, double alpha) {
  const DerivedParams plus = derive_params(m, Mode::plus, alpha);
  const DerivedParams minus = derive_params(m, Mode::minus, alpha);
  EpSummary out;
  out.modes_degenerate = plus.A == minus.A && plus.delta == minus.delta && plus.D == minus.D;
  const auto k_plus = critical_wavenumber(m, Mode::plus, alpha);
  const auto k_minus = critical_wavenumber(m, Mode::minus, alpha);
  out.distinct_eps = (k_plus ? 1 : 0) + (k_minus ? 1 : 0);
  if (k_plus && k_minus && *k_plus == *k_minus) out.distinct_eps = 1;
  out.oscillation = out.distinct_eps >= 1;
  out.beating = out.distinct_eps >= 2;
  return out;
}

}  // namespace magcas
