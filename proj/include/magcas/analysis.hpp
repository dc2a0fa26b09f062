#pragma once

// Post-processing of thickness sweeps: oscillation and beat periods, asymptotes
// and sign changes of the Casimir coefficient.

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "magcas/casimir.hpp"
#include "magcas/core.hpp"

namespace magcas {

class AnalysisError : public std::runtime_error {
 public:
  enum class Code { no_ep, no_beat, degenerate_beat, insufficient_span, not_converged, disagreement };

  AnalysisError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

const char* to_string(AnalysisError::Code code);

/// A thickness sweep together with the inputs that produced it.
struct SweepSeries {
  MaterialParams material;
  double alpha = 0.0;
  double b = 0.0;
  std::vector<CasimirPoint> points;  ///< strictly ascending n_z

  void validate() const;
};

enum class SeriesPart { real, imag };
enum class PeriodMethod { peak_spacing, dominant_frequency };

const char* to_string(PeriodMethod method);

struct PeriodEstimate {
  double period = 0.0;
  PeriodMethod method = PeriodMethod::peak_spacing;
  double uncertainty = 0.0;
};

/// pi / (a k_cri) in unit cells. Throws AnalysisError(no_ep) when alpha <= alpha_cri.
double predicted_period(const MaterialParams& m, Mode mode, double alpha);

/// 1 / |1/Lambda_+ - 1/Lambda_-|. Throws no_beat when fewer than two EPs exist and
/// degenerate_beat when the two periods coincide.
double predicted_beat_period(const MaterialParams& m, double alpha);

/// Period of the chosen part of the coefficient. Points with n_z below the longest
/// predicted period are discarded first; what is left must span three periods.
PeriodEstimate measure_period(const SweepSeries& s, SeriesPart part, PeriodMethod method);

/// Both estimators; throws AnalysisError(disagreement) unless they agree within
/// the sum of their uncertainties. Returns {peak spacing, dominant frequency}.
std::pair<PeriodEstimate, PeriodEstimate> measure_period_checked(const SweepSeries& s, SeriesPart part);

struct SpectralPeak {
  double period = 0.0;
  double magnitude = 0.0;
  double uncertainty = 0.0;  ///< one frequency bin, in period
};

/// Local maxima of the spectrum of the chosen part (mean removed, same discard rule
/// as measure_period), strongest first. Peaks below `relative_floor` times the
/// strongest one are dropped.
std::vector<SpectralPeak> spectral_peaks(const SweepSeries& s, SeriesPart part, double relative_floor = 0.2);

/// Envelope of a beating series: |Re C| smoothed by a moving average over the
/// shortest predicted period. Returned as a series of the same metadata whose
/// coefficients carry the envelope in the real part.
SweepSeries beat_envelope(const SweepSeries& s);

/// Period of the envelope, by the dominant-frequency estimator. Throws no_beat or
/// degenerate_beat under the same conditions as predicted_beat_period.
PeriodEstimate measure_beat_period(const SweepSeries& s);

struct Asymptote {
  std::complex<double> value;  ///< mean over the window
  double max_deviation = 0.0;  ///< max |C - value| over the window
  int window_start = 0;        ///< first n_z of the window
};

/// Mean of C^[b] over the final 20% of the series. Throws not_converged when the
/// window varies by more than 5% of the largest |C| in the series.
Asymptote estimate_asymptote(const SweepSeries& s);

/// Consecutive (n_z, n_z') pairs across which Re C^[b] changes sign.
std::vector<std::pair<int, int>> sign_changes(const SweepSeries& s);

/// Material-level summary at a damping where every mode that can host an EP does.
struct EpSummary {
  bool modes_degenerate = false;
  int distinct_eps = 0;
  bool oscillation = false;
  bool beating = false;
};

/// Summary at the given alpha.
EpSummary ep_summary(const MaterialParams& m, double alpha);

}  // namespace magcas
