#include <cmath>
#include <functional>
#include <numbers>

#include "doctest.h"

#include "magcas/analysis.hpp"

using namespace magcas;

namespace {

SweepSeries synthetic(double alpha, int first, int last, const std::function<std::complex<double>(int)>& c,
                      MaterialParams m = nio()) {
  SweepSeries s{m, alpha, 1.5, {}};
  for (int n = first; n <= last; ++n) s.points.push_back(CasimirPoint{n, c(n), c(n), 1.5});
  return s;
}

double cosine(int n, double period) { return std::cos(2 * std::numbers::pi * n / period); }

AnalysisError::Code code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const AnalysisError& e) {
    return e.code();
  }
  FAIL("no AnalysisError");
  return AnalysisError::Code::disagreement;
}

}  // namespace

TEST_CASE("series validation") {
  SweepSeries s = synthetic(0.0, 1, 5, [](int) { return 1.0; });
  CHECK_NOTHROW(s.validate());
  std::swap(s.points[1], s.points[2]);
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.points.clear();
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("predicted periods") {
  const MaterialParams m = nio();
  CHECK(predicted_period(m, Mode::plus, 0.04) == doctest::Approx(80.4).epsilon(0.01));
  CHECK(predicted_period(m, Mode::plus, 0.05) == doctest::Approx(63.8).epsilon(0.01));
  CHECK(predicted_period(m, Mode::minus, 0.05) == doctest::Approx(115).epsilon(0.01));
  CHECK(predicted_beat_period(m, 0.05) == doctest::Approx(143).epsilon(0.01));

  const double lp = predicted_period(m, Mode::plus, 0.05);
  const double lm = predicted_period(m, Mode::minus, 0.05);
  CHECK(predicted_beat_period(m, 0.05) == doctest::Approx(1.0 / std::abs(1.0 / lp - 1.0 / lm)).epsilon(1e-14));

  CHECK(code_of([&] { predicted_period(m, Mode::plus, 0.005); }) == AnalysisError::Code::no_ep);
  CHECK(code_of([&] { predicted_period(m, Mode::minus, 0.04); }) == AnalysisError::Code::no_ep);
  CHECK(predicted_period(m, Mode::plus, critical_alpha(m, Mode::plus) + 1e-12) > 1e4);

  CHECK(code_of([&] { predicted_beat_period(m, 0.04); }) == AnalysisError::Code::no_beat);
  MaterialParams flat = m;
  flat.K_h = 0.0;
  CHECK(code_of([&] { predicted_beat_period(flat, 0.03); }) == AnalysisError::Code::degenerate_beat);
  CHECK(std::string(to_string(AnalysisError::Code::degenerate_beat)) == "DegenerateBeat");
}

TEST_CASE("period of a synthetic cosine") {
  const SweepSeries s = synthetic(0.0, 1, 300, [](int n) { return cosine(n, 80.0); });
  for (const PeriodMethod method : {PeriodMethod::peak_spacing, PeriodMethod::dominant_frequency}) {
    const PeriodEstimate p = measure_period(s, SeriesPart::real, method);
    CHECK(p.method == method);
    CHECK(p.period == doctest::Approx(80.0).epsilon(1.0 / 80));
    CHECK(p.uncertainty >= 0.0);
  }
  CHECK(measure_period(s, SeriesPart::real, PeriodMethod::peak_spacing).uncertainty == 0.5);
  const auto [spacing, spectral] = measure_period_checked(s, SeriesPart::real);
  CHECK(std::abs(spacing.period - spectral.period) <= spacing.uncertainty + spectral.uncertainty);

  const SweepSeries imag = synthetic(0.0, 1, 300, [](int n) { return std::complex<double>(0.0, cosine(n, 50.0)); });
  CHECK(measure_period(imag, SeriesPart::imag, PeriodMethod::dominant_frequency).period ==
        doctest::Approx(50.0).epsilon(0.02));

  const SweepSeries short_series = synthetic(0.0, 1, 200, [](int n) { return cosine(n, 80.0); });
  CHECK(code_of([&] { measure_period(short_series, SeriesPart::real, PeriodMethod::peak_spacing); }) ==
        AnalysisError::Code::insufficient_span);
}

TEST_CASE("transient below the first period is discarded") {
  // Garbage below n = 80 must not move the estimate at alpha = 0.04.
  const SweepSeries s = synthetic(0.04, 1, 400, [](int n) { return n < 80 ? 50.0 * (n % 7) : cosine(n, 80.4); });
  const PeriodEstimate p = measure_period(s, SeriesPart::real, PeriodMethod::peak_spacing);
  CHECK(p.period == doctest::Approx(80.4).epsilon(0.01));
}

TEST_CASE("two-tone series: spectral peaks and beat envelope") {
  const SweepSeries s = synthetic(0.05, 1, 450, [](int n) { return cosine(n, 63.8) + 0.6 * cosine(n, 115.0); });
  const auto peaks = spectral_peaks(s, SeriesPart::real);
  REQUIRE(peaks.size() >= 2);
  CHECK(peaks[0].period == doctest::Approx(63.8).epsilon(0.03));
  CHECK(peaks[1].period == doctest::Approx(115.0).epsilon(0.05));
  CHECK(peaks[0].magnitude > peaks[1].magnitude);

  const SweepSeries envelope = beat_envelope(s);
  CHECK(envelope.points.size() < s.points.size());
  const PeriodEstimate beat = measure_beat_period(s);
  CHECK(beat.period == doctest::Approx(143.0).epsilon(0.06));

  const SweepSeries single = synthetic(0.04, 1, 300, [](int n) { return cosine(n, 80.4); });
  CHECK(code_of([&] { measure_beat_period(single); }) == AnalysisError::Code::no_beat);
}

TEST_CASE("asymptote") {
  const SweepSeries constant = synthetic(0.0, 1, 50, [](int) { return std::complex<double>(0.25, -0.5); });
  const Asymptote a = estimate_asymptote(constant);
  CHECK(a.value == std::complex<double>(0.25, -0.5));
  CHECK(a.max_deviation == 0.0);
  CHECK(a.window_start == 41);

  const SweepSeries decaying = synthetic(0.0, 1, 300, [](int n) { return 1.0 + 1.0 / n; });
  CHECK(estimate_asymptote(decaying).value.real() == doctest::Approx(1.0).epsilon(0.01));

  const SweepSeries oscillating = synthetic(0.0, 1, 300, [](int n) { return cosine(n, 40.0); });
  CHECK(code_of([&] { estimate_asymptote(oscillating); }) == AnalysisError::Code::not_converged);
}

TEST_CASE("sign changes") {
  const SweepSeries blocks = synthetic(0.0, 1, 60, [](int n) { return (n / 10) % 2 == 0 ? 1.0 : -1.0; });
  const auto changes = sign_changes(blocks);
  REQUIRE(changes.size() == 6);
  for (std::size_t i = 0; i < changes.size(); ++i) {
    CHECK(changes[i].first == 10 * static_cast<int>(i + 1) - 1);
    CHECK(changes[i].second == 10 * static_cast<int>(i + 1));
  }
  CHECK(sign_changes(synthetic(0.0, 1, 60, [](int n) { return -1.0 / n; })).empty());
  // A zero sample is not a change by itself.
  CHECK(sign_changes(synthetic(0.0, 1, 3, [](int n) { return n == 2 ? 0.0 : 1.0; })).empty());
}

TEST_CASE("exceptional-point summary") {
  MaterialParams flat = nio();
  flat.K_h = 0.0;
  const double alpha = 0.03;
  const EpSummary uniaxial = ep_summary(flat, alpha);
  CHECK(uniaxial.modes_degenerate);
  CHECK(uniaxial.distinct_eps == 1);
  CHECK(uniaxial.oscillation);
  CHECK_FALSE(uniaxial.beating);

  const EpSummary biaxial = ep_summary(nio(), 0.05);
  CHECK_FALSE(biaxial.modes_degenerate);
  CHECK(biaxial.distinct_eps == 2);
  CHECK(biaxial.oscillation);
  CHECK(biaxial.beating);

  const EpSummary gapped = ep_summary(nio(), 0.005);
  CHECK(gapped.distinct_eps == 0);
  CHECK_FALSE(gapped.oscillation);
}
