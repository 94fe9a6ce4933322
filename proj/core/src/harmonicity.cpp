#include "multiphonic/harmonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "multiphonic/error.hpp"

namespace mph {

namespace {

void require_ascending(std::span<const Partial> partials) {
  for (std::size_t i = 1; i < partials.size(); ++i) {
    if (!(partials[i].hz() > partials[i - 1].hz())) {
      throw Error(ErrorCode::InvalidSpec, "partials must be strictly ascending in frequency");
    }
  }
}

int nearest_harmonic(double hz, double f0) {
  return static_cast<int>(std::max(1.0, std::round(hz / f0)));
}

double deviation_cents(double hz, int n, double f0) { return 1200.0 * std::log2(hz / (n * f0)); }

std::vector<double> normalized_weights(std::span<const Partial> partials) {
  std::vector<double> w(partials.size());
  double total = 0.0;
  for (std::size_t i = 0; i < partials.size(); ++i) total += w[i] = partials[i].power();
  if (!(total > 0.0)) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
  } else {
    for (auto& x : w) x /= total;
  }
  return w;
}

double clipped_objective(std::span<const Partial> partials, std::span<const double> w, double f0,
                         double tol) {
  double j = 0.0;
  for (std::size_t i = 0; i < partials.size(); ++i) {
    const double d = std::min(std::abs(deviation_cents(partials[i].hz(), nearest_harmonic(partials[i].hz(), f0), f0)), tol);
    j += w[i] * d * d;
  }
  return j;
}

}  // namespace

double HarmonicFit::assigned_fraction() const noexcept {
  return partial_count == 0 ? 0.0
                            : static_cast<double>(assignments.size()) / static_cast<double>(partial_count);
}

std::optional<int> HarmonicFit::harmonic_of(std::size_t partial_index) const noexcept {
  for (const auto& a : assignments) {
    if (a.partial_index == partial_index) return a.harmonic;
  }
  return std::nullopt;
}

std::optional<std::size_t> HarmonicFit::partial_of(int harmonic) const noexcept {
  for (const auto& a : assignments) {
    if (a.harmonic == harmonic) return a.partial_index;
  }
  return std::nullopt;
}

HarmonicFit assign_harmonic_numbers(std::span<const Partial> partials, Frequency f0, double tolerance_cents) {
  require_ascending(partials);
  if (!(tolerance_cents >= 0.0)) throw Error(ErrorCode::Configuration, "tolerance must be >= 0");

  // harmonic -> (partial index, deviation); closest claimant wins.
  std::map<int, HarmonicAssignment> best;
  for (std::size_t i = 0; i < partials.size(); ++i) {
    const int n = nearest_harmonic(partials[i].hz(), f0.hz());
    const double dev = deviation_cents(partials[i].hz(), n, f0.hz());
    if (std::abs(dev) > tolerance_cents) continue;
    auto [it, inserted] = best.try_emplace(n, HarmonicAssignment{i, n, dev});
    if (!inserted && std::abs(dev) < std::abs(it->second.deviation_cents)) it->second = {i, n, dev};
  }

  HarmonicFit fit;
  fit.f0 = f0;
  fit.tolerance_cents = tolerance_cents;
  fit.partial_count = partials.size();
  for (const auto& [n, a] : best) fit.assignments.push_back(a);
  std::sort(fit.assignments.begin(), fit.assignments.end(),
            [](const auto& a, const auto& b) { return a.partial_index < b.partial_index; });

  std::size_t next = 0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < partials.size(); ++i) {
    if (next < fit.assignments.size() && fit.assignments[next].partial_index == i) {
      sum_sq += fit.assignments[next].deviation_cents * fit.assignments[next].deviation_cents;
      ++next;
    } else {
      fit.unassigned.push_back(i);
    }
  }
  fit.rms_deviation_cents =
      fit.assignments.empty() ? 0.0 : std::sqrt(sum_sq / static_cast<double>(fit.assignments.size()));
  return fit;
}

HarmonicFit fit_least_deviating_series(std::span<const Partial> partials, const FitOptions& options) {
  options.search.validate();
  if (partials.size() < 2) throw Error(ErrorCode::InsufficientData, "harmonic fit needs at least two partials");
  require_ascending(partials);
  const double tol = options.tolerance_cents;
  if (!(tol > 0.0)) throw Error(ErrorCode::Configuration, "assignment tolerance must be positive");

  const auto w = normalized_weights(partials);
  const auto steps = static_cast<std::size_t>(
      std::floor(1200.0 * std::log2(options.search.max_hz / options.search.min_hz)));
  std::vector<double> grid(steps + 1);
  std::vector<double> objective(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    grid[k] = options.search.min_hz * std::exp2(static_cast<double>(k) / 1200.0);
    objective[k] = clipped_objective(partials, w, grid[k], tol);
  }

  const double best = *std::min_element(objective.begin(), objective.end());
  const double admit = best + std::max(4.0, 0.25 * best);
  std::size_t pick = 0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const bool left_ok = k == 0 || objective[k] <= objective[k - 1];
    const bool right_ok = k == steps || objective[k] <= objective[k + 1];
    if (left_ok && right_ok && objective[k] <= admit) pick = k;
  }

  double f0 = grid[pick];
  for (int iter = 0; iter < 8; ++iter) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < partials.size(); ++i) {
      const int n = nearest_harmonic(partials[i].hz(), f0);
      if (std::abs(deviation_cents(partials[i].hz(), n, f0)) > tol) continue;
      const double wi = std::max(w[i], 1e-12);
      num += wi * std::log(partials[i].hz() / n);
      den += wi;
    }
    if (den == 0.0) break;
    const double next = std::clamp(std::exp(num / den), options.search.min_hz, options.search.max_hz);
    const bool converged = std::abs(next - f0) <= 1e-12 * f0;
    f0 = next;
    if (converged) break;
  }

  auto fit = assign_harmonic_numbers(partials, Frequency{f0}, tol);
  if (fit.assignments.empty()) {
    throw Error(ErrorCode::DegenerateFit, "no partial lies within tolerance of the fitted series");
  }
  return fit;
}

std::vector<HarmonicFit> fit_series_on_residuals(std::span<const Partial> partials, const FitOptions& options,
                                                 std::size_t max_series) {
  std::vector<HarmonicFit> out;
  std::vector<std::size_t> remaining(partials.size());
  std::iota(remaining.begin(), remaining.end(), 0);

  while (out.size() < max_series && remaining.size() >= 2) {
    std::vector<Partial> subset;
    subset.reserve(remaining.size());
    for (auto i : remaining) subset.push_back(partials[i]);

    HarmonicFit fit;
    try {
      fit = fit_least_deviating_series(subset, options);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateFit) break;
      throw;
    }
    if (fit.assignments.size() < 2) break;

    std::vector<std::size_t> left;
    for (auto& a : fit.assignments) a.partial_index = remaining[a.partial_index];
    for (auto u : fit.unassigned) left.push_back(remaining[u]);
    fit.unassigned = left;
    fit.partial_count = partials.size();
    out.push_back(std::move(fit));
    remaining = std::move(left);
  }
  return out;
}

std::vector<Partial> annotate_partials(std::span<const Partial> partials, const HarmonicFit& fit) {
  std::vector<Partial> out(partials.begin(), partials.end());
  for (auto& p : out) p.set_harmonic_index(std::nullopt);
  for (const auto& a : fit.assignments) {
    if (a.partial_index < out.size()) out[a.partial_index].set_harmonic_index(a.harmonic);
  }
  return out;
}

std::string_view harmonicity_name(Harmonicity h) noexcept {
  return h == Harmonicity::QuasiHarmonic ? "quasi-harmonic" : "inharmonic";
}

HarmonicityEvidence harmonicity_evidence(const HarmonicFit& fit, const SpacingProfile& profile) {
  HarmonicityEvidence e;
  e.rms_deviation_cents = fit.rms_deviation_cents;
  e.assigned_fraction = fit.assigned_fraction();
  if (!fit.assignments.empty()) {
    int lo = fit.assignments.front().harmonic;
    int hi = lo;
    for (const auto& a : fit.assignments) {
      lo = std::min(lo, a.harmonic);
      hi = std::max(hi, a.harmonic);
    }
    e.harmonic_coverage = static_cast<double>(fit.assignments.size()) / static_cast<double>(hi - lo + 1);
  }
  if (profile.center > 0.0) {
    e.spacing_ratio = profile.center / fit.f0.hz();
    const double cents = 1200.0 * std::log2(e.spacing_ratio);
    e.folded_spacing_cents = cents - 1200.0 * std::floor((cents + 600.0) / 1200.0);
  } else {
    e.folded_spacing_cents = 600.0;
  }
  return e;
}

Harmonicity decide_harmonicity(const HarmonicityEvidence& e, const HarmonicityThresholds& t) {
  const bool inharmonic = e.assigned_fraction < t.min_assigned_fraction ||
                          e.rms_deviation_cents > t.max_rms_cents ||
                          std::abs(e.folded_spacing_cents) > t.max_spacing_offset_cents ||
                          e.harmonic_coverage < t.min_harmonic_coverage;
  return inharmonic ? Harmonicity::Inharmonic : Harmonicity::QuasiHarmonic;
}

HarmonicityClass classify_harmonicity(const HarmonicFit& fit, const SpacingProfile& profile,
                                      const HarmonicityThresholds& t) {
  HarmonicityClass c;
  c.evidence = harmonicity_evidence(fit, profile);
  c.label = decide_harmonicity(c.evidence, t);
  return c;
}

namespace {

// Parabolic vertex of the log-power envelope around bin k.
std::pair<double, double> envelope_vertex(const Spectrum& s, std::size_t k) {
  const auto p = s.powers();
  const auto f = s.frequencies();
  if (k == 0 || k + 1 >= p.size()) return {f[k], p[k]};
  auto db = [](double x) { return 10.0 * std::log10(std::max(x, 1e-300)); };
  const double a = db(p[k - 1]);
  const double b = db(p[k]);
  const double c = db(p[k + 1]);
  const double denom = a - 2.0 * b + c;
  double delta = 0.0;
  if (denom < 0.0) delta = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  return {f[k] + delta * s.bin_spacing(), std::pow(10.0, (b - 0.25 * (a - c) * delta) / 10.0)};
}

struct EnvelopePeak {
  double hz = 0.0;
  double salience = 0.0;
  bool dominant = false;
};

EnvelopePeak envelope_peak(const Spectrum& smoothed, double lo_hz, double hi_hz) {
  const auto p = smoothed.powers();
  const auto f = smoothed.frequencies();
  std::size_t best = p.size();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (f[k] < lo_hz || f[k] > hi_hz) continue;
    sum += p[k];
    ++count;
    if (best == p.size() || p[k] > p[best]) best = k;
  }
  EnvelopePeak out;
  if (best == p.size() || count == 0 || !(p[best] > 0.0)) return out;
  const double mean = sum / static_cast<double>(count);
  auto [hz, value] = envelope_vertex(smoothed, best);
  out.hz = hz;
  out.salience = std::clamp(1.0 - mean / value, 0.0, 1.0);
  // A dominant envelope peak stands at least 3 dB above the in-band mean and
  // is not pinned to the band edge.
  out.dominant = value >= 2.0 * mean && f[best] > lo_hz && f[best] < hi_hz;
  return out;
}

}  // namespace

CarrierModulation decompose_carrier_modulation(std::span<const double> samples, double rate,
                                               const DecomposeOptions& options) {
  options.modulation_search.validate();
  const auto raw = compute_power_spectrum(samples, rate, options.window);
  const auto contour = LoudnessContour::iso226(options.phon);
  const auto weighted = apply_equal_loudness_weighting(raw, contour);
  const auto partials = extract_partials(raw, options.peaks);

  CarrierModulation out;
  const double lo = options.modulation_search.max_hz;
  const double hi = std::min(options.carrier_max_hz, 0.45 * rate);

  const auto envelope = envelope_peak(smooth_spectrum(raw, options.smoothing_bandwidth_hz), lo, hi);
  if (envelope.dominant) {
    out.carrier = F0Estimate{Frequency{envelope.hz}, envelope.salience, F0Method::SpectralEnvelope};
  }
  const auto weighted_envelope = envelope_peak(smooth_spectrum(weighted, options.smoothing_bandwidth_hz), lo, hi);
  if (weighted_envelope.hz > 0.0) out.weighted_envelope_peak_hz = weighted_envelope.hz;

  if (partials.size() >= 3) {
    out.sideband_spacing_hz = partial_spacings(partials).center;
    out.modulation = autocorrelation_f0(samples, rate, options.modulation_search);
  }
  if (out.modulation && out.carrier && !(out.carrier->frequency > out.modulation->frequency)) {
    out.modulation.reset();
  }
  return out;
}

}  // namespace mph
