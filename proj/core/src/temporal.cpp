#include "multiphonic/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "fft.hpp"
#include "multiphonic/error.hpp"

namespace mph {

std::string_view f0_method_name(F0Method m) noexcept {
  switch (m) {
    case F0Method::Autocorrelation:         return "autocorrelation";
    case F0Method::SpacingGcd:              return "spacing-gcd";
    case F0Method::SmoothedAutocorrelation: return "smoothed-autocorrelation";
    case F0Method::SpectralEnvelope:        return "spectral-envelope";
    case F0Method::SpectralFit:             return "spectral-fit";
  }
  return "autocorrelation";
}

void SearchRange::validate() const {
  if (!(min_hz > 0.0) || !(max_hz > min_hz) || !std::isfinite(max_hz)) {
    throw Error(ErrorCode::Configuration, "search range must satisfy 0 < min_hz < max_hz");
  }
}

double median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorCode::InsufficientData, "median of empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

std::vector<double> normalized_autocorrelation(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (max_lag + 1 >= n) throw Error(ErrorCode::InsufficientData, "frame shorter than the lag range");

  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;
  detail::RealFft fft(m);
  std::vector<std::complex<double>> spec(fft.bins());
  fft.forward(x, spec);
  for (auto& c : spec) c = std::norm(c);
  std::vector<double> raw(m);
  fft.inverse(spec, raw);

  std::vector<double> energy(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) energy[i + 1] = energy[i] + x[i] * x[i];

  std::vector<double> r(max_lag + 1, 0.0);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    const double head = energy[n - lag];
    const double tail = energy[n] - energy[lag];
    const double denom = std::sqrt(head * tail);
    r[lag] = denom > 0.0 ? raw[lag] / static_cast<double>(m) / denom : 0.0;
  }
  return r;
}

std::optional<F0Estimate> autocorrelation_f0(std::span<const double> samples, double rate,
                                             const SearchRange& search) {
  search.validate();
  if (!(rate > 0.0)) throw Error(ErrorCode::Configuration, "sample rate must be positive");
  const double needed = 2.0 * rate / search.min_hz;
  if (static_cast<double>(samples.size()) < needed) {
    throw Error(ErrorCode::InsufficientData,
                "autocorrelation needs " + std::to_string(static_cast<long>(std::ceil(needed))) +
                    " samples for min_hz " + std::to_string(search.min_hz) + ", got " +
                    std::to_string(samples.size()));
  }

  const auto lag_min = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(rate / search.max_hz)));
  const auto lag_max = static_cast<std::size_t>(std::ceil(rate / search.min_hz));
  const auto r = normalized_autocorrelation(samples, lag_max + 1);

  std::vector<std::size_t> peaks;
  double best = 0.0;
  for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
    if (r[lag] > r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] > 0.0) {
      peaks.push_back(lag);
      best = std::max(best, r[lag]);
    }
  }
  if (peaks.empty()) return std::nullopt;

  const std::size_t lag = *std::find_if(peaks.begin(), peaks.end(),
                                        [&](std::size_t l) { return r[l] >= kPeakTieRatio * best; });
  const double a = r[lag - 1];
  const double b = r[lag];
  const double c = r[lag + 1];
  const double denom = a - 2.0 * b + c;
  double delta = 0.0;
  if (denom < 0.0) delta = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  const double peak = b - 0.25 * (a - c) * delta;

  return F0Estimate{Frequency{rate / (static_cast<double>(lag) + delta)}, std::clamp(peak, 0.0, 1.0),
                    F0Method::Autocorrelation};
}

SpacingProfile partial_spacings(std::span<const Partial> partials) {
  if (partials.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "spacing profile needs at least two partials");
  }
  SpacingProfile out;
  out.spacings.reserve(partials.size() - 1);
  for (std::size_t i = 1; i < partials.size(); ++i) {
    const double d = partials[i].hz() - partials[i - 1].hz();
    if (!(d > 0.0)) throw Error(ErrorCode::InvalidSpec, "partials must be strictly ascending");
    out.spacings.push_back(d);
  }
  out.center = median(out.spacings);
  std::vector<double> dev(out.spacings.size());
  std::transform(out.spacings.begin(), out.spacings.end(), dev.begin(),
                 [&](double s) { return std::abs(s - out.center); });
  out.dispersion = median(std::move(dev));
  return out;
}

namespace {

struct DivisorFit {
  std::size_t count = 0;
  double sum_sq = 0.0;
};

DivisorFit score_divisor(std::span<const double> spacings, double g, double tol) {
  DivisorFit fit;
  for (double s : spacings) {
    const double n = std::max(1.0, std::round(s / g));
    const double dev = 1200.0 * std::log2(s / (n * g));
    if (std::abs(dev) <= tol) {
      ++fit.count;
      fit.sum_sq += dev * dev;
    }
  }
  return fit;
}

}  // namespace

GcdEstimate approximate_gcd(std::span<const double> spacings, double tolerance_cents) {
  if (spacings.empty()) throw Error(ErrorCode::InsufficientData, "approximate_gcd needs spacings");
  if (!(tolerance_cents > 0.0)) throw Error(ErrorCode::Configuration, "tolerance must be positive");
  for (double s : spacings) {
    if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidSpec, "spacings must be positive");
  }

  const double smallest = *std::min_element(spacings.begin(), spacings.end());
  const double lo = smallest / 8.0;
  const double hi = smallest * 1.05;
  const double step = std::max(0.01, (hi - lo) / 200000.0);

  std::vector<double> candidates;
  for (double g = lo; g <= hi; g += step) candidates.push_back(g);
  for (double s : spacings) {
    for (int m = 1; s / m >= lo; ++m) {
      if (s / m <= hi) candidates.push_back(s / m);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  std::size_t best_count = 0;
  double best_g = candidates.front();
  for (double g : candidates) {
    const auto fit = score_divisor(spacings, g, tolerance_cents);
    // Ascending scan: `>=` leaves the largest divisor among equal counts.
    if (fit.count >= best_count && fit.count > 0) {
      best_count = fit.count;
      best_g = g;
    }
  }

  auto assign = [&](double g) {
    std::vector<int> multiples(spacings.size());
    for (std::size_t i = 0; i < spacings.size(); ++i) {
      multiples[i] = static_cast<int>(std::max(1.0, std::round(spacings[i] / g)));
    }
    return multiples;
  };

  double g = best_g;
  if (best_count > 0) {
    const auto multiples = assign(best_g);
    double log_sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < spacings.size(); ++i) {
      const double dev = 1200.0 * std::log2(spacings[i] / (multiples[i] * best_g));
      if (std::abs(dev) <= tolerance_cents) {
        log_sum += std::log(spacings[i] / multiples[i]);
        ++used;
      }
    }
    const double refined = std::exp(log_sum / static_cast<double>(used));
    if (score_divisor(spacings, refined, tolerance_cents).count >= best_count) g = refined;
  }

  const auto fit = score_divisor(spacings, g, tolerance_cents);
  GcdEstimate out{Frequency{g}, static_cast<double>(fit.count) / static_cast<double>(spacings.size()),
                  fit.count > 0 ? std::sqrt(fit.sum_sq / static_cast<double>(fit.count)) : 0.0,
                  assign(g)};
  return out;
}

}  // namespace mph
