#include <algorithm>
#include <array>
#include <cmath>

#include "multiphonic/error.hpp"
#include "multiphonic/spectral.hpp"

namespace mph {

namespace {

// ISO 226 one-third-octave parameters: exponent alpha_f, magnitude of the
// linear transfer function L_U (dB) and threshold of hearing T_f (dB).
constexpr std::array<double, 29> kIsoFreq = {
    20,   25,   31.5, 40,   50,   63,   80,   100,  125,  160,   200,   250,  315,   400,  500,
    630,  800,  1000, 1250, 1600, 2000, 2500, 3150, 4000, 5000, 6300, 8000, 10000, 12500};
constexpr std::array<double, 29> kIsoAlpha = {
    0.532, 0.506, 0.480, 0.455, 0.432, 0.409, 0.387, 0.367, 0.349, 0.330,
    0.315, 0.301, 0.288, 0.276, 0.267, 0.259, 0.253, 0.250, 0.246, 0.244,
    0.243, 0.243, 0.243, 0.242, 0.242, 0.245, 0.254, 0.271, 0.301};
constexpr std::array<double, 29> kIsoLu = {
    -31.6, -27.2, -23.0, -19.1, -15.9, -13.0, -10.3, -8.1, -6.2, -4.5,
    -3.1,  -2.0,  -1.1,  -0.4,  0.0,   0.3,   0.5,   0.0,  -2.7, -4.1,
    -1.0,  1.7,   2.5,   1.2,   -2.1,  -7.1,  -11.2, -10.7, -3.1};
constexpr std::array<double, 29> kIsoTf = {
    78.5, 68.7, 59.5, 51.1, 44.0, 37.5, 31.5, 26.5, 22.1, 17.9,
    14.4, 11.4, 8.6,  6.2,  4.4,  3.0,  2.2,  2.4,  3.5,  1.7,
    -1.3, -4.2, -6.0, -5.4, -1.5, 6.0,  12.6, 13.9, 12.3};

// Three-point endpoint derivative that keeps the interpolant shape-preserving.
double edge_slope(double h0, double h1, double d0, double d1) {
  double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (std::signbit(m) != std::signbit(d0)) {
    m = 0.0;
  } else if (std::signbit(d0) != std::signbit(d1) && std::abs(m) > std::abs(3.0 * d0)) {
    m = 3.0 * d0;
  }
  return m;
}

}  // namespace

std::span<const double> iso226_anchor_frequencies() noexcept { return kIsoFreq; }

double iso226_spl_at_anchor(std::size_t i, double phon) {
  if (i >= kIsoFreq.size()) throw Error(ErrorCode::Configuration, "ISO 226 anchor index out of range");
  if (!(phon >= 20.0 && phon <= 90.0)) {
    throw Error(ErrorCode::Configuration, "ISO 226 contours are defined for 20..90 phon");
  }
  const double a = kIsoAlpha[i];
  const double af = 4.47e-3 * (std::pow(10.0, 0.025 * phon) - 1.15) +
                    std::pow(0.4 * std::pow(10.0, (kIsoTf[i] + kIsoLu[i]) / 10.0 - 9.0), a);
  return 10.0 / a * std::log10(af) - kIsoLu[i] + 94.0;
}

LoudnessContour::LoudnessContour(double phon_level, std::vector<double> anchor_frequencies,
                                 std::vector<double> contour_spl)
    : phon_(phon_level), freqs_(std::move(anchor_frequencies)), spl_(std::move(contour_spl)) {
  if (freqs_.size() != spl_.size() || freqs_.size() < 3) {
    throw Error(ErrorCode::Configuration, "loudness contour needs >= 3 equal-length anchor arrays");
  }
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    if (!(freqs_[i] > 0.0) || !std::isfinite(freqs_[i]) || !std::isfinite(spl_[i])) {
      throw Error(ErrorCode::Configuration, "loudness contour anchors must be finite and positive");
    }
    if (i > 0 && !(freqs_[i] > freqs_[i - 1])) {
      throw Error(ErrorCode::Configuration, "loudness contour anchors must be strictly ascending");
    }
  }
  if (freqs_.front() > 20.0 || freqs_.back() < 12500.0) {
    throw Error(ErrorCode::Configuration, "loudness contour must cover 20 Hz .. 12.5 kHz");
  }

  const std::size_t n = freqs_.size();
  log_freqs_.resize(n);
  std::transform(freqs_.begin(), freqs_.end(), log_freqs_.begin(),
                 [](double f) { return std::log10(f); });

  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = log_freqs_[k + 1] - log_freqs_[k];
    d[k] = (spl_[k + 1] - spl_[k]) / h[k];
  }
  slopes_.assign(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k - 1] * d[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    slopes_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
  }
  slopes_[0] = edge_slope(h[0], h[1], d[0], d[1]);
  slopes_[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);

  reference_spl_ = spl_at(1000.0);
}

LoudnessContour LoudnessContour::iso226(double phon) {
  std::vector<double> spl(kIsoFreq.size());
  for (std::size_t i = 0; i < spl.size(); ++i) spl[i] = iso226_spl_at_anchor(i, phon);
  return LoudnessContour(phon, {kIsoFreq.begin(), kIsoFreq.end()}, std::move(spl));
}

double LoudnessContour::spl_at(double hz) const {
  if (!(hz >= freqs_.front() && hz <= freqs_.back())) {
    throw Error(ErrorCode::Configuration, "frequency outside loudness contour domain");
  }
  const double x = std::log10(hz);
  auto it = std::upper_bound(log_freqs_.begin(), log_freqs_.end(), x);
  std::size_t k = static_cast<std::size_t>(std::distance(log_freqs_.begin(), it));
  k = std::clamp<std::size_t>(k, 1, log_freqs_.size() - 1) - 1;

  const double h = log_freqs_[k + 1] - log_freqs_[k];
  const double t = (x - log_freqs_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * spl_[k] + h10 * h * slopes_[k] + h01 * spl_[k + 1] + h11 * h * slopes_[k + 1];
}

double LoudnessContour::gain_db(double hz) const { return reference_spl_ - spl_at(hz); }

}  // namespace mph
