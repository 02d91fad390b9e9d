#include "spinsync/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <stdexcept>

namespace spinsync::metrics {

namespace {

struct Moments {
  double mean_x, mean_y, var_x, var_y, cov;
};

Moments moments(const double* x, const double* y, size_t n) {
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double vx = 0.0, vy = 0.0, cv = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    vx += dx * dx;
    vy += dy * dy;
    cv += dx * dy;
  }
  return {mx, my, vx, vy, cv};
}

bool degenerate(double var, size_t n, double mean) {
  double sd = std::sqrt(var / n);
  return sd <= 1e-12 * (1.0 + std::abs(mean));
}

}  // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("series length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson needs at least two samples");
  Moments m = moments(x.data(), y.data(), x.size());
  if (m.var_x <= 0.0 || m.var_y <= 0.0) throw std::domain_error("zero-variance input");
  return m.cov / std::sqrt(m.var_x * m.var_y);
}

std::vector<double> windowed_pearson(const std::vector<double>& x, const std::vector<double>& y,
                                     double dt, double window) {
  if (x.size() != y.size()) throw std::invalid_argument("series length mismatch");
  if (dt <= 0.0 || window <= 0.0) throw std::invalid_argument("dt and window must be positive");
  size_t w = static_cast<size_t>(std::lround(window / dt));
  if (w < 10) throw std::invalid_argument("window must cover at least ten grid steps");
  if (w >= x.size()) throw std::invalid_argument("window does not fit the series");
  size_t len = x.size() - w;
  std::vector<double> r(len);
  for (size_t i = 0; i < len; ++i) {
    Moments m = moments(x.data() + i, y.data() + i, w + 1);
    if (degenerate(m.var_x, w + 1, m.mean_x) || degenerate(m.var_y, w + 1, m.mean_y))
      r[i] = undefined_marker;
    else
      r[i] = m.cov / std::sqrt(m.var_x * m.var_y);
  }
  return r;
}

std::vector<double> windowed_pearson(const Trace& t, std::string_view ci, std::string_view cj,
                                     double window) {
  return windowed_pearson(t.channel(ci), t.channel(cj), t.dt(), window);
}

std::optional<double> sync_time(const std::vector<double>& r, const std::vector<double>& tau,
                                double threshold) {
  if (r.size() > tau.size()) throw std::invalid_argument("series longer than the time grid");
  if (r.empty()) return std::nullopt;
  size_t first_bad = r.size();
  for (size_t i = r.size(); i-- > 0;) {
    if (is_undefined(r[i]) || r[i] < threshold) break;
    first_bad = i;
  }
  if (first_bad == r.size()) return std::nullopt;
  return tau[first_bad];
}

Spectrum fft_spectrum(const std::vector<double>& x, double dt, bool hann) {
  size_t n = x.size();
  if (n < 64) throw std::invalid_argument("spectrum needs at least 64 samples");
  if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  std::vector<double> y(n);
  double wsum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double w = hann ? 0.5 * (1.0 - std::cos(2.0 * pi * i / (n - 1))) : 1.0;
    y[i] = (x[i] - mean) * w;
    wsum += w;
  }
  size_t half = n / 2;
  Spectrum s;
  s.freq.resize(half + 1);
  s.amp.resize(half + 1);
  for (size_t k = 0; k <= half; ++k) {
    double re = 0.0, im = 0.0;
    double ang = -2.0 * pi * k / n;
    for (size_t i = 0; i < n; ++i) {
      re += y[i] * std::cos(ang * i);
      im += y[i] * std::sin(ang * i);
    }
    s.freq[k] = k / (n * dt);
    double scale = hann ? 2.0 / wsum : 2.0 / n;
    s.amp[k] = scale * std::hypot(re, im);
  }
  size_t peak = 1;
  for (size_t k = 1; k <= half; ++k)
    if (s.amp[k] > s.amp[peak]) peak = k;
  s.peak_freq = s.freq[peak];
  s.peak_amp = s.amp[peak];
  s.peak_freq_refined = s.peak_freq;
  if (peak > 0 && peak < half) {
    double a = s.amp[peak - 1], b = s.amp[peak], c = s.amp[peak + 1];
    double denom = a - 2.0 * b + c;
    if (denom != 0.0) {
      double shift = 0.5 * (a - c) / denom;
      s.peak_freq_refined = (peak + shift) / (n * dt);
    }
  }
  return s;
}

double loschmidt(const Mat& rho_t, const Mat& rho0) {
  if (rho_t.rows() != rho0.rows()) throw std::invalid_argument("dimension mismatch");
  return (rho_t.conjugate().array() * rho0.array()).sum().real();
}

double purity(const Mat& rho) { return rho.squaredNorm(); }

double trace_distance(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("dimension mismatch");
  Mat d = a - b;
  Eigen::SelfAdjointEigenSolver<Mat> es(d);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double entropy(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  double h = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double p = es.eigenvalues()(i);
    if (p < -1e-8) throw std::invalid_argument("state has a negative eigenvalue");
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("probability out of range");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double mutual_information(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix2cd ra = Eigen::Matrix2cd::Zero(), rb = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int e = 0; e < 2; ++e) {
        ra(i, j) += rho(i + 2 * e, j + 2 * e);  // trace out bit 1
        rb(i, j) += rho(e + 2 * i, e + 2 * j);  // trace out bit 0
      }
  return entropy(ra) + entropy(rb) - entropy(rho);
}

double concurrence(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  Eigen::Matrix4cd rt = yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(rho * rt, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  std::array<double, 4> lam;
  for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double entanglement_of_formation(const Eigen::Matrix4cd& rho) {
  double c = concurrence(rho);
  return binary_entropy(0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - c * c))));
}

}  // namespace spinsync::metrics
