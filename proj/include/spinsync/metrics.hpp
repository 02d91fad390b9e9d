#pragma once

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "spinsync/trace.hpp"

namespace spinsync::metrics {

// Marker for windows whose content is constant (no defined correlation).
inline constexpr double undefined_marker = std::numeric_limits<double>::quiet_NaN();
inline bool is_undefined(double r) { return std::isnan(r); }

// Standard estimator; throws std::domain_error on zero-variance input.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// r(tau_i) over samples in [tau_i, tau_i + window]; the series ends window
// before the grid end. Degenerate windows yield undefined_marker.
std::vector<double> windowed_pearson(const std::vector<double>& x, const std::vector<double>& y,
                                     double dt, double window);
std::vector<double> windowed_pearson(const Trace& t, std::string_view ci, std::string_view cj,
                                     double window);

// Smallest tau with r(tau') >= threshold for every grid tau' >= tau.
std::optional<double> sync_time(const std::vector<double>& r, const std::vector<double>& tau,
                                double threshold = 0.999);

struct Spectrum {
  std::vector<double> freq;  // cycles per unit tau, bin spacing 1/(n dt)
  std::vector<double> amp;
  double peak_freq = 0.0;    // argmax bin
  double peak_amp = 0.0;
  double peak_freq_refined = 0.0;  // parabolic interpolation around the peak
};

// Mean-removed DFT magnitude up to Nyquist, single-sided amplitude (2/n).
Spectrum fft_spectrum(const std::vector<double>& x, double dt, bool hann = false);

double loschmidt(const Mat& rho_t, const Mat& rho0);  // Tr(rho_t^dag rho0)
double purity(const Mat& rho);
double trace_distance(const Mat& a, const Mat& b);
double entropy(const Mat& rho);  // bits; eigenvalues below -1e-8 are rejected
double binary_entropy(double p);
double mutual_information(const Eigen::Matrix4cd& rho);  // 1|1 qubit split
double concurrence(const Eigen::Matrix4cd& rho);
double entanglement_of_formation(const Eigen::Matrix4cd& rho);

}  // namespace spinsync::metrics
