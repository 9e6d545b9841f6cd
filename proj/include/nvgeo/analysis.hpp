#pragma once

// Decay fitting, T2-versus-field scans and dimer T2 statistics.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nvgeo/echo.hpp"
#include "nvgeo/pulsesim.hpp"

namespace nvgeo {

struct FitResult {
  double decay_time = 0.0;  // s
  double exponent = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;      // only non-zero for fits with a free baseline
  double residual_rms = 0.0;
  double std_error = 0.0;   // s, from the linearized covariance
};

/// Least-squares fit of A exp(-t/T1) exp[-(t/T)^exponent] with A profiled out
/// analytically and T found by a log-spaced scan followed by golden-section
/// refinement. Throws InsufficientDecay when the signal never drops below 0.9
/// and NumericalError when the optimum sits on the scan boundary.
FitResult fit_decay(std::span<const double> t, std::span<const double> y, double exponent,
                    std::optional<double> t1 = std::nullopt);

FitResult fit_stretched_exp(const EchoCurve& curve, std::optional<double> t1 = std::nullopt);
FitResult fit_gaussian(const EchoCurve& curve);
FitResult fit_exponential(const EchoCurve& curve);

// Diagnostics only: exponent left free in [0.5, 4].
FitResult fit_free_exponent(const EchoCurve& curve);

/// Gaussian envelope of a Ramsey signal: y = c + A g(t) exp[-(t/T)^2], where
/// g is the m_I-averaged hyperfine beat (1/2) <cos(2 Az m_I t)>.
FitResult fit_ramsey_envelope(const SequenceResult& r, const NvParams& p,
                              const MiPolicy& m_i_policy = MiPolicy::Mixture());

/// Frequency (Hz) maximizing |sum_k (y_k - mean) exp(-2 pi i f t_k)| on [f_min, f_max].
double dominant_frequency(std::span<const double> t, std::span<const double> y,
                          double f_min, double f_max);

/// Gauss-Hermite rule for E[f(X)], X ~ N(0, sigma^2).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_hermite_normal(std::size_t order, double sigma);

/// Strain for scans: transverse splitting (rad/s) and inhomogeneous
/// broadening FWHM (rad/s) of the z detuning.
struct ScanStrain {
  double ex = 0.0;
  double ey = 0.0;
  double broadening_fwhm = 0.0;
  std::size_t quadrature_order = 9;
};

struct FieldScan {
  std::vector<double> fields;  // tesla along the NV axis
  std::vector<double> t2;      // s; NaN where the fit failed
  std::vector<std::optional<FitResult>> fits;
  std::vector<std::string> errors;  // empty when the point succeeded
};

struct ScanOptions {
  std::vector<double> tau_grid;
  unsigned threads = 1;
};

/// Signal averaged over m_I and the broadening quadrature (no T1 factor).
EchoCurve strained_echo_curve(const BathConfig& bath, const NvParams& p, double bz,
                              const ScanStrain& strain, const MiPolicy& m_i_policy,
                              std::span<const double> tau_grid);

FieldScan t2_field_scan(const BathConfig& bath, const NvParams& p,
                        std::span<const double> field_grid,
                        const std::optional<ScanStrain>& strain, const MiPolicy& m_i_policy,
                        const ScanOptions& options);

struct HistogramRow {
  std::uint64_t seed = 0;
  std::size_t dimer_count = 0;
  std::optional<double> t2;
  std::string status;  // "ok", "no decay", or the fit error
};

struct DimerHistogram {
  double bin_width = 10e-6;
  std::vector<std::size_t> counts;  // bin i covers [i w, (i+1) w)
  std::vector<HistogramRow> rows;
  std::optional<std::uint64_t> selected_seed;
  double selected_t2 = 0.0;
  double target_t2 = 75e-6;

  std::vector<double> fitted() const;
};

struct HistogramOptions {
  std::vector<double> tau_grid;
  double bin_width = 10e-6;
  double target_t2 = 75e-6;
  unsigned threads = 1;
};

/// Zero-field dimer-only T2 over seeds base_seed .. base_seed + n_configs - 1.
/// The selected seed is the one whose T2 is nearest target_t2.
DimerHistogram dimer_t2_histogram(std::size_t n_configs, std::uint64_t base_seed,
                                  const NvParams& p, double radius, double abundance,
                                  const HistogramOptions& options);

double median(std::vector<double> values);

}  // namespace nvgeo
