#include "nvgeo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nvgeo/parallel.hpp"

namespace nvgeo {

namespace {

constexpr std::size_t kMinSamples = 8;
constexpr double kDecayThreshold = 0.9;
constexpr std::size_t kScanPoints = 161;
constexpr double kLogTolerance = 1e-8;
const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;

using Shape = std::function<double(double t, double decay)>;

struct Profile {
  double amplitude = 0.0;
  double offset = 0.0;
  double rss = std::numeric_limits<double>::infinity();
};

// Linear least squares for the amplitude (and optional baseline) at a fixed
// decay time.
Profile profile(std::span<const double> t, std::span<const double> y, const Shape& shape,
                double decay, bool with_offset) {
  const std::size_t n = t.size();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = shape(t[i], decay);
  Profile pr;
  if (with_offset) {
    double sff = 0, sf = 0, sfy = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sff += f[i] * f[i];
      sf += f[i];
      sfy += f[i] * y[i];
      sy += y[i];
    }
    const double det = sff * static_cast<double>(n) - sf * sf;
    if (std::abs(det) <= 1e-14 * sff * static_cast<double>(n)) {
      pr.amplitude = 0.0;
      pr.offset = sy / static_cast<double>(n);
    } else {
      pr.amplitude = (sfy * static_cast<double>(n) - sf * sy) / det;
      pr.offset = (sff * sy - sf * sfy) / det;
    }
  } else {
    double sff = 0, sfy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sff += f[i] * f[i];
      sfy += f[i] * y[i];
    }
    pr.amplitude = sff > 0.0 ? sfy / sff : 0.0;
  }
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - pr.offset - pr.amplitude * f[i];
    rss += r * r;
  }
  pr.rss = rss;
  return pr;
}

void check_samples(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw ConfigError("fit: time and signal lengths differ");
  if (t.size() < kMinSamples) throw NumericalError("fit: at least 8 samples are required");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(y[i])) throw NumericalError("fit: non-finite sample");
    if (i > 0 && !(t[i] > t[i - 1])) throw NumericalError("fit: times must be strictly ascending");
  }
}

FitResult fit_profiled(std::span<const double> t, std::span<const double> y, const Shape& shape,
                       bool with_offset, double exponent) {
  const double t_max = t.back();
  if (!(t_max > 0.0)) throw NumericalError("fit: time span must be positive");
  const double lo = std::log(t_max * 1e-4);
  const double hi = std::log(t_max * 1e2);

  const auto cost = [&](double log_decay) {
    return profile(t, y, shape, std::exp(log_decay), with_offset).rss;
  };

  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / static_cast<double>(kScanPoints - 1);
  for (std::size_t k = 0; k < kScanPoints; ++k) {
    const double c = cost(lo + step * static_cast<double>(k));
    if (c < best_cost) {
      best_cost = c;
      best = k;
    }
  }
  if (best == 0 || best == kScanPoints - 1) {
    throw NumericalError("fit: optimum lies on the decay-time scan boundary");
  }

  double a = lo + step * static_cast<double>(best - 1);
  double b = lo + step * static_cast<double>(best + 1);
  double c1 = b - kInvPhi * (b - a);
  double c2 = a + kInvPhi * (b - a);
  double f1 = cost(c1);
  double f2 = cost(c2);
  while (b - a > kLogTolerance) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - kInvPhi * (b - a);
      f1 = cost(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + kInvPhi * (b - a);
      f2 = cost(c2);
    }
  }
  const double decay = std::exp(0.5 * (a + b));
  const Profile pr = profile(t, y, shape, decay, with_offset);

  FitResult r;
  r.decay_time = decay;
  r.exponent = exponent;
  r.amplitude = pr.amplitude;
  r.offset = pr.offset;
  r.residual_rms = std::sqrt(pr.rss / static_cast<double>(t.size()));

  // covariance from the Jacobian in (decay, amplitude[, offset])
  const std::size_t n = t.size();
  const std::size_t np = with_offset ? 3 : 2;
  Eigen::MatrixXd jac(n, np);
  const double h = decay * 1e-6;
  for (std::size_t i = 0; i < n; ++i) {
    jac(i, 0) = pr.amplitude * (shape(t[i], decay + h) - shape(t[i], decay - h)) / (2.0 * h);
    jac(i, 1) = shape(t[i], decay);
    if (with_offset) jac(i, 2) = 1.0;
  }
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const double dof = static_cast<double>(n > np ? n - np : 1);
  const double s2 = pr.rss / dof;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  r.std_error = lu.isInvertible() ? std::sqrt(std::max(0.0, s2 * lu.inverse()(0, 0)))
                                  : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

FitResult fit_decay(std::span<const double> t, std::span<const double> y, double exponent,
                    std::optional<double> t1) {
  check_samples(t, y);
  if (*std::min_element(y.begin(), y.end()) >= kDecayThreshold) throw InsufficientDecay();
  if (!(exponent > 0.0)) throw ConfigError("fit: exponent must be positive");
  if (t1 && !(*t1 > 0.0)) throw ConfigError("fit: T1 must be positive");
  const double rate1 = t1 ? 1.0 / *t1 : 0.0;
  const Shape shape = [exponent, rate1](double ti, double decay) {
    return std::exp(-ti * rate1 - std::pow(ti / decay, exponent));
  };
  return fit_profiled(t, y, shape, false, exponent);
}

FitResult fit_stretched_exp(const EchoCurve& curve, std::optional<double> t1) {
  return fit_decay(curve.times, curve.signal, 3.0, t1);
}

FitResult fit_gaussian(const EchoCurve& curve) {
  return fit_decay(curve.times, curve.signal, 2.0);
}

FitResult fit_exponential(const EchoCurve& curve) {
  return fit_decay(curve.times, curve.signal, 1.0);
}

FitResult fit_free_exponent(const EchoCurve& curve) {
  const auto rss = [&](double expo) {
    const FitResult f = fit_decay(curve.times, curve.signal, expo);
    return f.residual_rms;
  };
  double a = 0.5;
  double b = 4.0;
  double c1 = b - kInvPhi * (b - a);
  double c2 = a + kInvPhi * (b - a);
  double f1 = rss(c1);
  double f2 = rss(c2);
  while (b - a > 1e-6) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - kInvPhi * (b - a);
      f1 = rss(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + kInvPhi * (b - a);
      f2 = rss(c2);
    }
  }
  return fit_decay(curve.times, curve.signal, 0.5 * (a + b));
}

FitResult fit_ramsey_envelope(const SequenceResult& r, const NvParams& p,
                              const MiPolicy& m_i_policy) {
  check_samples(r.times, r.population_0);
  const std::vector<int> mis = m_i_policy.values();
  const double az = p.Az;
  const Shape shape = [mis, az](double ti, double decay) {
    double beat = 0.0;
    for (int m : mis) beat += std::cos(2.0 * az * m * ti);
    beat /= 2.0 * static_cast<double>(mis.size());
    const double x = ti / decay;
    return beat * std::exp(-x * x);
  };
  return fit_profiled(r.times, r.population_0, shape, true, 2.0);
}

double dominant_frequency(std::span<const double> t, std::span<const double> y, double f_min,
                          double f_max) {
  check_samples(t, y);
  if (!(f_max > f_min && f_min >= 0.0)) throw ConfigError("dominant_frequency: bad band");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  const auto power = [&](double f) {
    Complex acc = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      acc += (y[k] - mean) * std::polar(1.0, -2.0 * std::numbers::pi * f * t[k]);
    }
    return std::norm(acc);
  };
  const double span = t.back() - t.front();
  const double df = 1.0 / (10.0 * span);
  double best_f = f_min;
  double best_p = -1.0;
  for (double f = f_min; f <= f_max; f += df) {
    const double pw = power(f);
    if (pw > best_p) {
      best_p = pw;
      best_f = f;
    }
  }
  double a = std::max(f_min, best_f - df);
  double b = std::min(f_max, best_f + df);
  double c1 = b - kInvPhi * (b - a);
  double c2 = a + kInvPhi * (b - a);
  double p1 = power(c1);
  double p2 = power(c2);
  while (b - a > 1e-9 * best_f + 1e-12) {
    if (p1 > p2) {
      b = c2;
      c2 = c1;
      p2 = p1;
      c1 = b - kInvPhi * (b - a);
      p1 = power(c1);
    } else {
      a = c1;
      c1 = c2;
      p1 = p2;
      c2 = a + kInvPhi * (b - a);
      p2 = power(c2);
    }
  }
  return 0.5 * (a + b);
}

QuadratureRule gauss_hermite_normal(std::size_t order, double sigma) {
  if (order == 0) throw ConfigError("quadrature order must be positive");
  if (order == 1 || sigma == 0.0) return {{0.0}, {1.0}};
  // Golub-Welsch on the Jacobi matrix of the physicists' Hermite polynomials
  const auto n = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k) / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  for (Eigen::Index k = 0; k < n; ++k) {
    rule.nodes.push_back(std::sqrt(2.0) * sigma * solver.eigenvalues()[k]);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights.push_back(v0 * v0);
  }
  return rule;
}

EchoCurve strained_echo_curve(const BathConfig& bath, const NvParams& p, double bz,
                              const ScanStrain& strain, const MiPolicy& m_i_policy,
                              std::span<const double> tau_grid) {
  const double sigma = strain.broadening_fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  const QuadratureRule rule = gauss_hermite_normal(strain.quadrature_order, sigma);
  const Vector3 b_ext(0.0, 0.0, bz);
  EchoCurve out;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const StrainOptions opts{strain.ex, strain.ey, rule.nodes[k]};
    const EchoCurve part = bath_echo_curve(bath, p, b_ext, m_i_policy, opts, tau_grid);
    if (k == 0) {
      out = part;
      out.meta.strain = StrainOptions{strain.ex, strain.ey, 0.0};
      std::fill(out.signal.begin(), out.signal.end(), 0.0);
    }
    for (std::size_t i = 0; i < part.signal.size(); ++i) {
      out.signal[i] += rule.weights[k] * part.signal[i];
    }
  }
  return out;
}

FieldScan t2_field_scan(const BathConfig& bath, const NvParams& p,
                        std::span<const double> field_grid,
                        const std::optional<ScanStrain>& strain, const MiPolicy& m_i_policy,
                        const ScanOptions& options) {
  p.validate();
  if (field_grid.empty()) throw ConfigError("field grid is empty");
  if (!std::is_sorted(field_grid.begin(), field_grid.end())) {
    throw ConfigError("field grid must be ascending");
  }
  const std::size_t n = field_grid.size();
  FieldScan scan;
  scan.fields.assign(field_grid.begin(), field_grid.end());
  scan.t2.assign(n, std::numeric_limits<double>::quiet_NaN());
  scan.fits.assign(n, std::nullopt);
  scan.errors.assign(n, std::string());

  parallel_for(n, options.threads, [&](std::size_t i) {
    const double bz = field_grid[i];
    try {
      const EchoCurve curve =
          strain ? strained_echo_curve(bath, p, bz, *strain, m_i_policy, options.tau_grid)
                 : bath_echo_curve(bath, p, Vector3(0.0, 0.0, bz), m_i_policy, std::nullopt,
                                   options.tau_grid);
      const FitResult fit = fit_stretched_exp(curve);
      scan.fits[i] = fit;
      scan.t2[i] = fit.decay_time;
    } catch (const NumericalError& e) {
      scan.errors[i] = e.what();
    }
  });
  return scan;
}

std::vector<double> DimerHistogram::fitted() const {
  std::vector<double> out;
  for (const auto& row : rows) {
    if (row.t2) out.push_back(*row.t2);
  }
  return out;
}

DimerHistogram dimer_t2_histogram(std::size_t n_configs, std::uint64_t base_seed,
                                  const NvParams& p, double radius, double abundance,
                                  const HistogramOptions& options) {
  if (n_configs < 10) throw ConfigError("dimer histogram needs at least 10 configurations");
  if (!(options.bin_width > 0.0)) throw ConfigError("histogram bin width must be positive");
  p.validate();
  const Lattice lattice = diamond_lattice(radius);

  DimerHistogram h;
  h.bin_width = options.bin_width;
  h.target_t2 = options.target_t2;
  h.rows.resize(n_configs);

  parallel_for(n_configs, options.threads, [&](std::size_t i) {
    HistogramRow& row = h.rows[i];
    row.seed = base_seed + i;
    BathConfig bath = sample_bath(lattice, abundance, row.seed, p);
    bath.singles.clear();
    row.dimer_count = bath.dimers.size();
    if (bath.dimers.empty()) {
      row.status = "no decay";
      return;
    }
    try {
      const EchoCurve curve = bath_echo_curve(bath, p, Vector3::Zero(), MiPolicy::Mixture(),
                                              std::nullopt, options.tau_grid);
      row.t2 = fit_stretched_exp(curve).decay_time;
      row.status = "ok";
    } catch (const InsufficientDecay&) {
      row.status = "no decay";
    } catch (const NumericalError& e) {
      row.status = e.what();
    }
  });

  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto& row : h.rows) {
    if (!row.t2) continue;
    const auto bin = static_cast<std::size_t>(*row.t2 / h.bin_width);
    if (h.counts.size() <= bin) h.counts.resize(bin + 1, 0);
    ++h.counts[bin];
    const double d = std::abs(*row.t2 - h.target_t2);
    if (d < best_distance) {
      best_distance = d;
      h.selected_seed = row.seed;
      h.selected_t2 = *row.t2;
    }
  }
  return h;
}

double median(std::vector<double> values) {
  if (values.empty()) throw NumericalError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace nvgeo
