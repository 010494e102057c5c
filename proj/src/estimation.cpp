#include "optomech/estimation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "fft.hpp"
#include "optomech/cavity.hpp"
#include "optomech/constants.hpp"
#include "parallel.hpp"

namespace optomech {

namespace {

std::vector<double> make_window(std::size_t n, Window kind) {
  std::vector<double> w(n, 1.0);
  if (kind == Window::Hann) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.5 * (1.0 - std::cos(2.0 * constants::pi * static_cast<double>(i) /
                                   static_cast<double>(n)));
    }
  }
  return w;
}

Spectrum welch(std::span<const double> x, double dt, const WelchOptions& opt) {
  require(std::isfinite(dt) && dt > 0.0, ErrorCode::InvalidArgument, "sample spacing must be > 0");
  require(opt.overlap >= 0.0 && opt.overlap <= 0.9, ErrorCode::InvalidArgument,
          "overlap must lie in [0, 0.9]");
  const std::size_t len = opt.segment_length;
  require(len >= 4, ErrorCode::TooShort, "segment length must be >= 4");
  require(len <= x.size(), ErrorCode::TooShort, "segment longer than the trace");

  const auto shift = std::max<std::size_t>(
      1, len - static_cast<std::size_t>(std::llround(opt.overlap * static_cast<double>(len))));
  const std::size_t n_seg = 1 + (x.size() - len) / shift;
  const std::vector<double> w = make_window(len, opt.window);
  const double w2 = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);

  detail::RealFft fft(len);
  std::vector<double> acc(fft.bins(), 0.0);
  auto in = fft.input();
  for (std::size_t s = 0; s < n_seg; ++s) {
    const double* seg = x.data() + s * shift;
    const double mean = std::accumulate(seg, seg + len, 0.0) / static_cast<double>(len);
    for (std::size_t i = 0; i < len; ++i) in[i] = (seg[i] - mean) * w[i];
    fft.execute();
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += std::norm(fft.bin(k));
  }

  const double fs = 1.0 / dt;
  const double scale = 1.0 / (fs * w2 * static_cast<double>(n_seg));
  Spectrum out;
  out.kind = SpectrumKind::Displacement;
  out.frequency_hz.resize(acc.size());
  out.values.resize(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const bool edge = k == 0 || (len % 2 == 0 && k == len / 2);
    out.frequency_hz[k] = static_cast<double>(k) * fs / static_cast<double>(len);
    out.values[k] = acc[k] * scale * (edge ? 1.0 : 2.0);
  }
  return out;
}

struct Scales {
  double center, fwhm, area, height;
};

// Parameters p: (center - c0)/w0, fwhm/w0, area/a0, offset/h.
std::array<double, 4> to_physical(const Eigen::Vector4d& p, const Scales& s) {
  return {s.center + p[0] * s.fwhm, p[1] * s.fwhm, p[2] * s.area, p[3] * s.height};
}

double model_at(double f, const std::array<double, 4>& q) {
  const auto [c, w, a, o] = q;
  return a * w / (2.0 * constants::pi) / ((f - c) * (f - c) + 0.25 * w * w) + o;
}

// Residuals are divided by sigma_i (relative to the height) when sigma is non-empty.
double residuals(const Spectrum& sp, const Eigen::Vector4d& p, const Scales& s,
                 const std::vector<double>& sigma, Eigen::VectorXd* r, Eigen::MatrixXd* jac) {
  const auto [c, w, a, o] = to_physical(p, s);
  double ssr = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    const double d = sp.frequency_hz[i] - c;
    const double den = d * d + 0.25 * w * w;
    const double shape = w / (2.0 * constants::pi) / den;
    const double inv = sigma.empty() ? 1.0 : 1.0 / sigma[i];
    const double ri = (a * shape + o - sp.values[i]) / s.height * inv;
    ssr += ri * ri;
    if (r) (*r)[static_cast<Eigen::Index>(i)] = ri;
    if (jac) {
      const auto row = static_cast<Eigen::Index>(i);
      const double d_center = a * w / (2.0 * constants::pi) * 2.0 * d / (den * den);
      const double d_fwhm = a * (1.0 / (2.0 * constants::pi * den) -
                                 w / (2.0 * constants::pi) * 0.5 * w / (den * den));
      (*jac)(row, 0) = d_center * s.fwhm / s.height * inv;
      (*jac)(row, 1) = d_fwhm * s.fwhm / s.height * inv;
      (*jac)(row, 2) = shape * s.area / s.height * inv;
      (*jac)(row, 3) = inv;
    }
  }
  return ssr;
}

struct LmState {
  Eigen::Vector4d p;
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  double ssr = 0.0;
  int iterations = 0;
  bool converged = false;
};

void levenberg_marquardt(const Spectrum& sp, const Scales& sc, const std::vector<double>& sigma,
                         LmState& st) {
  const auto m = static_cast<Eigen::Index>(sp.size());
  st.r.resize(m);
  st.jac.resize(m, 4);
  st.ssr = residuals(sp, st.p, sc, sigma, &st.r, &st.jac);
  st.converged = false;
  double lambda = 1e-3;
  for (st.iterations = 0; st.iterations < 200; ++st.iterations) {
    const Eigen::Matrix4d jtj = st.jac.transpose() * st.jac;
    const Eigen::Vector4d grad = st.jac.transpose() * st.r;
    Eigen::Matrix4d a = jtj;
    for (int k = 0; k < 4; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-30);
    const Eigen::Vector4d step = a.ldlt().solve(-grad);
    const Eigen::Vector4d trial = st.p + step;

    double trial_ssr = std::numeric_limits<double>::infinity();
    if (step.allFinite() && trial[1] > 0.0) trial_ssr = residuals(sp, trial, sc, sigma, nullptr, nullptr);

    if (trial_ssr < st.ssr) {
      const auto old_phys = to_physical(st.p, sc);
      const auto new_phys = to_physical(trial, sc);
      double rel = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double floor = k == 3 ? sc.height : 1e-300;
        rel = std::max(rel, std::abs(new_phys[k] - old_phys[k]) /
                                std::max(std::abs(new_phys[k]), floor));
      }
      st.p = trial;
      st.ssr = residuals(sp, st.p, sc, sigma, &st.r, &st.jac);
      lambda /= 3.0;
      if (rel < 1e-8) {
        st.converged = true;
        ++st.iterations;
        return;
      }
    } else {
      lambda *= 2.0;
      if (lambda > 1e16) {
        // no representable improvement left: already at the minimum
        st.converged = true;
        return;
      }
    }
  }
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

Spectrum estimate_psd(const TimeTrace& trace, const WelchOptions& options) {
  Spectrum s = welch(trace.samples, trace.dt, options);
  s.note = trace.params;
  return s;
}

Spectrum estimate_psd(std::span<const double> time_s, std::span<const double> samples,
                      const WelchOptions& options) {
  require(time_s.size() == samples.size(), ErrorCode::InvalidArgument,
          "time and sample columns differ in length");
  require(time_s.size() >= 2, ErrorCode::TooShort, "trace needs at least two samples");
  const double dt = (time_s.back() - time_s.front()) / static_cast<double>(time_s.size() - 1);
  for (std::size_t i = 1; i < time_s.size(); ++i) {
    require(std::abs(time_s[i] - time_s[i - 1] - dt) <= 1e-6 * dt, ErrorCode::NonUniform,
            "samples are not uniformly spaced");
  }
  return welch(samples, dt, options);
}

std::size_t segment_length_for_resolution(double sample_dt, double resolution_hz) {
  require(sample_dt > 0.0 && resolution_hz > 0.0, ErrorCode::InvalidArgument,
          "sample spacing and resolution must be > 0");
  const double n = 1.0 / (sample_dt * resolution_hz);
  return static_cast<std::size_t>(std::ceil(n * (1.0 - 1e-12)));
}

EnsemblePsd simulate_ensemble_psd(std::size_t n_runs, const SimulationOptions& sim,
                                  const WelchOptions& welch_opt, const CavityParams& cavity,
                                  const MechanicalMode& mode, const PhotothermalModel& pt,
                                  double delta, std::uint64_t master_seed) {
  require(n_runs >= 1, ErrorCode::InvalidArgument, "ensemble needs at least one run");
  std::vector<std::optional<Spectrum>> per_run(n_runs);
  std::vector<EnsembleRun> status(n_runs);
  detail::parallel_for(n_runs, [&](std::size_t i) {
    status[i].seed = run_seed(master_seed, i);
    try {
      const TimeTrace trace = simulate(sim, cavity, mode, pt, delta, status[i].seed);
      per_run[i] = estimate_psd(trace, welch_opt);
    } catch (const Error& e) {
      status[i].error = e.code();
      status[i].message = e.what();
    }
  });

  EnsemblePsd out;
  for (std::size_t i = 0; i < n_runs; ++i) {
    if (!per_run[i]) {
      out.failures.push_back(status[i]);
      continue;
    }
    if (out.runs_ok == 0) {
      out.mean = *per_run[i];
    } else {
      for (std::size_t k = 0; k < out.mean.size(); ++k) out.mean.values[k] += per_run[i]->values[k];
    }
    ++out.runs_ok;
  }
  require(out.runs_ok > 0, ErrorCode::NonFinite, "every ensemble run failed");
  for (double& v : out.mean.values) v /= static_cast<double>(out.runs_ok);
  std::ostringstream note;
  note << out.mean.note << " runs=" << out.runs_ok << " master_seed=" << master_seed;
  out.mean.note = note.str();
  return out;
}

double lorentzian_psd(double f_hz, double center_hz, double fwhm_hz, double area, double offset) {
  const double d = f_hz - center_hz;
  return area * fwhm_hz / (2.0 * constants::pi) / (d * d + 0.25 * fwhm_hz * fwhm_hz) + offset;
}

LorentzianGuess guess_lorentzian(const Spectrum& spectrum) {
  require(spectrum.size() >= 5, ErrorCode::NoPeak, "spectrum too short to hold a peak");
  const std::size_t n = spectrum.size();
  const std::size_t edge = std::max<std::size_t>(1, n / 20);
  std::vector<double> tails(spectrum.values.begin(), spectrum.values.begin() + edge);
  tails.insert(tails.end(), spectrum.values.end() - edge, spectrum.values.end());
  const double offset = median(tails);

  const std::size_t ip = peak_index(spectrum);
  const double peak = spectrum.values[ip];
  require(peak > offset && ip > 0 && ip + 1 < n, ErrorCode::NoPeak, "no interior peak");
  const double half = offset + 0.5 * (peak - offset);

  std::size_t lo = ip;
  while (lo > 0 && spectrum.values[lo] > half) --lo;
  std::size_t hi = ip;
  while (hi + 1 < n && spectrum.values[hi] > half) ++hi;
  require(spectrum.values[lo] <= half && spectrum.values[hi] <= half, ErrorCode::NoPeak,
          "peak has no half-height crossing on both sides");
  auto cross = [&](std::size_t a, std::size_t b) {
    const double ya = spectrum.values[a];
    const double yb = spectrum.values[b];
    const double t = (half - ya) / (yb - ya);
    return spectrum.frequency_hz[a] + t * (spectrum.frequency_hz[b] - spectrum.frequency_hz[a]);
  };
  const double f_lo = cross(lo, lo + 1);
  const double f_hi = cross(hi - 1, hi);
  LorentzianGuess g;
  g.center_hz = spectrum.frequency_hz[ip];
  g.fwhm_hz = std::max(f_hi - f_lo, spectrum.frequency_hz[ip + 1] - spectrum.frequency_hz[ip]);
  g.offset = offset;
  g.area = (peak - offset) * constants::pi * g.fwhm_hz / 2.0;
  return g;
}

LorentzianFit fit_lorentzian(const Spectrum& spectrum,
                             const std::optional<LorentzianGuess>& initial_guess) {
  spectrum.validate();
  const LorentzianGuess g = initial_guess ? *initial_guess : guess_lorentzian(spectrum);
  require(g.fwhm_hz > 0.0 && std::isfinite(g.center_hz), ErrorCode::InvalidArgument,
          "initial guess needs a positive width");

  const double height = *std::max_element(spectrum.values.begin(), spectrum.values.end());
  require(height > 0.0, ErrorCode::NoPeak, "spectrum is identically zero");
  const double area_scale = g.area > 0.0 ? g.area : height * g.fwhm_hz;
  const Scales sc{g.center_hz, g.fwhm_hz, area_scale, height};

  LmState st;
  st.p = Eigen::Vector4d(0.0, 1.0, g.area / area_scale, g.offset / height);
  levenberg_marquardt(spectrum, sc, {}, st);

  // Reweight with sigma_i proportional to the model, as for averaged periodogram bins.
  std::vector<double> sigma(spectrum.size());
  for (int pass = 0; pass < 2 && st.p.allFinite(); ++pass) {
    const auto q = to_physical(st.p, sc);
    bool usable = true;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
      sigma[i] = model_at(spectrum.frequency_hz[i], q) / height;
      usable = usable && std::isfinite(sigma[i]) && sigma[i] > 1e-12;
    }
    if (!usable) break;
    LmState trial = st;
    levenberg_marquardt(spectrum, sc, sigma, trial);
    if (!trial.converged && st.converged) break;
    st = std::move(trial);
  }

  LorentzianFit fit;
  fit.converged = st.converged;
  fit.iterations = st.iterations;
  const auto q = to_physical(st.p, sc);
  const auto [c, w, ar, o] = q;
  fit.center_hz = c;
  fit.fwhm_hz = w;
  fit.area = ar;
  fit.offset = o;
  double plain = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double d = model_at(spectrum.frequency_hz[i], q) - spectrum.values[i];
    plain += d * d;
  }
  fit.residual_norm = std::sqrt(plain);

  const auto m = static_cast<double>(spectrum.size());
  const Eigen::Matrix4d jtj = st.jac.transpose() * st.jac;
  const Eigen::Matrix4d cov = jtj.inverse() * (st.ssr / std::max(1.0, m - 4.0));
  if (cov.allFinite()) {
    fit.err_center = std::sqrt(std::max(cov(0, 0), 0.0)) * sc.fwhm;
    fit.err_fwhm = std::sqrt(std::max(cov(1, 1), 0.0)) * sc.fwhm;
    fit.err_area = std::sqrt(std::max(cov(2, 2), 0.0)) * sc.area;
    fit.err_offset = std::sqrt(std::max(cov(3, 3), 0.0)) * sc.height;
  }
  return fit;
}

LorentzianFit fit_peak(const Spectrum& spectrum, double half_span_fwhm) {
  const LorentzianGuess g = guess_lorentzian(spectrum);
  const Spectrum band = crop(spectrum, g.center_hz - half_span_fwhm * g.fwhm_hz,
                             g.center_hz + half_span_fwhm * g.fwhm_hz);
  return fit_lorentzian(band, g);
}

LorentzianFit normalize_by_pdh_slope(const LorentzianFit& fit, double delta,
                                     const CavityParams& cavity, double modulation) {
  const PdhDiscriminant pdh(cavity, modulation);
  const double ratio = pdh.slope(delta);
  require(std::abs(ratio) >= 1e-6, ErrorCode::SlopeVanishes,
          "PDH slope vanishes at this detuning");
  const double gain = ratio * ratio;
  LorentzianFit out = fit;
  out.area /= gain;
  out.err_area /= gain;
  out.offset /= gain;
  out.err_offset /= gain;
  out.residual_norm /= gain;
  return out;
}

double calibrate_effective_mass(const Spectrum& spectrum, double mode_frequency_hz,
                                double bath_temperature_k) {
  require(spectrum.kind == SpectrumKind::Displacement, ErrorCode::InvalidArgument,
          "mass calibration needs a displacement spectrum");
  require(mode_frequency_hz > 0.0 && bath_temperature_k > 0.0, ErrorCode::InvalidArgument,
          "mode frequency and temperature must be > 0");
  spectrum.validate();
  require(points_within_fwhm(spectrum) >= 10, ErrorCode::GridTooCoarse,
          "resonance FWHM spans fewer than 10 grid points");
  const double w = 2.0 * constants::pi * mode_frequency_hz;
  return constants::boltzmann * bath_temperature_k / (w * w * spectrum_area(spectrum));
}

HeatingDiagnostic heating_diagnostic(std::span<const PowerFit> fits) {
  std::map<double, std::vector<double>> by_power;
  HeatingDiagnostic out;
  for (const auto& pf : fits) {
    const double product = pf.fit.area * pf.fit.fwhm_hz;
    require(std::isfinite(product), ErrorCode::InvalidArgument, "non-finite area x width");
    out.rows.push_back({pf.power_w, pf.fit.area, pf.fit.fwhm_hz, product});
    by_power[pf.power_w].push_back(product);
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const HeatingRow& a, const HeatingRow& b) { return a.power_w < b.power_w; });
  require(by_power.size() >= 2, ErrorCode::InsufficientData, "need at least two input powers");
  for (const auto& [power, products] : by_power) {
    require(products.size() >= 3, ErrorCode::InsufficientData,
            "need at least three detunings per power");
    const double n = static_cast<double>(products.size());
    const double mean = std::accumulate(products.begin(), products.end(), 0.0) / n;
    double var = 0.0;
    for (double v : products) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    out.groups.push_back({power, products.size(), mean, std::sqrt(var / n)});
  }
  for (std::size_t i = 0; i < out.groups.size(); ++i) {
    for (std::size_t j = i + 1; j < out.groups.size(); ++j) {
      const auto& a = out.groups[i];
      const auto& b = out.groups[j];
      const double se = std::hypot(a.std_error, b.std_error);
      const double diff = std::abs(a.mean_product - b.mean_product);
      const double sep = se > 0.0 ? diff / se : (diff > 0.0 ? INFINITY : 0.0);
      out.max_separation_sigma = std::max(out.max_separation_sigma, sep);
      if (diff > 2.0 * se) out.heating_flagged = true;
    }
  }
  return out;
}

}  // namespace optomech
