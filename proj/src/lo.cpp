#include "scmode/lo.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fftw3.h>

#include "scmode/errors.hpp"

namespace scmode {

namespace {

constexpr double kAliasingLimit = 1e-2;

// Planner calls are not thread-safe in FFTW; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Dft {
 public:
  explicit Dft(std::size_t n) : n_(n) {
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~Dft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  Complex* input() { return reinterpret_cast<Complex*>(in_); }
  const Complex* output() const { return reinterpret_cast<const Complex*>(out_); }
  void run() { fftw_execute(plan_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

std::mt19937_64 sample_rng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

int carrier_offset(const SeedModel& model, const FrequencyGrid& grid) {
  const double k = std::round(model.center_detuning / grid.spacing());
  if (k < 1.0 || k > static_cast<double>(grid.half_bins())) {
    std::ostringstream msg;
    msg << "synth_seed: carrier at offset " << k << " lies outside the signal branch [1, "
        << grid.half_bins() << "]";
    throw AliasingError(msg.str());
  }
  return static_cast<int>(k);
}

[[noreturn]] void aliasing(double fraction) {
  std::ostringstream msg;
  msg << "synth_seed: " << fraction << " of the seed power falls outside the signal branch";
  throw AliasingError(msg.str());
}

double envelope(const SeedModel& model, double detuning) {
  const double x = (detuning - model.center_detuning) / model.ase_bandwidth;
  if (model.envelope == EnvelopeShape::Gaussian) {
    return std::exp(-4.0 * std::numbers::ln2 * x * x);
  }
  return std::abs(x) <= 0.5 ? 1.0 : 0.0;
}

// Envelope on the signal branch, after checking how much of it the branch
// misses.
Eigen::VectorXd ase_weights(const SeedModel& model, const FrequencyGrid& grid) {
  const auto n = static_cast<long>(grid.half_bins());
  const double center = model.center_detuning / grid.spacing();
  const double reach = 10.0 * model.ase_bandwidth / grid.spacing() + 1.0;
  const long lo = static_cast<long>(std::floor(center - reach));
  const long hi = static_cast<long>(std::ceil(center + reach));
  double inside = 0.0;
  double outside = 0.0;
  for (long k = lo; k <= hi; ++k) {
    const double w = envelope(model, static_cast<double>(k) * grid.spacing());
    (k >= 1 && k <= n ? inside : outside) += w;
  }
  if (inside <= 0.0) aliasing(1.0);
  const double fraction = outside / (inside + outside);
  if (fraction > kAliasingLimit) aliasing(fraction);

  Eigen::VectorXd w(n);
  for (long k = 1; k <= n; ++k) w[k - 1] = envelope(model, static_cast<double>(k) * grid.spacing());
  return w;
}

TimeFreqMode signal_mode_from(const FrequencyGrid& grid, const Eigen::VectorXcd& branch) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.size()));
  v.tail(branch.size()) = branch / branch.norm();
  return TimeFreqMode(SpectralAmplitude(grid, std::move(v)), ModeKind::SignalOnly);
}

std::vector<TimeFreqMode> synth_noise_modulated(const SeedModel& model, const FrequencyGrid& grid,
                                                std::size_t count) {
  using std::numbers::pi;
  const int k0 = carrier_offset(model, grid);
  const auto n = static_cast<long>(grid.half_bins());
  const std::size_t nt = 2 * grid.half_bins();
  const double window = 2.0 * pi / grid.spacing();
  const double dt = window / static_cast<double>(nt);
  const double tau = model.random_pm_bandwidth > 0.0 ? 1.0 / (2.0 * pi * model.random_pm_bandwidth) : 0.0;
  const double rho = tau > 0.0 ? std::exp(-dt / tau) : 0.0;
  const double kick = model.random_pm_depth * std::sqrt(1.0 - rho * rho);

  Dft dft(nt);
  std::vector<TimeFreqMode> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    auto rng = sample_rng(model.rng_seed, s);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * pi);
    const double sine_phase = uniform(rng);
    const double dither_phase = uniform(rng);
    double ou = model.random_pm_depth * normal(rng);
    Complex* field = dft.input();
    for (std::size_t i = 0; i < nt; ++i) {
      const double t = static_cast<double>(i) * dt;
      const double phase = ou +
                           model.sine_pm_depth * std::sin(2.0 * pi * model.sine_pm_freq * t + sine_phase) +
                           model.dither_depth *
                               std::sin(2.0 * pi * model.coherence_control_rate * t + dither_phase);
      field[i] = std::polar(1.0, phase);
      ou = rho * ou + kick * normal(rng);
    }
    dft.run();

    Eigen::VectorXcd branch = Eigen::VectorXcd::Zero(n);
    double total = 0.0;
    double inside = 0.0;
    const auto half = static_cast<long>(nt / 2);
    for (long m = 0; m < static_cast<long>(nt); ++m) {
      const long shift = m < half ? m : m - static_cast<long>(nt);
      const long k = k0 + shift;
      const Complex c = dft.output()[m];
      total += std::norm(c);
      if (k >= 1 && k <= n) {
        branch[k - 1] = c;
        inside += std::norm(c);
      }
    }
    const double fraction = 1.0 - inside / total;
    if (fraction > kAliasingLimit) aliasing(fraction);
    out.push_back(signal_mode_from(grid, branch));
  }
  return out;
}

}  // namespace

void SeedModel::validate() const {
  auto fail = [](const char* what) {
    throw std::invalid_argument(std::string("seed model: ") + what);
  };
  for (double v : {coherence_control_rate, random_pm_bandwidth, sine_pm_freq}) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail("rates must be non-negative");
  }
  for (double v : {dither_depth, random_pm_depth, sine_pm_depth}) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail("modulation depths must be non-negative");
  }
  if (!(ase_bandwidth >= 0.0)) fail("ase_bandwidth must be non-negative");
  if (kind == SeedKind::FilteredAse && !(ase_bandwidth > 0.0)) {
    fail("filtered ASE needs a positive bandwidth");
  }
}

LoRealization fwm_output(const TimeFreqMode& f0, double gain, const JointSpectrum* joint) {
  if (!(gain >= 1.0)) throw std::invalid_argument("fwm_output: gain must be at least 1");
  if (f0.kind() != ModeKind::SignalOnly) {
    throw std::invalid_argument("fwm_output: seed must be signal-only");
  }
  if (joint != nullptr && !(joint->grid() == f0.grid())) {
    throw std::invalid_argument("fwm_output: joint spectrum is on a different grid");
  }
  Eigen::VectorXcd v =
      std::sqrt(gain) * f0.values() + std::sqrt(gain - 1.0) * conjugate_mode(f0).values();
  if (joint != nullptr) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v[i] *= std::polar(1.0, 0.5 * joint->phase_at(static_cast<std::size_t>(i)));
    }
  }
  return {SpectralAmplitude(f0.grid(), std::move(v)), SeedKind::Coherent, 0.0};
}

LoRealization balance(const LoRealization& lo, double gain) {
  if (!(gain > 1.0)) {
    throw std::invalid_argument("balance: gain must exceed 1 (the idler branch is empty at G = 1)");
  }
  const auto& grid = lo.spectrum.grid();
  Eigen::VectorXcd v = lo.spectrum.values();
  const auto n = static_cast<Eigen::Index>(grid.half_bins());
  v.tail(n) *= std::sqrt((gain - 1.0) / gain);
  return {SpectralAmplitude(grid, std::move(v)), lo.seed_kind, lo.excess_rin};
}

TimeFreqMode lo_mode(const LoRealization& lo) {
  if (!(lo.spectrum.norm() > 0.0)) throw std::invalid_argument("lo_mode: LO spectrum is zero");
  return TimeFreqMode::normalized(lo.spectrum);
}

double lo_excess_rin(double db) {
  if (!(db >= 0.0)) throw std::invalid_argument("lo_excess_rin: apparent shot level must be >= 0 dB");
  return std::pow(10.0, db / 10.0) - 1.0;
}

std::vector<TimeFreqMode> synth_seed(const SeedModel& model, const FrequencyGrid& grid,
                                     std::size_t count) {
  model.validate();
  switch (model.kind) {
    case SeedKind::Coherent: {
      const auto f = TimeFreqMode::delta(grid, carrier_offset(model, grid));
      return std::vector<TimeFreqMode>(count, f);
    }
    case SeedKind::NoiseModulated:
      return synth_noise_modulated(model, grid, count);
    case SeedKind::FilteredAse: {
      const Eigen::VectorXd amp = ase_weights(model, grid).cwiseSqrt();
      std::vector<TimeFreqMode> out;
      out.reserve(count);
      for (std::size_t s = 0; s < count; ++s) {
        auto rng = sample_rng(model.rng_seed, s);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        Eigen::VectorXcd branch(amp.size());
        for (Eigen::Index k = 0; k < amp.size(); ++k) {
          const double re = normal(rng);
          const double im = normal(rng);
          branch[k] = amp[k] * Complex(re, im);
        }
        out.push_back(signal_mode_from(grid, branch));
      }
      return out;
    }
  }
  throw std::logic_error("synth_seed: unknown seed kind");
}

std::optional<Eigen::VectorXd> seed_expected_intensity(const SeedModel& model,
                                                       const FrequencyGrid& grid) {
  model.validate();
  const auto m = static_cast<Eigen::Index>(grid.size());
  const auto n = static_cast<long>(grid.half_bins());
  Eigen::VectorXd p = Eigen::VectorXd::Zero(m);
  switch (model.kind) {
    case SeedKind::Coherent:
      p[static_cast<Eigen::Index>(grid.index(carrier_offset(model, grid)))] = 1.0;
      return p;
    case SeedKind::FilteredAse: {
      const Eigen::VectorXd w = ase_weights(model, grid);
      p.tail(w.size()) = w / w.sum();
      return p;
    }
    case SeedKind::NoiseModulated: {
      if (model.random_pm_depth > 0.0 || model.dither_depth > 0.0) return std::nullopt;
      const int k0 = carrier_offset(model, grid);
      const double step = 2.0 * std::numbers::pi * model.sine_pm_freq / grid.spacing();
      const double rounded = std::round(step);
      if (std::abs(step - rounded) > 1e-9 * std::max(1.0, step)) return std::nullopt;
      const auto s = static_cast<long>(rounded);
      if (s == 0 || model.sine_pm_depth == 0.0) {
        p[static_cast<Eigen::Index>(grid.index(k0))] = 1.0;
        return p;
      }
      for (long j = -n; j <= n; ++j) {
        const long k = k0 + j * s;
        if (k < 1 || k > n) continue;
        const double jn = std::cyl_bessel_j(static_cast<double>(std::abs(j)), model.sine_pm_depth);
        p[static_cast<Eigen::Index>(grid.index(static_cast<int>(k)))] += jn * jn;
      }
      p /= p.sum();
      return p;
    }
  }
  return std::nullopt;
}

}  // namespace scmode
