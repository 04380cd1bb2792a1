#include "scmode/spectral.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace scmode {

namespace {

constexpr double kUnitNormTolerance = 1e-12;
constexpr double kCompletionResidual = 1e-8;

bool branch_is_empty(const Eigen::VectorXcd& v, std::size_t half, bool signal) {
  const auto n = static_cast<Eigen::Index>(half);
  return signal ? v.tail(n).squaredNorm() == 0.0 : v.head(n).squaredNorm() == 0.0;
}

ModeKind infer_kind(const SpectralAmplitude& a) {
  const auto half = a.grid().half_bins();
  if (branch_is_empty(a.values(), half, false)) return ModeKind::SignalOnly;
  if (branch_is_empty(a.values(), half, true)) return ModeKind::IdlerOnly;
  return ModeKind::General;
}

std::optional<TimeFreqMode> branch_part(const TimeFreqMode& f, bool signal) {
  const auto n = static_cast<Eigen::Index>(f.grid().half_bins());
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(f.values().size());
  if (signal) {
    v.tail(n) = f.values().tail(n);
  } else {
    v.head(n) = f.values().head(n);
  }
  const double norm = v.norm();
  if (norm == 0.0) return std::nullopt;
  return TimeFreqMode(SpectralAmplitude(f.grid(), v / norm),
                      signal ? ModeKind::SignalOnly : ModeKind::IdlerOnly);
}

}  // namespace

FrequencyGrid::FrequencyGrid(double center_rad_s, double spacing_rad_s, std::size_t half_bins)
    : center_(center_rad_s), spacing_(spacing_rad_s), half_bins_(half_bins) {
  if (!(spacing_rad_s > 0.0) || !std::isfinite(spacing_rad_s)) {
    throw std::invalid_argument("frequency grid: bin spacing must be positive");
  }
  if (half_bins == 0) {
    throw std::invalid_argument("frequency grid: need at least one bin per branch");
  }
}

int FrequencyGrid::offset(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("frequency grid: bin index out of range");
  const auto i = static_cast<long>(index);
  const auto n = static_cast<long>(half_bins_);
  return static_cast<int>(i < n ? i - n : i - n + 1);
}

std::size_t FrequencyGrid::index(int offset) const {
  const auto n = static_cast<long>(half_bins_);
  if (offset == 0 || offset < -n || offset > n) {
    throw std::out_of_range("frequency grid: offset " + std::to_string(offset) + " not on grid");
  }
  return static_cast<std::size_t>(offset < 0 ? offset + n : offset + n - 1);
}

FrequencyGrid make_grid(double center_rad_s, double spacing_rad_s, std::size_t half_bins) {
  return FrequencyGrid(center_rad_s, spacing_rad_s, half_bins);
}

SpectralAmplitude::SpectralAmplitude(const FrequencyGrid& grid)
    : grid_(grid), values_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.size()))) {}

SpectralAmplitude::SpectralAmplitude(const FrequencyGrid& grid, Eigen::VectorXcd values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<Eigen::Index>(grid.size())) {
    throw std::invalid_argument("spectral amplitude: length does not match grid");
  }
}

double SpectralAmplitude::signal_power() const {
  return values_.tail(static_cast<Eigen::Index>(grid_.half_bins())).squaredNorm();
}

double SpectralAmplitude::idler_power() const {
  return values_.head(static_cast<Eigen::Index>(grid_.half_bins())).squaredNorm();
}

TimeFreqMode::TimeFreqMode(SpectralAmplitude amplitude, ModeKind kind)
    : amplitude_(std::move(amplitude)), kind_(kind) {
  if (std::abs(amplitude_.norm() - 1.0) > kUnitNormTolerance) {
    throw std::invalid_argument("time-frequency mode: amplitude is not unit norm");
  }
  const auto half = amplitude_.grid().half_bins();
  if (kind == ModeKind::SignalOnly && !branch_is_empty(amplitude_.values(), half, false)) {
    throw std::invalid_argument("time-frequency mode: signal-only mode has idler support");
  }
  if (kind == ModeKind::IdlerOnly && !branch_is_empty(amplitude_.values(), half, true)) {
    throw std::invalid_argument("time-frequency mode: idler-only mode has signal support");
  }
}

TimeFreqMode TimeFreqMode::normalized(const SpectralAmplitude& amplitude) {
  const double norm = amplitude.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("time-frequency mode: zero amplitude");
  SpectralAmplitude unit(amplitude.grid(), amplitude.values() / norm);
  ModeKind kind = infer_kind(unit);
  TimeFreqMode mode(unit, kind);
  if (kind == ModeKind::General && is_self_conjugated(mode)) {
    return TimeFreqMode(std::move(unit), ModeKind::SelfConjugated);
  }
  return mode;
}

TimeFreqMode TimeFreqMode::delta(const FrequencyGrid& grid, int offset, Complex phase) {
  SpectralAmplitude a(grid);
  Eigen::VectorXcd v = a.values();
  v[static_cast<Eigen::Index>(grid.index(offset))] = phase / std::abs(phase);
  return TimeFreqMode(SpectralAmplitude(grid, std::move(v)),
                      offset > 0 ? ModeKind::SignalOnly : ModeKind::IdlerOnly);
}

JointSpectrum::JointSpectrum(const FrequencyGrid& grid, Eigen::VectorXd magnitude,
                             Eigen::VectorXd phase)
    : grid_(grid), magnitude_(std::move(magnitude)), phase_(std::move(phase)) {
  const auto n = static_cast<Eigen::Index>(grid.half_bins());
  if (magnitude_.size() != n || phase_.size() != n) {
    throw std::invalid_argument("joint spectrum: expected one value per signal bin");
  }
  if ((magnitude_.array() < 0.0).any() || !magnitude_.allFinite() || !phase_.allFinite()) {
    throw std::invalid_argument("joint spectrum: magnitudes must be finite and non-negative");
  }
}

JointSpectrum JointSpectrum::flat(const FrequencyGrid& grid, double magnitude, double phase) {
  const auto n = static_cast<Eigen::Index>(grid.half_bins());
  return JointSpectrum(grid, Eigen::VectorXd::Constant(n, magnitude),
                       Eigen::VectorXd::Constant(n, phase));
}

double JointSpectrum::magnitude_at(std::size_t index) const {
  const auto k = std::abs(grid_.offset(index));
  return magnitude_[k - 1];
}

double JointSpectrum::phase_at(std::size_t index) const {
  const auto k = std::abs(grid_.offset(index));
  return phase_[k - 1];
}

TimeFreqMode conjugate_mode(const TimeFreqMode& f) {
  const auto& grid = f.grid();
  const auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXcd g(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    g[m - 1 - i] = std::conj(f.values()[i]);
  }
  ModeKind kind = f.kind();
  if (kind == ModeKind::SignalOnly) {
    kind = ModeKind::IdlerOnly;
  } else if (kind == ModeKind::IdlerOnly) {
    kind = ModeKind::SignalOnly;
  }
  return TimeFreqMode(SpectralAmplitude(grid, std::move(g)), kind);
}

TimeFreqMode sc_extend(const TimeFreqMode& f_signal, const JointSpectrum* joint) {
  if (f_signal.kind() != ModeKind::SignalOnly) {
    throw std::invalid_argument("sc_extend: input mode must be signal-only");
  }
  if (joint != nullptr && !(joint->grid() == f_signal.grid())) {
    throw std::invalid_argument("sc_extend: joint spectrum is on a different grid");
  }
  const auto conj = conjugate_mode(f_signal);
  Eigen::VectorXcd v = (f_signal.values() + conj.values()) / std::sqrt(2.0);
  if (joint != nullptr) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v[i] *= std::polar(1.0, 0.5 * joint->phase_at(static_cast<std::size_t>(i)));
    }
  }
  // Renormalize to absorb the last ulp of rounding in the sqrt(2) split.
  v /= v.norm();
  return TimeFreqMode(SpectralAmplitude(f_signal.grid(), std::move(v)), ModeKind::SelfConjugated);
}

bool is_self_conjugated(const TimeFreqMode& f, const JointSpectrum* joint, double tolerance) {
  const auto& grid = f.grid();
  const auto m = grid.size();
  for (std::size_t i = grid.half_bins(); i < m; ++i) {
    Complex s = f[i];
    Complex c = f[grid.conj(i)];
    if (joint != nullptr) {
      const auto unwind = std::polar(1.0, -0.5 * joint->phase_at(i));
      s *= unwind;
      c *= unwind;
    }
    if (std::abs(c - std::conj(s)) > tolerance) return false;
  }
  return true;
}

std::vector<TimeFreqMode> gram_schmidt_complete(const TimeFreqMode& f0, std::size_t count) {
  const auto& grid = f0.grid();
  if (f0.kind() != ModeKind::SignalOnly) {
    throw std::invalid_argument("gram_schmidt_complete: seed mode must be signal-only");
  }
  if (count == 0 || count > grid.half_bins()) {
    throw std::invalid_argument("gram_schmidt_complete: count must lie in [1, half_bins]");
  }
  std::vector<std::size_t> candidates(grid.half_bins());
  std::iota(candidates.begin(), candidates.end(), grid.half_bins());

  Eigen::MatrixXcd leading = f0.values();
  const Eigen::MatrixXcd basis = detail::orthonormal_completion(leading, candidates, count);

  std::vector<TimeFreqMode> out;
  out.reserve(count);
  out.push_back(f0);
  for (Eigen::Index j = 1; j < basis.cols(); ++j) {
    out.emplace_back(SpectralAmplitude(grid, basis.col(j)), ModeKind::SignalOnly);
  }
  return out;
}

std::optional<TimeFreqMode> signal_part(const TimeFreqMode& f) { return branch_part(f, true); }
std::optional<TimeFreqMode> idler_part(const TimeFreqMode& f) { return branch_part(f, false); }

namespace detail {

Eigen::MatrixXcd orthonormal_completion(const Eigen::MatrixXcd& leading,
                                        std::span<const std::size_t> candidates,
                                        std::size_t count) {
  const Eigen::Index dim = leading.rows();
  Eigen::MatrixXcd basis(dim, static_cast<Eigen::Index>(count));
  Eigen::Index filled = 0;

  auto try_add = [&](Eigen::VectorXcd v) {
    const double initial = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < filled; ++j) {
        v -= basis.col(j) * basis.col(j).dot(v);
      }
    }
    const double residual = v.norm();
    if (!(residual >= kCompletionResidual * std::max(initial, 1.0))) return false;
    basis.col(filled++) = v / residual;
    return true;
  };

  for (Eigen::Index j = 0; j < leading.cols() && filled < basis.cols(); ++j) {
    if (!try_add(leading.col(j))) {
      throw std::invalid_argument("orthonormal completion: leading vectors are degenerate");
    }
  }
  for (std::size_t c : candidates) {
    if (filled == basis.cols()) break;
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    e[static_cast<Eigen::Index>(c)] = 1.0;
    try_add(std::move(e));
  }
  if (filled != basis.cols()) {
    throw std::invalid_argument("orthonormal completion: not enough candidate directions");
  }
  // The first column is returned bit-for-bit when it was already unit.
  if (leading.cols() > 0 && std::abs(leading.col(0).norm() - 1.0) <= kUnitNormTolerance) {
    basis.col(0) = leading.col(0);
  }
  return basis;
}

}  // namespace detail

}  // namespace scmode
