#include "scmode/gaussian.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "scmode/errors.hpp"

namespace scmode {

namespace {

// At or below this ratio the extrema difference is rounding noise.
constexpr double kResolvableRatio = 4.0 * std::numeric_limits<double>::epsilon();

using Matrix4 = Eigen::Matrix4d;

Matrix4 pair_symplectic(const PairTransfer& t) {
  const double mr = t.mu.real();
  const double mi = t.mu.imag();
  const double nr = t.nu.real();
  const double ni = t.nu.imag();
  Matrix4 s;
  s << mr, -mi, nr,  ni,
       mi,  mr, ni, -nr,
       nr,  ni, mr, -mi,
       ni, -nr, mi,  mr;
  return s;
}

void check_bin(std::size_t bin, std::size_t modes, const char* op) {
  if (bin >= modes) {
    throw std::invalid_argument(std::string(op) + ": bin index out of range");
  }
}

}  // namespace

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() % 2 != 0) {
    throw std::invalid_argument("gaussian state: quadrature vector length must be even");
  }
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw std::invalid_argument("gaussian state: covariance shape does not match mean");
  }
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if (cov_.size() > 0 && (cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("gaussian state: covariance is not symmetric");
  }
}

void GaussianState::apply_pair_transfer(std::size_t i, std::size_t j, const PairTransfer& t) {
  const Matrix4 s = pair_symplectic(t);
  const std::array<Eigen::Index, 4> idx{static_cast<Eigen::Index>(2 * i),
                                        static_cast<Eigen::Index>(2 * i + 1),
                                        static_cast<Eigen::Index>(2 * j),
                                        static_cast<Eigen::Index>(2 * j + 1)};
  const Eigen::Index dim = cov_.rows();

  Eigen::Matrix<double, 4, Eigen::Dynamic> rows(4, dim);
  Matrix4 block;
  Eigen::Vector4d m;
  for (int r = 0; r < 4; ++r) {
    rows.row(r) = cov_.row(idx[r]);
    m[r] = mean_[idx[r]];
    for (int c = 0; c < 4; ++c) block(r, c) = cov_(idx[r], idx[c]);
  }
  const Eigen::Matrix<double, 4, Eigen::Dynamic> updated = s * rows;
  Matrix4 new_block = s * block * s.transpose();
  new_block = 0.5 * (new_block + new_block.transpose()).eval();
  const Eigen::Vector4d new_mean = s * m;

  for (int r = 0; r < 4; ++r) {
    cov_.row(idx[r]) = updated.row(r);
    cov_.col(idx[r]) = updated.row(r).transpose();
    mean_[idx[r]] = new_mean[r];
  }
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) cov_(idx[r], idx[c]) = new_block(r, c);
  }
}

void GaussianState::apply_loss(std::size_t bin, double t, double n_thermal) {
  const double s = std::sqrt(t);
  const auto x = static_cast<Eigen::Index>(2 * bin);
  for (Eigen::Index q : {x, x + 1}) {
    cov_.row(q) *= s;
    cov_.col(q) *= s;
    mean_[q] *= s;
  }
  const double added = (1.0 - t) * (n_thermal + kVacuumVariance);
  cov_(x, x) += added;
  cov_(x + 1, x + 1) += added;
}

void GaussianState::apply_phase(std::size_t bin, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const auto x = static_cast<Eigen::Index>(2 * bin);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;

  const Eigen::Matrix<double, 2, Eigen::Dynamic> rows = rot * cov_.middleRows(x, 2);
  Eigen::Matrix2d block = rot * cov_.block(x, x, 2, 2) * rot.transpose();
  block = 0.5 * (block + block.transpose()).eval();
  cov_.middleRows(x, 2) = rows;
  cov_.middleCols(x, 2) = rows.transpose();
  cov_.block(x, x, 2, 2) = block;
  mean_.segment(x, 2) = (rot * mean_.segment(x, 2)).eval();
}

GaussianState vacuum(std::size_t modes) {
  const auto dim = static_cast<Eigen::Index>(2 * modes);
  return GaussianState(Eigen::VectorXd::Zero(dim),
                       kVacuumVariance * Eigen::MatrixXd::Identity(dim, dim));
}

GaussianState vacuum(const FrequencyGrid& grid) { return vacuum(grid.size()); }

GaussianState pair_bogoliubov(GaussianState state, BinPair pair, const PairTransfer& t) {
  check_bin(pair.first, state.modes(), "pair_bogoliubov");
  check_bin(pair.second, state.modes(), "pair_bogoliubov");
  if (pair.first == pair.second) {
    throw std::invalid_argument("pair_bogoliubov: bins must be distinct");
  }
  state.apply_pair_transfer(pair.first, pair.second, t);
  return state;
}

GaussianState two_mode_squeeze(GaussianState state, BinPair pair, double r, double phi) {
  check_bin(pair.first, state.modes(), "two_mode_squeeze");
  check_bin(pair.second, state.modes(), "two_mode_squeeze");
  if (pair.first == pair.second) {
    throw std::invalid_argument("two_mode_squeeze: bins must be distinct");
  }
  if (r == 0.0) return state;
  const PairTransfer t{{std::cosh(r), 0.0}, -std::polar(std::sinh(r), phi)};
  state.apply_pair_transfer(pair.first, pair.second, t);
  return state;
}

GaussianState loss_channel(GaussianState state, std::size_t bin, double t, double n_thermal) {
  check_bin(bin, state.modes(), "loss_channel");
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("loss_channel: transmissivity must lie in [0, 1]");
  }
  if (!(n_thermal >= 0.0)) {
    throw std::invalid_argument("loss_channel: thermal occupation must be non-negative");
  }
  if (t == 1.0) return state;
  state.apply_loss(bin, t, n_thermal);
  return state;
}

GaussianState phase_shift(GaussianState state, std::size_t bin, double angle) {
  check_bin(bin, state.modes(), "phase_shift");
  state.apply_phase(bin, angle);
  return state;
}

Eigen::VectorXd quadrature_direction(const Eigen::VectorXcd& mode, double theta) {
  const Complex rot = std::polar(1.0, theta);
  Eigen::VectorXd v(2 * mode.size());
  for (Eigen::Index k = 0; k < mode.size(); ++k) {
    const Complex z = mode[k] * rot;
    v[2 * k] = z.real();
    v[2 * k + 1] = z.imag();
  }
  return v;
}

QuadratureStats quadrature_stats(const GaussianState& state, const Eigen::VectorXcd& mode,
                                 double theta) {
  if (static_cast<std::size_t>(mode.size()) != state.modes()) {
    throw std::invalid_argument("quadrature_stats: mode length does not match state");
  }
  const Eigen::VectorXd v = quadrature_direction(mode, theta);
  return {v.dot(state.mean()), v.dot(state.cov() * v)};
}

QuadratureStats mode_quadrature_stats(const GaussianState& state, const ModeSelector& sel) {
  return quadrature_stats(state, sel.mode.values(), sel.phase);
}

QuadratureExtrema quadrature_extrema(const GaussianState& state, const Eigen::VectorXcd& mode) {
  if (static_cast<std::size_t>(mode.size()) != state.modes()) {
    throw std::invalid_argument("quadrature_extrema: mode length does not match state");
  }
  const Eigen::VectorXd v0 = quadrature_direction(mode, 0.0);
  const Eigen::VectorXd v1 = quadrature_direction(mode, 0.5 * std::numbers::pi);
  const Eigen::VectorXd sv0 = state.cov() * v0;
  const double a = v0.dot(sv0);
  const double b = v1.dot(state.cov() * v1);
  const double c = v1.dot(sv0);
  const double mid = 0.5 * (a + b);
  const double half_diff = 0.5 * (a - b);
  const double radius = std::hypot(half_diff, c);
  double angle = 0.5 * std::atan2(-c, -half_diff);
  if (angle < 0.0) angle += std::numbers::pi;
  const double lo = mid - radius;
  const double hi = mid + radius;
  if (lo <= kResolvableRatio * hi) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "quadrature_extrema: squeezed variance " << lo << " is not resolvable next to " << hi;
    throw PrecisionError(msg.str());
  }
  return {lo, hi, angle};
}

double mean_photon_number(const GaussianState& state, const Eigen::VectorXcd& mode) {
  const auto x = quadrature_stats(state, mode, 0.0);
  const auto p = quadrature_stats(state, mode, 0.5 * std::numbers::pi);
  return 0.5 * (x.variance + p.variance + x.mean * x.mean + p.mean * p.mean - 1.0);
}

double marginal_photon_stats(const GaussianState& state, const TimeFreqMode& mode) {
  return mean_photon_number(state, mode.values());
}

PhysicalityReport check_physical(const GaussianState& state) {
  const auto dim = static_cast<Eigen::Index>(2 * state.modes());
  if (dim == 0) return {true, 0.0};
  Eigen::MatrixXcd h = state.cov().cast<Complex>();
  for (Eigen::Index q = 0; q < dim; q += 2) {
    h(q, q + 1) += Complex(0.0, 0.5);
    h(q + 1, q) -= Complex(0.0, 0.5);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  return {min_eig >= -kPhysicalityTolerance, min_eig};
}

HomodyneConditioner::HomodyneConditioner(const GaussianState& state,
                                         const Eigen::VectorXcd& mode, double theta) {
  const auto m = static_cast<Eigen::Index>(state.modes());
  if (mode.size() != m) {
    throw std::invalid_argument("homodyne_condition: mode length does not match state");
  }
  if (std::abs(mode.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("homodyne_condition: mode must be unit norm");
  }
  measured_ = mode * std::polar(1.0, theta);

  std::vector<std::size_t> candidates(static_cast<std::size_t>(m));
  std::iota(candidates.begin(), candidates.end(), std::size_t{0});
  const Eigen::MatrixXcd full = detail::orthonormal_completion(
      Eigen::MatrixXcd(measured_), candidates, static_cast<std::size_t>(m));
  basis_ = full.rightCols(m - 1);

  // Passive change of mode basis b_j = sum_k conj(h_jk) a_k as an orthogonal
  // symplectic map on quadratures.
  Eigen::MatrixXd o(2 * m, 2 * m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const Complex u = std::conj(full(k, j));
      o(2 * j, 2 * k) = u.real();
      o(2 * j, 2 * k + 1) = -u.imag();
      o(2 * j + 1, 2 * k) = u.imag();
      o(2 * j + 1, 2 * k + 1) = u.real();
    }
  }
  const Eigen::VectorXd mean = o * state.mean();
  Eigen::MatrixXd cov = o * state.cov() * o.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();

  const Eigen::Index rest = 2 * (m - 1);
  outcome_mean_ = mean[0];
  outcome_variance_ = cov(0, 0);
  const Eigen::VectorXd cross = cov.col(0).tail(rest);
  // Pseudoinverse of the 1x1 measured block.
  const double inv = outcome_variance_ > 0.0 ? 1.0 / outcome_variance_ : 0.0;
  gain_ = cross * inv;
  base_mean_ = mean.tail(rest) - gain_ * outcome_mean_;
  cond_cov_ = cov.bottomRightCorner(rest, rest) - cross * cross.transpose() * inv;
  cond_cov_ = 0.5 * (cond_cov_ + cond_cov_.transpose()).eval();

  const auto report = check_physical(GaussianState(base_mean_, cond_cov_));
  if (!report) {
    std::ostringstream msg;
    msg << "homodyne_condition: conditional state is unphysical (min eigenvalue "
        << report.min_eigenvalue << ")";
    throw InternalConsistencyError(msg.str());
  }
}

GaussianState HomodyneConditioner::condition(double gamma) const {
  return GaussianState(base_mean_ + gain_ * gamma, cond_cov_);
}

Eigen::VectorXcd HomodyneConditioner::project(const Eigen::VectorXcd& grid_mode) const {
  if (grid_mode.size() != measured_.size()) {
    throw std::invalid_argument("homodyne projection: mode length does not match grid");
  }
  const double overlap = std::abs(measured_.dot(grid_mode));
  if (overlap > 1e-9 * std::max(1.0, grid_mode.norm())) {
    throw std::invalid_argument("homodyne projection: mode overlaps the measured mode");
  }
  return basis_.adjoint() * grid_mode;
}

std::vector<double> HomodyneConditioner::sample_outcomes(std::size_t count,
                                                         std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(outcome_mean_, std::sqrt(outcome_variance_));
  std::vector<double> out(count);
  for (auto& g : out) g = dist(rng);
  return out;
}

ConditionalState homodyne_condition(const GaussianState& state, const ModeSelector& sel,
                                    double gamma) {
  HomodyneConditioner conditioner(state, sel.mode.values(), sel.phase);
  return {conditioner.condition(gamma), conditioner.retained_basis()};
}

}  // namespace scmode
