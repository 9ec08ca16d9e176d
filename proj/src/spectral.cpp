#include "cascade/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <unsupported/Eigen/MatrixFunctions>

namespace cascade {

namespace {

constexpr double kZeroEigenTolerance = 1e-12;
constexpr double kStabilityTolerance = 1e-10;
constexpr double kDegenerateGap = 1e-6;
constexpr double kCharacteristicTolerance = 1e-8;
// Eigenvector bases worse than this go through the dense exponential instead.
constexpr double kMaxCondition = 1e8;
constexpr double kNegativeClamp = 1e-12;

void check_level(int level, int n_levels) {
    if (level < 0 || level >= n_levels) {
        throw CascadeError(ErrorKind::IndexOutOfRange,
                           "level " + std::to_string(level) + " out of range");
    }
}

}  // namespace

Eigen::MatrixXd generator_matrix(const CascadeSpec& spec) {
    require_valid(spec);
    const int n = spec.n_levels;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int l = 0; l < n; ++l) {
        q(l, l) -= spec.rates[l];
        q(wrap(l - 1L, n), l) += spec.rates[l];
    }
    return q;
}

double cycle_current(const CascadeSpec& spec) {
    require_valid(spec);
    double inv = 0.0;
    for (double r : spec.rates) inv += 1.0 / r;
    return 1.0 / inv;
}

std::vector<double> steady_state(const CascadeSpec& spec) {
    const double c = cycle_current(spec);
    std::vector<double> p(spec.rates.size());
    for (std::size_t l = 0; l < p.size(); ++l) p[l] = c / spec.rates[l];
    return p;
}

SpectralDecomposition decompose(const CascadeSpec& spec) {
    const Eigen::MatrixXd q = generator_matrix(spec);
    const int n = spec.n_levels;
    const double gmax = spec.max_rate();

    Eigen::EigenSolver<Eigen::MatrixXd> solver(q, true);
    if (solver.info() != Eigen::Success) {
        throw CascadeError(ErrorKind::NumericalFailure, "eigen solver did not converge");
    }
    SpectralDecomposition d;
    d.eigenvalues = solver.eigenvalues();
    d.eigenvectors = solver.eigenvectors();

    // Snap the stationary eigenvalue to exactly zero and use the exact steady state.
    Eigen::Index zero_idx = 0;
    d.eigenvalues.cwiseAbs().minCoeff(&zero_idx);
    if (std::abs(d.eigenvalues[zero_idx]) > kZeroEigenTolerance * gmax * std::max(1, n)) {
        throw CascadeError(ErrorKind::NumericalFailure, "generator has no zero eigenvalue");
    }
    d.eigenvalues[zero_idx] = 0.0;
    const auto ss = steady_state(spec);
    for (int l = 0; l < n; ++l) d.eigenvectors(l, zero_idx) = ss[l];

    for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
        if (d.eigenvalues[i].real() > kStabilityTolerance * gmax) {
            throw CascadeError(ErrorKind::NumericalFailure, "generator eigenvalue with Re > 0");
        }
        for (Eigen::Index j = i + 1; j < d.eigenvalues.size(); ++j) {
            if (std::abs(d.eigenvalues[i] - d.eigenvalues[j]) < kDegenerateGap * gmax) {
                d.degenerate = true;
            }
        }
        // prod(lambda + g_i) = prod(g_i), written relative to prod(g_i)
        std::complex<double> prod{1.0, 0.0};
        double scale = 1.0;
        for (double g : spec.rates) {
            prod *= 1.0 + d.eigenvalues[i] / g;
            scale *= 1.0 + std::abs(d.eigenvalues[i]) / g;
        }
        d.characteristic_residual = std::max(d.characteristic_residual, std::abs(prod - 1.0) / scale);
    }
    if (d.characteristic_residual > kCharacteristicTolerance) {
        throw CascadeError(ErrorKind::NumericalFailure, "eigenvalues fail the characteristic equation");
    }

    for (int c = 0; c < n; ++c) d.eigenvectors.col(c).normalize();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(d.eigenvectors);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    d.condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!d.degenerate && std::isfinite(d.condition)) {
        d.inverse = d.eigenvectors.inverse();
    }
    return d;
}

Propagator::Propagator(CascadeSpec spec)
    : spec_(std::move(spec)),
      decomposition_(decompose(spec_)),
      steady_(cascade::steady_state(spec_)),
      generator_(generator_matrix(spec_)) {
    spectral_ = !decomposition_.degenerate && decomposition_.condition < kMaxCondition;
}

std::vector<double> Propagator::propagate_spectral(int initial_level, double tau) const {
    const auto& d = decomposition_;
    const int n = spec_.n_levels;
    Eigen::VectorXcd coeff = d.inverse.col(initial_level);
    for (int j = 0; j < n; ++j) coeff[j] *= std::exp(d.eigenvalues[j] * tau);
    const Eigen::VectorXcd p = d.eigenvectors * coeff;
    std::vector<double> out(n);
    for (int l = 0; l < n; ++l) out[l] = p[l].real();
    return out;
}

std::vector<double> Propagator::propagate_dense(int initial_level, double tau) const {
    const Eigen::MatrixXd m = (generator_ * tau).exp();
    const Eigen::VectorXd col = m.col(initial_level);
    return {col.data(), col.data() + col.size()};
}

std::vector<double> Propagator::propagate(int initial_level, double tau) const {
    check_level(initial_level, spec_.n_levels);
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw CascadeError(ErrorKind::ConfigInvalid, "propagate needs finite tau >= 0");
    }
    std::vector<double> p;
    if (tau == 0.0) {
        p.assign(spec_.n_levels, 0.0);
        p[initial_level] = 1.0;
        return p;
    }
    p = spectral_ ? propagate_spectral(initial_level, tau) : propagate_dense(initial_level, tau);

    double sum = 0.0;
    for (double& v : p) {
        if (!std::isfinite(v) || v < -kNegativeClamp) {
            throw CascadeError(ErrorKind::NumericalFailure, "propagation left the probability simplex");
        }
        v = std::max(v, 0.0);
        sum += v;
    }
    if (!(sum > 0.0)) throw CascadeError(ErrorKind::NumericalFailure, "propagation lost all mass");
    for (double& v : p) v /= sum;
    return p;
}

double Propagator::g2(int m, int n, double tau) const {
    check_level(m, spec_.n_levels);
    check_level(n, spec_.n_levels);
    if (tau < 0.0) return g2(n, m, -tau);
    const auto p = propagate(wrap(m - 1L, spec_.n_levels), tau);
    return p[n] / steady_[n];
}

std::vector<double> propagate(const CascadeSpec& spec, int initial_level, double tau) {
    return Propagator(spec).propagate(initial_level, tau);
}

double g2_general(const CascadeSpec& spec, int m, int n, double tau) {
    return Propagator(spec).g2(m, n, tau);
}

}  // namespace cascade
