#pragma once

// General-rate machinery: generator, steady state, conditional propagation
// and g2 for arbitrary rates.

#include <vector>

#include <Eigen/Dense>

#include "cascade/model.hpp"

namespace cascade {

/// Q[l,l] = -rates[l], Q[(l-1) mod N, l] = +rates[l]. Columns sum to zero.
Eigen::MatrixXd generator_matrix(const CascadeSpec& spec);

/// p[l] = (1/rates[l]) / sum_k (1/rates[k]); the cycle current rates[l] p[l] is uniform.
std::vector<double> steady_state(const CascadeSpec& spec);

/// Common cycle current (sum_k 1/rates[k])^{-1}; also the per-channel event rate.
double cycle_current(const CascadeSpec& spec);

struct SpectralDecomposition {
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd eigenvectors;  // columns
    Eigen::MatrixXcd inverse;       // eigenvectors^{-1}
    double condition = 1.0;         // 2-norm condition number of the eigenvector matrix
    /// max over eigenvalues of |prod(1 + lambda/g_i) - 1| / prod(1 + |lambda|/g_i)
    double characteristic_residual = 0.0;
    bool degenerate = false;
};

SpectralDecomposition decompose(const CascadeSpec& spec);

/// Holds one decomposition and answers propagation / g2 queries for a spec.
class Propagator {
public:
    explicit Propagator(CascadeSpec spec);

    const CascadeSpec& spec() const noexcept { return spec_; }
    const SpectralDecomposition& decomposition() const noexcept { return decomposition_; }
    const std::vector<double>& steady_state() const noexcept { return steady_; }
    /// False when propagation goes through the dense matrix exponential.
    bool spectral() const noexcept { return spectral_; }

    /// exp(Q tau) e_{initial_level}, clamped to the probability simplex.
    std::vector<double> propagate(int initial_level, double tau) const;

    /// Signed-tau correlation; tau = 0 is the right limit.
    double g2(int m, int n, double tau) const;

private:
    std::vector<double> propagate_spectral(int initial_level, double tau) const;
    std::vector<double> propagate_dense(int initial_level, double tau) const;

    CascadeSpec spec_;
    SpectralDecomposition decomposition_;
    std::vector<double> steady_;
    Eigen::MatrixXd generator_;
    bool spectral_ = true;
};

std::vector<double> propagate(const CascadeSpec& spec, int initial_level, double tau);

double g2_general(const CascadeSpec& spec, int m, int n, double tau);

}  // namespace cascade
