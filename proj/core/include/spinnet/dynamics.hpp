#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace spinnet {

// Full spectral decomposition of a real symmetric matrix, eigenvalues
// ascending. Eigenvector signs follow a fixed convention (the component of
// largest magnitude is positive) so decompositions are reproducible.
struct SpectralData {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;  // column k pairs with eigenvalue k
};

struct FidelityTrace {
    std::vector<double> times;
    std::vector<double> values;
    double peakTime = 0.0;
    double peakValue = 0.0;
};

SpectralData eig_sym(const Eigen::MatrixXd& A);

// |<j| exp(-iAt) |i>|^2 via the spectral decomposition.
double fidelity(const SpectralData& sd, double t, int i, int j);
double fidelity(const Eigen::MatrixXd& A, double t, int i, int j);

// Uniform grid over [0, tMax]; one decomposition amortized over all samples.
// The peak is the best grid point refined by a quadratic fit through its
// neighbors, with the fidelity re-evaluated exactly at the refined time.
FidelityTrace fidelity_trace(const Eigen::MatrixXd& A, int i, int j, double tMax, int samples);
FidelityTrace fidelity_trace(const SpectralData& sd, int i, int j, double tMax, int samples);

// All (weight, frequency) pairs of F(t) = sum_n w_n cos(f_n t):
// w = V_ik V_jk V_il V_jl, f = E_k - E_l, over eigenpairs (k, l).
std::vector<std::pair<double, double>> fidelity_spectral_terms(const Eigen::MatrixXd& A, int i, int j);

// First time the fidelity reaches `threshold` on the trace grid (linear
// interpolation between brackets); returns false if never reached.
bool first_crossing(const FidelityTrace& trace, double threshold, double* tCross);

}  // namespace spinnet
