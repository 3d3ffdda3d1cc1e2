#include "spinnet/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "spinnet/errors.hpp"

namespace spinnet {

namespace {

void check_indices(const Eigen::MatrixXd& V, int i, int j) {
    const int n = static_cast<int>(V.rows());
    if (i < 0 || j < 0 || i >= n || j >= n)
        throw ValidationError("node index out of range");
}

// Fidelity from precomputed per-mode products c_k = V(j,k) V(i,k).
double eval(const Eigen::VectorXd& c, const Eigen::VectorXd& E, double t) {
    double re = 0.0, im = 0.0;
    for (int k = 0; k < c.size(); ++k) {
        const double ph = E[k] * t;
        re += c[k] * std::cos(ph);
        im -= c[k] * std::sin(ph);
    }
    return re * re + im * im;
}

}  // namespace

SpectralData eig_sym(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols())
        throw ValidationError("matrix is not square");
    const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10)
        throw ValidationError("matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
    if (solver.info() != Eigen::Success)
        throw ValidationError("eigendecomposition failed to converge");

    SpectralData sd{solver.eigenvalues(), solver.eigenvectors()};

    // Fixed sign convention: largest-magnitude component positive.
    for (int k = 0; k < sd.eigenvectors.cols(); ++k) {
        int imax = 0;
        sd.eigenvectors.col(k).cwiseAbs().maxCoeff(&imax);
        if (sd.eigenvectors(imax, k) < 0.0) sd.eigenvectors.col(k) = -sd.eigenvectors.col(k);
    }
    return sd;
}

double fidelity(const SpectralData& sd, double t, int i, int j) {
    check_indices(sd.eigenvectors, i, j);
    const Eigen::VectorXd c =
        sd.eigenvectors.row(j).cwiseProduct(sd.eigenvectors.row(i)).transpose();
    return eval(c, sd.eigenvalues, t);
}

double fidelity(const Eigen::MatrixXd& A, double t, int i, int j) {
    return fidelity(eig_sym(A), t, i, j);
}

FidelityTrace fidelity_trace(const SpectralData& sd, int i, int j, double tMax, int samples) {
    if (tMax <= 0.0) throw ValidationError("tMax must be positive");
    if (samples < 2) throw ValidationError("need at least 2 samples");
    check_indices(sd.eigenvectors, i, j);

    const Eigen::VectorXd c =
        sd.eigenvectors.row(j).cwiseProduct(sd.eigenvectors.row(i)).transpose();

    FidelityTrace trace;
    trace.times.resize(samples);
    trace.values.resize(samples);
    const double dt = tMax / (samples - 1);
    int best = 0;
    for (int s = 0; s < samples; ++s) {
        trace.times[s] = s * dt;
        trace.values[s] = eval(c, sd.eigenvalues, trace.times[s]);
        if (trace.values[s] > trace.values[best]) best = s;
    }

    trace.peakTime = trace.times[best];
    trace.peakValue = trace.values[best];
    if (best > 0 && best + 1 < samples) {
        const double fm = trace.values[best - 1], f0 = trace.values[best], fp = trace.values[best + 1];
        const double denom = fp - 2.0 * f0 + fm;
        if (denom < 0.0) {  // genuine local max
            double tStar = trace.times[best] - 0.5 * dt * (fp - fm) / denom;
            tStar = std::min(std::max(tStar, trace.times[best - 1]), trace.times[best + 1]);
            const double fStar = eval(c, sd.eigenvalues, tStar);
            if (fStar > trace.peakValue) {
                trace.peakTime = tStar;
                trace.peakValue = fStar;
            }
        }
    }
    return trace;
}

FidelityTrace fidelity_trace(const Eigen::MatrixXd& A, int i, int j, double tMax, int samples) {
    return fidelity_trace(eig_sym(A), i, j, tMax, samples);
}

std::vector<std::pair<double, double>> fidelity_spectral_terms(const Eigen::MatrixXd& A, int i, int j) {
    const SpectralData sd = eig_sym(A);
    check_indices(sd.eigenvectors, i, j);
    const int n = static_cast<int>(sd.eigenvalues.size());
    std::vector<std::pair<double, double>> terms;
    terms.reserve(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        const double ck = sd.eigenvectors(j, k) * sd.eigenvectors(i, k);
        if (ck == 0.0) continue;
        for (int l = 0; l < n; ++l) {
            const double w = ck * sd.eigenvectors(j, l) * sd.eigenvectors(i, l);
            if (w != 0.0) terms.emplace_back(w, sd.eigenvalues[k] - sd.eigenvalues[l]);
        }
    }
    return terms;
}

bool first_crossing(const FidelityTrace& trace, double threshold, double* tCross) {
    for (std::size_t s = 0; s < trace.values.size(); ++s) {
        if (trace.values[s] >= threshold) {
            if (s == 0) {
                *tCross = trace.times[0];
            } else {
                const double f0 = trace.values[s - 1], f1 = trace.values[s];
                const double frac = (threshold - f0) / (f1 - f0);
                *tCross = trace.times[s - 1] + frac * (trace.times[s] - trace.times[s - 1]);
            }
            return true;
        }
    }
    return false;
}

}  // namespace spinnet
