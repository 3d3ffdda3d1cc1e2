#include "spinnet/normscale.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "spinnet/errors.hpp"
#include "spinnet/netgen.hpp"
#include "spinnet/parallel.hpp"

namespace spinnet {

namespace {

// Vertex count of a rows x cols hexagon patch, same merge rule as the builder.
int honeycomb_vertex_count(int rows, int cols) {
    static const int corner[6][2] = {{1, 1}, {0, 2}, {-1, 1}, {-1, -1}, {0, -2}, {1, -1}};
    std::set<std::pair<long long, long long>> keys;
    for (int j = 0; j < rows; ++j)
        for (int i = 0; i < cols; ++i) {
            const long long ca = 2LL * i + (j % 2);
            const long long cb = 3LL * j;
            for (const auto& c : corner) keys.insert({ca + c[0], cb + c[1]});
        }
    return static_cast<int>(keys.size());
}

int honeycomb_patch_side(int n) {
    int bestK = 1;
    int bestErr = std::abs(honeycomb_vertex_count(1, 1) - n);
    for (int k = 2; k <= 256; ++k) {
        const int count = honeycomb_vertex_count(k, k);
        const int err = std::abs(count - n);
        if (err < bestErr) {
            bestErr = err;
            bestK = k;
        }
        if (count >= n) break;
    }
    return bestK;
}

double top_eigenvalue(const Eigen::MatrixXd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

}  // namespace

NetworkClass network_class_from_string(const std::string& s) {
    if (s == "randomUniform" || s == "uniform") return NetworkClass::randomUniform;
    if (s == "randomDipolar" || s == "dipolar") return NetworkClass::randomDipolar;
    if (s == "honeycomb") return NetworkClass::honeycomb;
    if (s == "honeycombVacancy" || s == "vacancy") return NetworkClass::honeycombVacancy;
    throw ValidationError("unknown network class: " + s);
}

std::string to_string(NetworkClass c) {
    switch (c) {
        case NetworkClass::randomUniform: return "randomUniform";
        case NetworkClass::randomDipolar: return "randomDipolar";
        case NetworkClass::honeycomb: return "honeycomb";
        case NetworkClass::honeycombVacancy: return "honeycombVacancy";
    }
    throw ValidationError("unknown network class");
}

NormEstimate predict_norm(NetworkClass cls, int n, double d, double p) {
    if (n < 2) throw ValidationError("need n >= 2");
    if (d <= 0.0) throw ValidationError("lattice constant d must be positive");
    if (p < 0.0 || p >= 1.0) throw ValidationError("vacancy probability must be in [0,1)");

    NormEstimate est;
    est.networkClass = cls;
    est.n = n;
    est.d = d;
    est.p = p;
    const double d3 = d * d * d;
    switch (cls) {
        case NetworkClass::randomUniform:
            est.predictedNorm = std::sqrt(n * (n - 1.0) / 3.0);
            est.predictedEmax = n / 2.0;
            break;
        case NetworkClass::randomDipolar:
            est.predictedNorm = std::sqrt(2.0 * (n - 1.0) / 3.0) / d3;
            est.predictedEmax = 1.6 / d3;
            break;
        case NetworkClass::honeycomb:
            est.predictedNorm = 2.0 * std::sqrt(static_cast<double>(n)) / d3;
            break;
        case NetworkClass::honeycombVacancy:
            est.predictedNorm = 2.0 * std::sqrt(n * (1.0 - p)) / d3;
            break;
    }
    return est;
}

MonteCarloNorm monte_carlo_norm(NetworkClass cls, int n, double d, double p, int realizations,
                                std::uint64_t baseSeed, unsigned workers) {
    if (realizations < 2) throw ValidationError("need at least 2 realizations");
    predict_norm(cls, n, d, p);  // shared parameter validation

    MonteCarloNorm mc;
    mc.realizations = realizations;
    mc.actualN = n;

    SpinNetwork base;  // honeycomb patch shared by all realizations
    if (cls == NetworkClass::honeycomb || cls == NetworkClass::honeycombVacancy) {
        const int k = honeycomb_patch_side(n);
        base = build_honeycomb(k, k, d);
        mc.actualN = base.size();
    }

    struct Sample {
        double norm, emax;
    };
    const auto samples = parallel_map<Sample>(
        static_cast<std::size_t>(realizations), workers, [&](std::size_t i) {
            const std::uint64_t seed = baseSeed + i;
            SpinNetwork net;
            switch (cls) {
                case NetworkClass::randomUniform:
                    net = build_random_uniform(n, seed);
                    break;
                case NetworkClass::randomDipolar:
                    net = build_random_dipolar_chain(n, d, seed);
                    break;
                case NetworkClass::honeycomb:
                    net = base;
                    break;
                case NetworkClass::honeycombVacancy:
                    net = apply_vacancies(base, p, seed);
                    break;
            }
            return Sample{net.couplings.norm(), top_eigenvalue(net.couplings)};
        });

    std::vector<double> norms(samples.size()), emaxes(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        norms[i] = samples[i].norm;
        emaxes[i] = samples[i].emax;
    }
    mc.meanNorm = compensated_mean(norms);
    mc.meanEmax = compensated_mean(emaxes);

    double ss = 0.0;
    for (double v : norms) ss += (v - mc.meanNorm) * (v - mc.meanNorm);
    mc.stddevNorm = std::sqrt(ss / (realizations - 1));
    return mc;
}

}  // namespace spinnet
