#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace spinnet {

enum class NetworkClass { randomUniform, randomDipolar, honeycomb, honeycombVacancy };

NetworkClass network_class_from_string(const std::string& s);
std::string to_string(NetworkClass c);

struct NormEstimate {
    NetworkClass networkClass;
    int n = 0;
    double d = 1.0;
    double p = 0.0;
    double predictedNorm = 0.0;
    std::optional<double> predictedEmax;
};

// Closed-form Frobenius-norm estimates:
//   randomUniform    sqrt(n(n-1)/3)          Emax ~ n/2
//   randomDipolar    sqrt(2(n-1)/3)/d^3      Emax -> 1.6/d^3
//   honeycomb        2 sqrt(n)/d^3
//   honeycombVacancy 2 sqrt(n(1-p))/d^3
NormEstimate predict_norm(NetworkClass cls, int n, double d = 1.0, double p = 0.0);

struct MonteCarloNorm {
    double meanNorm = 0.0;
    double stddevNorm = 0.0;
    double meanEmax = 0.0;
    int realizations = 0;
    int actualN = 0;  // honeycomb sizes are set by (rows, cols), report what was built
};

// Builds `realizations` networks with seeds baseSeed+i and averages the
// Frobenius norm and the top eigenvalue. For the honeycomb classes, n is a
// target size; the nearest rows x cols patch is used and actualN reported.
MonteCarloNorm monte_carlo_norm(NetworkClass cls, int n, double d, double p, int realizations,
                                std::uint64_t baseSeed, unsigned workers = 1);

}  // namespace spinnet
