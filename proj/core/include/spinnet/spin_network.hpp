#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace spinnet {

// A spin network in the single-excitation picture: a real symmetric coupling
// matrix whose diagonal holds on-site energy shifts, plus a designated pair of
// end nodes between which transport is evaluated. Positions are carried along
// when a builder is geometric (honeycomb, P1/NV) and are otherwise empty.
struct SpinNetwork {
    Eigen::MatrixXd couplings;                  // n x n, symmetric
    std::pair<int, int> ends{0, 0};             // transport source / target
    std::vector<std::array<double, 3>> positions;  // optional, size n or 0

    // Provenance, serialized into the file "meta" block. Params are kept as an
    // ordered name->value map so serialization is byte-stable.
    std::string builder;
    std::map<std::string, double> params;
    long long seed = 0;
    bool hasSeed = false;

    int size() const { return static_cast<int>(couplings.rows()); }
};

// Split of the couplings into a bulk-bulk block and an end-coupling block,
// each Frobenius-normalized. gamma = beta/eps is the weak-coupling ratio.
// Any direct end-end coupling is zeroed before the split (the perturbative
// treatment assumes none) and reported in endEndCoupling for the caller.
struct PartitionedNetwork {
    int n = 0;
    std::pair<int, int> ends{0, 0};
    std::vector<int> bulk;       // node indices of the bulk, ascending

    Eigen::MatrixXd bulkNorm;    // (n-2) x (n-2), Frobenius norm 1 (or 0, see beta)
    Eigen::MatrixXd endNorm;     // n x n, end-bulk entries + end diagonals, norm 1
    double beta = 0.0;           // Frobenius norm of the raw bulk block (0 allowed)
    double eps = 0.0;            // Frobenius norm of the raw end block (> 0)
    double gamma = 0.0;          // beta/eps

    double endEndCoupling = 0.0; // discarded direct end-end coupling (0 if none)

    // beta * embedded bulkNorm + eps * endNorm: the original matrix with the
    // end-end coupling zeroed. All analysis and simulation run on this.
    Eigen::MatrixXd canonical;

    // Raw (unnormalized) bulk block, handy for spectral work in raw units.
    Eigen::MatrixXd bulkRaw;
};

}  // namespace spinnet
