#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "spinnet/spin_network.hpp"
#include "spinnet/swpert.hpp"

namespace spinnet {

// Effective Lambda-network of an on-resonance reduction: each bulk node j
// keeps only its two legs delta_1j (to end 1) and delta_jN (to end N).
// Legs and overlaps are stored in raw frequency units, so times predicted
// from this model compare directly with raw-matrix simulations.
struct LambdaModel {
    Eigen::VectorXd legs1;   // delta_{1j} over bulk nodes
    Eigen::VectorXd legsN;   // delta_{jN}
    double S2 = 0.0;         // sum_j (delta_1j^2 + delta_jN^2)/2
    double Delta4 = 0.0;     // sum_{j<k} (d1j dkN - djN d1k)^2
    double delta2 = 0.0;     // sum_j d1j djN
    double O1 = 0.0;         // <1| A^e |v_d>, raw
    double ON = 0.0;
    std::vector<int> modes;  // selected bulk mode(s); one entry unless degenerate
    double gap = 0.0;        // spectral gap to the nearest unselected mode (raw)
};

struct ModeStrategy {
    enum Kind { zero, highest, index } kind = highest;
    int k = 0;  // used when kind == index
};

struct ModeSelection {
    int mode = 0;        // bulk eigenvalue index (ascending order)
    double shift = 0.0;  // raw end shift putting the ends on resonance
    double gap = 0.0;    // min_k |E_k - E_mode|, raw
};

ModeSelection select_resonant_mode(const PartitionedNetwork& p, const ModeStrategy& strategy = {},
                                   const SwTolerances& tol = {});

// Non-degenerate reduction: delta_{(1,N)j} = <v_d|j> * O_{(1,N)}. Modes within
// tolGap of the selected one route to the degenerate builder automatically.
LambdaModel build_lambda(const PartitionedNetwork& p, int mode, const SwTolerances& tol = {});

// Degenerate-subspace reduction: legs are projections of the end vectors
// |n_z> = A^e|z> onto the span of the selected modes.
LambdaModel build_lambda_degenerate(const PartitionedNetwork& p, const std::vector<int>& modes);

// The explicit adjacency matrix of the Lambda-network: ends at 0 and nb+1.
Eigen::MatrixXd lambda_matrix(const LambdaModel& m);

// f1,2 = 2 sqrt(S^2 -+ sqrt(S^4 - Delta^4)); f3,4 = sqrt(2 (S^2 -+ Delta^2)).
std::array<double, 4> lambda_frequencies(const LambdaModel& m);

// Nonzero eigenvalues of the Lambda matrix: +-sqrt(S^2 -+ sqrt(S^4-Delta^4)).
std::array<double, 4> lambda_eigenvalues(const LambdaModel& m);

// Closed-form transport fidelity of the four-frequency model:
// F(t) = delta^4/(S^4-Delta^4) sin^2(t sqrt((S^2+Delta^2)/2))
//                              sin^2(t sqrt((S^2-Delta^2)/2)).
// Throws at the destructive-interference boundary S^4 == Delta^4.
double lambda_fidelity_closed(const LambdaModel& m, double t);

// Same value, but falls back to the spectral-term evaluation of the explicit
// matrix at the S^4 ~= Delta^4 boundary instead of failing.
double lambda_fidelity(const LambdaModel& m, double t);

struct LambdaWeights {
    std::array<double, 5> closed{};   // w0..w4 from the closed forms
    std::array<double, 5> fromMoments{};  // same weights solved from the moment equations
};

// w0 = delta^4/(4(S^4-Delta^4)), w1 = w2 = w0/2, w3 = w4 = -w0; also solves
// the small moment linear system as an independent path. Coinciding
// frequencies (Delta == 0) make that system singular -> physics error.
LambdaWeights lambda_weights(const LambdaModel& m);

struct LambdaMoments {
    double C4 = 0.0;        // delta^4/4
    double C6 = 0.0;        // -S^2 delta^4/12
    double C8 = 0.0;        // from matrix elements (the trustworthy value)
    double C8printed = 0.0; // the published closed form, kept for diagnostics
    double m2 = 0.0, m4 = 0.0, m6 = 0.0;  // <N|(A^d)^p|1>
};

LambdaMoments lambda_moments(const LambdaModel& m);

struct PerfectTransferReport {
    double Delta = 0.0;               // (Delta4)^(1/4): relative-detuning violation
    double imbalance = 0.0;           // S - delta
    double secondMomentMismatch = 0.0;  // sum d1j^2 - sum djN^2
    double predictedPeak = 0.0;       // delta^4/(S^4-Delta^4)
};

PerfectTransferReport check_perfect_conditions(const LambdaModel& m);

}  // namespace spinnet
