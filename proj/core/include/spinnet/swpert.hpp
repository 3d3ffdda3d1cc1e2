#pragma once

#include <Eigen/Dense>
#include <utility>

#include "spinnet/dynamics.hpp"
#include "spinnet/spin_network.hpp"

namespace spinnet {

// Second-order effective model of the two end spins after eliminating the
// bulk. All entries are in raw frequency units:
//   as_{zx} = raw end diagonal (z==x) - sum_k Ae_{zk} Ae_{kx} / E_k
// with Ae the raw end-bulk couplings expressed in the bulk eigenbasis and E_k
// the raw bulk eigenvalues. The ends themselves sit at eigenvalue 0.
struct EffectiveEndModel {
    double as11 = 0.0;
    double asNN = 0.0;
    double as1N = 0.0;
    double alpha = 0.0;  // (as11 - asNN)/2
    double tm = 0.0;     // pi / (2 |as1N|); infinity when as1N == 0
    Eigen::MatrixXd bulkBlock;  // second-order bulk corrections, bulk eigenbasis
};

struct SwTolerances {
    double tolRes = 1e-6;  // relative to ||A^B||: smaller |E_k| is "resonant"
    double tolGap = 1e-8;  // relative: closer eigenvalues count as degenerate
};

// Bulk spectral data extended to the full space: ends become eigenvectors at
// eigenvalue 0, bulk eigenpairs are embedded at their node positions.
// Degenerate bulk eigenvalues (within tolGap) raise a physics error.
SpectralData bulk_eigenbasis(const PartitionedNetwork& p, const SwTolerances& tol = {});

// Antisymmetric generator S of the decoupling rotation, in the bulk
// eigenbasis and normalized units: S_{zk} = -(eps/beta) Ae_{zk} / E_k.
// Verifies the defining relation ||[A^B, S] - (eps/beta) A^e|| <= 1e-10.
// Bulk eigenvalues inside tolRes with a nonzero coupling raise a physics
// error directing the caller to the on-resonance path.
Eigen::MatrixXd build_generator_S(const PartitionedNetwork& p, const SwTolerances& tol = {});

EffectiveEndModel effective_AS(const PartitionedNetwork& p, const SwTolerances& tol = {});

// Closed-form off-resonance fidelity:
// F(t) = as1N^2/(as1N^2+alpha^2) * sin^2(t sqrt(as1N^2+alpha^2)).
double offres_fidelity(const EffectiveEndModel& m, double t);

// Minimal-magnitude diagonal shifts (one of the two zero) that equalize the
// effective end energies: raises the smaller of as11/asNN to match the other.
std::pair<double, double> compensating_shifts(const EffectiveEndModel& m);

// Order-of-magnitude transport-time estimate from the minimum-|E| bulk mode
// alone; the exact tm from effective_AS is preferred when available.
double predicted_offres_time(const PartitionedNetwork& p);

}  // namespace spinnet
