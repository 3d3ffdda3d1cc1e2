#pragma once

#include <array>
#include <cstdint>

#include "spinnet/spin_network.hpp"

namespace spinnet {

// All builders are pure functions of (parameters, seed): same inputs, same
// network, bit for bit. Ends default to nodes 0 and n-1.

// Off-diagonals i.i.d. uniform on [0,1] (upper triangle drawn, mirrored).
SpinNetwork build_random_uniform(int n, std::uint64_t seed);

// Nodes on a line with spacing d; coupling over index distance h is
// u/(h*d)^3 with u uniform on [0,1].
SpinNetwork build_random_dipolar_chain(int n, double d, std::uint64_t seed);

// Honeycomb patch of rows x cols hexagonal cells, nearest-neighbor couplings
// 1/d^3, shared vertices merged, positions populated.
SpinNetwork build_honeycomb(int rows, int cols, double d);

// Independently deletes each non-end node with probability p.
SpinNetwork apply_vacancies(const SpinNetwork& net, double p, std::uint64_t seed);

// P1 centers Poisson-sampled in a box (nm) at the given concentration, plus
// two NV end-spins at +-separation/2 along the box's long axis. Couplings
// 1/r^3 with r in nm. Node 0 and node n-1 are the NVs.
SpinNetwork build_p1_nv(const std::array<double, 3>& box, double density_ppm,
                        double nv_separation, std::uint64_t seed);

// Carbon site density of diamond, used for the ppm -> number-density map:
// ppm * 1e-6 * 1.76e23 cm^-3 == ppm * 1e-6 * 176 nm^-3.
inline constexpr double kDiamondSiteDensityPerNm3 = 176.0;

// Splits couplings into normalized bulk and end blocks; zeroes (and reports)
// any direct end-end coupling. A single-bulk-node network yields beta = 0 with
// a zero bulk block; a zero end block is an error (ends disconnected).
PartitionedNetwork partition(const SpinNetwork& net);

// Overwrites the diagonal entries of the two end nodes (on-site shifts).
SpinNetwork set_end_shifts(const SpinNetwork& net, double w1, double wN);

// Scales the end-bulk couplings so that the partition ratio beta/eps equals
// the requested gamma. End diagonals are left untouched.
SpinNetwork rescale_to_gamma(const SpinNetwork& net, double gamma);

}  // namespace spinnet
