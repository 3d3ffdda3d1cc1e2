#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "spinnet/dynamics.hpp"
#include "spinnet/spin_network.hpp"

namespace spinnet {

// One cycle of the balancing pulse sequence. `segments` describes a single
// cycle (durations sum to totalTime / cycles); the full sequence repeats it
// `cycles` times. Flagged segments evolve with the flip node's couplings
// sign-inverted (toggling-frame picture of an instantaneous pi-pulse).
struct PulseSchedule {
    int flipNode = 0;
    double r = 1.0;            // balance ratio in [1/2, 1]
    int cycles = 1;
    bool symmetrized = false;
    double totalTime = 0.0;
    std::vector<std::pair<double, bool>> segments;  // (duration, flipped)
};

// r = (1 + |O_small/O_big|)/2; the flip belongs on the end with the LARGER
// overlap. Returns which end that is as 0 (first end) or 1 (second end).
std::pair<double, int> balance_ratio(double O1, double ON);

// Cycle layout: unsymmetrized [(r Tc, u), ((1-r) Tc, f)];
// symmetrized [(r Tc/2, u), ((1-r) Tc, f), (r Tc/2, u)]. Zero-duration
// segments are dropped (r = 1 leaves a single plain segment).
PulseSchedule build_schedule(double r, int flipNode, double totalTime, int cycles, bool symmetrized);

// Piecewise-constant evolution of the full matrix A under the schedule,
// sampled on a uniform grid united with the exact segment boundaries.
// windowFactor > 1 keeps cycling past the nominal total time so the peak
// search can look past T (the transfer-time formula is approximate).
FidelityTrace simulate_schedule(const Eigen::MatrixXd& A, std::pair<int, int> ends,
                                const PulseSchedule& sched, int samples, double windowFactor = 1.0);

// Fidelity exactly at the end of cycle `cycles` (time = totalTime), free of
// grid effects; the natural Trotter-quality number.
double schedule_fidelity_at_T(const Eigen::MatrixXd& A, std::pair<int, int> ends,
                              const PulseSchedule& sched);

struct TrotterPoint {
    int L = 0;
    double symPeak = 0.0;
    double unsymPeak = 0.0;
    double symAtT = 0.0;
    double unsymAtT = 0.0;
};

// Peak (and at-T) fidelities for each cycle count, both symmetrizations.
std::vector<TrotterPoint> trotter_convergence(const Eigen::MatrixXd& A, std::pair<int, int> ends,
                                              double r, int flipNode, double totalTime,
                                              const std::vector<int>& Lvalues, int samples = 4001,
                                              double windowFactor = 1.25);

// Default total transfer time pi / (sqrt(2) |O_small|), raw units.
double balanced_transfer_time(double O1, double ON);

}  // namespace spinnet
