#include "spinnet/balance.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "spinnet/errors.hpp"

namespace spinnet {

namespace {

void validate_schedule(const PulseSchedule& sched) {
    if (sched.cycles < 1) throw ValidationError("schedule needs at least one cycle");
    if (sched.segments.empty()) throw ValidationError("schedule has no segments");
    double sum = 0.0;
    for (const auto& [dt, flipped] : sched.segments) {
        (void)flipped;
        if (dt < 0.0) throw ValidationError("negative segment duration");
        sum += dt;
    }
    const double cycleTime = sched.totalTime / sched.cycles;
    if (std::abs(sum - cycleTime) > 1e-12 * std::max(1.0, std::abs(cycleTime)))
        throw ValidationError("segment durations do not sum to one cycle period");
}

// One spectral decomposition serves both generators: exp(-i DAD t) = D exp(-iA t) D.
class SegmentStepper {
  public:
    SegmentStepper(const Eigen::MatrixXd& A, int flipNode)
        : sd_(eig_sym(A)), flip_(Eigen::VectorXd::Ones(A.rows())) {
        if (flipNode < 0 || flipNode >= A.rows())
            throw ValidationError("flip node out of range");
        flip_(flipNode) = -1.0;
    }

    void advance(Eigen::VectorXcd& psi, double dt, bool flipped) const {
        if (flipped) psi.array() *= flip_.array();
        Eigen::VectorXcd modal = sd_.eigenvectors.transpose() * psi;
        for (int k = 0; k < modal.size(); ++k)
            modal(k) *= std::polar(1.0, -sd_.eigenvalues(k) * dt);
        psi = sd_.eigenvectors * modal;
        if (flipped) psi.array() *= flip_.array();
    }

  private:
    SpectralData sd_;
    Eigen::VectorXd flip_;
};

}  // namespace

std::pair<double, int> balance_ratio(double O1, double ON) {
    const double a1 = std::abs(O1), aN = std::abs(ON);
    const double big = std::max(a1, aN);
    if (big == 0.0) throw PhysicsError("both end overlaps vanish: nothing to balance");
    const double small = std::min(a1, aN);
    const double r = 0.5 * (1.0 + small / big);
    return {r, a1 >= aN ? 0 : 1};
}

PulseSchedule build_schedule(double r, int flipNode, double totalTime, int cycles,
                             bool symmetrized) {
    if (r < 0.5 || r > 1.0) throw ValidationError("balance ratio must be in [1/2, 1]");
    if (cycles < 1) throw ValidationError("cycle count must be >= 1");
    if (totalTime <= 0.0) throw ValidationError("total time must be positive");
    if (flipNode < 0) throw ValidationError("flip node must be a node index");

    PulseSchedule s;
    s.flipNode = flipNode;
    s.r = r;
    s.cycles = cycles;
    s.symmetrized = symmetrized;
    s.totalTime = totalTime;

    const double tc = totalTime / cycles;
    auto push = [&s](double dt, bool flipped) {
        if (dt > 0.0) s.segments.emplace_back(dt, flipped);
    };
    if (symmetrized) {
        push(r * tc / 2.0, false);
        push((1.0 - r) * tc, true);
        push(r * tc / 2.0, false);
    } else {
        push(r * tc, false);
        push((1.0 - r) * tc, true);
    }
    return s;
}

FidelityTrace simulate_schedule(const Eigen::MatrixXd& A, std::pair<int, int> ends,
                                const PulseSchedule& sched, int samples, double windowFactor) {
    validate_schedule(sched);
    if (samples < 2) throw ValidationError("need at least 2 samples");
    if (windowFactor < 1.0) throw ValidationError("window factor must be >= 1");
    const int n = static_cast<int>(A.rows());
    if (ends.first < 0 || ends.first >= n || ends.second < 0 || ends.second >= n ||
        ends.first == ends.second)
        throw ValidationError("invalid end pair");

    const SegmentStepper stepper(A, sched.flipNode);
    const int nCycles =
        std::max(sched.cycles,
                 static_cast<int>(std::ceil(sched.cycles * windowFactor - 1e-9)));
    const double span = nCycles * (sched.totalTime / sched.cycles);

    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
    psi(ends.first) = 1.0;

    FidelityTrace trace;
    trace.times.push_back(0.0);
    trace.values.push_back(std::norm(psi(ends.second)));

    double t = 0.0;
    for (int cycle = 0; cycle < nCycles; ++cycle) {
        for (const auto& [dt, flipped] : sched.segments) {
            const int steps = std::max(
                1, static_cast<int>(std::llround(samples * dt / span)));
            const double sub = dt / steps;
            for (int q = 0; q < steps; ++q) {
                stepper.advance(psi, sub, flipped);
                t += sub;
                trace.times.push_back(t);
                trace.values.push_back(std::norm(psi(ends.second)));
            }
        }
    }

    // grid maximum; the trace is only piecewise smooth, so no quadratic refine
    std::size_t best = 0;
    for (std::size_t idx = 1; idx < trace.values.size(); ++idx)
        if (trace.values[idx] > trace.values[best]) best = idx;
    trace.peakTime = trace.times[best];
    trace.peakValue = trace.values[best];
    return trace;
}

double schedule_fidelity_at_T(const Eigen::MatrixXd& A, std::pair<int, int> ends,
                              const PulseSchedule& sched) {
    validate_schedule(sched);
    const int n = static_cast<int>(A.rows());
    if (ends.first < 0 || ends.first >= n || ends.second < 0 || ends.second >= n ||
        ends.first == ends.second)
        throw ValidationError("invalid end pair");

    const SegmentStepper stepper(A, sched.flipNode);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
    psi(ends.first) = 1.0;
    for (int cycle = 0; cycle < sched.cycles; ++cycle)
        for (const auto& [dt, flipped] : sched.segments) stepper.advance(psi, dt, flipped);
    return std::norm(psi(ends.second));
}

std::vector<TrotterPoint> trotter_convergence(const Eigen::MatrixXd& A, std::pair<int, int> ends,
                                              double r, int flipNode, double totalTime,
                                              const std::vector<int>& Lvalues, int samples,
                                              double windowFactor) {
    if (Lvalues.empty()) throw ValidationError("no cycle counts given");
    for (std::size_t idx = 1; idx < Lvalues.size(); ++idx)
        if (Lvalues[idx] <= Lvalues[idx - 1])
            throw ValidationError("cycle counts must be strictly increasing");

    std::vector<TrotterPoint> out;
    out.reserve(Lvalues.size());
    for (int L : Lvalues) {
        TrotterPoint pt;
        pt.L = L;
        const PulseSchedule su = build_schedule(r, flipNode, totalTime, L, false);
        const PulseSchedule ss = build_schedule(r, flipNode, totalTime, L, true);
        pt.unsymPeak = simulate_schedule(A, ends, su, samples, windowFactor).peakValue;
        pt.symPeak = simulate_schedule(A, ends, ss, samples, windowFactor).peakValue;
        pt.unsymAtT = schedule_fidelity_at_T(A, ends, su);
        pt.symAtT = schedule_fidelity_at_T(A, ends, ss);
        out.push_back(pt);
    }
    return out;
}

double balanced_transfer_time(double O1, double ON) {
    const double small = std::min(std::abs(O1), std::abs(ON));
    if (small == 0.0) return std::numeric_limits<double>::infinity();
    return M_PI / (std::sqrt(2.0) * small);
}

}  // namespace spinnet
