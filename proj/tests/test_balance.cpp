#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "spinnet/balance.hpp"
#include "spinnet/dynamics.hpp"
#include "spinnet/errors.hpp"
#include "spinnet/lambda_model.hpp"
#include "spinnet/netgen.hpp"

using namespace spinnet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// explicit Lambda matrix with legs (d1, dN) on the bulk nodes 1..nb
Eigen::MatrixXd lambda_net(const Eigen::VectorXd& d1, const Eigen::VectorXd& dN) {
    const int nb = static_cast<int>(d1.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nb + 2, nb + 2);
    for (int j = 0; j < nb; ++j) {
        A(0, j + 1) = A(j + 1, 0) = d1(j);
        A(j + 1, nb + 1) = A(nb + 1, j + 1) = dN(j);
    }
    return A;
}

Eigen::MatrixXd flip_conjugate(const Eigen::MatrixXd& A, int node) {
    Eigen::VectorXd D = Eigen::VectorXd::Ones(A.rows());
    D(node) = -1.0;
    return D.asDiagonal() * A * D.asDiagonal();
}

std::complex<double> transfer_amplitude(const Eigen::MatrixXd& A, const Eigen::VectorXcd& psi,
                                        double t, int target) {
    const auto sd = eig_sym(A);
    Eigen::VectorXcd modal = sd.eigenvectors.transpose() * psi;
    for (int k = 0; k < modal.size(); ++k)
        modal(k) *= std::polar(1.0, -sd.eigenvalues(k) * t);
    return (sd.eigenvectors * modal)(target);
}

}  // namespace

TEST_CASE("balance ratio and flip side", "[balance]") {
    {
        const auto [r, side] = balance_ratio(0.3, -1.0);
        REQUIRE_THAT(r, WithinRel(0.65, 1e-14));
        REQUIRE(side == 1);  // second end carries the larger overlap
    }
    {
        const auto [r, side] = balance_ratio(-1.0, 0.3);
        REQUIRE_THAT(r, WithinRel(0.65, 1e-14));
        REQUIRE(side == 0);
    }
    {
        const auto [r, side] = balance_ratio(0.1002, 1.0);
        REQUIRE_THAT(r, WithinRel(0.5501, 1e-12));
        REQUIRE(side == 1);
    }
    {
        const auto [r, side] = balance_ratio(0.7, -0.7);
        REQUIRE(r == 1.0);
        REQUIRE(side == 0);
    }
    REQUIRE_THROWS_AS(balance_ratio(0.0, 0.0), PhysicsError);
}

TEST_CASE("schedule layouts", "[balance]") {
    const auto unsym = build_schedule(0.75, 3, 1.0, 1, false);
    REQUIRE(unsym.segments.size() == 2);
    REQUIRE(unsym.segments[0] == std::pair<double, bool>{0.75, false});
    REQUIRE(unsym.segments[1] == std::pair<double, bool>{0.25, true});

    const auto sym = build_schedule(0.75, 3, 1.0, 1, true);
    REQUIRE(sym.segments.size() == 3);
    REQUIRE(sym.segments[0] == std::pair<double, bool>{0.375, false});
    REQUIRE(sym.segments[1] == std::pair<double, bool>{0.25, true});
    REQUIRE(sym.segments[2] == std::pair<double, bool>{0.375, false});

    // cycle period scales with 1/L
    const auto many = build_schedule(0.8, 0, 10.0, 4, false);
    REQUIRE_THAT(many.segments[0].first, WithinRel(2.0, 1e-14));
    REQUIRE_THAT(many.segments[1].first, WithinRel(0.5, 1e-14));

    // r = 1: the flipped segment vanishes
    const auto plain = build_schedule(1.0, 0, 1.0, 1, false);
    REQUIRE(plain.segments.size() == 1);
    REQUIRE(plain.segments[0] == std::pair<double, bool>{1.0, false});

    REQUIRE_THROWS_AS(build_schedule(0.49, 0, 1.0, 1, false), ValidationError);
    REQUIRE_THROWS_AS(build_schedule(1.01, 0, 1.0, 1, false), ValidationError);
    REQUIRE_THROWS_AS(build_schedule(0.8, 0, -1.0, 1, false), ValidationError);
    REQUIRE_THROWS_AS(build_schedule(0.8, 0, 1.0, 0, false), ValidationError);
    REQUIRE_THROWS_AS(build_schedule(0.8, -1, 1.0, 1, false), ValidationError);
}

TEST_CASE("r = 1 reproduces free evolution", "[balance]") {
    const auto net = build_random_uniform(7, 88);
    const double T = 2.0;
    const auto sched = build_schedule(1.0, 0, T, 5, false);

    const double atT = schedule_fidelity_at_T(net.couplings, net.ends, sched);
    REQUIRE_THAT(atT, WithinAbs(fidelity(net.couplings, T, 0, 6), 1e-12));

    // free trace refines its peak off-grid, the schedule trace cannot; allow
    // for the curvature over half a grid step
    const auto trace = simulate_schedule(net.couplings, net.ends, sched, 500, 1.0);
    const auto free = fidelity_trace(net.couplings, 0, 6, T, 500);
    REQUIRE_THAT(trace.peakValue, WithinAbs(free.peakValue, 1e-3));
    REQUIRE(trace.peakValue <= free.peakValue + 1e-12);
}

TEST_CASE("flipped segments evolve under the conjugated matrix", "[balance]") {
    const auto net = build_random_uniform(6, 17);
    const Eigen::MatrixXd& A = net.couplings;
    const int flip = 5;
    const double r = 0.7, T = 1.3;

    const auto sched = build_schedule(r, flip, T, 1, false);
    const double got = schedule_fidelity_at_T(A, {0, 5}, sched);

    // independent composition: exp(-i (1-r)T DAD) exp(-i rT A) |0>
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(6);
    psi(0) = 1.0;
    const auto sdA = eig_sym(A);
    Eigen::VectorXcd modal = sdA.eigenvectors.transpose() * psi;
    for (int k = 0; k < 6; ++k) modal(k) *= std::polar(1.0, -sdA.eigenvalues(k) * r * T);
    psi = sdA.eigenvectors * modal;
    const auto amp = transfer_amplitude(flip_conjugate(A, flip), psi, (1.0 - r) * T, 5);

    REQUIRE_THAT(got, WithinAbs(std::norm(amp), 1e-12));
}

TEST_CASE("balancing equalizes the average-Hamiltonian legs", "[balance]") {
    Eigen::VectorXd u(3);
    u << 0.7, -0.5, 0.9;
    const Eigen::VectorXd d1 = 0.3 * u;
    const Eigen::MatrixXd A = lambda_net(d1, u);
    const int nb = 3;

    const double O1 = d1.norm(), ON = u.norm();
    const auto [r, side] = balance_ratio(O1, ON);
    REQUIRE(side == 1);
    const int flipNode = nb + 1;

    const Eigen::MatrixXd avg = r * A + (1.0 - r) * flip_conjugate(A, flipNode);
    Eigen::VectorXd leg1(nb), legN(nb);
    for (int j = 0; j < nb; ++j) {
        leg1(j) = avg(0, j + 1);
        legN(j) = avg(j + 1, nb + 1);
    }
    REQUIRE_THAT(legN.norm(), WithinRel(leg1.norm(), 1e-12));
    REQUIRE_THAT((2.0 * r - 1.0) * ON, WithinRel(O1, 1e-12));

    // with enough cycles the schedule reaches the average-Hamiltonian limit,
    // which transfers perfectly at T = pi/(sqrt2 |O_small|)
    const double T = balanced_transfer_time(O1, ON);
    REQUIRE_THAT(T, WithinRel(M_PI / (std::sqrt(2.0) * O1), 1e-14));
    const auto sched = build_schedule(r, flipNode, T, 64, true);
    REQUIRE(schedule_fidelity_at_T(A, {0, nb + 1}, sched) > 0.999);
}

TEST_CASE("trotter convergence on the reduced model", "[balance]") {
    Eigen::VectorXd u(3);
    u << 0.7, -0.5, 0.9;
    const Eigen::VectorXd d1 = 0.3 * u;
    const Eigen::MatrixXd A = lambda_net(d1, u);
    const auto [r, side] = balance_ratio(d1.norm(), u.norm());
    const double T = balanced_transfer_time(d1.norm(), u.norm());

    const std::vector<int> Ls{4, 8, 16, 32, 64};
    const auto pts = trotter_convergence(A, {0, 4}, r, 4, T, Ls, 2001, 1.0);
    REQUIRE(pts.size() == 5);

    for (std::size_t i = 0; i < pts.size(); ++i) {
        REQUIRE(pts[i].L == Ls[i]);
        REQUIRE(pts[i].symAtT >= pts[i].unsymAtT);
        // the trace steps segment-by-segment while the at-T value composes
        // per-cycle, so the two accumulate rounding differently
        REQUIRE(pts[i].symPeak >= pts[i].symAtT - 1e-10);
        if (i > 0) REQUIRE(pts[i].symAtT > pts[i - 1].symAtT);
    }
    REQUIRE(pts.back().symAtT > 1.0 - 1e-5);

    // symmetrized infidelity falls at least as the third power of L
    double slope = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& pt : pts) {
        const double x = std::log(static_cast<double>(pt.L));
        const double y = std::log(std::max(1.0 - pt.symAtT, 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    REQUIRE(slope <= -2.5);

    REQUIRE_THROWS_AS(trotter_convergence(A, {0, 4}, r, 4, T, {}, 101, 1.0), ValidationError);
    REQUIRE_THROWS_AS(trotter_convergence(A, {0, 4}, r, 4, T, {4, 4}, 101, 1.0),
                      ValidationError);
}

TEST_CASE("simulate_schedule window and grid", "[balance]") {
    const auto net = build_random_uniform(5, 9);
    const auto sched = build_schedule(0.8, 4, 2.0, 4, true);

    const auto trace = simulate_schedule(net.couplings, net.ends, sched, 400, 1.25);
    // 1.25 * 4 cycles = 5 cycles exactly
    REQUIRE_THAT(trace.times.back(), WithinRel(2.5, 1e-12));
    REQUIRE(trace.times.front() == 0.0);
    for (std::size_t i = 1; i < trace.times.size(); ++i) {
        REQUIRE(trace.times[i] > trace.times[i - 1]);
        REQUIRE(trace.values[i] >= 0.0);
        REQUIRE(trace.values[i] <= 1.0 + 1e-12);
    }
    // the reported peak is a grid point
    bool found = false;
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        if (trace.times[i] == trace.peakTime && trace.values[i] == trace.peakValue) found = true;
    REQUIRE(found);

    REQUIRE_THROWS_AS(simulate_schedule(net.couplings, net.ends, sched, 1, 1.0),
                      ValidationError);
    REQUIRE_THROWS_AS(simulate_schedule(net.couplings, net.ends, sched, 100, 0.5),
                      ValidationError);
    REQUIRE_THROWS_AS(simulate_schedule(net.couplings, {0, 0}, sched, 100, 1.0),
                      ValidationError);

    PulseSchedule broken = sched;
    broken.segments[0].first *= 2.0;  // durations no longer sum to a cycle
    REQUIRE_THROWS_AS(simulate_schedule(net.couplings, net.ends, broken, 100, 1.0),
                      ValidationError);

    PulseSchedule badFlip = sched;
    badFlip.flipNode = 99;
    REQUIRE_THROWS_AS(simulate_schedule(net.couplings, net.ends, badFlip, 100, 1.0),
                      ValidationError);
}

TEST_CASE("balanced transfer time", "[balance]") {
    REQUIRE_THAT(balanced_transfer_time(0.2, -0.5),
                 WithinRel(M_PI / (std::sqrt(2.0) * 0.2), 1e-14));
    REQUIRE(std::isinf(balanced_transfer_time(0.0, 0.5)));
}
