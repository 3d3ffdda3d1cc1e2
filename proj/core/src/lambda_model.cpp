#include "spinnet/lambda_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "spinnet/dynamics.hpp"
#include "spinnet/errors.hpp"

namespace spinnet {

namespace {

void fill_scalars(LambdaModel& m) {
    const auto& d1 = m.legs1;
    const auto& dN = m.legsN;
    m.S2 = 0.5 * (d1.squaredNorm() + dN.squaredNorm());
    m.delta2 = d1.dot(dN);
    m.Delta4 = 0.0;
    for (int j = 0; j < d1.size(); ++j)
        for (int k = j + 1; k < d1.size(); ++k) {
            const double cross = d1(j) * dN(k) - dN(j) * d1(k);
            m.Delta4 += cross * cross;
        }
}

double boundary_margin(const LambdaModel& m) {
    // S^4 - Delta^4, with the scale that decides "effectively zero"
    return m.S2 * m.S2 - m.Delta4;
}

bool at_boundary(const LambdaModel& m) {
    const double scale = m.S2 * m.S2;
    return boundary_margin(m) <= 1e-12 * scale;
}

}  // namespace

ModeSelection select_resonant_mode(const PartitionedNetwork& p, const ModeStrategy& strategy,
                                   const SwTolerances& tol) {
    const SpectralData eig = eig_sym(p.bulkRaw);
    const int nb = static_cast<int>(eig.eigenvalues.size());

    int d = 0;
    switch (strategy.kind) {
        case ModeStrategy::highest:
            d = nb - 1;
            break;
        case ModeStrategy::zero: {
            d = -1;
            const double resTol = tol.tolRes * p.beta;
            for (int k = 0; k < nb; ++k) {
                if (std::abs(eig.eigenvalues(k)) > resTol) continue;
                if (d < 0 || std::abs(eig.eigenvalues(k)) < std::abs(eig.eigenvalues(d)))
                    d = k;
            }
            if (d < 0) throw PhysicsError("no zero bulk mode to tune to");
            break;
        }
        case ModeStrategy::index:
            if (strategy.k < 0 || strategy.k >= nb)
                throw ValidationError("mode index out of range");
            d = strategy.k;
            break;
    }

    ModeSelection sel;
    sel.mode = d;
    sel.shift = eig.eigenvalues(d);
    sel.gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nb; ++k)
        if (k != d) sel.gap = std::min(sel.gap, std::abs(eig.eigenvalues(k) - eig.eigenvalues(d)));
    return sel;
}

LambdaModel build_lambda(const PartitionedNetwork& p, int mode, const SwTolerances& tol) {
    const SpectralData eig = eig_sym(p.bulkRaw);
    const int nb = static_cast<int>(eig.eigenvalues.size());
    if (mode < 0 || mode >= nb) throw ValidationError("mode index out of range");

    const double gapTol = tol.tolGap * p.beta;
    std::vector<int> group{mode};
    for (int k = 0; k < nb; ++k)
        if (k != mode && std::abs(eig.eigenvalues(k) - eig.eigenvalues(mode)) <= gapTol)
            group.push_back(k);
    if (group.size() > 1) {
        std::sort(group.begin(), group.end());
        return build_lambda_degenerate(p, group);
    }

    Eigen::VectorXd r1(nb), rN(nb);
    for (int j = 0; j < nb; ++j) {
        r1(j) = p.canonical(p.ends.first, p.bulk[j]);
        rN(j) = p.canonical(p.ends.second, p.bulk[j]);
    }
    const Eigen::VectorXd vd = eig.eigenvectors.col(mode);

    LambdaModel m;
    m.O1 = r1.dot(vd);
    m.ON = rN.dot(vd);
    m.legs1 = vd * m.O1;
    m.legsN = vd * m.ON;
    m.modes = {mode};
    m.gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nb; ++k)
        if (k != mode)
            m.gap = std::min(m.gap, std::abs(eig.eigenvalues(k) - eig.eigenvalues(mode)));
    fill_scalars(m);
    return m;
}

LambdaModel build_lambda_degenerate(const PartitionedNetwork& p, const std::vector<int>& modes) {
    if (modes.empty()) throw ValidationError("degenerate mode subspace is empty");
    const SpectralData eig = eig_sym(p.bulkRaw);
    const int nb = static_cast<int>(eig.eigenvalues.size());
    std::set<int> unique(modes.begin(), modes.end());
    if (unique.size() != modes.size()) throw ValidationError("duplicate mode index");
    for (int k : modes)
        if (k < 0 || k >= nb) throw ValidationError("mode index out of range");

    Eigen::VectorXd n1(nb), nN(nb);
    for (int j = 0; j < nb; ++j) {
        n1(j) = p.canonical(p.ends.first, p.bulk[j]);
        nN(j) = p.canonical(p.ends.second, p.bulk[j]);
    }

    Eigen::MatrixXd basis(nb, static_cast<int>(modes.size()));
    int col = 0;
    for (int k : modes) basis.col(col++) = eig.eigenvectors.col(k);

    LambdaModel m;
    m.legs1 = basis * (basis.transpose() * n1);
    m.legsN = basis * (basis.transpose() * nN);
    // no single resonant eigenvector here; report the projection magnitudes
    m.O1 = m.legs1.norm();
    m.ON = m.legsN.norm();
    m.modes.assign(unique.begin(), unique.end());
    m.gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nb; ++k) {
        if (unique.count(k)) continue;
        for (int d : m.modes)
            m.gap = std::min(m.gap, std::abs(eig.eigenvalues(k) - eig.eigenvalues(d)));
    }
    fill_scalars(m);
    return m;
}

Eigen::MatrixXd lambda_matrix(const LambdaModel& m) {
    const int nb = static_cast<int>(m.legs1.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nb + 2, nb + 2);
    for (int j = 0; j < nb; ++j) {
        A(0, j + 1) = m.legs1(j);
        A(j + 1, 0) = m.legs1(j);
        A(j + 1, nb + 1) = m.legsN(j);
        A(nb + 1, j + 1) = m.legsN(j);
    }
    return A;
}

std::array<double, 4> lambda_frequencies(const LambdaModel& m) {
    const double S2 = m.S2;
    double inner = S2 * S2 - m.Delta4;
    if (inner < -1e-12 * S2 * S2)
        throw PhysicsError("invalid model: S^4 < Delta^4");
    inner = std::max(inner, 0.0);
    const double root = std::sqrt(inner);
    const double D2 = std::sqrt(m.Delta4);
    return {2.0 * std::sqrt(std::max(S2 - root, 0.0)),
            2.0 * std::sqrt(S2 + root),
            std::sqrt(std::max(2.0 * (S2 - D2), 0.0)),
            std::sqrt(2.0 * (S2 + D2))};
}

std::array<double, 4> lambda_eigenvalues(const LambdaModel& m) {
    const double S2 = m.S2;
    double inner = S2 * S2 - m.Delta4;
    if (inner < -1e-12 * S2 * S2)
        throw PhysicsError("invalid model: S^4 < Delta^4");
    inner = std::max(inner, 0.0);
    const double root = std::sqrt(inner);
    const double lo = std::sqrt(std::max(S2 - root, 0.0));
    const double hi = std::sqrt(S2 + root);
    return {-hi, -lo, lo, hi};
}

double lambda_fidelity_closed(const LambdaModel& m, double t) {
    if (at_boundary(m))
        throw PhysicsError(
            "S^4 == Delta^4: closed form is indeterminate "
            "(destructive-interference regime; evaluate spectrally)");
    const double D2 = std::sqrt(m.Delta4);
    const double sa = std::sin(t * std::sqrt((m.S2 + D2) / 2.0));
    const double sb = std::sin(t * std::sqrt((m.S2 - D2) / 2.0));
    return m.delta2 * m.delta2 / boundary_margin(m) * sa * sa * sb * sb;
}

double lambda_fidelity(const LambdaModel& m, double t) {
    if (!at_boundary(m)) return lambda_fidelity_closed(m, t);
    const Eigen::MatrixXd A = lambda_matrix(m);
    return fidelity(A, t, 0, static_cast<int>(A.rows()) - 1);
}

LambdaWeights lambda_weights(const LambdaModel& m) {
    if (at_boundary(m))
        throw PhysicsError("S^4 == Delta^4: weights are indeterminate");

    LambdaWeights w;
    const double w0 = m.delta2 * m.delta2 / (4.0 * boundary_margin(m));
    w.closed = {w0, w0 / 2.0, w0 / 2.0, -w0, -w0};

    const auto f = lambda_frequencies(m);
    Eigen::Vector4d x;
    for (int i = 0; i < 4; ++i) x(i) = f[i] * f[i];
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(x(i) - x(j)) <= 1e-10 * m.S2)
                throw PhysicsError(
                    "coinciding frequencies: moment system is singular "
                    "(fall back to spectral terms)");

    const LambdaMoments mom = lambda_moments(m);
    Eigen::Matrix4d M;
    for (int i = 0; i < 4; ++i) {
        M(0, i) = x(i);
        M(1, i) = x(i) * x(i);
        M(2, i) = x(i) * x(i) * x(i);
        M(3, i) = x(i) * x(i) * x(i) * x(i);
    }
    Eigen::Vector4d rhs(0.0, 24.0 * mom.C4, -720.0 * mom.C6, 40320.0 * mom.C8);
    const Eigen::Vector4d sol = M.fullPivLu().solve(rhs);
    w.fromMoments = {-(sol(0) + sol(1) + sol(2) + sol(3)), sol(0), sol(1), sol(2), sol(3)};
    return w;
}

LambdaMoments lambda_moments(const LambdaModel& m) {
    const Eigen::MatrixXd A = lambda_matrix(m);
    const int N = static_cast<int>(A.rows());
    Eigen::VectorXd u = Eigen::VectorXd::Zero(N);
    u(0) = 1.0;

    LambdaMoments out;
    for (int power = 1; power <= 6; ++power) {
        u = A * u;
        if (power == 2) out.m2 = u(N - 1);
        if (power == 4) out.m4 = u(N - 1);
        if (power == 6) out.m6 = u(N - 1);
    }

    const double d4 = m.delta2 * m.delta2;
    out.C4 = d4 / 4.0;
    out.C6 = -m.S2 * d4 / 12.0;
    out.C8 = out.m4 * out.m4 / 576.0 + out.m2 * out.m6 / 720.0;
    out.C8printed = m.delta2 * (9.0 * m.S2 * m.S2 - std::sqrt(m.Delta4)) / 720.0;
    return out;
}

PerfectTransferReport check_perfect_conditions(const LambdaModel& m) {
    PerfectTransferReport r;
    r.Delta = std::pow(m.Delta4, 0.25);
    r.imbalance = std::sqrt(m.S2) - std::sqrt(std::abs(m.delta2));
    r.secondMomentMismatch = m.legs1.squaredNorm() - m.legsN.squaredNorm();
    const double denom = boundary_margin(m);
    r.predictedPeak = denom > 0.0 ? m.delta2 * m.delta2 / denom : 0.0;
    return r;
}

}  // namespace spinnet
