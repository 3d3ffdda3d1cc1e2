#include "spinnet/swpert.hpp"

#include <cmath>
#include <limits>

#include "spinnet/errors.hpp"

namespace spinnet {

namespace {

struct BulkSpectrum {
    Eigen::VectorXd energies;  // raw units, ascending
    Eigen::MatrixXd vectors;   // columns, bulk-node basis
    Eigen::VectorXd a1;        // raw end-bulk couplings rotated into this basis
    Eigen::VectorXd aN;
};

BulkSpectrum solve_bulk(const PartitionedNetwork& p, const SwTolerances& tol,
                        bool requireNondegenerate) {
    BulkSpectrum s;
    const SpectralData eig = eig_sym(p.bulkRaw);
    s.energies = eig.eigenvalues;
    s.vectors = eig.eigenvectors;

    if (requireNondegenerate) {
        const double gapTol = tol.tolGap * p.beta;
        for (int k = 1; k < s.energies.size(); ++k)
            if (s.energies(k) - s.energies(k - 1) <= gapTol)
                throw PhysicsError(
                    "degenerate bulk spectrum; use the degenerate on-resonance treatment");
    }

    const int nb = static_cast<int>(p.bulk.size());
    Eigen::VectorXd r1(nb), rN(nb);
    for (int j = 0; j < nb; ++j) {
        r1(j) = p.canonical(p.ends.first, p.bulk[j]);
        rN(j) = p.canonical(p.ends.second, p.bulk[j]);
    }
    s.a1 = s.vectors.transpose() * r1;
    s.aN = s.vectors.transpose() * rN;
    return s;
}

void check_resonances(const PartitionedNetwork& p, const BulkSpectrum& s,
                      const SwTolerances& tol) {
    const double resTol = tol.tolRes * p.beta;
    for (int k = 0; k < s.energies.size(); ++k) {
        const bool coupled = s.a1(k) != 0.0 || s.aN(k) != 0.0;
        if (coupled && std::abs(s.energies(k)) <= resTol)
            throw PhysicsError(
                "bulk mode resonant with the ends; off-resonance treatment invalid "
                "(use the on-resonance path)");
    }
}

}  // namespace

SpectralData bulk_eigenbasis(const PartitionedNetwork& p, const SwTolerances&) {
    const SpectralData bulkEig = eig_sym(p.bulkNorm);

    SpectralData full;
    full.eigenvalues = Eigen::VectorXd::Zero(p.n);
    full.eigenvectors = Eigen::MatrixXd::Zero(p.n, p.n);
    full.eigenvectors(p.ends.first, p.ends.first) = 1.0;
    full.eigenvectors(p.ends.second, p.ends.second) = 1.0;

    const int nb = static_cast<int>(p.bulk.size());
    for (int a = 0; a < nb; ++a) {
        full.eigenvalues(p.bulk[a]) = bulkEig.eigenvalues(a);
        for (int b = 0; b < nb; ++b)
            full.eigenvectors(p.bulk[b], p.bulk[a]) = bulkEig.eigenvectors(b, a);
    }
    return full;
}

Eigen::MatrixXd build_generator_S(const PartitionedNetwork& p, const SwTolerances& tol) {
    if (p.beta == 0.0)
        throw PhysicsError(
            "bulk block is zero: every bulk mode is resonant with the ends "
            "(use the on-resonance path)");
    const BulkSpectrum s = solve_bulk(p, tol, true);
    check_resonances(p, s, tol);

    // S in the bulk eigenbasis, normalized units; columns follow the
    // bulk_eigenbasis layout (bulk eigenvector a lives at node slot bulk[a]).
    const int nb = static_cast<int>(s.energies.size());
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(p.n, p.n);
    for (int k = 0; k < nb; ++k) {
        if (s.energies(k) == 0.0) continue;  // uncoupled resonant mode
        const double s1 = -s.a1(k) / s.energies(k);  // == -(eps/beta) Ae_n / E_n
        const double sN = -s.aN(k) / s.energies(k);
        S(p.ends.first, p.bulk[k]) = s1;
        S(p.bulk[k], p.ends.first) = -s1;
        S(p.ends.second, p.bulk[k]) = sN;
        S(p.bulk[k], p.ends.second) = -sN;
    }

    // defining relation [A^B, S] = (eps/beta) A^e on the end-bulk block,
    // checked in the same basis (A^B is diagonal there)
    Eigen::MatrixXd AB = Eigen::MatrixXd::Zero(p.n, p.n);
    Eigen::MatrixXd Ae = Eigen::MatrixXd::Zero(p.n, p.n);
    for (int k = 0; k < nb; ++k) {
        AB(p.bulk[k], p.bulk[k]) = s.energies(k) / p.beta;
        Ae(p.ends.first, p.bulk[k]) = s.a1(k) / p.eps;
        Ae(p.bulk[k], p.ends.first) = s.a1(k) / p.eps;
        Ae(p.ends.second, p.bulk[k]) = s.aN(k) / p.eps;
        Ae(p.bulk[k], p.ends.second) = s.aN(k) / p.eps;
    }
    const double residual = (AB * S - S * AB - (p.eps / p.beta) * Ae).norm();
    if (residual > 1e-10)
        throw PhysicsError("generator construction residual exceeds 1e-10");
    return S;
}

EffectiveEndModel effective_AS(const PartitionedNetwork& p, const SwTolerances& tol) {
    if (p.beta == 0.0)
        throw PhysicsError(
            "bulk block is zero: every bulk mode is resonant with the ends "
            "(use the on-resonance path)");
    const BulkSpectrum s = solve_bulk(p, tol, true);
    check_resonances(p, s, tol);

    EffectiveEndModel m;
    m.as11 = p.canonical(p.ends.first, p.ends.first);
    m.asNN = p.canonical(p.ends.second, p.ends.second);
    m.as1N = 0.0;
    const int nb = static_cast<int>(s.energies.size());
    for (int k = 0; k < nb; ++k) {
        if (s.energies(k) == 0.0) continue;
        m.as11 -= s.a1(k) * s.a1(k) / s.energies(k);
        m.asNN -= s.aN(k) * s.aN(k) / s.energies(k);
        m.as1N -= s.a1(k) * s.aN(k) / s.energies(k);
    }
    m.alpha = (m.as11 - m.asNN) / 2.0;
    m.tm = m.as1N != 0.0 ? M_PI / (2.0 * std::abs(m.as1N))
                         : std::numeric_limits<double>::infinity();

    m.bulkBlock = Eigen::MatrixXd::Zero(nb, nb);
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
            if (s.energies(i) == 0.0 || s.energies(j) == 0.0) continue;
            m.bulkBlock(i, j) = 0.5 * (s.a1(i) * s.a1(j) + s.aN(i) * s.aN(j)) *
                                (1.0 / s.energies(i) + 1.0 / s.energies(j));
        }
    return m;
}

double offres_fidelity(const EffectiveEndModel& m, double t) {
    const double denom = m.as1N * m.as1N + m.alpha * m.alpha;
    if (denom == 0.0) return 0.0;
    const double s = std::sin(t * std::sqrt(denom));
    return m.as1N * m.as1N / denom * s * s;
}

std::pair<double, double> compensating_shifts(const EffectiveEndModel& m) {
    if (m.as11 >= m.asNN) return {0.0, m.as11 - m.asNN};
    return {m.asNN - m.as11, 0.0};
}

double predicted_offres_time(const PartitionedNetwork& p) {
    const SwTolerances tol;
    const BulkSpectrum s = solve_bulk(p, tol, false);

    int best = 0;
    for (int k = 1; k < s.energies.size(); ++k)
        if (std::abs(s.energies(k)) < std::abs(s.energies(best))) best = k;

    const double product = std::abs(s.a1(best) * s.aN(best));
    if (product == 0.0) return std::numeric_limits<double>::infinity();
    return M_PI * std::abs(s.energies(best)) / (2.0 * product);
}

}  // namespace spinnet
