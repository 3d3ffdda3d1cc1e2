#include "spinnet/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "spinnet/errors.hpp"
#include "spinnet/rng.hpp"

namespace spinnet {

namespace {

SpinNetwork blank(int n) {
    SpinNetwork net;
    net.couplings = Eigen::MatrixXd::Zero(n, n);
    net.ends = {0, n - 1};
    return net;
}

}  // namespace

SpinNetwork build_random_uniform(int n, std::uint64_t seed) {
    if (n < 3) throw ValidationError("random uniform network needs n >= 3");
    SpinNetwork net = blank(n);
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double u = rng.uniform01();
            net.couplings(i, j) = u;
            net.couplings(j, i) = u;
        }
    net.builder = "randomUniform";
    net.params = {{"n", static_cast<double>(n)}};
    net.seed = static_cast<long long>(seed);
    net.hasSeed = true;
    return net;
}

SpinNetwork build_random_dipolar_chain(int n, double d, std::uint64_t seed) {
    if (n < 3) throw ValidationError("random dipolar chain needs n >= 3");
    if (d <= 0.0) throw ValidationError("lattice constant d must be positive");
    SpinNetwork net = blank(n);
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double h = static_cast<double>(j - i);
            const double v = rng.uniform01() / std::pow(h * d, 3);
            net.couplings(i, j) = v;
            net.couplings(j, i) = v;
        }
    net.builder = "randomDipolar";
    net.params = {{"n", static_cast<double>(n)}, {"d", d}};
    net.seed = static_cast<long long>(seed);
    net.hasSeed = true;
    return net;
}

SpinNetwork build_honeycomb(int rows, int cols, double d) {
    if (rows < 1 || cols < 1) throw ValidationError("honeycomb needs rows, cols >= 1");
    if (d <= 0.0) throw ValidationError("lattice constant d must be positive");

    // Hexagonal faces on an offset grid; shared corners merged by exact
    // integer keys (x in units of sqrt(3)/2 d, y in units of d/2), so the
    // dedup cannot be disturbed by floating-point noise.
    static const int corner[6][2] = {{1, 1}, {0, 2}, {-1, 1}, {-1, -1}, {0, -2}, {1, -1}};

    std::map<std::pair<long long, long long>, int> index;
    std::vector<std::pair<long long, long long>> keys;
    std::vector<std::pair<int, int>> edges;

    for (int j = 0; j < rows; ++j)
        for (int i = 0; i < cols; ++i) {
            const long long ca = 2LL * i + (j % 2);  // center x units
            const long long cb = 3LL * j;            // center y units
            int ids[6];
            for (int k = 0; k < 6; ++k) {
                const std::pair<long long, long long> key{ca + corner[k][0], cb + corner[k][1]};
                auto [it, fresh] = index.try_emplace(key, static_cast<int>(keys.size()));
                if (fresh) keys.push_back(key);
                ids[k] = it->second;
            }
            for (int k = 0; k < 6; ++k) edges.emplace_back(ids[k], ids[(k + 1) % 6]);
        }

    const int n = static_cast<int>(keys.size());
    SpinNetwork net = blank(n);
    net.positions.resize(n);
    const double ux = 0.5 * std::sqrt(3.0) * d, uy = 0.5 * d;
    for (int v = 0; v < n; ++v)
        net.positions[v] = {ux * static_cast<double>(keys[v].first),
                            uy * static_cast<double>(keys[v].second), 0.0};

    const double g = 1.0 / (d * d * d);
    for (auto [a, b] : edges) {
        net.couplings(a, b) = g;
        net.couplings(b, a) = g;
    }

    net.builder = "honeycomb";
    net.params = {{"rows", static_cast<double>(rows)}, {"cols", static_cast<double>(cols)}, {"d", d}};
    return net;
}

SpinNetwork apply_vacancies(const SpinNetwork& net, double p, std::uint64_t seed) {
    if (p < 0.0 || p >= 1.0) throw ValidationError("vacancy probability must be in [0,1)");
    const int n = net.size();

    Rng rng(seed);
    std::vector<int> keep;
    keep.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (i == net.ends.first || i == net.ends.second) {
            keep.push_back(i);
            continue;
        }
        if (rng.uniform01() >= p) keep.push_back(i);
    }

    const int m = static_cast<int>(keep.size());
    SpinNetwork out;
    out.couplings = Eigen::MatrixXd(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) out.couplings(a, b) = net.couplings(keep[a], keep[b]);

    auto remap = [&](int old) {
        return static_cast<int>(std::lower_bound(keep.begin(), keep.end(), old) - keep.begin());
    };
    out.ends = {remap(net.ends.first), remap(net.ends.second)};
    if (!net.positions.empty()) {
        out.positions.reserve(m);
        for (int idx : keep) out.positions.push_back(net.positions[idx]);
    }

    out.builder = net.builder + "+vacancies";
    out.params = net.params;
    out.params["p"] = p;
    out.seed = static_cast<long long>(seed);
    out.hasSeed = true;
    return out;
}

SpinNetwork build_p1_nv(const std::array<double, 3>& box, double density_ppm,
                        double nv_separation, std::uint64_t seed) {
    for (double b : box)
        if (b <= 0.0) throw ValidationError("box dimensions must be positive");
    if (density_ppm <= 0.0) throw ValidationError("density must be positive");
    if (nv_separation <= 0.0) throw ValidationError("NV separation must be positive");

    const double densityPerNm3 = density_ppm * 1e-6 * kDiamondSiteDensityPerNm3;
    const double lambda = box[0] * box[1] * box[2] * densityPerNm3;

    Rng rng(seed);
    const int nBulk = rng.poisson(lambda);
    if (nBulk == 0)
        throw PhysicsError("no P1 centers sampled (empty bulk); retry with another seed");

    int axis = 0;
    if (box[1] > box[axis]) axis = 1;
    if (box[2] > box[axis]) axis = 2;

    const int n = nBulk + 2;
    SpinNetwork net = blank(n);
    net.positions.resize(n);

    std::array<double, 3> center{box[0] / 2, box[1] / 2, box[2] / 2};
    net.positions[0] = center;
    net.positions[n - 1] = center;
    net.positions[0][axis] -= nv_separation / 2;
    net.positions[n - 1][axis] += nv_separation / 2;

    for (int v = 1; v <= nBulk; ++v)
        for (int c = 0; c < 3; ++c) net.positions[v][c] = rng.uniform01() * box[c];

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double dx = net.positions[i][0] - net.positions[j][0];
            const double dy = net.positions[i][1] - net.positions[j][1];
            const double dz = net.positions[i][2] - net.positions[j][2];
            const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
            const double v = 1.0 / (r * r * r);
            net.couplings(i, j) = v;
            net.couplings(j, i) = v;
        }

    net.builder = "p1nv";
    net.params = {{"box_x", box[0]}, {"box_y", box[1]}, {"box_z", box[2]},
                  {"ppm", density_ppm}, {"sep", nv_separation}};
    net.seed = static_cast<long long>(seed);
    net.hasSeed = true;
    return net;
}

PartitionedNetwork partition(const SpinNetwork& net) {
    const int n = net.size();
    if (n < 3) throw ValidationError("partition needs at least 3 nodes");
    const auto [e1, e2] = net.ends;
    if (e1 == e2 || e1 < 0 || e2 < 0 || e1 >= n || e2 >= n)
        throw ValidationError("invalid end pair");

    PartitionedNetwork p;
    p.n = n;
    p.ends = net.ends;
    for (int i = 0; i < n; ++i)
        if (i != e1 && i != e2) p.bulk.push_back(i);

    const int nb = static_cast<int>(p.bulk.size());
    p.bulkRaw = Eigen::MatrixXd(nb, nb);
    for (int a = 0; a < nb; ++a)
        for (int b = 0; b < nb; ++b) p.bulkRaw(a, b) = net.couplings(p.bulk[a], p.bulk[b]);

    Eigen::MatrixXd endRaw = Eigen::MatrixXd::Zero(n, n);
    for (int idx : p.bulk) {
        endRaw(e1, idx) = net.couplings(e1, idx);
        endRaw(idx, e1) = net.couplings(idx, e1);
        endRaw(e2, idx) = net.couplings(e2, idx);
        endRaw(idx, e2) = net.couplings(idx, e2);
    }
    endRaw(e1, e1) = net.couplings(e1, e1);
    endRaw(e2, e2) = net.couplings(e2, e2);

    p.endEndCoupling = net.couplings(e1, e2);

    p.beta = p.bulkRaw.norm();
    p.eps = endRaw.norm();
    if (p.eps == 0.0)
        throw PhysicsError("end block is zero: ends are disconnected from the bulk");

    // A single (or fully uncoupled) bulk can have a zero block; keep beta = 0
    // and a zero normalized block rather than failing.
    p.bulkNorm = p.beta > 0.0 ? Eigen::MatrixXd(p.bulkRaw / p.beta)
                              : Eigen::MatrixXd::Zero(nb, nb);
    p.endNorm = endRaw / p.eps;
    p.gamma = p.beta / p.eps;

    p.canonical = net.couplings;
    p.canonical(e1, e2) = 0.0;
    p.canonical(e2, e1) = 0.0;
    return p;
}

SpinNetwork set_end_shifts(const SpinNetwork& net, double w1, double wN) {
    SpinNetwork out = net;
    out.couplings(net.ends.first, net.ends.first) = w1;
    out.couplings(net.ends.second, net.ends.second) = wN;
    return out;
}

SpinNetwork rescale_to_gamma(const SpinNetwork& net, double gamma) {
    if (gamma <= 0.0) throw ValidationError("gamma must be positive");
    const PartitionedNetwork p = partition(net);
    if (p.beta == 0.0)
        throw PhysicsError("cannot rescale to a target gamma: bulk block is zero");

    // Scale only the end-bulk couplings (and the discarded end-end entry, for
    // consistency); shifts on the end diagonals are control terms, not
    // couplings, and stay as-is.
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(net.size(), net.size());
    const auto [e1, e2] = net.ends;
    for (int idx : p.bulk) {
        raw(e1, idx) = net.couplings(e1, idx);
        raw(idx, e1) = net.couplings(idx, e1);
        raw(e2, idx) = net.couplings(e2, idx);
        raw(idx, e2) = net.couplings(idx, e2);
    }
    const double offNorm = raw.norm();
    if (offNorm == 0.0)
        throw PhysicsError("cannot rescale: no end-bulk couplings");
    const double f = (p.beta / gamma) / offNorm;

    SpinNetwork out = net;
    for (int idx : p.bulk) {
        out.couplings(e1, idx) *= f;
        out.couplings(idx, e1) *= f;
        out.couplings(e2, idx) *= f;
        out.couplings(idx, e2) *= f;
    }
    out.couplings(e1, e2) *= f;
    out.couplings(e2, e1) *= f;
    return out;
}

}  // namespace spinnet
