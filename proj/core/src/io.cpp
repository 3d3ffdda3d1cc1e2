#include "spinnet/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spinnet/errors.hpp"

namespace spinnet {

using json = nlohmann::ordered_json;

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

void dump_json(const json& j, const std::string& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace

std::string format_g15(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

void write_network(const SpinNetwork& net, const std::string& path) {
    const int n = net.size();
    json j;
    j["n"] = n;
    j["ends"] = {net.ends.first, net.ends.second};

    json couplings = json::array();
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k)
            if (net.couplings(i, k) != 0.0) couplings.push_back({i, k, net.couplings(i, k)});
    for (int i = 0; i < n; ++i)
        if (net.couplings(i, i) != 0.0) couplings.push_back({"diag", i, net.couplings(i, i)});
    j["couplings"] = std::move(couplings);

    if (!net.positions.empty()) {
        json pos = json::array();
        for (const auto& p : net.positions) pos.push_back({p[0], p[1], p[2]});
        j["positions"] = std::move(pos);
    }

    json meta;
    meta["builder"] = net.builder;
    meta["params"] = json::object();
    for (const auto& [key, value] : net.params) meta["params"][key] = value;
    if (net.hasSeed) meta["seed"] = net.seed;
    j["meta"] = std::move(meta);

    dump_json(j, path);
}

SpinNetwork read_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open network file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("malformed network file " + path + ": " + e.what());
    }

    SpinNetwork net;
    try {
        const int n = j.at("n").get<int>();
        if (n < 1) throw ValidationError("network size must be positive");
        const auto& ends = j.at("ends");
        if (!ends.is_array() || ends.size() != 2)
            throw ValidationError("ends must be a pair of node indices");
        net.ends = {ends[0].get<int>(), ends[1].get<int>()};
        for (int e : {net.ends.first, net.ends.second})
            if (e < 0 || e >= n) throw ValidationError("end index out of range");
        if (net.ends.first == net.ends.second)
            throw ValidationError("end nodes must be distinct");

        net.couplings = Eigen::MatrixXd::Zero(n, n);
        for (const auto& entry : j.at("couplings")) {
            if (!entry.is_array() || entry.size() != 3)
                throw ValidationError("coupling entries must be triples");
            if (entry[0].is_string()) {
                if (entry[0].get<std::string>() != "diag")
                    throw ValidationError("unknown coupling tag: " + entry[0].get<std::string>());
                const int i = entry[1].get<int>();
                if (i < 0 || i >= n) throw ValidationError("diagonal index out of range");
                net.couplings(i, i) = entry[2].get<double>();
            } else {
                const int i = entry[0].get<int>();
                const int k = entry[1].get<int>();
                if (i < 0 || k < 0 || i >= n || k >= n)
                    throw ValidationError("coupling index out of range");
                if (i >= k) throw ValidationError("couplings must be upper-triangle (i < j)");
                const double v = entry[2].get<double>();
                net.couplings(i, k) = v;
                net.couplings(k, i) = v;
            }
        }

        if (j.contains("positions")) {
            const auto& pos = j.at("positions");
            if (static_cast<int>(pos.size()) != n)
                throw ValidationError("positions must cover every node");
            for (const auto& p : pos) {
                if (!p.is_array() || p.size() != 3)
                    throw ValidationError("positions must be [x,y,z] triples");
                net.positions.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
            }
        }

        if (j.contains("meta")) {
            const auto& meta = j.at("meta");
            net.builder = meta.value("builder", std::string{});
            if (meta.contains("params"))
                for (const auto& [key, value] : meta.at("params").items())
                    net.params[key] = value.get<double>();
            if (meta.contains("seed") && !meta.at("seed").is_null()) {
                net.seed = meta.at("seed").get<long long>();
                net.hasSeed = true;
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError("invalid network file " + path + ": " + e.what());
    }
    return net;
}

void write_trace_csv(const FidelityTrace& trace, const std::string& path,
                     const double* threshold) {
    auto out = open_out(path);
    out << "t,fidelity\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        out << format_g15(trace.times[i]) << ',' << format_g15(trace.values[i]) << '\n';
    if (threshold) {
        double tCross = 0.0;
        if (first_crossing(trace, *threshold, &tCross))
            out << "# threshold," << format_g15(tCross) << ',' << format_g15(*threshold) << '\n';
        else
            out << "# threshold,never," << format_g15(*threshold) << '\n';
    }
    out << "# peak," << format_g15(trace.peakTime) << ',' << format_g15(trace.peakValue) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void write_schedule_json(const PulseSchedule& sched, const std::string& path) {
    json j;
    j["flipNode"] = sched.flipNode;
    j["r"] = sched.r;
    j["L"] = sched.cycles;
    j["symmetrized"] = sched.symmetrized;
    j["totalTime"] = sched.totalTime;
    json segs = json::array();
    for (const auto& [dt, flipped] : sched.segments) segs.push_back({dt, flipped});
    j["segments"] = std::move(segs);
    dump_json(j, path);
}

void write_offres_report(const EffectiveEndModel& m, double w1, double wN, double gamma,
                         const std::string& path) {
    json j;
    j["as11"] = m.as11;
    j["asNN"] = m.asNN;
    j["as1N"] = m.as1N;
    j["alpha"] = m.alpha;
    j["tm"] = m.tm;
    j["shifts"] = {w1, wN};
    j["gamma"] = gamma;
    dump_json(j, path);
}

void write_onres_report(const LambdaModel& m, int mode, double predictedPeak, double tm,
                        const std::string& path) {
    json j;
    j["mode"] = mode;
    j["gap"] = m.gap;
    j["O1"] = m.O1;
    j["ON"] = m.ON;
    j["S2"] = m.S2;
    j["Delta4"] = m.Delta4;
    j["delta2"] = m.delta2;
    const auto f = lambda_frequencies(m);
    j["f"] = {f[0], f[1], f[2], f[3]};
    const double margin = m.S2 * m.S2 - m.Delta4;
    if (margin > 1e-12 * m.S2 * m.S2) {
        const double w0 = m.delta2 * m.delta2 / (4.0 * margin);
        j["w"] = {w0, w0 / 2.0, w0 / 2.0, -w0, -w0};
    } else {
        j["w"] = nullptr;  // destructive-interference boundary: no closed weights
    }
    j["predictedPeak"] = predictedPeak;
    j["tm"] = tm;
    dump_json(j, path);
}

void write_csv(const std::string& header, const std::vector<std::vector<double>>& rows,
               const std::string& path) {
    auto out = open_out(path);
    out << header << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_g15(row[i]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace spinnet
