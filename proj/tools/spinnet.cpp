// spinnet: generate spin networks, analyze transport, build balancing pulse
// schedules, and run seeded ensembles. All outputs are deterministic given
// the flags and base seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinnet/balance.hpp"
#include "spinnet/dynamics.hpp"
#include "spinnet/errors.hpp"
#include "spinnet/io.hpp"
#include "spinnet/lambda_model.hpp"
#include "spinnet/netgen.hpp"
#include "spinnet/normscale.hpp"
#include "spinnet/parallel.hpp"
#include "spinnet/swpert.hpp"

using nlohmann::json;
using namespace spinnet;

namespace {

// ---------------------------------------------------------------- utilities

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& part : split_commas(s)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ValidationError("cannot parse " + what + " entry '" + part + "'");
        }
    }
    if (out.empty()) throw ValidationError(what + " list is empty");
    return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<int> out;
    for (double v : parse_double_list(s, what)) {
        if (v != std::floor(v)) throw ValidationError(what + " entries must be integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

ModeStrategy parse_mode(const std::string& s) {
    ModeStrategy m;
    if (s == "highest") {
        m.kind = ModeStrategy::highest;
    } else if (s == "zero") {
        m.kind = ModeStrategy::zero;
    } else {
        try {
            std::size_t used = 0;
            m.k = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw ValidationError("mode must be 'zero', 'highest', or an index");
        }
        m.kind = ModeStrategy::index;
    }
    return m;
}

void write_gnuplot(const std::string& dataPath, const std::string& title, bool wantIt) {
    if (!wantIt) return;
    std::ofstream out(dataPath + ".gp");
    if (!out) throw IoError("cannot write gnuplot script for " + dataPath);
    out << "set datafile separator ','\n"
        << "set datafile commentschars '#'\n"
        << "set key autotitle columnhead\n"
        << "set title '" << title << "'\n"
        << "plot '" << dataPath << "' using 1:2 with lines\n";
}

// Mirrors the long flags of one subcommand into config-file keys. Flags given
// on the command line win; keys that match no flag are rejected.
class ConfigMirror {
  public:
    explicit ConfigMirror(CLI::App* sub) : sub_(sub) {
        sub->add_option("--config", path_, "JSON config file mirroring the flags");
    }

    template <typename T>
    CLI::Option* bind(CLI::Option* opt, T& var) {
        const std::string key = take_over(opt);
        setters_[key] = [&var, key](const json& v) {
            try {
                var = v.get<T>();
            } catch (const json::exception&) {
                throw ValidationError("config key '" + key + "' has the wrong type");
            }
        };
        return opt;
    }

    // comma-list flags also accept JSON arrays in the config file
    CLI::Option* bind_list(CLI::Option* opt, std::string& var) {
        const std::string key = take_over(opt);
        setters_[key] = [&var, key](const json& v) {
            if (v.is_string()) {
                var = v.get<std::string>();
                return;
            }
            if (!v.is_array())
                throw ValidationError("config key '" + key + "' must be a string or array");
            std::string joined;
            for (const auto& item : v) {
                if (!joined.empty()) joined += ',';
                joined += item.is_string() ? item.get<std::string>() : item.dump();
            }
            var = joined;
        };
        return opt;
    }

    void apply() const {
        std::set<std::string> fromConfig;
        if (!path_.empty()) {
            std::ifstream in(path_);
            if (!in) throw IoError("cannot open config file: " + path_);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw ValidationError("malformed config file " + path_ + ": " + e.what());
            }
            if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
            for (const auto& [key, value] : j.items()) {
                auto it = setters_.find(key);
                if (it == setters_.end()) throw ValidationError("unknown config key: " + key);
                fromConfig.insert(key);
                if (options_.at(key)->count() > 0) continue;
                it->second(value);
            }
        }
        for (const auto& key : required_) {
            if (options_.at(key)->count() == 0 && fromConfig.count(key) == 0)
                throw ValidationError("--" + key + " is required");
        }
    }

  private:
    // Required flags are demoted to ConfigMirror bookkeeping: CLI11 would
    // reject their absence before the config file gets a chance to supply
    // them, so apply() enforces requiredness after the merge instead.
    std::string take_over(CLI::Option* opt) {
        const std::string key = opt->get_lnames().front();
        options_[key] = opt;
        if (opt->get_required()) {
            required_.insert(key);
            opt->required(false);
            opt->description(opt->get_description() + " (required)");
        }
        return key;
    }

    CLI::App* sub_;
    std::string path_;
    std::map<std::string, CLI::Option*> options_;
    std::map<std::string, std::function<void(const json&)>> setters_;
    std::set<std::string> required_;
};

SpinNetwork canonical_network(const SpinNetwork& net, const PartitionedNetwork& p) {
    SpinNetwork out = net;
    out.couplings = p.canonical;
    return out;
}

void warn_end_end(const PartitionedNetwork& p) {
    if (p.endEndCoupling != 0.0)
        std::cerr << "warning: direct end-end coupling " << format_g15(p.endEndCoupling)
                  << " zeroed for analysis\n";
}

struct Quartiles {
    double mean = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0;
};

Quartiles summarize(std::vector<double> values) {
    Quartiles q;
    if (values.empty()) return q;
    q.mean = compensated_mean(values);
    std::sort(values.begin(), values.end());
    auto at = [&values](double frac) {
        const double pos = frac * (values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double w = pos - lo;
        return values[lo] * (1.0 - w) + values[hi] * w;
    };
    q.q1 = at(0.25);
    q.median = at(0.5);
    q.q3 = at(0.75);
    return q;
}

// ---------------------------------------------------------------- gen

struct GenCmd {
    std::string kind, out, box;
    int n = 10, rows = 4, cols = 4;
    double d = 1.0, p = 0.1, ppm = 0.2, sep = 15.0;
    std::uint64_t seed = 0;

    void run() const {
        SpinNetwork net;
        if (kind == "uniform") {
            net = build_random_uniform(n, seed);
        } else if (kind == "dipolar") {
            net = build_random_dipolar_chain(n, d, seed);
        } else if (kind == "honeycomb") {
            net = build_honeycomb(rows, cols, d);
        } else if (kind == "vacancy") {
            net = apply_vacancies(build_honeycomb(rows, cols, d), p, seed);
        } else if (kind == "p1nv") {
            std::array<double, 3> dims{sep + 12.0, 14.0, 14.0};
            if (!box.empty()) {
                const auto vals = parse_double_list(box, "box");
                if (vals.size() != 3) throw ValidationError("box needs three lengths");
                dims = {vals[0], vals[1], vals[2]};
            }
            net = build_p1_nv(dims, ppm, sep, seed);
        } else {
            throw ValidationError("unknown kind: " + kind +
                                  " (uniform|dipolar|honeycomb|vacancy|p1nv)");
        }
        write_network(net, out);
        std::cout << "wrote " << out << ": n=" << net.size() << " ends=" << net.ends.first
                  << "," << net.ends.second << '\n';
    }
};

void setup_gen(CLI::App& app, GenCmd& cmd, std::vector<std::function<void()>>& pending) {
    auto* sub = app.add_subcommand("gen", "Generate a network and write it as JSON");
    auto* cfg = new ConfigMirror(sub);
    cfg->bind(sub->add_option("--kind", cmd.kind, "uniform|dipolar|honeycomb|vacancy|p1nv")
                  ->required(),
              cmd.kind);
    cfg->bind(sub->add_option("--n", cmd.n, "node count (uniform, dipolar)"), cmd.n);
    cfg->bind(sub->add_option("--d", cmd.d, "lattice constant"), cmd.d);
    cfg->bind(sub->add_option("--rows", cmd.rows, "honeycomb rows"), cmd.rows);
    cfg->bind(sub->add_option("--cols", cmd.cols, "honeycomb cols"), cmd.cols);
    cfg->bind(sub->add_option("--p", cmd.p, "vacancy probability"), cmd.p);
    cfg->bind(sub->add_option("--ppm", cmd.ppm, "P1 concentration (ppm)"), cmd.ppm);
    cfg->bind(sub->add_option("--sep", cmd.sep, "NV separation (nm)"), cmd.sep);
    cfg->bind_list(sub->add_option("--box", cmd.box, "box dims x,y,z (nm); default sep+12,14,14"),
                   cmd.box);
    cfg->bind(sub->add_option("--seed", cmd.seed, "RNG seed"), cmd.seed);
    cfg->bind(sub->add_option("--out", cmd.out, "output network file")->required(), cmd.out);
    sub->callback([&cmd, cfg, &pending] {
        pending.emplace_back([&cmd, cfg] {
            cfg->apply();
            cmd.run();
        });
    });
}

// ---------------------------------------------------------------- partition

struct PartitionCmd {
    std::string net, out;

    void run() const {
        const SpinNetwork network = read_network(net);
        const PartitionedNetwork p = partition(network);
        warn_end_end(p);
        std::cout << "n=" << p.n << " bulk=" << p.bulk.size() << " beta=" << format_g15(p.beta)
                  << " eps=" << format_g15(p.eps) << " gamma=" << format_g15(p.gamma) << '\n';
        if (!out.empty()) {
            nlohmann::ordered_json j;
            j["n"] = p.n;
            j["ends"] = {p.ends.first, p.ends.second};
            j["beta"] = p.beta;
            j["eps"] = p.eps;
            j["gamma"] = p.gamma;
            j["endEndCoupling"] = p.endEndCoupling;
            std::ofstream f(out);
            if (!f) throw IoError("cannot open for writing: " + out);
            f << j.dump(2) << '\n';
        }
    }
};

void setup_partition(CLI::App& app, PartitionCmd& cmd, std::vector<std::function<void()>>& pending) {
    auto* sub = app.add_subcommand("partition", "Split a network into bulk and end blocks");
    auto* cfg = new ConfigMirror(sub);
    cfg->bind(sub->add_option("--net", cmd.net, "network file")->required(), cmd.net);
    cfg->bind(sub->add_option("--out", cmd.out, "optional report JSON"), cmd.out);
    sub->callback([&cmd, cfg, &pending] {
        pending.emplace_back([&cmd, cfg] {
            cfg->apply();
            cmd.run();
        });
    });
}

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
    std::string net, out = "trace.csv";
    double tmax = 0.0, threshold = -1.0;
    int samples = 2001;
    bool gnuplot = false;

    void run() const {
        if (tmax <= 0.0) throw ValidationError("tmax must be positive");
        if (samples < 2) throw ValidationError("need at least 2 samples");
        const SpinNetwork network = read_network(net);
        const FidelityTrace trace =
            fidelity_trace(network.couplings, network.ends.first, network.ends.second, tmax, samples);
        const bool useThreshold = threshold >= 0.0;
        const double th = threshold;
        write_trace_csv(trace, out, useThreshold ? &th : nullptr);
        write_gnuplot(out, "transport fidelity", gnuplot);
        std::cout << "peak F=" << format_g15(trace.peakValue)
                  << " at t=" << format_g15(trace.peakTime) << '\n';
    }
};

void setup_simulate(CLI::App& app, SimulateCmd& cmd, std::vector<std::function<void()>>& pending) {
    auto* sub = app.add_subcommand("simulate", "Exact free evolution, trace CSV out");
    auto* cfg = new ConfigMirror(sub);
    cfg->bind(sub->add_option("--net", cmd.net, "network file")->required(), cmd.net);
    cfg->bind(sub->add_option("--tmax", cmd.tmax, "time window")->required(), cmd.tmax);
    cfg->bind(sub->add_option("--samples", cmd.samples, "grid samples"), cmd.samples);
    cfg->bind(sub->add_option("--threshold", cmd.threshold, "record first crossing of this fidelity"),
              cmd.threshold);
    cfg->bind(sub->add_option("--out", cmd.out, "trace CSV path"), cmd.out);
    cfg->bind(sub->add_flag("--gnuplot", cmd.gnuplot, "also write a gnuplot script"), cmd.gnuplot);
    sub->callback([&cmd, cfg, &pending] {
        pending.emplace_back([&cmd, cfg] {
            cfg->apply();
            cmd.run();
        });
    });
}

// ---------------------------------------------------------------- offres

struct OffresCmd {
    std::string net, out = "offres.json", trace = "offres_trace.csv", scanGamma;
    double gamma = 0.0;  // 0 = keep the network's natural gamma
    int samples = 4001;
    bool gnuplot = false;

    struct Point {
        double gamma, peakF, tstar;
    };

    Point run_one(const SpinNetwork& base, double targetGamma, bool writeArtifacts) const {
        SpinNetwork network = base;
        if (targetGamma > 0.0) network = rescale_to_gamma(network, targetGamma);
        const PartitionedNetwork p = partition(network);
        const EffectiveEndModel model = effective_AS(p);
        const auto [w1, wN] = compensating_shifts(model);
        const SpinNetwork shifted = set_end_shifts(canonical_network(network, p), w1, wN);

        if (!std::isfinite(model.tm))
            throw PhysicsError("effective end-end coupling vanishes: no off-resonance transport");
        const FidelityTrace tr = fidelity_trace(shifted.couplings, shifted.ends.first,
                                                shifted.ends.second, 1.35 * model.tm, samples);
        if (writeArtifacts) {
            write_offres_report(model, w1, wN, p.gamma, out);
            write_trace_csv(tr, trace);
            write_gnuplot(trace, "off-resonance transport", gnuplot);
            std::cout << "gamma=" << format_g15(p.gamma) << " tm=" << format_g15(model.tm)
                      << " peak F=" << format_g15(tr.peakValue)
                      << " at t=" << format_g15(tr.peakTime) << '\n';
        }
        return {p.gamma, tr.peakValue, tr.peakTime};
    }

    void run() const {
        const SpinNetwork base = read_network(net);
        warn_end_end(partition(base));
        if (scanGamma.empty()) {
            run_one(base, gamma, true);
            return;
        }
        std::vector<std::vector<double>> rows;
        for (double g : parse_double_list(scanGamma, "scan-gamma")) {
            const Point pt = run_one(base, g, false);
            rows.push_back({pt.gamma, pt.peakF, pt.tstar});
            std::cout << "gamma=" << format_g15(pt.gamma) << " peakF=" << format_g15(pt.peakF)
                      << " t*=" << format_g15(pt.tstar) << '\n';
        }
        write_csv("gamma,peakF,tstar", rows, out);
        write_gnuplot(out, "peak fidelity vs gamma", gnuplot);
    }
};

void setup_offres(CLI::App& app, OffresCmd& cmd, std::vector<std::function<void()>>& pending) {
    auto* sub = app.add_subcommand(
        "offres", "Off-resonance analysis: effective end model, shifts, exact check");
    auto* cfg = new ConfigMirror(sub);
    cfg->bind(sub->add_option("--net", cmd.net, "network file")->required(), cmd.net);
    cfg->bind(sub->add_option("--gamma", cmd.gamma, "rescale end couplings to this gamma"),
              cmd.gamma);
    cfg->bind(sub->add_option("--samples", cmd.samples, "trace samples"), cmd.samples);
    cfg->bind(sub->add_option("--out", cmd.out, "report JSON (or scan CSV)"), cmd.out);
    cfg->bind(sub->add_option("--trace", cmd.trace, "trace CSV path"), cmd.trace);
    cfg->bind_list(sub->add_option("--scan-gamma", cmd.scanGamma, "comma list, e.g. 5,10,25,50"),
                   cmd.scanGamma);
    cfg->bind(sub->add_flag("--gnuplot", cmd.gnuplot, "also write a gnuplot script"), cmd.gnuplot);
    sub->callback([&cmd, cfg, &pending] {
        pending.emplace_back([&cmd, cfg] {
            cfg->apply();
            cmd.run();
        });
    });
}

// ---------------------------------------------------------------- onres

struct OnresCmd {
    std::string net, out = "onres.json", trace = "onres_trace.csv", schedule, mode = "highest",
                convergence;
    double gamma = 0.0, tmax = 0.0;
    int cycles = 20, samples = 4001;
    bool symmetrize = true, gnuplot = false;

    void run() const {
        SpinNetwork network = read_network(net);
        {
            const PartitionedNetwork p0 = partition(network);
            warn_end_end(p0);
            if (gamma > 0.0) network = rescale_to_gamma(network, gamma);
        }
        const PartitionedNetwork p = partition(network);
        const ModeSelection sel = select_resonant_mode(p, parse_mode(mode));
        const LambdaModel m = build_lambda(p, sel.mode);
        const SpinNetwork shifted =
            set_end_shifts(canonical_network(network, p), sel.shift, sel.shift);

        const auto [r, whichEnd] = balance_ratio(m.O1, m.ON);
        const int flipNode = whichEnd == 0 ? p.ends.first : p.ends.second;
        const double T = tmax > 0.0 ? tmax : balanced_transfer_time(m.O1, m.ON);
        if (!std::isfinite(T))
            throw PhysicsError("one end is uncoupled from the resonant mode: no transport");

        if (!convergence.empty()) {
            const auto Ls = parse_int_list(convergence, "convergence");
            const auto points = trotter_convergence(shifted.couplings, shifted.ends, r, flipNode,
                                                    T, Ls, samples);
            std::vector<std::vector<double>> rows;
            for (const auto& pt : points) {
                rows.push_back({static_cast<double>(pt.L), pt.symPeak, pt.unsymPeak, pt.symAtT,
                                pt.unsymAtT});
                std::cout << "L=" << pt.L << " symPeak=" << format_g15(pt.symPeak)
                          << " unsymPeak=" << format_g15(pt.unsymPeak) << '\n';
            }
            write_csv("L,symPeak,unsymPeak,symAtT,unsymAtT", rows, out);
            write_gnuplot(out, "Trotter convergence", gnuplot);
            return;
        }

        const PulseSchedule sched = build_schedule(r, flipNode, T, cycles, symmetrize);
        const FidelityTrace balanced =
            simulate_schedule(shifted.couplings, shifted.ends, sched, samples, 1.25);
        const FidelityTrace unbalanced = fidelity_trace(
            shifted.couplings, shifted.ends.first, shifted.ends.second, 1.25 * T, samples);

        write_onres_report(m, sel.mode, check_perfect_conditions(m).predictedPeak, T, out);
        write_trace_csv(balanced, trace);
        write_gnuplot(trace, "balanced on-resonance transport", gnuplot);
        if (!schedule.empty()) write_schedule_json(sched, schedule);
        std::cout << "mode=" << sel.mode << " gap=" << format_g15(sel.gap)
                  << " r=" << format_g15(r) << " T=" << format_g15(T) << '\n'
                  << "balanced peak F=" << format_g15(balanced.peakValue)
                  << " at t=" << format_g15(balanced.peakTime)
                  << " | unbalanced peak F=" << format_g15(unbalanced.peakValue) << '\n';
    }
};

void setup_onres(CLI::App& app, OnresCmd& cmd, std::vector<std::function<void()>>& pending) {
    auto* sub = app.add_subcommand(
        "onres", "On-resonance analysis: mode selection, Lambda model, balancing");
    auto* cfg = new ConfigMirror(sub);
    cfg->bind(sub->add_option("--net", cmd.net, "network file")->required(), cmd.net);
    cfg->bind(sub->add_option("--mode", cmd.mode, "zero|highest|<index>"), cmd.mode);
    cfg->bind(sub->add_option("--gamma", cmd.gamma, "rescale end couplings to this gamma"),
              cmd.gamma);
    cfg->bind(sub->add_option("--cycles", cmd.cycles, "Trotter cycles L"), cmd.cycles);
    cfg->bind(sub->add_flag("--symmetrize,!--no-symmetrize", cmd.symmetrize,
                            "symmetrized cycle layout"),
              cmd.symmetrize);
    cfg->bind(sub->add_option("--samples", cmd.samples, "trace samples"), cmd.samples);
    cfg->bind(sub->add_option("--tmax", cmd.tmax, "override the total schedule time"), cmd.tmax);
    cfg->bind(sub->add_option("--out", cmd.out, "report JSON (or convergence CSV)"), cmd.out);
    cfg->bind(sub->add_option("--trace", cmd.trace, "balanced trace CSV"), cmd.trace);
    cfg->bind(sub->add_option("--schedule", cmd.schedule, "also write the schedule JSON here"),
              cmd.schedule);
    cfg->bind_list(
        sub->add_option("--convergence", cmd.convergence, "cycle counts, e.g. 2,5,10,20,40"),
        cmd.convergence);
    cfg->bind(sub->add_flag("--gnuplot", cmd.gnuplot, "also write a gnuplot script"), cmd.gnuplot);
    sub->callback([&cmd, cfg, &pending] {
        pending.emplace_back([&cmd, cfg] {
            cfg->apply();
            cmd.run();
        });
    });
}

// ---------------------------------------------------------------- balance

struct BalanceCmd {
    std::string net, out = "schedule.json", trace, mode = "highest";
    double gamma = 0.0, tmax = 0.0;
    int cycles = 20, samples = 4001;
    bool symmetrize = true, gnuplot = false;

    void run() const {
        SpinNetwork network = read_network(net);
        {
            const PartitionedNetwork p0 = partition(network);
            warn_end_end(p0);
            if (gamma > 0.0) network = rescale_to_gamma(network, gamma);
        }
        const PartitionedNetwork p = partition(network);
        const ModeSelection sel = select_resonant_mode(p, parse_mode(mode));
        const LambdaModel m = build_lambda(p, sel.mode);
        const auto [r, whichEnd] = balance_ratio(m.O1, m.ON);
        const int flipNode = whichEnd == 0 ? p.ends.first : p.ends.second;
        const double T = tmax > 0.0 ? tmax : balanced_transfer_time(m.O1, m.ON);
        if (!std::isfinite(T))
            throw PhysicsError("one end is uncoupled from the resonant mode: no transport");

        const PulseSchedule sched = build_schedule(r, flipNode, T, cycles, symmetrize);
        write_schedule_json(sched, out);
        std::cout << "r=" << format_g15(r) << " flipNode=" << flipNode << " T=" << format_g15(T)
                  << " cycles=" << cycles << (symmetrize ? " symmetrized" : "") << '\n';

        if (!trace.empty()) {
            const SpinNetwork shifted =
                set_end_shifts(canonical_network(network, p), sel.shift, sel.shift);
            const FidelityTrace tr =
                simulate_schedule(shifted.couplings, shifted.ends, sched, samples, 1.25);
            write_trace_csv(tr, trace);
            write_gnuplot(trace, "balanced schedule", gnuplot);
            std::cout << "balanced peak F=" << format_g15(tr.peakValue)
                      << " at t=" << format_g15(tr.peakTime) << '\n';
        }
    }
};

void setup_balance(CLI::App& app, BalanceCmd& cmd, std::vector<std::function<void()>>& pending) {
    auto* sub = app.add_subcommand("balance", "Build (and optionally simulate) a pulse schedule");
    auto* cfg = new ConfigMirror(sub);
    cfg->bind(sub->add_option("--net", cmd.net, "network file")->required(), cmd.net);
    cfg->bind(sub->add_option("--mode", cmd.mode, "zero|highest|<index>"), cmd.mode);
    cfg->bind(sub->add_option("--gamma", cmd.gamma, "rescale end couplings to this gamma"),
              cmd.gamma);
    cfg->bind(sub->add_option("--cycles", cmd.cycles, "Trotter cycles L"), cmd.cycles);
    cfg->bind(sub->add_flag("--symmetrize,!--no-symmetrize", cmd.symmetrize,
                            "symmetrized cycle layout"),
              cmd.symmetrize);
    cfg->bind(sub->add_option("--tmax", cmd.tmax, "override the total schedule time"), cmd.tmax);
    cfg->bind(sub->add_option("--samples", cmd.samples, "trace samples"), cmd.samples);
    cfg->bind(sub->add_option("--out", cmd.out, "schedule JSON path"), cmd.out);
    cfg->bind(sub->add_option("--trace", cmd.trace, "simulate and write this trace CSV"),
              cmd.trace);
    cfg->bind(sub->add_flag("--gnuplot", cmd.gnuplot, "also write a gnuplot script"), cmd.gnuplot);
    sub->callback([&cmd, cfg, &pending] {
        pending.emplace_back([&cmd, cfg] {
            cfg->apply();
            cmd.run();
        });
    });
}

// ---------------------------------------------------------------- ensemble

struct EnsembleCmd {
    std::string out = "ensemble.csv", sep = "12,16,20", box;
    double ppm = 10.0, threshold = 0.99;
    int realizations = 100, cycles = 20, samples = 2001;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    bool symmetrize = true, gnuplot = false;

    struct Instance {
        bool ok = false;
        double t99 = 0.0, balancedPeak = 0.0, unbalancedPeak = 0.0;
    };

    Instance run_instance(double separation, std::uint64_t instanceSeed) const {
        Instance res;
        std::array<double, 3> dims{separation + 12.0, 14.0, 14.0};
        if (!box.empty()) {
            const auto vals = parse_double_list(box, "box");
            if (vals.size() != 3) throw ValidationError("box needs three lengths");
            dims = {vals[0], vals[1], vals[2]};
        }
        try {
            const SpinNetwork net = build_p1_nv(dims, ppm, separation, instanceSeed);
            const PartitionedNetwork p = partition(net);
            const ModeSelection sel = select_resonant_mode(p, ModeStrategy{});
            const LambdaModel m = build_lambda(p, sel.mode);
            const auto [r, whichEnd] = balance_ratio(m.O1, m.ON);
            const double T = balanced_transfer_time(m.O1, m.ON);
            if (!std::isfinite(T)) return res;

            // time-to-threshold on the reduced balanced model (the effective
            // dynamics the schedule is designed for)
            const Eigen::MatrixXd Ad = lambda_matrix(m);
            const int nb = static_cast<int>(m.legs1.size());
            const int flipReduced = whichEnd == 0 ? 0 : nb + 1;
            const PulseSchedule schedReduced =
                build_schedule(r, flipReduced, T, cycles, symmetrize);
            const FidelityTrace reduced =
                simulate_schedule(Ad, {0, nb + 1}, schedReduced, samples, 1.5);
            double t99 = 0.0;
            if (!first_crossing(reduced, threshold, &t99)) return res;

            // full-network checks: balanced schedule and unbalanced baseline
            const SpinNetwork shifted =
                set_end_shifts(canonical_network(net, p), sel.shift, sel.shift);
            const int flipNode = whichEnd == 0 ? p.ends.first : p.ends.second;
            const PulseSchedule sched = build_schedule(r, flipNode, T, cycles, symmetrize);
            res.balancedPeak =
                simulate_schedule(shifted.couplings, shifted.ends, sched, samples, 1.25).peakValue;
            res.unbalancedPeak = fidelity_trace(shifted.couplings, shifted.ends.first,
                                                shifted.ends.second, 1.25 * T, samples)
                                     .peakValue;
            res.t99 = t99;
            res.ok = true;
        } catch (const PhysicsError&) {
            // unusable draw (empty bulk, no resonance, nothing to balance): skip
        }
        return res;
    }

    void run() const {
        if (realizations < 1) throw ValidationError("need at least one realization");
        const auto separations = parse_double_list(sep, "sep");

        std::vector<std::vector<double>> rows;
        for (double s : separations) {
            const auto instances = parallel_map<Instance>(
                static_cast<std::size_t>(realizations), workers,
                [&](std::size_t i) { return run_instance(s, seed + i); });

            std::vector<double> t99s, balPeaks, unbalPeaks;
            for (const auto& inst : instances) {
                if (!inst.ok) continue;
                t99s.push_back(inst.t99);
                balPeaks.push_back(inst.balancedPeak);
                unbalPeaks.push_back(inst.unbalancedPeak);
            }
            const int used = static_cast<int>(t99s.size());
            const int skipped = realizations - used;
            if (used == 0) throw PhysicsError("all realizations unusable at separation " +
                                              format_g15(s));
            const Quartiles q = summarize(t99s);
            rows.push_back({s, static_cast<double>(used), static_cast<double>(skipped), q.mean,
                            q.q1, q.median, q.q3, compensated_mean(balPeaks),
                            compensated_mean(unbalPeaks)});
            std::cout << "sep=" << format_g15(s) << " used=" << used << " skipped=" << skipped
                      << " meanT99=" << format_g15(q.mean)
                      << " meanUnbalPeak=" << format_g15(compensated_mean(unbalPeaks)) << '\n';
        }
        write_csv("sep,used,skipped,meanT99,q1T99,medianT99,q3T99,meanBalancedPeak,meanUnbalancedPeak",
                  rows, out);
        write_gnuplot(out, "transfer time vs separation", gnuplot);
    }
};

void setup_ensemble(CLI::App& app, EnsembleCmd& cmd, std::vector<std::function<void()>>& pending) {
    auto* sub = app.add_subcommand(
        "ensemble", "Seeded P1/NV ensembles: balanced transfer time vs separation");
    auto* cfg = new ConfigMirror(sub);
    cfg->bind_list(sub->add_option("--sep", cmd.sep, "NV separations, e.g. 12,16,20"), cmd.sep);
    cfg->bind(sub->add_option("--ppm", cmd.ppm, "P1 concentration (ppm)"), cmd.ppm);
    cfg->bind_list(sub->add_option("--box", cmd.box, "box dims x,y,z; default sep+12,14,14"),
                   cmd.box);
    cfg->bind(sub->add_option("--realizations", cmd.realizations, "instances per separation"),
              cmd.realizations);
    cfg->bind(sub->add_option("--threshold", cmd.threshold, "target fidelity"), cmd.threshold);
    cfg->bind(sub->add_option("--cycles", cmd.cycles, "Trotter cycles L"), cmd.cycles);
    cfg->bind(sub->add_flag("--symmetrize,!--no-symmetrize", cmd.symmetrize,
                            "symmetrized cycle layout"),
              cmd.symmetrize);
    cfg->bind(sub->add_option("--samples", cmd.samples, "trace samples per instance"), cmd.samples);
    cfg->bind(sub->add_option("--seed", cmd.seed, "base seed (instance i uses seed+i)"), cmd.seed);
    cfg->bind(sub->add_option("--workers", cmd.workers, "worker threads"), cmd.workers);
    cfg->bind(sub->add_option("--out", cmd.out, "summary CSV"), cmd.out);
    cfg->bind(sub->add_flag("--gnuplot", cmd.gnuplot, "also write a gnuplot script"), cmd.gnuplot);
    sub->callback([&cmd, cfg, &pending] {
        pending.emplace_back([&cmd, cfg] {
            cfg->apply();
            cmd.run();
        });
    });
}

// ---------------------------------------------------------------- norms

struct NormsCmd {
    std::string out = "norms.csv",
                classes = "randomUniform,randomDipolar,honeycomb,honeycombVacancy",
                ngrid = "20,50,100";
    double d = 1.0, p = 0.1;
    int realizations = 100;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    bool gnuplot = false;

    void run() const {
        const auto classList = split_commas(classes);
        const auto ns = parse_int_list(ngrid, "ngrid");
        if (classList.empty()) throw ValidationError("no network classes given");

        std::ofstream f(out);
        if (!f) throw IoError("cannot open for writing: " + out);
        f << "class,n,d,p,predicted,measuredMean,measuredStd,predictedEmax,measuredEmax\n";
        for (const auto& name : classList) {
            const NetworkClass cls = network_class_from_string(name);
            const double pv = cls == NetworkClass::honeycombVacancy ? p : 0.0;
            for (int n : ns) {
                const MonteCarloNorm mc =
                    monte_carlo_norm(cls, n, d, pv, realizations, seed, workers);
                const NormEstimate est = predict_norm(cls, mc.actualN, d, pv);
                f << to_string(cls) << ',' << mc.actualN << ',' << format_g15(d) << ','
                  << format_g15(pv) << ',' << format_g15(est.predictedNorm) << ','
                  << format_g15(mc.meanNorm) << ',' << format_g15(mc.stddevNorm) << ','
                  << (est.predictedEmax ? format_g15(*est.predictedEmax) : std::string{}) << ','
                  << format_g15(mc.meanEmax) << '\n';
                std::cout << to_string(cls) << " n=" << mc.actualN
                          << " predicted=" << format_g15(est.predictedNorm)
                          << " measured=" << format_g15(mc.meanNorm) << '\n';
            }
        }
        if (!f) throw IoError("write failed: " + out);
    }
};

void setup_norms(CLI::App& app, NormsCmd& cmd, std::vector<std::function<void()>>& pending) {
    auto* sub = app.add_subcommand("norms", "Monte Carlo norm scaling vs closed forms");
    auto* cfg = new ConfigMirror(sub);
    cfg->bind_list(sub->add_option("--classes", cmd.classes, "comma list of network classes"),
                   cmd.classes);
    cfg->bind_list(sub->add_option("--ngrid", cmd.ngrid, "network sizes, e.g. 20,50,100"),
                   cmd.ngrid);
    cfg->bind(sub->add_option("--d", cmd.d, "lattice constant"), cmd.d);
    cfg->bind(sub->add_option("--p", cmd.p, "vacancy probability"), cmd.p);
    cfg->bind(sub->add_option("--realizations", cmd.realizations, "Monte Carlo realizations"),
              cmd.realizations);
    cfg->bind(sub->add_option("--seed", cmd.seed, "base seed"), cmd.seed);
    cfg->bind(sub->add_option("--workers", cmd.workers, "worker threads"), cmd.workers);
    cfg->bind(sub->add_option("--out", cmd.out, "output CSV"), cmd.out);
    cfg->bind(sub->add_flag("--gnuplot", cmd.gnuplot, "also write a gnuplot script"), cmd.gnuplot);
    sub->callback([&cmd, cfg, &pending] {
        pending.emplace_back([&cmd, cfg] {
            cfg->apply();
            cmd.run();
        });
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-network quantum transport toolkit"};
    app.require_subcommand(1);

    GenCmd gen;
    PartitionCmd part;
    SimulateCmd sim;
    OffresCmd offres;
    OnresCmd onres;
    BalanceCmd bal;
    EnsembleCmd ens;
    NormsCmd norms;
    std::vector<std::function<void()>> pending;

    setup_gen(app, gen, pending);
    setup_partition(app, part, pending);
    setup_simulate(app, sim, pending);
    setup_offres(app, offres, pending);
    setup_onres(app, onres, pending);
    setup_balance(app, bal, pending);
    setup_ensemble(app, ens, pending);
    setup_norms(app, norms, pending);

    try {
        app.parse(argc, argv);
        for (const auto& task : pending) task();
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::validation);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
