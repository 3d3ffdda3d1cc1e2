#pragma once

#include <map>
#include <string>
#include <vector>

#include "spinnet/balance.hpp"
#include "spinnet/dynamics.hpp"
#include "spinnet/lambda_model.hpp"
#include "spinnet/spin_network.hpp"
#include "spinnet/swpert.hpp"

namespace spinnet {

// Network file: {"n", "ends", "couplings": [[i,j,v]... upper triangle plus
// ["diag",i,v]...], "positions" (optional), "meta": {builder, params, seed}}.
// Writing is byte-deterministic for identical networks.
void write_network(const SpinNetwork& net, const std::string& path);
SpinNetwork read_network(const std::string& path);

// Trace CSV: "t,fidelity" header, 15 significant digits, and a trailing
// comment "# peak,t*,F*". An optional threshold crossing adds
// "# threshold,t,F" before the peak line.
void write_trace_csv(const FidelityTrace& trace, const std::string& path,
                     const double* threshold = nullptr);

// Schedule JSON: {flipNode, r, L, symmetrized, totalTime, segments:[[dt,flag]...]}.
void write_schedule_json(const PulseSchedule& sched, const std::string& path);

// Off-resonance report: {as11, asNN, as1N, alpha, tm, shifts:[w1,wN], gamma}.
void write_offres_report(const EffectiveEndModel& m, double w1, double wN, double gamma,
                         const std::string& path);

// On-resonance analysis record:
// {mode, gap, O1, ON, S2, Delta4, delta2, f:[...], w:[...], predictedPeak, tm}.
void write_onres_report(const LambdaModel& m, int mode, double predictedPeak, double tm,
                        const std::string& path);

// Generic CSV writer: header + rows, numbers at 15 significant digits.
void write_csv(const std::string& header, const std::vector<std::vector<double>>& rows,
               const std::string& path);

std::string format_g15(double v);

}  // namespace spinnet
