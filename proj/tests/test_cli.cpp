#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spinnet/io.hpp"
#include "spinnet/netgen.hpp"

using json = nlohmann::ordered_json;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(CLI_PATH) + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool exists(const std::string& path) { return std::ifstream(path).good(); }

int line_count(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("gen writes identical bytes for identical seeds", "[cli]") {
    REQUIRE(run("gen --kind dipolar --n 10 --seed 7 --out cli_a.json") == 0);
    REQUIRE(run("gen --kind dipolar --n 10 --seed 7 --out cli_b.json") == 0);
    REQUIRE(run("gen --kind dipolar --n 10 --seed 8 --out cli_c.json") == 0);
    REQUIRE(slurp("cli_a.json") == slurp("cli_b.json"));
    REQUIRE(slurp("cli_a.json") != slurp("cli_c.json"));

    const auto net = spinnet::read_network("cli_a.json");
    REQUIRE(net.size() == 10);
    REQUIRE(net.builder == "randomDipolar");
}

TEST_CASE("gen covers every builder", "[cli]") {
    REQUIRE(run("gen --kind uniform --n 8 --seed 1 --out cli_u.json") == 0);
    REQUIRE(run("gen --kind honeycomb --rows 2 --cols 2 --out cli_h.json") == 0);
    REQUIRE(run("gen --kind vacancy --rows 3 --cols 3 --p 0.2 --seed 3 --out cli_v.json") == 0);
    REQUIRE(run("gen --kind p1nv --ppm 20 --sep 10 --box 20,12,12 --seed 4 --out cli_p.json") == 0);

    REQUIRE(spinnet::read_network("cli_h.json").size() == 16);
    REQUIRE(spinnet::read_network("cli_v.json").builder == "honeycomb+vacancies");
    const auto p1 = spinnet::read_network("cli_p.json");
    REQUIRE(p1.params.at("ppm") == 20.0);
    REQUIRE(!p1.positions.empty());
}

TEST_CASE("bad invocations exit with the validation code", "[cli]") {
    REQUIRE(run("gen --kind nosuch --n 8 --out cli_x.json") == 2);
    REQUIRE(run("gen --kind uniform --n 8") == 2);        // missing required --out
    REQUIRE(run("gen --no-such-flag") == 2);
    REQUIRE(run("simulate --net cli_u.json") == 2);       // missing required --tmax
    REQUIRE(run("") == 2);                                // a subcommand is required
    REQUIRE(run("gen --kind uniform --n 2 --out cli_x.json") == 2);  // n < 3
}

TEST_CASE("missing input files exit with the IO code", "[cli]") {
    REQUIRE(run("partition --net nowhere.json") == 4);
    REQUIRE(run("simulate --net nowhere.json --tmax 1") == 4);
    REQUIRE(run("offres --net nowhere.json") == 4);
}

TEST_CASE("physics rejections exit with the physics code", "[cli]") {
    // 3-node chain: zero bulk block, no off-resonant treatment possible
    spinnet::SpinNetwork chain;
    chain.couplings = Eigen::MatrixXd::Zero(3, 3);
    chain.couplings(0, 1) = chain.couplings(1, 0) = 0.5;
    chain.couplings(1, 2) = chain.couplings(2, 1) = 0.5;
    chain.ends = {0, 2};
    spinnet::write_network(chain, "cli_chain3.json");
    REQUIRE(run("offres --net cli_chain3.json --out cli_chain3_report.json") == 3);
}

TEST_CASE("partition prints the split and optionally reports it", "[cli]") {
    REQUIRE(run("gen --kind dipolar --n 9 --seed 11 --out cli_part.json") == 0);
    REQUIRE(run("partition --net cli_part.json --out cli_part_report.json") == 0);

    const json j = json::parse(slurp("cli_part_report.json"));
    REQUIRE(j.contains("beta"));
    REQUIRE(j.contains("eps"));
    REQUIRE(j.contains("gamma"));
    REQUIRE(j.at("n") == 9);

    const std::string console = slurp("cli_stdout.txt");
    REQUIRE(console.find("gamma") != std::string::npos);
}

TEST_CASE("simulate writes a trace with threshold and peak", "[cli]") {
    REQUIRE(run("gen --kind uniform --n 7 --seed 2 --out cli_sim.json") == 0);
    REQUIRE(run("simulate --net cli_sim.json --tmax 8 --samples 801 --threshold 0.2 "
                "--out cli_sim.csv --gnuplot") == 0);

    const std::string csv = slurp("cli_sim.csv");
    REQUIRE(csv.rfind("t,fidelity\n", 0) == 0);
    REQUIRE(csv.find("# peak,") != std::string::npos);
    REQUIRE(csv.find("# threshold,") != std::string::npos);
    REQUIRE(exists("cli_sim.csv.gp"));
}

TEST_CASE("offres pipeline produces report, trace and shifts", "[cli]") {
    REQUIRE(run("gen --kind dipolar --n 11 --seed 21 --out cli_off.json") == 0);
    REQUIRE(run("offres --net cli_off.json --gamma 25 --samples 2001 "
                "--out cli_off_report.json --trace cli_off_trace.csv") == 0);

    const json j = json::parse(slurp("cli_off_report.json"));
    REQUIRE(j.at("gamma") == 25.0);
    REQUIRE(j.at("tm").get<double>() > 0.0);
    REQUIRE(j.at("shifts").size() == 2);
    // one of the two compensating shifts is always zero
    const double w1 = j.at("shifts")[0].get<double>();
    const double wN = j.at("shifts")[1].get<double>();
    REQUIRE(std::min(w1, wN) == 0.0);

    REQUIRE(slurp("cli_off_trace.csv").rfind("t,fidelity\n", 0) == 0);
}

TEST_CASE("offres gamma scan emits one row per gamma", "[cli]") {
    REQUIRE(run("offres --net cli_off.json --scan-gamma 5,10 --samples 1001 "
                "--out cli_scan.csv") == 0);
    const std::string csv = slurp("cli_scan.csv");
    REQUIRE(csv.rfind("gamma,peakF,tstar\n", 0) == 0);
    REQUIRE(line_count(csv) == 3);
    REQUIRE(csv.find("\n5,") != std::string::npos);
    REQUIRE(csv.find("\n10,") != std::string::npos);
}

TEST_CASE("onres reports the reduction and simulates the schedule", "[cli]") {
    REQUIRE(run("gen --kind p1nv --ppm 30 --sep 9 --box 16,11,11 --seed 6 --out cli_on.json") == 0);
    REQUIRE(run("onres --net cli_on.json --cycles 12 --samples 1201 "
                "--out cli_on_report.json --trace cli_on_trace.csv "
                "--schedule cli_on_sched.json") == 0);

    const json j = json::parse(slurp("cli_on_report.json"));
    REQUIRE(j.contains("mode"));
    REQUIRE(j.contains("O1"));
    REQUIRE(j.at("f").size() == 4);
    REQUIRE(j.at("tm").get<double>() > 0.0);

    const json sched = json::parse(slurp("cli_on_sched.json"));
    REQUIRE(sched.at("L") == 12);
    REQUIRE(sched.at("symmetrized") == true);
    REQUIRE(sched.at("r").get<double>() >= 0.5);
    REQUIRE(sched.at("r").get<double>() <= 1.0);

    REQUIRE(slurp("cli_on_trace.csv").rfind("t,fidelity\n", 0) == 0);
}

TEST_CASE("onres convergence table", "[cli]") {
    REQUIRE(run("onres --net cli_on.json --convergence 2,5,10 --samples 801 "
                "--out cli_conv.csv") == 0);
    const std::string csv = slurp("cli_conv.csv");
    REQUIRE(csv.rfind("L,symPeak,unsymPeak,symAtT,unsymAtT\n", 0) == 0);
    REQUIRE(line_count(csv) == 4);
    REQUIRE(csv.find("\n2,") != std::string::npos);
    REQUIRE(csv.find("\n10,") != std::string::npos);
}

TEST_CASE("balance writes the schedule it would run", "[cli]") {
    REQUIRE(run("balance --net cli_on.json --cycles 8 --no-symmetrize "
                "--out cli_bal_sched.json --trace cli_bal_trace.csv --samples 801") == 0);
    const json sched = json::parse(slurp("cli_bal_sched.json"));
    REQUIRE(sched.at("L") == 8);
    REQUIRE(sched.at("symmetrized") == false);
    REQUIRE(sched.at("segments").size() == 2);
    REQUIRE(exists("cli_bal_trace.csv"));
}

TEST_CASE("config file mirrors the flags and flags win", "[cli]") {
    {
        std::ofstream cfg("cli_cfg.json");
        cfg << R"({"kind":"uniform","n":12,"seed":5,"out":"cli_cfg_a.json"})";
    }
    REQUIRE(run("gen --config cli_cfg.json") == 0);
    REQUIRE(run("gen --kind uniform --n 12 --seed 5 --out cli_cfg_b.json") == 0);
    const std::string a = slurp("cli_cfg_a.json");
    std::string b = slurp("cli_cfg_b.json");
    REQUIRE(a == b);

    // a command-line flag overrides the config value
    REQUIRE(run("gen --config cli_cfg.json --n 14 --out cli_cfg_c.json") == 0);
    REQUIRE(spinnet::read_network("cli_cfg_c.json").size() == 14);

    // unknown keys are rejected, not ignored
    {
        std::ofstream cfg("cli_cfg_bad.json");
        cfg << R"({"kind":"uniform","n":12,"sede":5,"out":"cli_cfg_d.json"})";
    }
    REQUIRE(run("gen --config cli_cfg_bad.json") == 2);

    // so are type mismatches
    {
        std::ofstream cfg("cli_cfg_type.json");
        cfg << R"({"kind":"uniform","n":"a dozen","out":"cli_cfg_e.json"})";
    }
    REQUIRE(run("gen --config cli_cfg_type.json") == 2);

    REQUIRE(run("gen --config nowhere_cfg.json") == 4);
}

TEST_CASE("norms table is worker-invariant", "[cli]") {
    REQUIRE(run("norms --classes uniform,dipolar --ngrid 12,20 --realizations 20 "
                "--seed 9 --workers 1 --out cli_norms_1.csv") == 0);
    REQUIRE(run("norms --classes uniform,dipolar --ngrid 12,20 --realizations 20 "
                "--seed 9 --workers 4 --out cli_norms_4.csv") == 0);

    const std::string one = slurp("cli_norms_1.csv");
    REQUIRE(one == slurp("cli_norms_4.csv"));
    REQUIRE(one.rfind("class,n,d,p,predicted,measuredMean,measuredStd,predictedEmax,measuredEmax\n",
                      0) == 0);
    REQUIRE(line_count(one) == 5);  // header + 2 classes x 2 sizes
    REQUIRE(one.find("randomUniform,12,") != std::string::npos);
    REQUIRE(one.find("randomDipolar,20,") != std::string::npos);
}

TEST_CASE("honeycomb norms leave the Emax prediction empty", "[cli]") {
    REQUIRE(run("norms --classes honeycomb --ngrid 24 --realizations 2 "
                "--out cli_norms_h.csv") == 0);
    const std::string csv = slurp("cli_norms_h.csv");
    // penultimate CSV field is empty: "...,<predictedEmax>,<measuredEmax>"
    std::istringstream in(csv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    const auto lastComma = row.rfind(',');
    const auto prevComma = row.rfind(',', lastComma - 1);
    REQUIRE(lastComma - prevComma == 1);
}

TEST_CASE("a small ensemble runs deterministically", "[cli]") {
    const std::string args =
        "ensemble --sep 12 --ppm 10 --realizations 6 --cycles 8 --samples 601 "
        "--seed 400 --out cli_ens.csv";
    REQUIRE(run(args) == 0);
    const std::string first = slurp("cli_ens.csv");
    REQUIRE(run(args + " --workers 3") == 0);
    REQUIRE(first == slurp("cli_ens.csv"));

    REQUIRE(first.rfind("sep,used,skipped,meanT99,", 0) == 0);
    REQUIRE(line_count(first) == 2);
    REQUIRE(first.find("\n12,") != std::string::npos);
}
