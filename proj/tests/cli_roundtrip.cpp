// End-to-end checks of the sbmal CLI binary (path passed as argv[1]):
// round-trip generate -> cluster -> sample, parameterization equivalence,
// exit codes, and byte-stable outputs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sbmal/sbm.hpp"

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "FAILED: " << what << '\n';
    }
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return status < 0 ? status : WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_roundtrip <path-to-sbmal>\n";
        return 2;
    }
    const std::string bin = argv[1];
    const fs::path dir = "cli_test_out";
    fs::create_directories(dir);
    const std::string graph = (dir / "graph.json").string();
    const std::string init = (dir / "init.json").string();
    const std::string report = (dir / "report.json").string();
    const std::string quiet = " > /dev/null 2>&1";

    // exit codes
    check(run(bin + quiet) == 1, "no subcommand exits 1");
    check(run(bin + " frobnicate" + quiet) == 1, "unknown subcommand exits 1");
    check(run(bin + " generate --n 50 --a 4.5 --D 0.5 --b 2 --seed 1 --out " + graph + quiet) == 1,
          "conflicting --a/--D exits 1");
    check(run(bin + " generate --n 50 --b 2 --seed 1 --out " + graph + quiet) == 1,
          "missing rate flag exits 1");
    check(run(bin + " cluster --graph " + (dir / "missing.json").string() + " --out " + init +
              quiet) == 2,
          "unreadable input exits 2");
    check(run(bin + " generate --n 50 --a 2 --b 2 --seed 1 --out " + graph + quiet) == 2,
          "invalid parameters exit 2");

    // generate is byte-deterministic in the seed
    check(run(bin + " generate --n 60 --a 4.5 --b 2 --seed 9 --out " + graph + quiet) == 0,
          "generate succeeds");
    const std::string first = slurp(graph);
    check(run(bin + " generate --n 60 --a 4.5 --b 2 --seed 9 --out " + graph + quiet) == 0,
          "regenerate succeeds");
    check(first == slurp(graph), "identical seed gives identical graph file");
    check(run(bin + " generate --n 60 --D 0.5 --b 2 --seed 9 --out " + (dir / "g2.json").string() +
              quiet) == 0,
          "divergence parameterization accepted");
    check(first == slurp(dir / "g2.json"), "a and (D,b) parameterizations agree");

    // theory output agrees across parameterizations
    check(run(bin + " theory --n 2000 --a 4.5 --b 2 > " + (dir / "t1.json").string()) == 0,
          "theory via a");
    check(run(bin + " theory --n 2000 --D 0.5 --b 2 > " + (dir / "t2.json").string()) == 0,
          "theory via D");
    check(slurp(dir / "t1.json") == slurp(dir / "t2.json"), "theory outputs identical");
    {
        const auto j = nlohmann::json::parse(slurp(dir / "t1.json"));
        check(j.at("budget").get<long long>() == 1153, "theory budget is 1153");
        check(std::abs(j.at("delta").get<double>() - 0.072463) < 1e-5, "theory delta value");
        check(std::abs(j.at("D").get<double>() - 0.5) < 1e-9, "theory D value");
    }

    // round trip: cluster then sample with the full budget recovers truth
    check(run(bin + " cluster --graph " + graph + " --out " + init + " --seed 3" + quiet) == 0,
          "cluster succeeds");
    check(run(bin + " sample --graph " + graph + " --init " + init + " --truth " + graph +
              " --budget 120 --out " + report + quiet) == 0,
          "sample succeeds");
    {
        const auto graph_json = nlohmann::json::parse(slurp(graph));
        const auto report_json = nlohmann::json::parse(slurp(report));
        std::vector<int8_t> tau, truth;
        for (const auto& x : report_json.at("tau")) tau.push_back(static_cast<int8_t>(x.get<int>()));
        for (const auto& x : graph_json.at("labels"))
            truth.push_back(static_cast<int8_t>(x.get<int>()));
        check(report_json.at("queries").get<long long>() == 120, "full budget queries 2n");
        check(sbmal::error_rate(sbmal::Labeling(tau), sbmal::Labeling(truth)) == 0.0,
              "full-budget sampling recovers the truth");
    }

    // auto budget resolves through the graph provenance
    check(run(bin + " sample --graph " + graph + " --init " + init + " --truth " + graph +
              " --budget auto --out " + report + quiet) == 0,
          "auto budget succeeds");
    {
        const auto report_json = nlohmann::json::parse(slurp(report));
        check(report_json.at("budget_used").get<long long>() >= 1, "auto budget is positive");
    }

    if (failures == 0) std::puts("cli_roundtrip: all checks passed");
    return failures == 0 ? 0 : 1;
}
