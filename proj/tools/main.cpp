// sbmal CLI: SBM generation, recovery thresholds, initial clustering,
// budgeted label sampling, and the figure-reproduction experiment runs.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbmal/experiments.hpp"
#include "sbmal/init_cluster.hpp"
#include "sbmal/sampling.hpp"
#include "sbmal/sbm.hpp"
#include "sbmal/theory.hpp"

namespace {

struct ParamFlags {
    int64_t n = 0;
    std::optional<double> a;
    std::optional<double> divergence;
    double b = 2.0;
};

void add_param_flags(CLI::App* cmd, ParamFlags& flags) {
    cmd->add_option("--n", flags.n, "community size parameter (graph has 2n nodes)")->required();
    auto* a_opt = cmd->add_option("--a", flags.a, "within-community rate constant");
    auto* d_opt =
        cmd->add_option("--D", flags.divergence, "CH divergence; a is derived as (sqrt(D)+sqrt(b))^2");
    cmd->add_option("--b", flags.b, "between-community rate constant")->required();
    a_opt->excludes(d_opt);
    d_opt->excludes(a_opt);
}

sbmal::SbmParams resolve_params(const ParamFlags& flags) {
    if (flags.a && !flags.divergence) return {flags.n, *flags.a, flags.b};
    if (flags.divergence && !flags.a)
        return sbmal::SbmParams::from_divergence(flags.n, *flags.divergence, flags.b);
    throw CLI::ValidationError("exactly one of --a and --D must be given");
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

void save_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

// Accepts {"labels": [...]}, {"tau_prime": [...]}, or a bare array.
sbmal::Labeling load_labels(const std::string& path) {
    const nlohmann::json j = load_json(path);
    const nlohmann::json* arr = &j;
    if (j.is_object()) {
        if (j.contains("labels"))
            arr = &j.at("labels");
        else if (j.contains("tau_prime"))
            arr = &j.at("tau_prime");
        else
            throw std::runtime_error(path + ": no labels / tau_prime field");
    }
    std::vector<int8_t> values;
    for (const auto& x : *arr) values.push_back(static_cast<int8_t>(x.get<int>()));
    return sbmal::Labeling(std::move(values));
}

std::vector<int64_t> parse_n_list(const std::string& text) {
    std::vector<int64_t> out;
    size_t pos = 0;
    while (pos < text.size()) {
        const size_t comma = text.find(',', pos);
        const std::string token = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        out.push_back(std::stoll(token));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw std::runtime_error("--nlist: empty list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"active-learning community detection on the symmetric SBM"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "progress notes on stderr");

    // generate
    auto* generate = app.add_subcommand("generate", "sample an SBM graph with hidden labels");
    ParamFlags gen_flags;
    uint64_t gen_seed = 0;
    std::string gen_out;
    add_param_flags(generate, gen_flags);
    generate->add_option("--seed", gen_seed, "PRNG seed");
    generate->add_option("--out", gen_out, "output graph JSON path")->required();

    // theory
    auto* theory = app.add_subcommand("theory", "print thresholds and the sampling budget");
    ParamFlags theory_flags;
    add_param_flags(theory, theory_flags);

    // cluster
    auto* cluster = app.add_subcommand("cluster", "compute the initial labeling tau'");
    std::string cluster_graph, cluster_out;
    sbmal::InitConfig init_config;
    uint64_t cluster_seed = 0;
    cluster->add_option("--graph", cluster_graph, "graph JSON path")->required();
    cluster->add_option("--out", cluster_out, "output labeling JSON path")->required();
    cluster->add_option("--replicas", init_config.replicas, "replica partitions");
    cluster->add_option("--max-steps", init_config.power_max_steps, "eigensolver step cap");
    cluster->add_option("--tol", init_config.power_tol, "eigensolver residual tolerance");
    cluster->add_option("--trim", init_config.trim_multiplier, "degree trim multiplier");
    cluster->add_flag("--refine", init_config.refine, "one majority-refinement pass");
    cluster->add_option("--seed", cluster_seed, "PRNG seed");

    // sample
    auto* sample = app.add_subcommand("sample", "query a label budget and correct tau'");
    std::string sample_graph, sample_init, sample_truth, sample_budget = "auto", sample_out;
    sample->add_option("--graph", sample_graph, "graph JSON path")->required();
    sample->add_option("--init", sample_init, "initial labeling JSON path")->required();
    sample->add_option("--truth", sample_truth, "true labels (graph or labeling JSON)")->required();
    sample->add_option("--budget", sample_budget, "node budget, or 'auto'");
    sample->add_option("--out", sample_out, "output report path (default stdout)");

    // experiment fig1|fig2|fig3
    auto* experiment = app.add_subcommand("experiment", "figure-reproduction runs");
    experiment->require_subcommand(1);
    sbmal::Fig2Config fig2_config;
    sbmal::Fig3Config fig3_config;
    sbmal::Fig1Config fig1_config;
    std::string out_dir, n_list_text;
    double b_flag = 2.0, dmin = 0.30, dmax = 0.60, dstep = 0.05;
    int trials = 30, threads = 0;
    uint64_t exp_seed = 0;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out-dir", out_dir, "output directory")->required();
        cmd->add_option("--seed", exp_seed, "master seed");
        cmd->add_option("--trials", trials, "trials per cell");
        cmd->add_option("--b", b_flag, "between-community rate constant");
        cmd->add_option("--dmin", dmin, "smallest divergence value");
        cmd->add_option("--dmax", dmax, "largest divergence value");
        cmd->add_option("--dstep", dstep, "divergence grid step");
        cmd->add_option("--nlist", n_list_text, "comma-separated n values");
        cmd->add_option("--trials-parallel", threads, "max concurrent trials (0: all cores)");
    };
    auto* fig1 = experiment->add_subcommand("fig1", "1-delta curves over Delta/sqrt(M-1/4)");
    fig1->add_option("--out-dir", out_dir, "output directory")->required();
    auto* fig2 = experiment->add_subcommand("fig2", "minority/sample-count scaling exponents");
    add_common(fig2);
    auto* fig3 = experiment->add_subcommand("fig3", "error rate against sampled fraction");
    add_common(fig3);
    fig3->add_option("--d", fig3_config.D, "divergence value for the sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*generate) {
            const auto params = resolve_params(gen_flags);
            const auto [graph, labels] = sbmal::generate_sbm(params, gen_seed);
            save_json(gen_out, sbmal::graph_to_json(graph, labels));
            if (verbose)
                std::cerr << "generated " << graph.num_nodes() << " nodes, "
                          << graph.num_edges() << " edges -> " << gen_out << '\n';
        } else if (*theory) {
            const auto params = resolve_params(theory_flags);
            const auto report = sbmal::make_threshold_report(params);
            std::cout << sbmal::threshold_report_to_json(report).dump(2) << '\n';
        } else if (*cluster) {
            const auto [graph, labels] = sbmal::graph_from_json(load_json(cluster_graph));
            (void)labels;  // hidden from the clustering step
            const auto report = sbmal::initial_labeling(graph, init_config, cluster_seed);
            nlohmann::json j;
            j["tau_prime"] = report.labeling.values;
            j["converged"] = report.converged;
            j["trimmed"] = report.trimmed;
            save_json(cluster_out, j);
            if (verbose)
                std::cerr << "clustered " << report.labeling.size() << " nodes (converged="
                          << (report.converged ? "yes" : "no") << ", trimmed "
                          << report.trimmed.size() << ") -> " << cluster_out << '\n';
        } else if (*sample) {
            const auto [graph, gen_labels] = sbmal::graph_from_json(load_json(sample_graph));
            (void)gen_labels;
            const auto tau_prime = load_labels(sample_init);
            const auto truth = load_labels(sample_truth);
            int64_t budget = 0;
            if (sample_budget == "auto") {
                if (!graph.provenance())
                    throw std::runtime_error("--budget auto requires graph provenance");
                budget = sbmal::auto_budget(graph.provenance()->params);
                budget = std::min(budget, graph.num_nodes());
            } else {
                budget = std::stoll(sample_budget);
            }
            sbmal::Oracle oracle(truth);
            const auto report = sbmal::run_ranked_sampling(graph, tau_prime, budget, oracle);
            nlohmann::json j;
            j["sampled"] = report.sampled;
            j["budget_requested"] = report.budget_requested;
            j["budget_used"] = report.budget_used;
            j["tau"] = report.tau.values;
            if (report.max_sampled_dstar)
                j["max_sampled_dstar"] = *report.max_sampled_dstar;
            else
                j["max_sampled_dstar"] = nullptr;
            j["queries"] = oracle.queries();
            if (sample_out.empty())
                std::cout << j.dump(2) << '\n';
            else
                save_json(sample_out, j);
            if (verbose)
                std::cerr << "queried " << oracle.queries() << " of " << graph.num_nodes()
                          << " nodes\n";
        } else if (*experiment) {
            if (*fig1) {
                fig1_config.out_dir = out_dir;
                const auto path = sbmal::run_fig1(fig1_config);
                if (verbose) std::cerr << "wrote " << path.string() << '\n';
            } else if (*fig2) {
                fig2_config.b = b_flag;
                fig2_config.d_min = dmin;
                fig2_config.d_max = dmax;
                fig2_config.d_step = dstep;
                if (!n_list_text.empty()) fig2_config.n_list = parse_n_list(n_list_text);
                fig2_config.trials = trials;
                fig2_config.seed = exp_seed;
                fig2_config.threads = threads;
                fig2_config.out_dir = out_dir;
                const auto out = sbmal::run_fig2(fig2_config);
                if (verbose)
                    std::cerr << out.records.size() << " trials -> " << out.records_csv.string()
                              << ", " << out.fit_csv.string() << '\n';
            } else if (*fig3) {
                fig3_config.b = b_flag;
                if (!n_list_text.empty()) fig3_config.n_list = parse_n_list(n_list_text);
                fig3_config.trials = trials;
                fig3_config.seed = exp_seed;
                fig3_config.threads = threads;
                fig3_config.out_dir = out_dir;
                const auto out = sbmal::run_fig3(fig3_config);
                if (verbose)
                    std::cerr << out.rows.size() << " rows -> " << out.csv.string() << '\n';
            }
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
