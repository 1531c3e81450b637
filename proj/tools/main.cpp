// tamio — command-line front end for the collective-write aggregation
// simulator. Runs a workload through two-layer and/or two-phase aggregation,
// verifies the resulting file image against the serial oracle, and emits
// JSON/CSV reports and message traces.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tamio/error.hpp"
#include "tamio/run.hpp"

namespace {

struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> workload;
    std::optional<std::uint64_t> n;
    std::optional<std::uint64_t> block_bytes;
    std::optional<int> vars;
    std::optional<int> px, py, pz;
    std::optional<std::string> path;
    std::optional<int> procs, nodes, procs_per_node;
    std::optional<int> c, p_l, p_g, stripe_count, global_pick;
    std::optional<std::uint64_t> stripe_size, stripes_per_round, seed;
    std::optional<std::string> global_policy, overlap_policy, method;
    std::optional<std::string> out, csv, trace, dump;

    bool verify_value = true;
    CLI::Option* verify_opt = nullptr;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON config file (flags override it)");
    cmd->add_option("--workload", f.workload,
                    "contiguous1d | btio | s3d | decomp_file");
    cmd->add_option("--n", f.n, "grid edge for btio/s3d");
    cmd->add_option("--block-bytes", f.block_bytes, "per-rank block for contiguous1d");
    cmd->add_option("--vars", f.vars, "btio variable count");
    cmd->add_option("--px", f.px, "s3d process-grid factor X");
    cmd->add_option("--py", f.py, "s3d process-grid factor Y");
    cmd->add_option("--pz", f.pz, "s3d process-grid factor Z");
    cmd->add_option("--path", f.path, "decomposition file for decomp_file");
    cmd->add_option("--procs", f.procs, "total process count P");
    cmd->add_option("--nodes", f.nodes, "compute node count");
    cmd->add_option("--procs-per-node", f.procs_per_node, "processes per node q");
    cmd->add_option("--local-aggs-per-node", f.c, "local aggregators per node c");
    cmd->add_option("--p-l", f.p_l, "total local aggregators (c * nodes)");
    cmd->add_option("--global-aggs", f.p_g, "global aggregator count P_G");
    cmd->add_option("--stripe-size", f.stripe_size, "stripe size in bytes");
    cmd->add_option("--stripe-count", f.stripe_count, "OST count (equals P_G)");
    cmd->add_option("--stripes-per-round", f.stripes_per_round,
                    "collective buffer size in stripes");
    cmd->add_option("--global-pick", f.global_pick,
                    "which local aggregator on a node serves as global");
    cmd->add_option("--global-policy", f.global_policy, "spread_even | round_robin");
    cmd->add_option("--overlap-policy", f.overlap_policy, "strict | last_writer");
    cmd->add_option("--method", f.method, "tam | two_phase | both");
    cmd->add_option("--seed", f.seed, "recorded in reports");
    f.verify_opt = cmd->add_flag("--verify,!--no-verify", f.verify_value,
                                 "compare against the serial oracle (default on)");
    cmd->add_option("--out", f.out, "report JSON path");
    cmd->add_option("--csv", f.csv, "CSV path (appends; writes header if new)");
    cmd->add_option("--trace", f.trace, "message trace JSONL path");
    cmd->add_option("--dump", f.dump, "binary dump of the final file image");
}

tamio::RunConfig build_config(const Flags& f) {
    tamio::RunConfig cfg;
    if (f.config) {
        std::ifstream in(*f.config);
        if (!in) throw tamio::config_error("config: cannot open " + *f.config);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw tamio::config_error("config: malformed JSON: " + std::string(e.what()));
        }
        cfg = tamio::config_from_json(doc);
    }
    if (f.workload) cfg.workload.kind = tamio::workload_kind_from(*f.workload);
    if (f.n) cfg.workload.n = *f.n;
    if (f.block_bytes) cfg.workload.block_bytes = *f.block_bytes;
    if (f.vars) cfg.workload.vars = *f.vars;
    if (f.px) cfg.workload.px = *f.px;
    if (f.py) cfg.workload.py = *f.py;
    if (f.pz) cfg.workload.pz = *f.pz;
    if (f.path) cfg.workload.path = *f.path;
    if (f.procs) cfg.procs = *f.procs;
    if (f.nodes) cfg.nodes = *f.nodes;
    if (f.procs_per_node) cfg.procs_per_node = *f.procs_per_node;
    if (f.c) cfg.aggs_per_node = *f.c;
    if (f.p_l) cfg.p_l = *f.p_l;
    if (f.p_g) cfg.p_g = *f.p_g;
    if (f.stripe_count) cfg.stripe_count = *f.stripe_count;
    if (f.stripe_size) cfg.stripe_size = *f.stripe_size;
    if (f.stripes_per_round) cfg.stripes_per_round = *f.stripes_per_round;
    if (f.global_pick) cfg.global_pick = *f.global_pick;
    if (f.global_policy)
        cfg.policy = *f.global_policy == "round_robin" ? tamio::GlobalPolicy::RoundRobinAcrossNodes
                     : *f.global_policy == "spread_even"
                         ? tamio::GlobalPolicy::SpreadEven
                         : throw tamio::config_error("global_policy: unknown value");
    if (f.overlap_policy)
        cfg.overlap = *f.overlap_policy == "strict" ? tamio::OverlapPolicy::Strict
                      : *f.overlap_policy == "last_writer"
                          ? tamio::OverlapPolicy::LastWriter
                          : throw tamio::config_error("overlap_policy: unknown value");
    if (f.method) cfg.method = tamio::method_from(*f.method);
    if (f.seed) cfg.seed = *f.seed;
    if (f.verify_opt && f.verify_opt->count() > 0) cfg.verify = f.verify_value;
    if (f.out) cfg.out_path = *f.out;
    if (f.csv) cfg.csv_path = *f.csv;
    if (f.trace) cfg.trace_path = *f.trace;
    if (f.dump) cfg.dump_path = *f.dump;
    return cfg;
}

void print_run_summary(const nlohmann::json& document) {
    for (const auto& report : document["runs"]) {
        const auto& m = report["metrics"];
        const auto& v = report["verification"];
        std::string verdict = "not verified";
        if (v["performed"].get<bool>())
            verdict = v["equal"].get<bool>() ? "verified" : "MISMATCH";
        std::cout << report["method"].get<std::string>() << ": P=" << m["p"]
                  << " P_L=" << m["p_l"] << " P_G=" << m["p_g"]
                  << " inter_senders_max=" << m["inter"]["senders_per_aggregator_max"]
                  << " rounds=" << m["io"]["rounds"] << " bytes=" << m["io"]["bytes_written"]
                  << " [" << verdict << "]\n";
    }
}

int cmd_run(const Flags& flags) {
    const tamio::RunConfig cfg = build_config(flags);
    const tamio::RunOutcome outcome = tamio::run_experiment(cfg);
    print_run_summary(outcome.document);
    if (cfg.out_path.empty() && cfg.csv_path.empty())
        std::cout << outcome.document.dump(1) << '\n';
    return outcome.exit_code;
}

std::string suffixed(const std::string& path, int c) {
    if (path.empty()) return path;
    return path + ".c" + std::to_string(c);
}

int cmd_sweep(const Flags& flags, const std::vector<int>& sweep_c) {
    if (sweep_c.empty())
        throw tamio::config_error("sweep: --sweep-c requires at least one value");
    tamio::RunConfig base = build_config(flags);

    nlohmann::json sweep_doc = nlohmann::json::array();
    int exit_code = 0;
    for (int c : sweep_c) {
        tamio::RunConfig cfg = base;
        cfg.aggs_per_node = c;
        cfg.p_l = 0;
        cfg.out_path.clear();  // one combined document at the end
        cfg.trace_path = suffixed(base.trace_path, c);
        cfg.dump_path = suffixed(base.dump_path, c);
        const tamio::RunOutcome outcome = tamio::run_experiment(cfg);
        std::cout << "c=" << c << '\n';
        print_run_summary(outcome.document);
        sweep_doc.push_back({{"c", c}, {"runs", outcome.document["runs"]}});
        exit_code = std::max(exit_code, outcome.exit_code);
    }
    if (!base.out_path.empty()) {
        std::ofstream out(base.out_path, std::ios::trunc);
        if (!out) throw tamio::config_error("out: cannot open " + base.out_path);
        out << nlohmann::json{{"sweep", sweep_doc}}.dump(1) << '\n';
    }
    return exit_code;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& csv_path) {
    std::ofstream csv;
    if (!csv_path.empty()) {
        csv.open(csv_path, std::ios::trunc);
        if (!csv) throw tamio::config_error("csv: cannot open " + csv_path);
        csv << tamio::csv_header() << '\n';
    }
    for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in) throw tamio::config_error("report: cannot open " + path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw tamio::config_error("report: malformed JSON in " + path + ": " + e.what());
        }
        std::vector<nlohmann::json> run_lists;
        if (doc.contains("runs")) run_lists.push_back(doc["runs"]);
        if (doc.contains("sweep"))
            for (const auto& entry : doc["sweep"]) run_lists.push_back(entry["runs"]);
        for (const auto& runs : run_lists) {
            for (const auto& report : runs) {
                if (!csv_path.empty()) csv << tamio::csv_row(report) << '\n';
            }
            print_run_summary({{"runs", runs}});
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collective-write aggregation simulator"};
    app.require_subcommand(1);

    Flags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "execute one configuration and verify it");
    add_common_flags(run_cmd, run_flags);

    Flags sweep_flags;
    std::vector<int> sweep_c;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "run a configuration over several local-aggregator counts");
    add_common_flags(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--sweep-c", sweep_c, "local-aggs-per-node values")
        ->delimiter(',')
        ->required();

    std::vector<std::string> report_inputs;
    std::string report_csv;
    CLI::App* report_cmd =
        app.add_subcommand("report", "summarize report JSON files, optionally to CSV");
    report_cmd->add_option("inputs", report_inputs, "report JSON files")->required();
    report_cmd->add_option("--csv", report_csv, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_flags);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, sweep_c);
        if (report_cmd->parsed()) return cmd_report(report_inputs, report_csv);
    } catch (const tamio::config_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const tamio::overlap_error& e) {
        std::cerr << "overlap: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
