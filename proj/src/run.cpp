#include "tamio/run.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tamio/error.hpp"
#include "tamio/oracle.hpp"

namespace tamio {

namespace {

const char* to_string_kind(WorkloadKind k) { return to_string(k); }

GlobalPolicy policy_from(const std::string& name) {
    if (name == "spread_even") return GlobalPolicy::SpreadEven;
    if (name == "round_robin") return GlobalPolicy::RoundRobinAcrossNodes;
    throw config_error("global_policy: unknown value '" + name + "'");
}

OverlapPolicy overlap_from(const std::string& name) {
    if (name == "strict") return OverlapPolicy::Strict;
    if (name == "last_writer") return OverlapPolicy::LastWriter;
    throw config_error("overlap_policy: unknown value '" + name + "'");
}

}  // namespace

Method method_from(const std::string& name) {
    if (name == "tam") return Method::Tam;
    if (name == "two_phase") return Method::TwoPhase;
    if (name == "both") return Method::Both;
    throw config_error("method: unknown value '" + name + "'");
}

const char* to_string(Method m) {
    switch (m) {
        case Method::Tam: return "tam";
        case Method::TwoPhase: return "two_phase";
        case Method::Both: return "both";
    }
    return "?";
}

const char* to_string(GlobalPolicy p) {
    return p == GlobalPolicy::SpreadEven ? "spread_even" : "round_robin";
}

const char* to_string(OverlapPolicy p) {
    return p == OverlapPolicy::Strict ? "strict" : "last_writer";
}

ResolvedConfig resolve(const RunConfig& cfg) {
    std::vector<std::string> errors;
    auto fail = [&](const std::string& msg) { errors.push_back(msg); };

    int nodes = cfg.nodes;
    if (nodes < 1) fail("nodes: must be >= 1");

    int q = cfg.procs_per_node;
    if (q == 0) {
        if (cfg.procs <= 0)
            fail("procs/procs_per_node: one of them is required");
        else if (nodes >= 1 && cfg.procs % nodes != 0)
            fail("procs: not divisible by nodes");
        else if (nodes >= 1)
            q = cfg.procs / nodes;
    } else if (q < 1) {
        fail("procs_per_node: must be >= 1");
    } else if (cfg.procs > 0 && cfg.procs != nodes * q) {
        fail("procs: inconsistent with nodes * procs_per_node");
    }

    int c = cfg.aggs_per_node;
    if (cfg.p_l > 0) {
        if (nodes >= 1 && cfg.p_l % nodes != 0)
            fail("p_l: must be a multiple of nodes");
        else if (nodes >= 1)
            c = cfg.p_l / nodes;
    }
    if (q >= 1 && (c < 1 || c > q)) fail("local_aggs_per_node: need 1 <= c <= procs_per_node");

    int pg = cfg.p_g;
    int count = cfg.stripe_count;
    if (pg == 0 && count == 0) pg = count = nodes;  // one aggregator per node
    if (pg == 0) pg = count;
    if (count == 0) count = pg;
    if (pg != count)
        fail("global_aggs/stripe_count: must be equal (one-to-one aggregator-OST mapping)");
    if (pg < 1) fail("global_aggs: must be >= 1");
    if (q >= 1 && nodes >= 1 && pg > nodes * q) fail("global_aggs: exceeds total processes");

    if (cfg.stripe_size == 0) fail("stripe_size: must be > 0");
    if (cfg.stripes_per_round < 1) fail("stripes_per_round: must be >= 1");

    if (!errors.empty()) {
        std::string all;
        for (const auto& e : errors) {
            if (!all.empty()) all += "; ";
            all += e;
        }
        throw config_error(all);
    }
    ResolvedConfig out;
    out.topo = Topology(nodes, q);
    out.aggs_per_node = c;
    out.p_g = pg;
    out.stripe = StripeConfig(cfg.stripe_size, count);
    return out;
}

RunConfig config_from_json(const nlohmann::json& doc) {
    RunConfig cfg;
    if (doc.contains("workload")) {
        const auto& w = doc["workload"];
        if (w.contains("kind")) cfg.workload.kind = workload_kind_from(w["kind"].get<std::string>());
        if (w.contains("block_bytes")) cfg.workload.block_bytes = w["block_bytes"].get<std::uint64_t>();
        if (w.contains("n")) cfg.workload.n = w["n"].get<std::uint64_t>();
        if (w.contains("vars")) cfg.workload.vars = w["vars"].get<int>();
        if (w.contains("px")) cfg.workload.px = w["px"].get<int>();
        if (w.contains("py")) cfg.workload.py = w["py"].get<int>();
        if (w.contains("pz")) cfg.workload.pz = w["pz"].get<int>();
        if (w.contains("path")) cfg.workload.path = w["path"].get<std::string>();
    }
    if (doc.contains("nodes")) cfg.nodes = doc["nodes"].get<int>();
    if (doc.contains("procs_per_node")) cfg.procs_per_node = doc["procs_per_node"].get<int>();
    if (doc.contains("procs")) cfg.procs = doc["procs"].get<int>();
    if (doc.contains("local_aggs_per_node")) cfg.aggs_per_node = doc["local_aggs_per_node"].get<int>();
    if (doc.contains("p_l")) cfg.p_l = doc["p_l"].get<int>();
    if (doc.contains("global_aggs")) cfg.p_g = doc["global_aggs"].get<int>();
    if (doc.contains("stripe_size")) cfg.stripe_size = doc["stripe_size"].get<std::uint64_t>();
    if (doc.contains("stripe_count")) cfg.stripe_count = doc["stripe_count"].get<int>();
    if (doc.contains("stripes_per_round"))
        cfg.stripes_per_round = doc["stripes_per_round"].get<std::uint64_t>();
    if (doc.contains("global_pick")) cfg.global_pick = doc["global_pick"].get<int>();
    if (doc.contains("global_policy")) cfg.policy = policy_from(doc["global_policy"].get<std::string>());
    if (doc.contains("overlap_policy")) cfg.overlap = overlap_from(doc["overlap_policy"].get<std::string>());
    if (doc.contains("method")) cfg.method = method_from(doc["method"].get<std::string>());
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("verify")) cfg.verify = doc["verify"].get<bool>();
    if (doc.contains("out")) cfg.out_path = doc["out"].get<std::string>();
    if (doc.contains("csv")) cfg.csv_path = doc["csv"].get<std::string>();
    if (doc.contains("trace")) cfg.trace_path = doc["trace"].get<std::string>();
    if (doc.contains("dump")) cfg.dump_path = doc["dump"].get<std::string>();
    return cfg;
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    return {
        {"workload",
         {{"kind", to_string_kind(cfg.workload.kind)},
          {"block_bytes", cfg.workload.block_bytes},
          {"n", cfg.workload.n},
          {"vars", cfg.workload.vars},
          {"px", cfg.workload.px},
          {"py", cfg.workload.py},
          {"pz", cfg.workload.pz},
          {"path", cfg.workload.path}}},
        {"nodes", cfg.nodes},
        {"procs_per_node", cfg.procs_per_node},
        {"procs", cfg.procs},
        {"local_aggs_per_node", cfg.aggs_per_node},
        {"p_l", cfg.p_l},
        {"global_aggs", cfg.p_g},
        {"stripe_size", cfg.stripe_size},
        {"stripe_count", cfg.stripe_count},
        {"stripes_per_round", cfg.stripes_per_round},
        {"global_pick", cfg.global_pick},
        {"global_policy", to_string(cfg.policy)},
        {"overlap_policy", to_string(cfg.overlap)},
        {"method", to_string(cfg.method)},
        {"seed", cfg.seed},
        {"verify", cfg.verify},
    };
}

namespace {

std::string with_method_suffix(const std::string& path, const std::string& method, bool both) {
    if (!both) return path;
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || path.find('/', dot) != std::string::npos)
        return path + "." + method;
    return path.substr(0, dot) + "." + method + path.substr(dot);
}

nlohmann::json verification_json(const std::optional<Divergence>& div) {
    if (!div) return {{"performed", true}, {"equal", true}};
    nlohmann::json j{{"performed", true}, {"equal", false}, {"first_divergence_offset", div->offset}};
    j["byte_pipeline"] = div->byte_a ? nlohmann::json(*div->byte_a) : nlohmann::json(nullptr);
    j["byte_oracle"] = div->byte_b ? nlohmann::json(*div->byte_b) : nlohmann::json(nullptr);
    return j;
}

}  // namespace

RunOutcome run_experiment(const RunConfig& cfg) {
    const ResolvedConfig rc = resolve(cfg);
    const int p = rc.topo.total_procs();

    std::vector<ProcRequest> procs = generate(cfg.workload, p);

    std::optional<SimFile> oracle;
    if (cfg.verify) oracle = serial_oracle(procs, cfg.overlap);

    PipelineOptions opts{cfg.overlap, cfg.stripes_per_round};

    std::vector<std::pair<std::string, PipelineResult>> runs;
    const bool both = cfg.method == Method::Both;
    if (cfg.method == Method::Tam || both) {
        AggregatorLayout layout =
            build_layout(rc.topo, rc.aggs_per_node, rc.p_g, cfg.policy, cfg.global_pick);
        runs.emplace_back("tam", run_tam(procs, rc.topo, layout, rc.stripe, opts));
    }
    if (cfg.method == Method::TwoPhase || both) {
        runs.emplace_back("two_phase", run_two_phase(procs, rc.topo, rc.stripe, rc.p_g,
                                                     cfg.policy, cfg.global_pick, opts));
    }

    RunOutcome outcome;
    nlohmann::json reports = nlohmann::json::array();
    for (auto& [method, result] : runs) {
        nlohmann::json report;
        report["config"] = config_to_json(cfg);
        report["config"]["procs"] = p;
        report["config"]["procs_per_node"] = rc.topo.procs_per_node;
        report["config"]["local_aggs_per_node"] = rc.aggs_per_node;
        report["config"]["global_aggs"] = rc.p_g;
        report["config"]["stripe_count"] = rc.stripe.stripe_count;
        report["method"] = method;
        report["metrics"] = result.metrics.to_json();
        report["checks"] = to_json(check(result.metrics));
        if (cfg.verify) {
            const auto div = compare(result.file, *oracle);
            report["verification"] = verification_json(div);
            if (div) {
                outcome.all_verified = false;
                outcome.exit_code = 1;
            }
        } else {
            report["verification"] = {{"performed", false}};
        }

        if (!cfg.trace_path.empty())
            write_trace_jsonl(with_method_suffix(cfg.trace_path, method, both), result.trace);
        if (!cfg.dump_path.empty())
            result.file.dump(with_method_suffix(cfg.dump_path, method, both));
        reports.push_back(std::move(report));
    }
    outcome.document = {{"runs", std::move(reports)}};

    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path, std::ios::trunc);
        if (!out) throw config_error("out: cannot open " + cfg.out_path);
        out << outcome.document.dump(1) << '\n';
    }
    if (!cfg.csv_path.empty()) {
        const bool fresh = !std::filesystem::exists(cfg.csv_path) ||
                           std::filesystem::file_size(cfg.csv_path) == 0;
        std::ofstream out(cfg.csv_path, std::ios::app);
        if (!out) throw config_error("csv: cannot open " + cfg.csv_path);
        if (fresh) out << csv_header() << '\n';
        for (const auto& report : outcome.document["runs"]) out << csv_row(report) << '\n';
    }
    return outcome;
}

namespace {

constexpr const char* kCsvColumns[] = {
    "method", "workload", "p", "nodes", "procs_per_node", "c", "p_l", "p_g", "stripe_size",
    "stripes_per_round", "total_extents", "total_bytes", "k_mean",
    "intra_remote_metadata_msgs", "intra_remote_data_msgs", "intra_self_metadata_msgs",
    "intra_self_data_msgs", "intra_metadata_bytes", "intra_remote_data_bytes",
    "intra_self_data_bytes", "intra_merge_comparisons", "intra_coalesce_in",
    "intra_coalesce_out", "intra_senders_max", "intra_senders_mean",
    "inter_remote_metadata_msgs", "inter_self_metadata_msgs", "inter_metadata_potential",
    "inter_remote_data_msgs", "inter_self_data_msgs", "inter_metadata_bytes",
    "inter_remote_data_bytes", "inter_self_data_bytes", "inter_merge_comparisons",
    "inter_coalesce_in", "inter_coalesce_out", "inter_senders_max", "inter_senders_mean",
    "rounds", "bytes_written", "max_round_bytes", "max_pending_sends", "verified",
};

}  // namespace

std::string csv_header() {
    std::string out;
    for (const char* col : kCsvColumns) {
        if (!out.empty()) out += ',';
        out += col;
    }
    return out;
}

std::string csv_row(const nlohmann::json& report) {
    const auto& m = report["metrics"];
    const auto& intra = m["intra"];
    const auto& inter = m["inter"];
    const auto& io = m["io"];
    const auto& cfgj = report["config"];

    std::ostringstream row;
    auto put = [&row, first = true](const auto& v) mutable {
        if (!first) row << ',';
        first = false;
        row << v;
    };
    put(report["method"].get<std::string>());
    put(cfgj["workload"]["kind"].get<std::string>());
    put(m["p"].get<std::uint64_t>());
    put(cfgj["nodes"].get<int>());
    put(cfgj["procs_per_node"].get<int>());
    put(cfgj["local_aggs_per_node"].get<int>());
    put(m["p_l"].get<std::uint64_t>());
    put(m["p_g"].get<std::uint64_t>());
    put(cfgj["stripe_size"].get<std::uint64_t>());
    put(cfgj["stripes_per_round"].get<std::uint64_t>());
    put(m["total_extents_in"].get<std::uint64_t>());
    put(m["total_bytes_in"].get<std::uint64_t>());
    put(m["k_mean_extents_per_proc"].get<double>());
    put(intra["remote_metadata_msgs"].get<std::uint64_t>());
    put(intra["remote_data_msgs"].get<std::uint64_t>());
    put(intra["self_metadata_msgs"].get<std::uint64_t>());
    put(intra["self_data_msgs"].get<std::uint64_t>());
    put(intra["metadata_bytes"].get<std::uint64_t>());
    put(intra["remote_data_bytes"].get<std::uint64_t>());
    put(intra["self_data_bytes"].get<std::uint64_t>());
    put(intra["merge_comparisons"].get<std::uint64_t>());
    put(intra["coalesce_extents_in"].get<std::uint64_t>());
    put(intra["coalesce_extents_out"].get<std::uint64_t>());
    put(intra["senders_per_aggregator_max"].get<std::uint64_t>());
    put(intra["senders_per_aggregator_mean"].get<double>());
    put(inter["remote_metadata_msgs"].get<std::uint64_t>());
    put(inter["self_metadata_msgs"].get<std::uint64_t>());
    put(m["inter_metadata_potential"].get<std::uint64_t>());
    put(inter["remote_data_msgs"].get<std::uint64_t>());
    put(inter["self_data_msgs"].get<std::uint64_t>());
    put(inter["metadata_bytes"].get<std::uint64_t>());
    put(inter["remote_data_bytes"].get<std::uint64_t>());
    put(inter["self_data_bytes"].get<std::uint64_t>());
    put(inter["merge_comparisons"].get<std::uint64_t>());
    put(inter["coalesce_extents_in"].get<std::uint64_t>());
    put(inter["coalesce_extents_out"].get<std::uint64_t>());
    put(inter["senders_per_aggregator_max"].get<std::uint64_t>());
    put(inter["senders_per_aggregator_mean"].get<double>());
    put(io["rounds"].get<std::uint64_t>());
    put(io["bytes_written"].get<std::uint64_t>());
    put(io["max_round_bytes"].get<std::uint64_t>());
    put(m["max_pending_sends"].get<std::uint64_t>());
    put(report["verification"].contains("equal")
            ? (report["verification"]["equal"].get<bool>() ? "true" : "false")
            : "skipped");
    return row.str();
}

}  // namespace tamio
