#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmr/bench.hpp"
#include "mmr/errors.hpp"
#include "mmr/network.hpp"
#include "mmr/reach.hpp"
#include "mmr/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitEngineError = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mmr::SchemaError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mmr::ConfigError("cannot write '" + path + "'");
    out << content;
}

mmr::IntRange parse_range(const std::string& s) {
    const auto colon = s.find(':');
    mmr::IntRange r;
    if (colon == std::string::npos) {
        r.lo = r.hi = std::stoi(s);
    } else {
        r.lo = std::stoi(s.substr(0, colon));
        r.hi = std::stoi(s.substr(colon + 1));
    }
    return r;
}

json box_to_json(const mmr::IntervalVector& box) {
    json lo = json::array(), hi = json::array();
    for (const mmr::Interval& iv : box) {
        lo.push_back(iv.lo);
        hi.push_back(iv.hi);
    }
    return json{{"lo", lo}, {"hi", hi}};
}

json result_to_json(const mmr::ReachResult& res) {
    json j;
    j["method"] = res.method;
    j["final_box"] = box_to_json(res.output());
    j["per_layer"] = json::array();
    for (const auto& layer_box : res.per_layer) j["per_layer"].push_back(box_to_json(layer_box));
    j["width_2norm"] = mmr::iv_width_2norm(res.output());
    j["eval_count"] = res.eval_count;
    j["pair_count"] = res.pair_count;
    j["elapsed_s"] = res.elapsed_s;
    if (!res.per_pair.empty()) {
        json pp = json::array();
        for (const auto& [key, pbox] : res.per_pair) {
            pp.push_back(json{{"k", key.first}, {"l", key.second}, {"box", box_to_json(pbox)}});
        }
        j["per_pair"] = pp;
    }
    return j;
}

std::string results_to_csv(const std::vector<mmr::ReachResult>& results) {
    std::ostringstream os;
    os.precision(17);
    os << "method,coordinate,lo,hi,width\n";
    for (const auto& res : results) {
        const auto& out = res.output();
        for (std::size_t i = 0; i < out.size(); ++i) {
            os << res.method << ',' << i << ',' << out[i].lo << ',' << out[i].hi << ','
               << out[i].width() << '\n';
        }
    }
    return os.str();
}

struct ReachArgs {
    std::string network_path;
    std::string box_path;
    std::string method = "mm";
    std::string out_path;
    std::string format = "structured";
    double eps = -1.0;  // < 0: keep the box file's radius
    bool keep_partial = false;
    bool parallel = false;
};

int run_reach(const ReachArgs& args) {
    const mmr::Network net = mmr::parse_network(read_file(args.network_path));
    mmr::IntervalVector box = mmr::parse_box(read_file(args.box_path));
    if (args.eps >= 0.0) {
        for (mmr::Interval& iv : box) {
            const double c = iv.mid();
            iv = mmr::Interval(c - args.eps, c + args.eps);
        }
    }

    mmr::ReachOptions opts;
    opts.keep_partial = args.keep_partial;
    opts.parallel = args.parallel;

    std::vector<mmr::ReachResult> results;
    if (args.method == "mm" || args.method == "both") {
        results.push_back(mmr::algorithm1(net, box, opts));
    }
    if (args.method == "ibp" || args.method == "both") {
        results.push_back(mmr::ibp(net, box));
    }

    if (args.format == "csv") {
        write_output(args.out_path, results_to_csv(results));
        return kExitOk;
    }
    json report;
    report["network"] = args.network_path;
    report["input_box"] = box_to_json(box);
    report["results"] = json::array();
    for (const auto& res : results) report["results"].push_back(result_to_json(res));
    if (results.size() == 2) {
        // Per-coordinate width ratio, first method over second.
        json ratios = json::array();
        const auto& a = results[0].output();
        const auto& b = results[1].output();
        for (std::size_t i = 0; i < a.size(); ++i) {
            ratios.push_back(b[i].width() > 0.0 ? a[i].width() / b[i].width()
                                                : (a[i].width() > 0.0 ? 1e300 : 1.0));
        }
        report["width_ratio"] = ratios;
    }
    write_output(args.out_path, report.dump(2) + "\n");
    return kExitOk;
}

struct GenArgs {
    std::string preset;
    std::string depth, input_dim, output_dim, hidden;
    std::string activation = "relu";
    double eps = 0.1;
    std::uint64_t seed = 0;
    int count = 1;
    std::string outdir = ".";
    bool hex = false;
};

mmr::RandomNetConfig config_from_flags(const std::string& preset, const std::string& depth,
                                       const std::string& input_dim,
                                       const std::string& output_dim, const std::string& hidden,
                                       const std::string& activation, double eps, int count,
                                       std::uint64_t seed) {
    mmr::RandomNetConfig cfg;
    if (preset == "small") {
        cfg = mmr::RandomNetConfig::small_preset();
    } else if (preset == "large") {
        cfg = mmr::RandomNetConfig::large_preset();
    } else if (!preset.empty()) {
        throw mmr::ConfigError("unknown preset '" + preset + "'");
    }
    if (!depth.empty()) cfg.depth = parse_range(depth);
    if (!input_dim.empty()) cfg.input_dim = parse_range(input_dim);
    if (!output_dim.empty()) cfg.output_dim = parse_range(output_dim);
    if (!hidden.empty()) cfg.hidden_width = parse_range(hidden);
    if (!preset.empty() && (!depth.empty() || !input_dim.empty() || !output_dim.empty() ||
                            !hidden.empty())) {
        cfg.preset = "custom";
    }
    if (preset.empty()) cfg.preset = "custom";
    cfg.activation = activation;
    cfg.eps = eps;
    cfg.count = count;
    cfg.base_seed = seed;
    cfg.validate();
    return cfg;
}

int run_gen(const GenArgs& args) {
    mmr::RandomNetConfig cfg =
        config_from_flags(args.preset, args.depth, args.input_dim, args.output_dim, args.hidden,
                          args.activation, args.eps, args.count, args.seed);
    fs::create_directories(args.outdir);
    const mmr::WeightEncoding enc =
        args.hex ? mmr::WeightEncoding::Hex : mmr::WeightEncoding::Decimal;
    for (int i = 0; i < args.count; ++i) {
        const std::uint64_t net_seed = cfg.base_seed + static_cast<std::uint64_t>(i);
        const mmr::Network net = mmr::random_network(cfg, net_seed);
        const mmr::IntervalVector box =
            mmr::random_input_box(net, mmr::derive_seed(net_seed, 1), cfg.eps);
        char name[64];
        std::snprintf(name, sizeof(name), "net_%04d.json", i);
        write_output((fs::path(args.outdir) / name).string(), mmr::serialize_network(net, enc));
        std::snprintf(name, sizeof(name), "box_%04d.json", i);
        write_output((fs::path(args.outdir) / name).string(), mmr::serialize_box(box));
    }
    return kExitOk;
}

struct BenchArgs {
    std::string preset;
    std::string depth, input_dim, output_dim, hidden;
    std::string activation = "relu";
    std::string methods = "mm,ibp";
    double eps = 0.1;
    std::uint64_t seed = 0;
    int count = 100;
    int threads = 1;
    std::string out_prefix;
};

int run_bench(const BenchArgs& args) {
    mmr::RandomNetConfig cfg =
        config_from_flags(args.preset, args.depth, args.input_dim, args.output_dim, args.hidden,
                          args.activation, args.eps, args.count, args.seed);

    std::vector<std::string> methods;
    std::stringstream ss(args.methods);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) methods.push_back(token);
    }

    const std::vector<mmr::BenchRecord> records = mmr::run_suite(cfg, methods, args.threads);
    const mmr::ComparisonSummary summary = mmr::summarize(records);

    if (!args.out_prefix.empty()) {
        write_output(args.out_prefix + ".csv", mmr::records_to_csv(records));
        write_output(args.out_prefix + "_summary.json", mmr::summary_to_json(summary, cfg));
    }
    for (const auto& [key, stats] : summary.pairs) {
        std::printf("%s vs %s: tighter-or-equal %.4f, strictly tighter %.4f (%d pairs)\n",
                    key.first.c_str(), key.second.c_str(), stats.tighter_or_equal,
                    stats.strictly_tighter, stats.pairs);
    }
    for (const auto& [m, t] : summary.mean_time_per_neuron_s) {
        std::printf("%s: mean time per neuron %.3g s\n", m.c_str(), t);
    }
    return kExitOk;
}

struct EvalArgs {
    std::string network_path;
    std::string point;       // comma-separated values
    std::string input_path;  // JSON array file
    int from = 1;
    int to = -1;
};

int run_eval(const EvalArgs& args) {
    const mmr::Network net = mmr::parse_network(read_file(args.network_path));
    Eigen::VectorXd x;
    if (!args.point.empty()) {
        std::vector<double> vals;
        std::stringstream ss(args.point);
        std::string token;
        while (std::getline(ss, token, ',')) vals.push_back(std::stod(token));
        x = Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                              static_cast<Eigen::Index>(vals.size()));
    } else if (!args.input_path.empty()) {
        json doc = json::parse(read_file(args.input_path));
        if (!doc.is_array()) throw mmr::SchemaError("input file: expected a JSON array");
        x.resize(static_cast<Eigen::Index>(doc.size()));
        for (std::size_t i = 0; i < doc.size(); ++i) x(static_cast<Eigen::Index>(i)) = doc[i];
    } else {
        throw mmr::ConfigError("eval: provide --point or --input");
    }
    const int to = args.to < 0 ? net.depth() : args.to;
    const Eigen::VectorXd y = mmr::forward(net, mmr::PartialRef{args.from, to}, x);
    json out = json::array();
    for (Eigen::Index i = 0; i < y.size(); ++i) out.push_back(y(i));
    std::cout << out.dump() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval reachability analysis of feedforward neural networks via "
                 "mixed monotonicity"};
    app.require_subcommand(1);

    ReachArgs reach_args;
    auto add_reach_flags = [&](CLI::App* cmd) {
        cmd->add_option("--network", reach_args.network_path, "network document")->required();
        cmd->add_option("--box", reach_args.box_path, "input box document")->required();
        cmd->add_option("--eps", reach_args.eps, "override the box radius around its center");
        cmd->add_option("--out", reach_args.out_path, "report path (default stdout)");
        cmd->add_option("--format", reach_args.format, "csv|structured")
            ->check(CLI::IsMember({"csv", "structured"}));
    };
    CLI::App* reach_cmd = app.add_subcommand("reach", "compute output bounds");
    add_reach_flags(reach_cmd);
    reach_cmd->add_option("--method", reach_args.method, "mm|ibp|both")
        ->check(CLI::IsMember({"mm", "ibp", "both"}));
    reach_cmd->add_flag("--keep-partial", reach_args.keep_partial,
                        "retain per-partial-network boxes in the report");
    reach_cmd->add_flag("--parallel", reach_args.parallel, "parallelize the inner loop");

    CLI::App* ibp_cmd = app.add_subcommand("ibp", "interval bound propagation only");
    add_reach_flags(ibp_cmd);

    GenArgs gen_args;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate random networks and input boxes");
    gen_cmd->add_option("--preset", gen_args.preset, "small|large");
    gen_cmd->add_option("--depth", gen_args.depth, "layer count range lo:hi");
    gen_cmd->add_option("--input-dim", gen_args.input_dim, "input dimension range lo:hi");
    gen_cmd->add_option("--output-dim", gen_args.output_dim, "output dimension range lo:hi");
    gen_cmd->add_option("--hidden", gen_args.hidden, "hidden width range lo:hi");
    gen_cmd->add_option("--activation", gen_args.activation, "activation name");
    gen_cmd->add_option("--eps", gen_args.eps, "input box half-width");
    gen_cmd->add_option("--seed", gen_args.seed, "base seed");
    gen_cmd->add_option("--count", gen_args.count, "number of instances");
    gen_cmd->add_option("--out", gen_args.outdir, "output directory")->required();
    gen_cmd->add_flag("--hex", gen_args.hex, "hex-encode weights (bit-exact)");

    BenchArgs bench_args;
    CLI::App* bench_cmd = app.add_subcommand("bench", "run a benchmark suite");
    bench_cmd->add_option("--preset", bench_args.preset, "small|large");
    bench_cmd->add_option("--depth", bench_args.depth, "layer count range lo:hi");
    bench_cmd->add_option("--input-dim", bench_args.input_dim, "input dimension range lo:hi");
    bench_cmd->add_option("--output-dim", bench_args.output_dim, "output dimension range lo:hi");
    bench_cmd->add_option("--hidden", bench_args.hidden, "hidden width range lo:hi");
    bench_cmd->add_option("--activation", bench_args.activation, "activation name");
    bench_cmd->add_option("--methods", bench_args.methods, "comma list of mm,ibp");
    bench_cmd->add_option("--eps", bench_args.eps, "input box half-width");
    bench_cmd->add_option("--seed", bench_args.seed, "base seed");
    bench_cmd->add_option("--count", bench_args.count, "number of instances");
    bench_cmd->add_option("--threads", bench_args.threads, "worker threads");
    bench_cmd->add_option("--out", bench_args.out_prefix,
                          "output prefix (writes <prefix>.csv and <prefix>_summary.json)");

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate the network at a point");
    eval_cmd->add_option("--network", eval_args.network_path, "network document")->required();
    eval_cmd->add_option("--point", eval_args.point, "comma-separated input values");
    eval_cmd->add_option("--input", eval_args.input_path, "JSON array file");
    eval_cmd->add_option("--from", eval_args.from, "first layer of the partial network");
    eval_cmd->add_option("--to", eval_args.to, "last layer of the partial network");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (reach_cmd->parsed()) return run_reach(reach_args);
        if (ibp_cmd->parsed()) {
            reach_args.method = "ibp";
            return run_reach(reach_args);
        }
        if (gen_cmd->parsed()) return run_gen(gen_args);
        if (bench_cmd->parsed()) return run_bench(bench_args);
        if (eval_cmd->parsed()) return run_eval(eval_args);
    } catch (const mmr::EmptyIntersection& e) {
        std::cerr << "engine error: " << e.what() << "\n";
        return kExitEngineError;
    } catch (const mmr::MissingPairs& e) {
        std::cerr << "engine error: " << e.what() << "\n";
        return kExitEngineError;
    } catch (const mmr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
