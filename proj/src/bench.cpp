#include "mmr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mmr/errors.hpp"
#include "mmr/rng.hpp"

namespace mmr {

namespace {

constexpr double kWidthRelTol = 1e-9;

std::vector<BenchRecord> run_instance(const RandomNetConfig& cfg, int id,
                                      const std::vector<std::string>& methods) {
    const std::uint64_t net_seed = cfg.base_seed + static_cast<std::uint64_t>(id);
    const std::uint64_t box_seed = derive_seed(net_seed, 1);

    std::vector<BenchRecord> out;
    Network net;
    IntervalVector box;
    try {
        net = random_network(cfg, net_seed);
        box = random_input_box(net, box_seed, cfg.eps);
    } catch (const Error& e) {
        for (const std::string& m : methods) {
            BenchRecord rec;
            rec.network_id = id;
            rec.seed = net_seed;
            rec.method = m;
            rec.ok = false;
            rec.error = e.what();
            out.push_back(std::move(rec));
        }
        return out;
    }

    for (const std::string& m : methods) {
        BenchRecord rec;
        rec.network_id = id;
        rec.seed = net_seed;
        rec.depth = net.depth();
        rec.input_dim = net.input_dim();
        rec.output_dim = net.output_dim();
        rec.total_neurons = net.total_neurons();
        rec.method = m;
        try {
            ReachResult res;
            if (m == "mm") {
                res = algorithm1(net, box);
            } else if (m == "ibp") {
                res = ibp(net, box);
            } else {
                throw ConfigError("unknown method '" + m + "'");
            }
            rec.width = iv_width_2norm(res.output());
            rec.elapsed_s = res.elapsed_s;
            rec.elapsed_per_neuron_s = res.elapsed_s / rec.total_neurons;
        } catch (const Error& e) {
            rec.ok = false;
            rec.error = e.what();
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

std::vector<BenchRecord> run_suite(const RandomNetConfig& cfg,
                                   const std::vector<std::string>& methods, int threads) {
    if (methods.empty()) throw ConfigError("run_suite: no methods given");
    cfg.validate();
    for (const std::string& m : methods) {
        if (m != "mm" && m != "ibp") throw ConfigError("run_suite: unknown method '" + m + "'");
    }

    std::vector<std::vector<BenchRecord>> per_instance(static_cast<std::size_t>(cfg.count));
    if (threads > 1 && cfg.count > 1) {
        std::atomic<int> next{0};
        const int T = std::min(threads, cfg.count);
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t) {
            workers.emplace_back([&]() {
                for (int id = next.fetch_add(1); id < cfg.count; id = next.fetch_add(1)) {
                    per_instance[static_cast<std::size_t>(id)] = run_instance(cfg, id, methods);
                }
            });
        }
        for (std::thread& w : workers) w.join();
    } else {
        for (int id = 0; id < cfg.count; ++id) {
            per_instance[static_cast<std::size_t>(id)] = run_instance(cfg, id, methods);
        }
    }

    // Merge in instance order so output files are deterministic.
    std::vector<BenchRecord> records;
    records.reserve(static_cast<std::size_t>(cfg.count) * methods.size());
    for (auto& group : per_instance) {
        for (auto& rec : group) records.push_back(std::move(rec));
    }
    return records;
}

ComparisonSummary summarize(const std::vector<BenchRecord>& records) {
    // Index successful widths by (method, network_id).
    std::map<std::string, std::map<int, double>> widths;
    std::map<std::string, double> time_sum;
    std::map<std::string, int> time_count;
    ComparisonSummary summary;

    for (const BenchRecord& rec : records) {
        summary.record_counts[rec.method] += 1;
        if (!rec.ok) continue;
        widths[rec.method][rec.network_id] = rec.width;
        time_sum[rec.method] += rec.elapsed_per_neuron_s;
        time_count[rec.method] += 1;
    }
    if (widths.size() < 2) {
        throw MissingPairs("summarize: need records from at least two methods");
    }
    for (const auto& [m, s] : time_sum) {
        summary.mean_time_per_neuron_s[m] = s / time_count[m];
    }

    for (const auto& [ma, wa] : widths) {
        for (const auto& [mb, wb] : widths) {
            if (ma == mb) continue;
            MethodPairStats stats;
            int tighter_or_equal = 0;
            int strictly = 0;
            for (const auto& [id, width_a] : wa) {
                auto it = wb.find(id);
                if (it == wb.end()) continue;
                const double width_b = it->second;
                const double tol = kWidthRelTol * std::max(1.0, std::max(width_a, width_b));
                stats.pairs += 1;
                if (width_a <= width_b + tol) tighter_or_equal += 1;
                if (width_a < width_b - tol) strictly += 1;
            }
            if (stats.pairs == 0) {
                throw MissingPairs("summarize: methods '" + ma + "' and '" + mb +
                                   "' share no network ids");
            }
            stats.tighter_or_equal = static_cast<double>(tighter_or_equal) / stats.pairs;
            stats.strictly_tighter = static_cast<double>(strictly) / stats.pairs;
            summary.pairs[{ma, mb}] = stats;
        }
    }
    return summary;
}

std::string records_to_csv(const std::vector<BenchRecord>& records) {
    std::ostringstream os;
    os.precision(17);
    os << "network_id,seed,depth,input_dim,output_dim,total_neurons,method,status,width,"
          "elapsed_s,elapsed_per_neuron_s,error\n";
    for (const BenchRecord& rec : records) {
        os << rec.network_id << ',' << rec.seed << ',' << rec.depth << ',' << rec.input_dim
           << ',' << rec.output_dim << ',' << rec.total_neurons << ',' << rec.method << ','
           << (rec.ok ? "ok" : "error") << ',';
        if (rec.ok) os << rec.width;
        os << ',' << rec.elapsed_s << ',' << rec.elapsed_per_neuron_s << ',';
        if (!rec.ok) {
            std::string msg = rec.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            os << '"' << msg << '"';
        }
        os << '\n';
    }
    return os.str();
}

std::string summary_to_json(const ComparisonSummary& summary, const RandomNetConfig& cfg) {
    nlohmann::json doc;
    doc["config"] = {
        {"preset", cfg.preset},
        {"depth", {cfg.depth.lo, cfg.depth.hi}},
        {"input_dim", {cfg.input_dim.lo, cfg.input_dim.hi}},
        {"output_dim", {cfg.output_dim.lo, cfg.output_dim.hi}},
        {"hidden_width", {cfg.hidden_width.lo, cfg.hidden_width.hi}},
        {"activation", cfg.activation},
        {"eps", cfg.eps},
        {"count", cfg.count},
        {"base_seed", cfg.base_seed},
        {"prng", kPrngId},
    };
    doc["comparisons"] = nlohmann::json::array();
    for (const auto& [key, stats] : summary.pairs) {
        doc["comparisons"].push_back({
            {"method_a", key.first},
            {"method_b", key.second},
            {"pairs", stats.pairs},
            {"tighter_or_equal", stats.tighter_or_equal},
            {"strictly_tighter", stats.strictly_tighter},
        });
    }
    doc["mean_time_per_neuron_s"] = summary.mean_time_per_neuron_s;
    doc["record_counts"] = summary.record_counts;
    return doc.dump(2) + "\n";
}

}  // namespace mmr
