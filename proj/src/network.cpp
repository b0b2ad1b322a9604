#include "mmr/network.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include <json.hpp>

#include "mmr/errors.hpp"
#include "mmr/rng.hpp"

namespace mmr {

using nlohmann::json;

int Network::total_neurons() const {
    int n = 0;
    for (const Layer& layer : layers) n += static_cast<int>(layer.W.rows());
    return n;
}

void Network::validate() const {
    if (layers.empty()) throw ShapeMismatch("network has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& layer = layers[i];
        if (layer.W.rows() == 0 || layer.W.cols() == 0) {
            throw ShapeMismatch("layer " + std::to_string(i + 1) + " has empty weight matrix");
        }
        if (layer.b.size() != layer.W.rows()) {
            throw ShapeMismatch("layer " + std::to_string(i + 1) + ": bias dim " +
                                std::to_string(layer.b.size()) + " vs " +
                                std::to_string(layer.W.rows()) + " rows");
        }
        if (static_cast<Eigen::Index>(layer.acts.size()) != layer.W.rows()) {
            throw ShapeMismatch("layer " + std::to_string(i + 1) + ": activation count " +
                                std::to_string(layer.acts.size()) + " vs " +
                                std::to_string(layer.W.rows()) + " rows");
        }
        if (!layer.W.allFinite() || !layer.b.allFinite()) {
            throw ShapeMismatch("layer " + std::to_string(i + 1) + " has non-finite entries");
        }
        if (i + 1 < layers.size() && layers[i + 1].W.cols() != layer.W.rows()) {
            throw ShapeMismatch("layer " + std::to_string(i + 2) + ": expects input dim " +
                                std::to_string(layers[i + 1].W.cols()) + ", previous layer has " +
                                std::to_string(layer.W.rows()) + " outputs");
        }
    }
}

namespace {

void check_partial(const Network& net, PartialRef p) {
    if (p.k < 1 || p.l < p.k || p.l > net.depth()) {
        throw DimensionMismatch("invalid partial network (" + std::to_string(p.k) + "," +
                                std::to_string(p.l) + ") for depth " +
                                std::to_string(net.depth()));
    }
}

}  // namespace

Eigen::MatrixXd forward_batch(const Network& net, PartialRef p, const Eigen::MatrixXd& X) {
    check_partial(net, p);
    if (X.rows() != net.layers[p.k - 1].W.cols()) {
        throw DimensionMismatch("forward: input dim " + std::to_string(X.rows()) +
                                " vs layer " + std::to_string(p.k) + " expecting " +
                                std::to_string(net.layers[p.k - 1].W.cols()));
    }
    Eigen::MatrixXd cur = X;
    for (int l = p.k; l <= p.l; ++l) {
        const Layer& layer = net.layers[l - 1];
        Eigen::MatrixXd pre = (layer.W * cur).colwise() + layer.b;
        for (Eigen::Index c = 0; c < pre.cols(); ++c) {
            for (Eigen::Index i = 0; i < pre.rows(); ++i) {
                pre(i, c) = layer.acts[static_cast<std::size_t>(i)]->phi.eval(pre(i, c));
            }
        }
        cur = std::move(pre);
    }
    return cur;
}

Eigen::VectorXd forward(const Network& net, PartialRef p, const Eigen::VectorXd& x) {
    return forward_batch(net, p, x);
}

namespace {

std::string encode_hex(const double* data, std::size_t n) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(n * 16);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &data[i], 8);
        for (int shift = 60; shift >= 0; shift -= 4) {
            out.push_back(digits[(bits >> shift) & 0xF]);
        }
    }
    return out;
}

std::vector<double> decode_hex(const std::string& s) {
    if (s.size() % 16 != 0) throw SchemaError("hex weight string length not a multiple of 16");
    std::vector<double> out(s.size() / 16);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t bits = 0;
        for (std::size_t j = 0; j < 16; ++j) {
            const char c = s[i * 16 + j];
            std::uint64_t v;
            if (c >= '0' && c <= '9') v = static_cast<std::uint64_t>(c - '0');
            else if (c >= 'a' && c <= 'f') v = static_cast<std::uint64_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') v = static_cast<std::uint64_t>(c - 'A' + 10);
            else throw SchemaError("invalid hex digit in weight string");
            bits = (bits << 4) | v;
        }
        std::memcpy(&out[i], &bits, 8);
    }
    return out;
}

std::vector<double> read_values(const json& j, const char* field, std::size_t expected) {
    std::vector<double> vals;
    if (j.is_string()) {
        vals = decode_hex(j.get<std::string>());
    } else if (j.is_array()) {
        vals.reserve(j.size());
        for (const auto& v : j) {
            if (!v.is_number()) throw SchemaError(std::string(field) + ": non-numeric entry");
            vals.push_back(v.get<double>());
        }
    } else {
        throw SchemaError(std::string(field) + ": expected array or hex string");
    }
    if (vals.size() != expected) {
        throw ShapeMismatch(std::string(field) + ": got " + std::to_string(vals.size()) +
                            " values, expected " + std::to_string(expected));
    }
    return vals;
}

}  // namespace

Network parse_network(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("network document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array() ||
        doc["layers"].empty()) {
        throw SchemaError("network document: missing non-empty 'layers' array");
    }
    if (doc.contains("format_version") && doc["format_version"].get<int>() != 1) {
        throw SchemaError("network document: unsupported format_version");
    }
    std::string default_act = doc.value("activation", std::string());

    Network net;
    auto& registry = ActivationRegistry::instance();
    for (const auto& jl : doc["layers"]) {
        if (!jl.is_object() || !jl.contains("rows") || !jl.contains("cols") ||
            !jl.contains("W") || !jl.contains("b")) {
            throw SchemaError("layer entry: needs rows, cols, W, b");
        }
        const int rows = jl["rows"].get<int>();
        const int cols = jl["cols"].get<int>();
        if (rows < 1 || cols < 1) throw SchemaError("layer entry: rows/cols must be positive");

        const std::vector<double> w =
            read_values(jl["W"], "W", static_cast<std::size_t>(rows) * cols);
        const std::vector<double> bv = read_values(jl["b"], "b", static_cast<std::size_t>(rows));

        Layer layer;
        layer.W.resize(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                layer.W(i, j) = w[static_cast<std::size_t>(i) * cols + j];
        layer.b = Eigen::Map<const Eigen::VectorXd>(bv.data(), rows);

        if (jl.contains("activation") && jl["activation"].is_array()) {
            for (const auto& name : jl["activation"]) {
                layer.acts.push_back(registry.get(name.get<std::string>()));
            }
        } else {
            std::string name = jl.value("activation", default_act);
            if (name.empty()) throw SchemaError("layer entry: no activation specified");
            layer.acts.assign(static_cast<std::size_t>(rows), registry.get(name));
        }
        net.layers.push_back(std::move(layer));
    }
    net.validate();
    return net;
}

std::string serialize_network(const Network& net, WeightEncoding enc) {
    net.validate();
    json doc;
    doc["format_version"] = 1;
    doc["prng"] = kPrngId;

    // Homogeneous networks carry one default activation name.
    std::string common = net.layers.front().acts.front()->name;
    bool homogeneous = true;
    for (const Layer& layer : net.layers)
        for (const ActivationRef& a : layer.acts)
            if (a->name != common) homogeneous = false;
    if (homogeneous) doc["activation"] = common;

    doc["layers"] = json::array();
    for (const Layer& layer : net.layers) {
        json jl;
        jl["rows"] = static_cast<int>(layer.W.rows());
        jl["cols"] = static_cast<int>(layer.W.cols());
        // Eigen stores column-major; emit row-major.
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> wr = layer.W;
        if (enc == WeightEncoding::Hex) {
            jl["W"] = encode_hex(wr.data(), static_cast<std::size_t>(wr.size()));
            jl["b"] = encode_hex(layer.b.data(), static_cast<std::size_t>(layer.b.size()));
        } else {
            jl["W"] = std::vector<double>(wr.data(), wr.data() + wr.size());
            jl["b"] = std::vector<double>(layer.b.data(), layer.b.data() + layer.b.size());
        }
        if (!homogeneous) {
            bool layer_uniform = true;
            for (const ActivationRef& a : layer.acts)
                if (a->name != layer.acts.front()->name) layer_uniform = false;
            if (layer_uniform) {
                jl["activation"] = layer.acts.front()->name;
            } else {
                json names = json::array();
                for (const ActivationRef& a : layer.acts) names.push_back(a->name);
                jl["activation"] = names;
            }
        }
        doc["layers"].push_back(std::move(jl));
    }
    return doc.dump(2) + "\n";
}

IntervalVector parse_box(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("box document: ") + e.what());
    }
    if (doc.contains("center")) {
        if (!doc["center"].is_array() || doc["center"].empty()) {
            throw SchemaError("box document: 'center' must be a non-empty array");
        }
        const double eps = doc.value("eps", 0.0);
        if (eps < 0.0) throw SchemaError("box document: eps must be non-negative");
        IntervalVector box;
        for (const auto& v : doc["center"]) {
            const double c = v.get<double>();
            box.emplace_back(c - eps, c + eps);
        }
        return box;
    }
    if (doc.contains("lo") && doc.contains("hi")) {
        if (!doc["lo"].is_array() || !doc["hi"].is_array() ||
            doc["lo"].size() != doc["hi"].size() || doc["lo"].empty()) {
            throw SchemaError("box document: 'lo' and 'hi' must be equal-length arrays");
        }
        IntervalVector box;
        for (std::size_t i = 0; i < doc["lo"].size(); ++i) {
            const double lo = doc["lo"][i].get<double>();
            const double hi = doc["hi"][i].get<double>();
            if (lo > hi) throw SchemaError("box document: lo > hi at entry " + std::to_string(i));
            box.emplace_back(lo, hi);
        }
        return box;
    }
    throw SchemaError("box document: expected {center, eps} or {lo, hi}");
}

std::string serialize_box(const IntervalVector& box) {
    json doc;
    doc["lo"] = json::array();
    doc["hi"] = json::array();
    for (const Interval& iv : box) {
        doc["lo"].push_back(iv.lo);
        doc["hi"].push_back(iv.hi);
    }
    return doc.dump(2) + "\n";
}

RandomNetConfig RandomNetConfig::small_preset() {
    RandomNetConfig cfg;
    cfg.preset = "small";
    cfg.depth = {1, 5};
    cfg.input_dim = {1, 10};
    cfg.output_dim = {1, 10};
    cfg.hidden_width = {1, 30};
    return cfg;
}

RandomNetConfig RandomNetConfig::large_preset() {
    RandomNetConfig cfg;
    cfg.preset = "large";
    cfg.depth = {5, 10};
    cfg.input_dim = {500, 1000};
    cfg.output_dim = {10, 50};
    cfg.hidden_width = {100, 200};
    return cfg;
}

void RandomNetConfig::validate() const {
    if (!depth.valid() || !input_dim.valid() || !output_dim.valid() || !hidden_width.valid()) {
        throw ConfigError("random network config: all ranges must satisfy 1 <= lo <= hi");
    }
    if (eps < 0.0) throw ConfigError("random network config: eps must be non-negative");
    if (count < 0) throw ConfigError("random network config: count must be non-negative");
    if (!ActivationRegistry::instance().has(activation)) {
        throw UnknownActivation("unknown activation '" + activation + "'");
    }
}

Network random_network(const RandomNetConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    SplitMix64 rng(seed);
    const int L = static_cast<int>(rng.uniform_range(cfg.depth.lo, cfg.depth.hi));

    std::vector<int> dims(static_cast<std::size_t>(L) + 1);
    dims[0] = static_cast<int>(rng.uniform_range(cfg.input_dim.lo, cfg.input_dim.hi));
    for (int l = 1; l < L; ++l) {
        dims[static_cast<std::size_t>(l)] =
            static_cast<int>(rng.uniform_range(cfg.hidden_width.lo, cfg.hidden_width.hi));
    }
    dims[static_cast<std::size_t>(L)] =
        static_cast<int>(rng.uniform_range(cfg.output_dim.lo, cfg.output_dim.hi));

    ActivationRef act = ActivationRegistry::instance().get(cfg.activation);
    Network net;
    for (int l = 1; l <= L; ++l) {
        const int rows = dims[static_cast<std::size_t>(l)];
        const int cols = dims[static_cast<std::size_t>(l - 1)];
        // Uniform [-1,1] scaled by 1/sqrt(fan_in) keeps pre-activations O(1).
        const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
        Layer layer;
        layer.W.resize(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) layer.W(i, j) = scale * rng.uniform(-1.0, 1.0);
        layer.b.resize(rows);
        for (int i = 0; i < rows; ++i) layer.b(i) = rng.uniform(-0.5, 0.5);
        layer.acts.assign(static_cast<std::size_t>(rows), act);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

IntervalVector random_input_box(const Network& net, std::uint64_t seed, double eps) {
    SplitMix64 rng(seed);
    IntervalVector box(static_cast<std::size_t>(net.input_dim()));
    for (Interval& iv : box) {
        const double c = rng.uniform(-1.0, 1.0);
        iv = Interval(c - eps, c + eps);
    }
    return box;
}

}  // namespace mmr
