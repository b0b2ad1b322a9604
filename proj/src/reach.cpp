#include "mmr/reach.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace mmr {

namespace {

IntervalVector dphi_local_bounds(const Layer& layer, const IntervalVector& pre) {
    IntervalVector out(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) {
        out[i] = local_bounds(layer.acts[i]->dphi, pre[i]);
    }
    return out;
}

IntervalVector phi_local_bounds(const Layer& layer, const IntervalVector& pre) {
    IntervalVector out(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) {
        out[i] = local_bounds(layer.acts[i]->phi, pre[i]);
    }
    return out;
}

// Rounding can invert a theoretically valid bound by a few ulps; collapse
// sub-tolerance inversions, anything larger is a bug.
Interval clamp_interval(double lo, double hi) {
    if (lo > hi) {
        if (lo - hi <= kIntersectClampTol * std::max(1.0, std::abs(lo))) {
            const double mid = 0.5 * (lo + hi);
            return Interval(mid, mid);
        }
        throw EmptyIntersection("mm_bound produced inverted interval [" + std::to_string(lo) +
                                "," + std::to_string(hi) + "]");
    }
    return Interval(lo, hi);
}

}  // namespace

IntervalVector mm_bound(const BatchFn& f, const IntervalVector& box, const IntervalMatrix& J,
                        std::int64_t* eval_count) {
    const int n_in = static_cast<int>(box.size());
    const int n_out = J.rows;
    if (J.cols != n_in) {
        throw DimensionMismatch("mm_bound: J has " + std::to_string(J.cols) +
                                " cols, box dim " + std::to_string(n_in));
    }

    // Sign pattern of the center J* per output row; rows sharing a pattern
    // share their two corner evaluations. A tie J* == 0 takes the
    // non-negative branch.
    std::vector<std::string> patterns(static_cast<std::size_t>(n_out));
    std::map<std::string, int> pattern_index;
    for (int i = 0; i < n_out; ++i) {
        std::string& p = patterns[static_cast<std::size_t>(i)];
        p.resize(static_cast<std::size_t>(n_in));
        for (int j = 0; j < n_in; ++j) {
            p[static_cast<std::size_t>(j)] = J(i, j).mid() >= 0.0 ? '+' : '-';
        }
        pattern_index.try_emplace(p, static_cast<int>(pattern_index.size()));
    }

    const int num_patterns = static_cast<int>(pattern_index.size());
    Eigen::MatrixXd corners(n_in, 2 * num_patterns);
    for (const auto& [p, q] : pattern_index) {
        for (int j = 0; j < n_in; ++j) {
            const bool nonneg = p[static_cast<std::size_t>(j)] == '+';
            corners(j, 2 * q) = nonneg ? box[static_cast<std::size_t>(j)].lo
                                       : box[static_cast<std::size_t>(j)].hi;
            corners(j, 2 * q + 1) = nonneg ? box[static_cast<std::size_t>(j)].hi
                                           : box[static_cast<std::size_t>(j)].lo;
        }
    }

    const Eigen::MatrixXd images = f(corners);
    if (images.rows() != n_out || images.cols() != corners.cols()) {
        throw DimensionMismatch("mm_bound: f returned " + std::to_string(images.rows()) + "x" +
                                std::to_string(images.cols()));
    }
    if (eval_count != nullptr) *eval_count += 2 * num_patterns;

    IntervalVector out(static_cast<std::size_t>(n_out));
    for (int i = 0; i < n_out; ++i) {
        const std::string& p = patterns[static_cast<std::size_t>(i)];
        const int q = pattern_index.at(p);
        // Error term: alpha_i . (xi_lo - xi_hi), non-negative by the sign
        // choices below.
        double err = 0.0;
        for (int j = 0; j < n_in; ++j) {
            const double w = box[static_cast<std::size_t>(j)].width();
            if (p[static_cast<std::size_t>(j)] == '+') {
                err += std::min(0.0, J(i, j).lo) * (-w);
            } else {
                err += std::max(0.0, J(i, j).hi) * w;
            }
        }
        out[static_cast<std::size_t>(i)] =
            clamp_interval(images(i, 2 * q) - err, images(i, 2 * q + 1) + err);
    }
    return out;
}

IntervalMatrix jacobian_update(const IntervalVector& dphi_bounds, const Eigen::MatrixXd& W,
                               const IntervalMatrix& prev) {
    IntervalMatrix layer = iv_row_scale(dphi_bounds, W);
    if (prev.rows == 0) return layer;
    return iv_matmul(layer, prev);
}

ReachResult algorithm1(const Network& net, const IntervalVector& box, const ReachOptions& opts) {
    net.validate();
    if (static_cast<int>(box.size()) != net.input_dim()) {
        throw DimensionMismatch("algorithm1: box dim " + std::to_string(box.size()) +
                                " vs input dim " + std::to_string(net.input_dim()));
    }
    const auto t0 = std::chrono::steady_clock::now();
    const int L = net.depth();

    ReachResult result;
    result.method = "mm";

    // boxes[l] holds the intersected bound on x^(l); boxes[0] is the input.
    std::vector<IntervalVector> boxes(static_cast<std::size_t>(L) + 1);
    boxes[0] = box;

    // jac[k] holds J(k, l-1) at the top of iteration l; only the previous
    // column of the triangular table is kept alive.
    std::vector<IntervalMatrix> jac(static_cast<std::size_t>(L) + 1);

    int num_threads = opts.threads > 0 ? opts.threads
                                       : static_cast<int>(std::thread::hardware_concurrency());
    if (num_threads < 1) num_threads = 1;

    for (int l = 1; l <= L; ++l) {
        const Layer& layer = net.layers[static_cast<std::size_t>(l - 1)];
        const IntervalVector pre =
            iv_affine_image(layer.W, layer.b, boxes[static_cast<std::size_t>(l - 1)]);
        const IntervalVector dphi = dphi_local_bounds(layer, pre);
        const IntervalMatrix layerJ = iv_row_scale(dphi, layer.W);

        std::vector<IntervalVector> partial(static_cast<std::size_t>(l) + 1);
        std::vector<std::int64_t> evals(static_cast<std::size_t>(l) + 1, 0);

        auto process = [&](int k) {
            IntervalMatrix& Jk = jac[static_cast<std::size_t>(k)];
            Jk = (k == l) ? layerJ : iv_matmul(layerJ, Jk);
            const BatchFn f = [&net, k, l](const Eigen::MatrixXd& X) {
                return forward_batch(net, PartialRef{k, l}, X);
            };
            partial[static_cast<std::size_t>(k)] =
                mm_bound(f, boxes[static_cast<std::size_t>(k - 1)], Jk,
                         &evals[static_cast<std::size_t>(k)]);
        };

        if (opts.parallel && l > 1 && num_threads > 1) {
            std::vector<std::thread> workers;
            const int T = std::min(num_threads, l);
            workers.reserve(static_cast<std::size_t>(T));
            for (int t = 0; t < T; ++t) {
                workers.emplace_back([&, t]() {
                    for (int k = 1 + t; k <= l; k += T) process(k);
                });
            }
            for (std::thread& w : workers) w.join();
        } else {
            for (int k = 1; k <= l; ++k) process(k);
        }

        // Deterministic reduction in ascending k, then one more sound bound:
        // the exact activation range over the pre-activation interval. For
        // non-monotone activations the mixed-monotonicity error term can
        // exceed that range, and intersecting it keeps the result at least
        // as tight as interval bound propagation on every instance.
        IntervalVector acc = partial[1];
        for (int k = 2; k <= l; ++k) acc = iv_intersect(acc, partial[static_cast<std::size_t>(k)]);
        acc = iv_intersect(acc, phi_local_bounds(layer, pre));
        boxes[static_cast<std::size_t>(l)] = std::move(acc);

        for (int k = 1; k <= l; ++k) {
            result.eval_count += evals[static_cast<std::size_t>(k)];
            if (opts.keep_partial) {
                result.per_pair[{k, l}] = std::move(partial[static_cast<std::size_t>(k)]);
            }
        }
        result.pair_count += l;
    }

    result.per_layer.assign(boxes.begin() + 1, boxes.end());
    result.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

ReachResult ibp(const Network& net, const IntervalVector& box) {
    net.validate();
    if (static_cast<int>(box.size()) != net.input_dim()) {
        throw DimensionMismatch("ibp: box dim " + std::to_string(box.size()) +
                                " vs input dim " + std::to_string(net.input_dim()));
    }
    const auto t0 = std::chrono::steady_clock::now();

    ReachResult result;
    result.method = "ibp";
    IntervalVector cur = box;
    for (const Layer& layer : net.layers) {
        const IntervalVector pre = iv_affine_image(layer.W, layer.b, cur);
        cur = phi_local_bounds(layer, pre);
        result.per_layer.push_back(cur);
    }
    result.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

IntervalVector mm_decomposition(const Network& net, const IntervalVector& box,
                                const std::vector<int>& cuts) {
    net.validate();
    if (cuts.empty() || cuts.back() != net.depth()) {
        throw DimensionMismatch("mm_decomposition: last cut must equal the network depth");
    }
    IntervalVector cur = box;
    int k = 1;
    for (int cut : cuts) {
        if (cut < k || cut > net.depth()) {
            throw DimensionMismatch("mm_decomposition: cuts must be increasing layer indices");
        }
        // Jacobian bounds of the segment, with inner pre-activation boxes
        // propagated by plain interval arithmetic from the segment input.
        IntervalMatrix J;
        IntervalVector inner = cur;
        for (int l = k; l <= cut; ++l) {
            const Layer& layer = net.layers[static_cast<std::size_t>(l - 1)];
            const IntervalVector pre = iv_affine_image(layer.W, layer.b, inner);
            J = jacobian_update(dphi_local_bounds(layer, pre), layer.W, J);
            if (l < cut) inner = phi_local_bounds(layer, pre);
        }
        const int kk = k;
        const BatchFn f = [&net, kk, cut](const Eigen::MatrixXd& X) {
            return forward_batch(net, PartialRef{kk, cut}, X);
        };
        cur = mm_bound(f, cur, J);
        k = cut + 1;
    }
    return cur;
}

}  // namespace mmr
