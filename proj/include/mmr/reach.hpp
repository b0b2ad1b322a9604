#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mmr/interval.hpp"
#include "mmr/network.hpp"

namespace mmr {

// Interval matrix bounding the Jacobian of a partial network over its
// input box.
struct JacobianBounds {
    IntervalMatrix J;
};

struct ReachOptions {
    bool keep_partial = false;  // retain the per-partial-network boxes
    bool parallel = false;      // run the inner k-loop on worker threads
    int threads = 0;            // 0 = hardware concurrency
};

struct ReachResult {
    std::string method;                        // "mm" or "ibp"
    std::vector<IntervalVector> per_layer;     // bounds on x_1 .. x_L
    std::map<std::pair<int, int>, IntervalVector> per_pair;  // (k,l) -> box
    double elapsed_s = 0.0;
    std::int64_t eval_count = 0;  // corner evaluations of partial networks
    std::int64_t pair_count = 0;  // mixed-monotonicity applications

    const IntervalVector& output() const { return per_layer.back(); }
};

// Batched black-box function: columns of the argument are input points,
// columns of the result the corresponding outputs.
using BatchFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

// Mixed-monotonicity bound: given an interval matrix J bounding the
// derivative of f over the box, evaluates f at two opposite corners per
// distinct derivative sign pattern and widens by the error term where the
// derivative bounds straddle zero. eval_count, when given, is incremented
// by the number of corner evaluations.
IntervalVector mm_bound(const BatchFn& f, const IntervalVector& box, const IntervalMatrix& J,
                        std::int64_t* eval_count = nullptr);

// Chains the layer Jacobian [dphi] * W onto the bounds of the preceding
// partial network. An empty prev (rows == 0) stands for the identity.
IntervalMatrix jacobian_update(const IntervalVector& dphi_bounds, const Eigen::MatrixXd& W,
                               const IntervalMatrix& prev);

// Mixed-monotonicity reachability over all partial networks, intersecting
// the bounds from every partial network ending at each layer.
ReachResult algorithm1(const Network& net, const IntervalVector& box,
                       const ReachOptions& opts = {});

// Naive interval bound propagation baseline; activation ranges come from
// the same 3-piece local-bounds rule, so non-monotone activations are
// handled too.
ReachResult ibp(const Network& net, const IntervalVector& box);

// Chained mixed-monotonicity over a decomposition of the layers into
// consecutive segments: each segment gets a single mixed-monotonicity
// application, with input box equal to the previous segment's output box
// and pre-activation bounds inside a segment propagated by plain interval
// arithmetic. cuts lists the last layer of each segment; the final cut
// must equal the network depth.
IntervalVector mm_decomposition(const Network& net, const IntervalVector& box,
                                const std::vector<int>& cuts);

}  // namespace mmr
