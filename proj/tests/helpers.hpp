#pragma once

// Test-only oracles and generators, independent of the bounding code they
// check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mmr/interval.hpp"
#include "mmr/network.hpp"
#include "mmr/rng.hpp"

namespace testutil {

// Min/max of a scalar function on [a,b] by uniform grid evaluation, plus
// the largest adjacent value jump (a Lipschitz-style error estimate for
// the grid resolution).
struct GridExtrema {
    double min;
    double max;
    double max_step;
};

inline GridExtrema grid_extrema(const std::function<double(double)>& f, double a, double b,
                                int n = 10000) {
    GridExtrema g{f(a), f(a), 0.0};
    double prev = g.min;
    for (int i = 1; i < n; ++i) {
        const double x = a + (b - a) * i / (n - 1);
        const double v = f(x);
        g.min = std::min(g.min, v);
        g.max = std::max(g.max, v);
        g.max_step = std::max(g.max_step, std::abs(v - prev));
        prev = v;
    }
    return g;
}

// Uniform sample inside a box.
inline Eigen::VectorXd sample_in_box(const mmr::IntervalVector& box, mmr::SplitMix64& rng) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(box.size()));
    for (std::size_t i = 0; i < box.size(); ++i) {
        x(static_cast<Eigen::Index>(i)) = rng.uniform(box[i].lo, box[i].hi);
    }
    return x;
}

// All 2^n corners of a box (n small).
inline std::vector<Eigen::VectorXd> box_corners(const mmr::IntervalVector& box) {
    const std::size_t n = box.size();
    std::vector<Eigen::VectorXd> out;
    out.reserve(std::size_t{1} << n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) {
            x(static_cast<Eigen::Index>(j)) = (mask >> j) & 1 ? box[j].hi : box[j].lo;
        }
        out.push_back(std::move(x));
    }
    return out;
}

// Exact affine range over a box by corner enumeration (independent of
// iv_affine_image).
inline mmr::IntervalVector affine_range_by_corners(const Eigen::MatrixXd& W,
                                                   const Eigen::VectorXd& b,
                                                   const mmr::IntervalVector& box) {
    mmr::IntervalVector out;
    bool first = true;
    for (const Eigen::VectorXd& corner : box_corners(box)) {
        const Eigen::VectorXd y = W * corner + b;
        if (first) {
            for (Eigen::Index i = 0; i < y.size(); ++i) out.emplace_back(y(i), y(i));
            first = false;
        } else {
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                out[static_cast<std::size_t>(i)].lo =
                    std::min(out[static_cast<std::size_t>(i)].lo, y(i));
                out[static_cast<std::size_t>(i)].hi =
                    std::max(out[static_cast<std::size_t>(i)].hi, y(i));
            }
        }
    }
    return out;
}

inline mmr::IntervalVector random_box(int dim, mmr::SplitMix64& rng, double lo = -2.0,
                                      double hi = 2.0) {
    mmr::IntervalVector box(static_cast<std::size_t>(dim));
    for (auto& iv : box) {
        const double a = rng.uniform(lo, hi);
        const double b = rng.uniform(lo, hi);
        iv = mmr::Interval(std::min(a, b), std::max(a, b));
    }
    return box;
}

}  // namespace testutil
