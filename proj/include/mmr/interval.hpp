#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mmr/errors.hpp"

namespace mmr {

// Closed real interval [lo, hi]. Endpoints of computed boxes are always
// finite; infinite endpoints appear only in activation descriptors.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {}

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x, double tol = 0.0) const {
        return x >= lo - tol && x <= hi + tol;
    }
    bool contains(const Interval& other, double tol = 0.0) const {
        return other.lo >= lo - tol && other.hi <= hi + tol;
    }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
};

using IntervalVector = std::vector<Interval>;

// Dense interval matrix, row-major.
struct IntervalMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Interval> data;

    IntervalMatrix() = default;
    IntervalMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

    Interval& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    const Interval& operator()(int i, int j) const {
        return data[static_cast<std::size_t>(i) * cols + j];
    }

    static IntervalMatrix identity(int n);
};

// Tolerance used to collapse rounding-induced empty intersections.
inline constexpr double kIntersectClampTol = 1e-9;

// Entrywise intersection. A violation max(lo) > min(hi) within
// kIntersectClampTol * max(1, |max(lo)|) collapses to the midpoint;
// anything larger throws EmptyIntersection.
IntervalVector iv_intersect(const IntervalVector& a, const IntervalVector& b);

// Exact entrywise range of W*x + b over the box x.
IntervalVector iv_affine_image(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                               const IntervalVector& x);

// Exact entrywise range of diag(d) * W over d in the interval vector.
IntervalMatrix iv_row_scale(const IntervalVector& d, const Eigen::MatrixXd& W);

// Interval matrix product; each entry is the tight range of
// sum_k a_ik * b_kj over independent entrywise choices.
IntervalMatrix iv_matmul(const IntervalMatrix& A, const IntervalMatrix& B);

// 2-norm of the vector of interval widths.
double iv_width_2norm(const IntervalVector& x);

// Helpers shared across modules.
Interval interval_product(const Interval& a, const Interval& b);
Eigen::VectorXd iv_lower(const IntervalVector& x);
Eigen::VectorXd iv_upper(const IntervalVector& x);
IntervalVector make_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
IntervalVector degenerate_box(const Eigen::VectorXd& x);
bool iv_contains_point(const IntervalVector& box, const Eigen::VectorXd& x, double tol);
bool iv_contains_box(const IntervalVector& outer, const IntervalVector& inner, double tol);

}  // namespace mmr
