#include "mmr/interval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mmr {

IntervalMatrix IntervalMatrix::identity(int n) {
    IntervalMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Interval(1.0, 1.0);
    return m;
}

IntervalVector iv_intersect(const IntervalVector& a, const IntervalVector& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("iv_intersect: dims " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    }
    IntervalVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        double lo = std::max(a[i].lo, b[i].lo);
        double hi = std::min(a[i].hi, b[i].hi);
        if (lo > hi) {
            double violation = lo - hi;
            if (violation <= kIntersectClampTol * std::max(1.0, std::abs(lo))) {
                double mid = 0.5 * (lo + hi);
                lo = mid;
                hi = mid;
            } else {
                std::ostringstream os;
                os << "iv_intersect: empty at entry " << i << " ([" << lo << "," << hi
                   << "], violation " << violation << ")";
                throw EmptyIntersection(os.str());
            }
        }
        out[i] = Interval(lo, hi);
    }
    return out;
}

IntervalVector iv_affine_image(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                               const IntervalVector& x) {
    if (W.cols() != static_cast<Eigen::Index>(x.size()) || W.rows() != b.size()) {
        throw DimensionMismatch("iv_affine_image: W is " + std::to_string(W.rows()) + "x" +
                                std::to_string(W.cols()) + ", b " + std::to_string(b.size()) +
                                ", x " + std::to_string(x.size()));
    }
    IntervalVector out(static_cast<std::size_t>(W.rows()));
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
        double lo = b(i);
        double hi = b(i);
        for (Eigen::Index j = 0; j < W.cols(); ++j) {
            const double w = W(i, j);
            const double p = w * x[static_cast<std::size_t>(j)].lo;
            const double q = w * x[static_cast<std::size_t>(j)].hi;
            lo += std::min(p, q);
            hi += std::max(p, q);
        }
        out[static_cast<std::size_t>(i)] = Interval(lo, hi);
    }
    return out;
}

IntervalMatrix iv_row_scale(const IntervalVector& d, const Eigen::MatrixXd& W) {
    if (static_cast<Eigen::Index>(d.size()) != W.rows()) {
        throw DimensionMismatch("iv_row_scale: d has " + std::to_string(d.size()) +
                                " entries, W has " + std::to_string(W.rows()) + " rows");
    }
    IntervalMatrix out(static_cast<int>(W.rows()), static_cast<int>(W.cols()));
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
        const Interval& di = d[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < W.cols(); ++j) {
            const double p = di.lo * W(i, j);
            const double q = di.hi * W(i, j);
            out(static_cast<int>(i), static_cast<int>(j)) =
                Interval(std::min(p, q), std::max(p, q));
        }
    }
    return out;
}

Interval interval_product(const Interval& a, const Interval& b) {
    const double p1 = a.lo * b.lo;
    const double p2 = a.lo * b.hi;
    const double p3 = a.hi * b.lo;
    const double p4 = a.hi * b.hi;
    return Interval(std::min(std::min(p1, p2), std::min(p3, p4)),
                    std::max(std::max(p1, p2), std::max(p3, p4)));
}

IntervalMatrix iv_matmul(const IntervalMatrix& A, const IntervalMatrix& B) {
    if (A.cols != B.rows) {
        throw DimensionMismatch("iv_matmul: " + std::to_string(A.cols) + " vs " +
                                std::to_string(B.rows));
    }
    IntervalMatrix out(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i) {
        for (int k = 0; k < A.cols; ++k) {
            const Interval& a = A(i, k);
            if (a.lo == 0.0 && a.hi == 0.0) continue;
            for (int j = 0; j < B.cols; ++j) {
                const Interval p = interval_product(a, B(k, j));
                Interval& o = out(i, j);
                o.lo += p.lo;
                o.hi += p.hi;
            }
        }
    }
    return out;
}

double iv_width_2norm(const IntervalVector& x) {
    double s = 0.0;
    for (const Interval& iv : x) s += iv.width() * iv.width();
    return std::sqrt(s);
}

Eigen::VectorXd iv_lower(const IntervalVector& x) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = x[i].lo;
    return v;
}

Eigen::VectorXd iv_upper(const IntervalVector& x) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = x[i].hi;
    return v;
}

IntervalVector make_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    if (lo.size() != hi.size()) throw DimensionMismatch("make_box: lo/hi size mismatch");
    IntervalVector out(static_cast<std::size_t>(lo.size()));
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (lo(i) > hi(i)) throw DimensionMismatch("make_box: lo > hi at entry " + std::to_string(i));
        out[static_cast<std::size_t>(i)] = Interval(lo(i), hi(i));
    }
    return out;
}

IntervalVector degenerate_box(const Eigen::VectorXd& x) {
    return make_box(x, x);
}

bool iv_contains_point(const IntervalVector& box, const Eigen::VectorXd& x, double tol) {
    if (static_cast<Eigen::Index>(box.size()) != x.size()) return false;
    for (std::size_t i = 0; i < box.size(); ++i) {
        const double scale = 1.0 + std::max(std::abs(box[i].lo), std::abs(box[i].hi));
        if (!box[i].contains(x(static_cast<Eigen::Index>(i)), tol * scale)) return false;
    }
    return true;
}

bool iv_contains_box(const IntervalVector& outer, const IntervalVector& inner, double tol) {
    if (outer.size() != inner.size()) return false;
    for (std::size_t i = 0; i < outer.size(); ++i) {
        const double scale = 1.0 + std::max(std::abs(outer[i].lo), std::abs(outer[i].hi));
        if (!outer[i].contains(inner[i], tol * scale)) return false;
    }
    return true;
}

}  // namespace mmr
