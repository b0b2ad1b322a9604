#include "mmr/activation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

namespace mmr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kShapeRange = 6.0;
constexpr int kShapeSamples = 601;
constexpr double kShapeTol = 1e-9;
constexpr double kDerivTol = 1e-4;
constexpr double kDerivStep = 1e-5;
constexpr double kKinkExclusion = 1e-2;

double stable_sigmoid(double x) {
    // exp is only ever applied to non-positive arguments.
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double silu(double x) { return x * stable_sigmoid(x); }

double silu_deriv(double x) {
    const double s = stable_sigmoid(x);
    return s * (1.0 + x * (1.0 - s));
}

// Second derivative of SiLU up to the positive factor sigma*(1-sigma).
double silu_curvature_sign(double x) {
    const double s = stable_sigmoid(x);
    return 2.0 + x * (1.0 - 2.0 * s);
}

double bisect_root(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 200 && b - a > 1e-13; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fa <= 0.0) == (fm <= 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double silu_phi_argmin() {
    static const double z = bisect_root(silu_deriv, -2.0, -1.0);
    return z;
}

double silu_dphi_argmax() {
    static const double z = bisect_root(silu_curvature_sign, 2.0, 3.0);
    return z;
}

Interval local_bounds(const PiecewiseMonotoneDescriptor& d, const Interval& x) {
    const double va = d.eval(x.lo);
    const double vb = d.eval(x.hi);
    double lo = (d.argmin >= x.lo && d.argmin <= x.hi) ? d.eval(d.argmin) : std::min(va, vb);
    double hi = (d.argmax >= x.lo && d.argmax <= x.hi) ? d.eval(d.argmax) : std::max(va, vb);
    return Interval(lo, hi);
}

void check_descriptor_shape(const PiecewiseMonotoneDescriptor& d, const std::string& what) {
    // Sampled check of the 3-piece shape on [-kShapeRange, kShapeRange],
    // with the finite extremum arguments inserted into the grid.
    std::vector<double> xs;
    xs.reserve(kShapeSamples + 2);
    for (int i = 0; i < kShapeSamples; ++i) {
        xs.push_back(-kShapeRange + 2.0 * kShapeRange * i / (kShapeSamples - 1));
    }
    if (std::isfinite(d.argmin)) xs.push_back(d.argmin);
    if (std::isfinite(d.argmax)) xs.push_back(d.argmax);
    std::sort(xs.begin(), xs.end());

    std::vector<double> vs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) vs[i] = d.eval(xs[i]);

    auto tol = [](double a, double b) { return kShapeTol * (1.0 + std::max(std::abs(a), std::abs(b))); };

    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double x0 = xs[i], x1 = xs[i + 1];
        const double v0 = vs[i], v1 = vs[i + 1];
        if (x1 <= d.argmin) {
            if (v1 > v0 + tol(v0, v1)) {
                throw ShapeViolation(what + ": increases on (-inf, argmin] near x=" +
                                     std::to_string(x0));
            }
        } else if (x0 >= d.argmin && x1 <= d.argmax) {
            if (v1 < v0 - tol(v0, v1)) {
                throw ShapeViolation(what + ": decreases on [argmin, argmax] near x=" +
                                     std::to_string(x0));
            }
        } else if (x0 >= d.argmax) {
            if (v1 > v0 + tol(v0, v1)) {
                throw ShapeViolation(what + ": increases on [argmax, inf) near x=" +
                                     std::to_string(x0));
            }
        }
    }

    // Global extremum property on the sampled grid.
    if (std::isfinite(d.argmin)) {
        const double vmin = d.eval(d.argmin);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (vs[i] < vmin - tol(vs[i], vmin)) {
                throw ShapeViolation(what + ": value below eval(argmin) at x=" +
                                     std::to_string(xs[i]));
            }
        }
    }
    if (std::isfinite(d.argmax)) {
        const double vmax = d.eval(d.argmax);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (vs[i] > vmax + tol(vs[i], vmax)) {
                throw ShapeViolation(what + ": value above eval(argmax) at x=" +
                                     std::to_string(xs[i]));
            }
        }
    }
}

void check_derivative_consistency(const ActivationSpec& spec) {
    for (int i = 0; i < 100; ++i) {
        const double x = -kShapeRange + 2.0 * kShapeRange * (i + 0.5) / 100.0;
        bool near_kink = false;
        for (double k : spec.kinks) {
            if (std::abs(x - k) < kKinkExclusion) near_kink = true;
        }
        if (near_kink) continue;
        const double fd =
            (spec.phi.eval(x + kDerivStep) - spec.phi.eval(x - kDerivStep)) / (2.0 * kDerivStep);
        if (std::abs(spec.dphi.eval(x) - fd) > kDerivTol) {
            throw DerivativeMismatch(spec.name + ": dphi(" + std::to_string(x) + ")=" +
                                     std::to_string(spec.dphi.eval(x)) +
                                     " vs finite difference " + std::to_string(fd));
        }
    }
}

namespace {

ActivationSpec make_identity() {
    ActivationSpec s;
    s.name = "identity";
    s.phi = {[](double x) { return x; }, -kInf, kInf};
    s.dphi = {[](double) { return 1.0; }, -kInf, kInf};
    return s;
}

ActivationSpec make_relu() {
    ActivationSpec s;
    s.name = "relu";
    s.phi = {[](double x) { return x > 0.0 ? x : 0.0; }, -kInf, kInf};
    // Derivative at 0 taken as 0 (left-continuous), so [x,0] maps to [0,0].
    s.dphi = {[](double x) { return x > 0.0 ? 1.0 : 0.0; }, -kInf, kInf};
    s.kinks = {0.0};
    return s;
}

ActivationSpec make_leaky_relu(double slope) {
    ActivationSpec s;
    s.name = "leaky_relu";
    s.phi = {[slope](double x) { return x > 0.0 ? x : slope * x; }, -kInf, kInf};
    s.dphi = {[slope](double x) { return x > 0.0 ? 1.0 : slope; }, -kInf, kInf};
    s.kinks = {0.0};
    return s;
}

ActivationSpec make_tanh() {
    ActivationSpec s;
    s.name = "tanh";
    s.phi = {[](double x) { return std::tanh(x); }, -kInf, kInf};
    s.dphi = {[](double x) {
                  const double t = std::tanh(x);
                  return 1.0 - t * t;
              },
              -kInf, 0.0};
    return s;
}

ActivationSpec make_sigmoid() {
    ActivationSpec s;
    s.name = "sigmoid";
    s.phi = {stable_sigmoid, -kInf, kInf};
    s.dphi = {[](double x) {
                  const double v = stable_sigmoid(x);
                  return v * (1.0 - v);
              },
              -kInf, 0.0};
    return s;
}

ActivationSpec make_elu() {
    ActivationSpec s;
    s.name = "elu";  // alpha = 1
    s.phi = {[](double x) { return x >= 0.0 ? x : std::expm1(x); }, -kInf, kInf};
    s.dphi = {[](double x) { return x >= 0.0 ? 1.0 : std::exp(x); }, -kInf, kInf};
    return s;
}

ActivationSpec make_softplus() {
    ActivationSpec s;
    s.name = "softplus";
    s.phi = {[](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); },
             -kInf, kInf};
    s.dphi = {stable_sigmoid, -kInf, kInf};
    return s;
}

ActivationSpec make_silu() {
    ActivationSpec s;
    s.name = "silu";
    s.phi = {silu, silu_phi_argmin(), kInf};
    s.dphi = {silu_deriv, -silu_dphi_argmax(), silu_dphi_argmax()};
    return s;
}

}  // namespace

ActivationRegistry::ActivationRegistry() {
    add(make_identity());
    add(make_relu());
    add(make_leaky_relu(0.01));
    add(make_tanh());
    add(make_sigmoid());
    add(make_elu());
    add(make_softplus());
    add(make_silu());
}

ActivationRegistry& ActivationRegistry::instance() {
    static ActivationRegistry reg;
    return reg;
}

ActivationRef ActivationRegistry::add(ActivationSpec spec) {
    check_descriptor_shape(spec.phi, spec.name + ".phi");
    check_descriptor_shape(spec.dphi, spec.name + ".dphi");
    check_derivative_consistency(spec);
    auto ref = std::make_shared<const ActivationSpec>(std::move(spec));
    std::unique_lock lock(mutex_);
    auto [it, inserted] = specs_.try_emplace(ref->name, ref);
    if (!inserted) {
        std::fprintf(stderr, "warning: activation '%s' replaced in registry\n",
                     ref->name.c_str());
        it->second = ref;
    }
    return ref;
}

ActivationRef ActivationRegistry::get(const std::string& name) const {
    std::shared_lock lock(mutex_);
    auto it = specs_.find(name);
    if (it == specs_.end()) {
        throw UnknownActivation("unknown activation '" + name + "'");
    }
    return it->second;
}

bool ActivationRegistry::has(const std::string& name) const {
    std::shared_lock lock(mutex_);
    return specs_.count(name) > 0;
}

std::vector<std::string> ActivationRegistry::names() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    out.reserve(specs_.size());
    for (const auto& [name, _] : specs_) out.push_back(name);
    return out;
}

ActivationRef builtin(const std::string& name) {
    return ActivationRegistry::instance().get(name);
}

}  // namespace mmr
