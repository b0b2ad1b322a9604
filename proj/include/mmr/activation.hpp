#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "mmr/interval.hpp"

namespace mmr {

// Scalar function that is non-increasing on (-inf, argmin], non-decreasing
// on [argmin, argmax] and non-increasing on [argmax, +inf). argmin/argmax
// may be +-infinity, which drops the corresponding outer segment.
struct PiecewiseMonotoneDescriptor {
    std::function<double(double)> eval;
    double argmin = -std::numeric_limits<double>::infinity();
    double argmax = std::numeric_limits<double>::infinity();
};

// Exact range of a 3-piece piecewise-monotone function on a finite interval:
// endpoint values, replaced by the global extremum when its argument lies
// inside the interval.
Interval local_bounds(const PiecewiseMonotoneDescriptor& d, const Interval& x);

struct ActivationSpec {
    std::string name;
    PiecewiseMonotoneDescriptor phi;   // the activation function
    PiecewiseMonotoneDescriptor dphi;  // its derivative
    // Non-differentiable points, excluded from the finite-difference
    // consistency check (e.g. ReLU and ELU at 0).
    std::vector<double> kinks;
};

using ActivationRef = std::shared_ptr<const ActivationSpec>;

// Thread-safe registry of activation specs. Builtins are registered on
// first access; specs are immutable once stored.
class ActivationRegistry {
public:
    static ActivationRegistry& instance();

    // Validates the spec (sampled 3-piece shape of phi and dphi, and
    // finite-difference consistency of dphi against phi) and stores it.
    // A duplicate name replaces the existing spec with a warning on stderr.
    ActivationRef add(ActivationSpec spec);

    ActivationRef get(const std::string& name) const;
    bool has(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    ActivationRegistry();
    mutable std::shared_mutex mutex_;
    std::map<std::string, ActivationRef> specs_;
};

// Shorthand for ActivationRegistry::instance().get(name).
ActivationRef builtin(const std::string& name);

// Validation pieces, exposed for tests.
void check_descriptor_shape(const PiecewiseMonotoneDescriptor& d, const std::string& what);
void check_derivative_consistency(const ActivationSpec& spec);

// SiLU extremum constants, refined by bisection at startup (paper values
// are 4-decimal). silu_phi_argmin is the root of phi' on the negative
// axis; silu_dphi_argmax is the positive root of phi''.
double silu_phi_argmin();
double silu_dphi_argmax();

}  // namespace mmr
