#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkgeo/quat.hpp"

namespace qkgeo {

using Point = std::vector<double>;

template <class T>
using MetricFn = std::function<SqMat<T>(const std::vector<T>&)>;
template <class T>
using StructureFn = std::function<std::array<SqMat<T>, 3>(const std::vector<T>&)>;

struct ChartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A scalar field evaluable at every jet level the owning chart supports.
struct ScalarField {
    std::function<double(const std::vector<double>&)> f0;
    std::function<J1(const std::vector<J1>&)> f1;
    std::function<J2(const std::vector<J2>&)> f2;
    std::function<J3(const std::vector<J3>&)> f3;

    template <class T>
    T operator()(const std::vector<T>& x) const {
        if constexpr (std::is_same_v<T, double>) {
            if (!f0) throw ChartError("scalar field: level 0 missing");
            return f0(x);
        } else if constexpr (std::is_same_v<T, J1>) {
            if (!f1) throw ChartError("scalar field: derivative level 1 missing");
            return f1(x);
        } else if constexpr (std::is_same_v<T, J2>) {
            if (!f2) throw ChartError("scalar field: derivative level 2 missing");
            return f2(x);
        } else {
            static_assert(std::is_same_v<T, J3>, "unsupported scalar level");
            if (!f3) throw ChartError("scalar field: derivative level 3 missing");
            return f3(x);
        }
    }
};

// Fill all four levels of a ScalarField from one scalar-generic callable.
template <class F>
ScalarField make_scalar_field(F f) {
    ScalarField s;
    s.f0 = [f](const std::vector<double>& x) { return f(x); };
    s.f1 = [f](const std::vector<J1>& x) { return f(x); };
    s.f2 = [f](const std::vector<J2>& x) { return f(x); };
    s.f3 = [f](const std::vector<J3>& x) { return f(x); };
    return s;
}

// A named closed-form metric on an open chart of R^{4n}. The evaluators are
// stored per derivative level; closed-form charts provide every level while
// charts produced by the metric transforms lose one level per application
// (their metric already consumes first derivatives of the source metric).
//
// The chart contract: the structure triple (the standard constant one unless
// the chart installs its own) is orthogonal for the metric at every point of
// the domain, and the metric is positive definite there.
struct MetricChart {
    std::string name;
    int n = 1;

    MetricFn<double> metric0;
    MetricFn<J1> metric1;
    MetricFn<J2> metric2;
    MetricFn<J3> metric3;

    // null => constant standard hypercomplex structure
    StructureFn<double> structure0;
    StructureFn<J1> structure1;
    StructureFn<J2> structure2;
    StructureFn<J3> structure3;

    std::function<bool(const Point&)> domain;
    Point base_point;  // interior reference point: potential normalization, probes

    std::optional<double> nominal_nu;
    std::function<std::vector<double>(const Point&)> lee_closed_form;
    std::optional<ScalarField> lee_potential;  // f with phi = df, when known in closed form

    int dim() const { return 4 * n; }

    bool in_domain(const Point& p) const { return !domain || domain(p); }

    template <class T>
    SqMat<T> metric(const std::vector<T>& x) const {
        const MetricFn<T>& fn = pick_metric<T>();
        if (!fn)
            throw ChartError("chart '" + name + "' does not support derivative order " +
                             std::to_string(level_of<T>()));
        return fn(x);
    }

    template <class T>
    std::array<SqMat<T>, 3> structure(const std::vector<T>& x) const {
        const StructureFn<T>& fn = pick_structure<T>();
        if (fn) return fn(x);
        return standard_structure_triple<T>(dim());
    }

    bool has_custom_structure() const { return static_cast<bool>(structure0); }

    template <class T>
    static constexpr int level_of() {
        if constexpr (std::is_same_v<T, double>)
            return 0;
        else if constexpr (std::is_same_v<T, J1>)
            return 1;
        else if constexpr (std::is_same_v<T, J2>)
            return 2;
        else
            return 3;
    }

private:
    template <class T>
    const MetricFn<T>& pick_metric() const {
        if constexpr (std::is_same_v<T, double>)
            return metric0;
        else if constexpr (std::is_same_v<T, J1>)
            return metric1;
        else if constexpr (std::is_same_v<T, J2>)
            return metric2;
        else {
            static_assert(std::is_same_v<T, J3>, "unsupported scalar level");
            return metric3;
        }
    }
    template <class T>
    const StructureFn<T>& pick_structure() const {
        if constexpr (std::is_same_v<T, double>)
            return structure0;
        else if constexpr (std::is_same_v<T, J1>)
            return structure1;
        else if constexpr (std::is_same_v<T, J2>)
            return structure2;
        else {
            static_assert(std::is_same_v<T, J3>, "unsupported scalar level");
            return structure3;
        }
    }
};

// Install a scalar-generic metric callable at all four levels.
template <class F>
void set_metric_all_levels(MetricChart& chart, F f) {
    chart.metric0 = [f](const std::vector<double>& x) { return f(x); };
    chart.metric1 = [f](const std::vector<J1>& x) { return f(x); };
    chart.metric2 = [f](const std::vector<J2>& x) { return f(x); };
    chart.metric3 = [f](const std::vector<J3>& x) { return f(x); };
}

template <class F>
void set_structure_all_levels(MetricChart& chart, F f) {
    chart.structure0 = [f](const std::vector<double>& x) { return f(x); };
    chart.structure1 = [f](const std::vector<J1>& x) { return f(x); };
    chart.structure2 = [f](const std::vector<J2>& x) { return f(x); };
    chart.structure3 = [f](const std::vector<J3>& x) { return f(x); };
}

}  // namespace qkgeo
