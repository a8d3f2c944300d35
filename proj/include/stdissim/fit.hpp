#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace stdissim::fit {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    std::size_t points = 0;

    double operator()(double x) const noexcept { return intercept + slope * x; }
};

/// Ordinary least squares y = intercept + slope * x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidInput("fit_line: x and y sizes differ");
    const std::size_t n = x.size();
    if (n < 2) throw FitError("fit_line: need at least 2 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw FitError("fit_line: all abscissae coincide");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.points = n;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f(x[i]);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / static_cast<double>(n));
    return f;
}

/// Abscissa where two fitted lines cross.
inline double crossing(const LineFit& a, const LineFit& b) {
    const double ds = a.slope - b.slope;
    if (std::abs(ds) < 1e-12) throw FitError("fitted lines are parallel; no crossing");
    return (b.intercept - a.intercept) / ds;
}

struct PowerLawFit {
    double exponent = 0.0;
    double amplitude = 0.0;
    /// rms residual in log space
    double residual = 0.0;
    std::size_t points = 0;
};

/// Fits |y| = amplitude * t^exponent on samples with t in [t_min, t_max],
/// by least squares on (log t, log y). Every sample in range must be positive.
inline PowerLawFit fit_power_law(std::span<const double> t, std::span<const double> y, double t_min, double t_max) {
    if (t.size() != y.size()) throw InvalidInput("fit_power_law: t and y sizes differ");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_min || t[i] > t_max) continue;
        if (!(t[i] > 0.0) || !(y[i] > 0.0))
            throw FitError("fit_power_law: non-positive sample at t=" + std::to_string(t[i]));
        lx.push_back(std::log(t[i]));
        ly.push_back(std::log(y[i]));
    }
    if (lx.size() < 3) throw FitError("fit_power_law: fewer than 3 samples in range");
    const LineFit f = fit_line(lx, ly);
    return {f.slope, std::exp(f.intercept), f.rms_residual, f.points};
}

} // namespace stdissim::fit
