#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace stdissim {

struct Summary {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation (n - 1)
    double sem = 0.0; // standard error of the mean
    std::size_t n = 0;
};

/// Two-pass mean and spread, summed in index order.
inline Summary summarize(std::span<const double> xs) {
    Summary s;
    s.n = xs.size();
    if (s.n == 0) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
        s.sem = s.stddev / std::sqrt(static_cast<double>(s.n));
    }
    return s;
}

/// lo, lo + step, ... up to hi inclusive. Values are rounded to 12 decimals
/// so that e.g. 0.3 + 0.05 prints as 0.35.
inline std::vector<double> linear_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw InvalidConfig("grid: need step > 0 and hi >= lo");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
    return out;
}

} // namespace stdissim
