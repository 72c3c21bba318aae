#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace imethod {

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least squares line through (log x, log y). Needs three or more positive points.
inline LogLogFit fit_loglog(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_loglog: at least 3 points required");
    std::ostringstream bad;
    bool any_bad = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [x, y] = points[i];
        if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
            bad << (any_bad ? ", " : "") << "#" << i << " (" << x << ", " << y << ")";
            any_bad = true;
        }
    }
    if (any_bad) throw std::invalid_argument("fit_loglog: nonpositive or non-finite points: " + bad.str());

    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        mx += std::log(x);
        my += std::log(y);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx, dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_loglog: all x values coincide");
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    // A constant y is fitted exactly.
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace imethod
