#include "relcon/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relcon/error.hpp"

namespace relcon {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opt) {
    require(!x0.empty(), "nelder_mead: empty start point");
    const std::size_t n = x0.size();
    std::size_t evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };

    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1][i] += opt.initial_step;
    }
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        vals[i] = eval(pts[i]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    bool converged = false;
    while (evals < opt.max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double diam = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                diam = std::max(diam, std::abs(pts[i][j] - pts[best][j]));
            }
        }
        if (diam < opt.x_tolerance || vals[worst] - vals[best] < opt.f_tolerance * (1.0 + std::abs(vals[best]))) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                centroid[j] += pts[i][j] / static_cast<double>(n);
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            xr[j] = centroid[j] + (centroid[j] - pts[worst][j]);
        }
        const double fr = eval(xr);
        if (fr < vals[best]) {
            for (std::size_t j = 0; j < n; ++j) {
                xe[j] = centroid[j] + 2.0 * (centroid[j] - pts[worst][j]);
            }
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        // contraction (outside if the reflection improved on the worst point)
        const bool outside = fr < vals[worst];
        for (std::size_t j = 0; j < n; ++j) {
            xc[j] = outside ? centroid[j] + 0.5 * (xr[j] - centroid[j])
                            : centroid[j] + 0.5 * (pts[worst][j] - centroid[j]);
        }
        const double fc = eval(xc);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
            }
            vals[i] = eval(pts[i]);
        }
    }

    const auto it = std::min_element(vals.begin(), vals.end());
    const auto bi = static_cast<std::size_t>(it - vals.begin());
    return {pts[bi], vals[bi], evals, converged};
}

}  // namespace relcon
