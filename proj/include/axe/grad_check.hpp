// Central finite-difference gradient checking. Every analytic gradient in
// this project has to survive this harness before it is trusted.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "axe/numerics.hpp"

namespace axe {

struct GradCheckTarget {
    Matrix *param;           // perturbed in place, restored afterwards
    const Matrix *analytic;  // same shape as *param
};

// Returns max over checked coordinates of
//   |analytic - central| / max(1, |analytic|, |central|).
// Checks every coordinate unless max_coords_per_param limits the sample (the
// sampled subset is deterministic under the caller's rng).
inline double grad_check(const std::function<double()> &loss, const std::vector<GradCheckTarget> &targets, double eps,
                         SeededRng *coord_rng = nullptr, int max_coords_per_param = -1) {
    if (!(eps >= 1e-7 && eps <= 1e-3)) throw std::invalid_argument("grad_check: eps outside [1e-7, 1e-3]");
    double worst = 0.0;
    for (const auto &t : targets) {
        if (!t.param->same_shape(*t.analytic)) throw std::invalid_argument("grad_check: shape mismatch");
        const size_t n = t.param->data.size();
        std::vector<size_t> coords;
        if (max_coords_per_param < 0 || static_cast<size_t>(max_coords_per_param) >= n) {
            coords.resize(n);
            for (size_t i = 0; i < n; ++i) coords[i] = i;
        } else {
            if (coord_rng == nullptr) throw std::invalid_argument("grad_check: sampling requires an rng");
            for (int i = 0; i < max_coords_per_param; ++i) coords.push_back(coord_rng->uniform_u64(n));
        }
        for (size_t c : coords) {
            double &x = t.param->data[c];
            const double saved = x;
            x = saved + eps;
            const double fp = loss();
            x = saved - eps;
            const double fm = loss();
            x = saved;
            if (!std::isfinite(fp) || !std::isfinite(fm)) throw std::runtime_error("grad_check: non-finite loss");
            const double central = (fp - fm) / (2.0 * eps);
            const double analytic = t.analytic->data[c];
            const double denom = std::max({1.0, std::fabs(analytic), std::fabs(central)});
            worst = std::max(worst, std::fabs(analytic - central) / denom);
        }
    }
    return worst;
}

}  // namespace axe
