#pragma once

#include <functional>
#include <span>
#include <vector>

namespace finsler {

/// Scalar function of an evaluation point, plain-double signature used by the
/// finite-difference oracle.
using PointFn = std::function<double(std::span<const double>, std::span<const double>)>;

enum class CoordKind { Base, Fiber };  // x- or y-coordinate

namespace detail {
inline double fd_eval(const PointFn& f, std::span<const double> x, std::span<const double> y, CoordKind kind,
                      int coord, double delta) {
    std::vector<double> xs(x.begin(), x.end());
    std::vector<double> ys(y.begin(), y.end());
    (kind == CoordKind::Base ? xs[coord] : ys[coord]) += delta;
    return f(xs, ys);
}
}  // namespace detail

/// Central finite difference of order 1 or 2 in a single coordinate;
/// truncation error O(step^2). The cross-validation peer of jet extraction;
/// it never touches jet code.
inline double fd_oracle(const PointFn& f, std::span<const double> x, std::span<const double> y, CoordKind kind,
                        int coord, int order, double step) {
    if (order == 1) {
        double fp = detail::fd_eval(f, x, y, kind, coord, step);
        double fm = detail::fd_eval(f, x, y, kind, coord, -step);
        return (fp - fm) / (2.0 * step);
    }
    double fp = detail::fd_eval(f, x, y, kind, coord, step);
    double f0 = f(x, y);
    double fm = detail::fd_eval(f, x, y, kind, coord, -step);
    return (fp - 2.0 * f0 + fm) / (step * step);
}

/// Mixed second partial by the four-point central stencil, O(step^2).
inline double fd_mixed(const PointFn& f, std::span<const double> x, std::span<const double> y, CoordKind kind_a,
                       int coord_a, CoordKind kind_b, int coord_b, double step) {
    auto shifted = [&](double da, double db) {
        std::vector<double> xs(x.begin(), x.end());
        std::vector<double> ys(y.begin(), y.end());
        (kind_a == CoordKind::Base ? xs[coord_a] : ys[coord_a]) += da;
        (kind_b == CoordKind::Base ? xs[coord_b] : ys[coord_b]) += db;
        return f(xs, ys);
    };
    return (shifted(step, step) - shifted(step, -step) - shifted(-step, step) + shifted(-step, -step)) /
           (4.0 * step * step);
}

}  // namespace finsler
