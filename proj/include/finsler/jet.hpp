#pragma once

#include <span>
#include <vector>

#include "finsler/jet_shape.hpp"

namespace finsler {

/// Truncated multivariate Taylor value at a point of the slit tangent bundle:
/// carries every mixed partial derivative with respect to (x^1..x^n,
/// y^1..y^n) up to the shape's order bound, Taylor-normalized (coefficient of
/// the monomial, i.e. partial / alpha! beta!). Storage is canonical, one slot
/// per monomial, so symmetry of mixed partials holds by construction.
///
/// A jet also tracks how many orders are still *valid*: arithmetic meets at
/// the componentwise minimum and derivative extraction costs one order in its
/// slot. Coefficients beyond the valid region are never read.
///
/// Arithmetic is exact at the truncation order (no discretization error) and
/// the value lane of every operation is bit-identical to the corresponding
/// plain-double operation.
class Jet {
public:
    Jet() = default;

    static Jet constant(const JetShape* s, double v);
    static Jet coord_x(const JetShape* s, int i, double value);  // i in [0,n)
    static Jet coord_y(const JetShape* s, int i, double value);

    bool valid() const { return shape_ != nullptr; }
    const JetShape* shape() const { return shape_; }
    double value() const { return c_[0]; }
    int vx() const { return vx_; }
    int vy() const { return vy_; }

    /// Mixed partial derivative value (Taylor coefficient times factorials).
    /// Throws DepthError when the request exceeds the valid region.
    double partial(std::span<const int> x_orders, std::span<const int> y_orders) const;

    /// Raw Taylor coefficient by (x-index, y-index) pair; test/diagnostic use.
    double coefficient(int ix, int iy) const { return c_[static_cast<size_t>(ix) * shape_->ny + iy]; }

    Jet dx(int i) const;  // d/dx^i, valid x-order drops by one
    Jet dy(int i) const;  // d/dy^i, valid y-order drops by one

    bool all_finite() const;  // every coefficient inside the valid region

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator+=(double s);
    Jet& operator-=(double s);
    Jet& operator*=(double s);
    Jet& operator/=(double s);

    friend Jet operator+(const Jet& a, const Jet& b);
    friend Jet operator-(const Jet& a, const Jet& b);
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator+(const Jet& a, double s);
    friend Jet operator+(double s, const Jet& a);
    friend Jet operator-(const Jet& a, double s);
    friend Jet operator-(double s, const Jet& a);
    friend Jet operator*(const Jet& a, double s);
    friend Jet operator*(double s, const Jet& a);
    friend Jet operator/(const Jet& a, double s);
    friend Jet operator/(double s, const Jet& a);

    /// this += a * b, without a temporary; validity meets at the minimum.
    void fma(const Jet& a, const Jet& b);

    friend Jet sqrt(const Jet& a);
    friend Jet exp(const Jet& a);
    friend Jet log(const Jet& a);
    friend Jet pow(const Jet& a, double e);
    friend Jet recip(const Jet& a);

private:
    Jet(const JetShape* s, int vx, int vy) : shape_(s), vx_(vx), vy_(vy), c_(s->ncoeff, 0.0) {}

    // out (+)= a * b restricted to the validity cap
    static void conv(const Jet& a, const Jet& b, Jet& out, bool accumulate);
    // power-series composition sum_j coeff[j] * u^j for nilpotent u (value
    // lane zero), evaluated by Horner at u's validity
    static Jet series(const Jet& u, std::span<const double> coeff);
    Jet nilpotent_part(double scale) const;  // this*scale with value lane zeroed

    const JetShape* shape_ = nullptr;
    int vx_ = 0, vy_ = 0;
    std::vector<double> c_;
};

using JetVec = std::vector<Jet>;

/// Coordinate jets for an evaluation point, at the given shape.
JetVec lift_point_x(const JetShape* s, std::span<const double> x);
JetVec lift_point_y(const JetShape* s, std::span<const double> y);

/// Lifts a generic scalar function of (x, y) to its jet at the point.
/// F is callable as Jet(std::span<const Jet> x, std::span<const Jet> y).
template <class F>
Jet lift(F&& f, std::span<const double> x, std::span<const double> y, int order_x, int order_y) {
    const JetShape* s = jet_shape(static_cast<int>(x.size()), order_x, order_y);
    JetVec jx = lift_point_x(s, x);
    JetVec jy = lift_point_y(s, y);
    return f(std::span<const Jet>(jx), std::span<const Jet>(jy));
}

}  // namespace finsler
