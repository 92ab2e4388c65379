#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/fd.hpp"
#include "finsler/jet.hpp"

using namespace finsler;

namespace {

template <class S>
S euclidean_norm(std::span<const S> y) {
    S acc = y[0] * y[0];
    for (size_t i = 1; i < y.size(); ++i) acc += y[i] * y[i];
    using std::sqrt;
    return sqrt(acc);
}

// the projectively flat constant-curvature family, written out inline so the
// jet layer can be tested without the metric catalog
template <class S>
S lmu_value(double mu, std::span<const S> x, std::span<const S> y) {
    S x2 = x[0] * x[0];
    S y2 = y[0] * y[0];
    S xy = x[0] * y[0];
    for (size_t i = 1; i < x.size(); ++i) {
        x2 += x[i] * x[i];
        y2 += y[i] * y[i];
        xy += x[i] * y[i];
    }
    using std::sqrt;
    return sqrt(y2 + mu * (x2 * y2 - xy * xy)) / (1.0 + mu * x2);
}

}  // namespace

TEST_SUITE("jet") {

TEST_CASE("bilinear monomial has unit mixed partial") {
    std::vector<double> x{0.7, -0.3}, y{1.1, 0.4};
    Jet j = lift([](std::span<const Jet> jx, std::span<const Jet> jy) { return jx[0] * jy[0]; }, x, y, 1, 1);
    std::vector<int> ex{1, 0}, ey{1, 0}, zero{0, 0};
    CHECK(j.partial(ex, ey) == 1.0);
    CHECK(j.value() == 0.7 * 1.1);
    CHECK(j.partial(ex, zero) == 1.1);
}

TEST_CASE("norm partials at y=(3,4)") {
    // oracle: d|y|/dy1 = y1/|y| = 3/5; d²|y|/dy1² = (|y|²-y1²)/|y|³ = 16/125
    std::vector<double> x{0.0, 0.0}, y{3.0, 4.0};
    Jet j = lift([](std::span<const Jet>, std::span<const Jet> jy) { return euclidean_norm(jy); }, x, y, 0, 2);
    std::vector<int> zero{0, 0}, e1{1, 0}, e11{2, 0};
    CHECK(j.partial(zero, e1) == doctest::Approx(3.0 / 5.0).epsilon(1e-14));
    CHECK(j.partial(zero, e11) == doctest::Approx(16.0 / 125.0).epsilon(1e-14));

    PointFn f = [](std::span<const double>, std::span<const double> yy) {
        return std::sqrt(yy[0] * yy[0] + yy[1] * yy[1]);
    };
    CHECK(fd_oracle(f, x, y, CoordKind::Fiber, 0, 1, 1e-5) == doctest::Approx(3.0 / 5.0).epsilon(1e-9));
    CHECK(fd_oracle(f, x, y, CoordKind::Fiber, 0, 2, 1e-5) == doctest::Approx(16.0 / 125.0).epsilon(1e-5));
}

TEST_CASE("base partial of the mu-family vanishes at the origin") {
    std::vector<double> x{0.0, 0.0}, y{1.0, 0.0};
    Jet j = lift([](std::span<const Jet> jx, std::span<const Jet> jy) { return lmu_value(1.0, jx, jy); }, x, y, 1, 0);
    std::vector<int> ex{1, 0}, zero{0, 0};
    CHECK(j.partial(ex, zero) == doctest::Approx(0.0).epsilon(1e-14));

    PointFn f = [](std::span<const double> xx, std::span<const double> yy) { return lmu_value(1.0, xx, yy); };
    CHECK(fd_oracle(f, x, y, CoordKind::Base, 0, 1, 1e-5) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("fd oracle basics") {
    PointFn sq = [](std::span<const double>, std::span<const double> yy) { return yy[0] * yy[0]; };
    std::vector<double> x{0.0, 0.0}, y{0.9, -0.2};
    CHECK(fd_oracle(sq, x, y, CoordKind::Fiber, 0, 2, 1e-4) == doctest::Approx(2.0).epsilon(1e-6));
    PointFn c = [](std::span<const double>, std::span<const double>) { return 4.25; };
    CHECK(fd_oracle(c, x, y, CoordKind::Fiber, 1, 1, 1e-5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("jet partials agree with finite differences on a smooth composite") {
    std::vector<double> x{0.15, -0.2, 0.05}, y{1.0, 0.9, -0.3};
    auto generic = [](auto&& xs, auto&& ys) {
        using std::exp;
        using std::sqrt;
        auto n = euclidean_norm(ys);
        return sqrt(n * n + exp(xs[0] * ys[1])) / (1.0 + xs[1] * xs[1]);
    };
    Jet j = lift([&](std::span<const Jet> jx, std::span<const Jet> jy) { return generic(jx, jy); }, x, y, 2, 2);
    PointFn f = [&](std::span<const double> xx, std::span<const double> yy) { return generic(xx, yy); };

    const double step = 1e-5;
    for (int v = 0; v < 3; ++v) {
        std::vector<int> ex(3, 0), ey(3, 0), zero(3, 0);
        ex[v] = 1;
        ey[v] = 1;
        double tol_scale = 1e-6;
        CHECK(j.partial(ex, zero) ==
              doctest::Approx(fd_oracle(f, x, y, CoordKind::Base, v, 1, step)).epsilon(tol_scale));
        CHECK(j.partial(zero, ey) ==
              doctest::Approx(fd_oracle(f, x, y, CoordKind::Fiber, v, 1, step)).epsilon(tol_scale));
        ex[v] = 2;
        ey[v] = 2;
        CHECK(j.partial(ex, zero) ==
              doctest::Approx(fd_oracle(f, x, y, CoordKind::Base, v, 2, step)).epsilon(1e-4));
        CHECK(j.partial(zero, ey) ==
              doctest::Approx(fd_oracle(f, x, y, CoordKind::Fiber, v, 2, step)).epsilon(1e-4));
    }
    // a mixed x-y pair
    std::vector<int> ex{1, 0, 0}, ey{0, 1, 0};
    CHECK(j.partial(ex, ey) ==
          doctest::Approx(fd_mixed(f, x, y, CoordKind::Base, 0, CoordKind::Fiber, 1, 1e-4)).epsilon(1e-6));
}

TEST_CASE("mixed partials are symmetric bit-for-bit") {
    std::vector<double> x{0.4, 0.2}, y{1.3, -0.7};
    Jet j = lift(
        [](std::span<const Jet> jx, std::span<const Jet> jy) {
            return exp(jx[0] * jy[1]) * sqrt(jy[0] * jy[0] + jy[1] * jy[1] + 2.0) + jx[1] * jx[0];
        },
        x, y, 2, 3);
    Jet a = j.dy(0).dy(1);
    Jet b = j.dy(1).dy(0);
    std::vector<int> zero{0, 0};
    CHECK(a.partial(zero, zero) == b.partial(zero, zero));
    std::vector<int> e1{1, 0};
    CHECK(a.partial(e1, e1) == b.partial(e1, e1));
    Jet c = j.dx(0).dy(0);
    Jet d = j.dy(0).dx(0);
    CHECK(c.partial(zero, zero) == d.partial(zero, zero));
    CHECK(c.partial(e1, zero) == d.partial(e1, zero));
}

TEST_CASE("product rule commutes with extraction") {
    const JetShape* s = jet_shape(2, 1, 3);
    Jet a = exp(Jet::coord_y(s, 0, 0.8) * 0.5 + Jet::coord_x(s, 0, 0.1));
    Jet b = sqrt(Jet::coord_y(s, 1, 1.2) + 2.0 * Jet::coord_y(s, 0, 0.8));
    Jet lhs = (a * b).dy(0);
    Jet rhs = a.dy(0) * b + a * b.dy(0);
    std::vector<int> zero{0, 0}, e1{0, 1};
    CHECK(lhs.partial(zero, zero) == doctest::Approx(rhs.partial(zero, zero)).epsilon(1e-14));
    CHECK(lhs.partial(zero, e1) == doctest::Approx(rhs.partial(zero, e1)).epsilon(1e-13));
}

TEST_CASE("algebraic routes through the chain rule coincide") {
    std::vector<double> x{0.3, -0.1}, y{0.9, 0.5};
    Jet g = lift(
        [](std::span<const Jet> jx, std::span<const Jet> jy) {
            return jx[0] * jx[0] + jy[0] * jy[1] + 1.5;
        },
        x, y, 2, 3);
    Jet via_sqrt = sqrt(exp(g));
    Jet via_exp = exp(g * 0.5);
    std::vector<int> zero{0, 0}, ex{2, 0}, ey{0, 2};
    CHECK(via_sqrt.partial(ex, zero) == doctest::Approx(via_exp.partial(ex, zero)).epsilon(1e-12));
    CHECK(via_sqrt.partial(zero, ey) == doctest::Approx(via_exp.partial(zero, ey)).epsilon(1e-12));
    Jet p = pow(g, 0.5);
    Jet sq = sqrt(g);
    CHECK(p.partial(ey, zero) == doctest::Approx(sq.partial(ey, zero)).epsilon(1e-12));

    Jet unit = g * recip(g);
    CHECK(unit.value() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(unit.partial(ex, zero) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("division value lane is the exact double quotient") {
    const JetShape* s = jet_shape(2, 0, 0);
    Jet a = Jet::constant(s, 0.123456789);
    Jet b = Jet::constant(s, 3.9876543);
    CHECK((a / b).value() == 0.123456789 / 3.9876543);
    CHECK(sqrt(b).value() == std::sqrt(3.9876543));
    CHECK(exp(a).value() == std::exp(0.123456789));
}

TEST_CASE("euler identity for the homogeneous norm") {
    std::vector<double> x{0.0, 0.0, 0.0}, y{1.2, -0.4, 0.8};
    Jet norm = lift([](std::span<const Jet>, std::span<const Jet> jy) { return euclidean_norm(jy); }, x, y, 0, 3);
    Jet acc = Jet::constant(norm.shape(), 0.0);
    for (int i = 0; i < 3; ++i) acc += Jet::coord_y(norm.shape(), i, y[i]) * norm.dy(i);
    CHECK(acc.value() == doctest::Approx(norm.value()).epsilon(1e-14));
}

TEST_CASE("error paths") {
    const JetShape* s = jet_shape(2, 1, 1);
    Jet a = Jet::coord_y(s, 0, 0.5);
    CHECK_THROWS_AS((void)a.dy(0).dy(0), DepthError);
    CHECK_THROWS_AS((void)a.dx(0).dx(0), DepthError);
    Jet neg = Jet::constant(s, -1.0);
    CHECK_THROWS_AS((void)sqrt(neg), NonSmoothPointError);
    Jet zero = Jet::constant(s, 0.0);
    CHECK_THROWS_AS((void)recip(zero), NonSmoothPointError);
    CHECK_THROWS_AS((void)log(zero), NonSmoothPointError);
}

}  // TEST_SUITE
