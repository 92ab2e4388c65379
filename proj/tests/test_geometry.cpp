#include <doctest.h>

#include <cmath>

#include "finsler/classify.hpp"
#include "finsler/fd.hpp"
#include "finsler/point_frame.hpp"

using namespace finsler;

namespace {

PointFrame frame_at(const MetricSpec& spec, std::vector<double> x, std::vector<double> y, int py = 5) {
    return PointFrame(spec, std::move(x), std::move(y), 2, py);
}

double max_abs_diff(const Tensor<double>& a, const Tensor<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

double max_abs(const Tensor<double>& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("euclidean frame is flat") {
    auto spec = MetricSpec::builtin(Family::Euclidean, 3);
    auto f = frame_at(spec, {0.2, -0.1, 0.4}, {1.0, 0.0, 0.0});
    Tensor<double> g = values_of(f.metric());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(g(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
    Tensor<double> ell = values_of(f.hilbert_form());
    CHECK(ell(0) == doctest::Approx(1.0));
    CHECK(ell(1) == doctest::Approx(0.0));
    Tensor<double> hb = values_of(f.angular_metric());
    CHECK(hb(0, 0) == doctest::Approx(0.0));
    CHECK(hb(1, 1) == doctest::Approx(1.0));
    CHECK(hb(2, 2) == doctest::Approx(1.0));
    CHECK(max_abs(values_of(f.cartan_tensor())) < 1e-14);
    CHECK(max_abs(values_of(f.spray())) < 1e-14);
    CHECK(max_abs(values_of(f.nonlinear_connection())) < 1e-14);
    CHECK(max_abs(values_of(f.berwald_hcurvature())) < 1e-14);
    CHECK(max_abs(values_of(f.deviation())) < 1e-14);
}

TEST_CASE("fundamental identities at random points") {
    auto spec = MetricSpec::builtin(Family::Funk, 3);
    auto points = sample_domain_points(spec, 5, 31);
    for (auto& [x, y] : points) {
        auto f = frame_at(spec, x, y);
        // g y y = L^2
        Tensor<double> g = values_of(f.metric());
        double acc = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) acc += g(i, j) * y[i] * y[j];
        double l2 = f.L2().value();
        CHECK(std::abs(acc - l2) <= 1e-10 * l2);

        // identities ell y = L, hbar y = 0, h y = 0
        Tensor<double> ell = values_of(f.hilbert_form());
        Tensor<double> hb = values_of(f.angular_metric());
        Tensor<double> h = values_of(f.phi_operator());
        double ly = 0.0;
        for (int i = 0; i < 3; ++i) ly += ell(i) * y[i];
        CHECK(std::abs(ly - f.L().value()) <= 1e-12 * f.L().value());
        for (int i = 0; i < 3; ++i) {
            double hy = 0.0, hmixy = 0.0;
            for (int j = 0; j < 3; ++j) {
                hy += hb(i, j) * y[j];
                hmixy += h(i, j) * y[j];
            }
            CHECK(std::abs(hy) <= 1e-12 * l2);
            CHECK(std::abs(hmixy) <= 1e-12 * std::sqrt(l2));
        }

        // hbar with one index raised is a projector
        Tensor<double> ginv = values_of(f.metric_inverse());
        for (int i = 0; i < 3; ++i)
            for (int l = 0; l < 3; ++l) {
                double proj = 0.0;
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k) proj += hb(i, j) * ginv(j, k) * hb(k, l);
                CHECK(proj == doctest::Approx(hb(i, l)).epsilon(1e-10));
            }

        // Cartan tensor is indicatory and nonzero for the Funk metric
        Tensor<double> T = values_of(f.cartan_tensor());
        CHECK(max_abs(T) > 1e-3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double ty = 0.0;
                for (int k = 0; k < 3; ++k) ty += T(i, j, k) * y[k];
                CHECK(std::abs(ty) <= 1e-10 * max_abs(T));
            }
    }
}

TEST_CASE("riemannian family matches its closed forms") {
    const double mu = 0.7;
    auto spec = MetricSpec::builtin(Family::Lmu, 3, {{"mu", mu}});
    std::vector<double> x{0.15, -0.1, 0.2}, y{0.9, 0.4, -0.7};
    auto f = frame_at(spec, x, y);

    double x2 = 0.0, xy = 0.0;
    for (int i = 0; i < 3; ++i) {
        x2 += x[i] * x[i];
        xy += x[i] * y[i];
    }
    double w = 1.0 + mu * x2;

    CHECK(max_abs(values_of(f.cartan_tensor())) < 1e-12);  // Riemannian

    Tensor<double> G = values_of(f.spray());
    for (int i = 0; i < 3; ++i) CHECK(G(i) == doctest::Approx(-mu * xy / w * y[i]).epsilon(1e-10));

    Tensor<double> N = values_of(f.nonlinear_connection());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double expect = -mu * (y[i] * x[j] + xy * (i == j ? 1.0 : 0.0)) / w;
            CHECK(N(i, j) == doctest::Approx(expect).epsilon(1e-9));
        }

    // h-curvature equals mu (g_hk d^i_j - g_hj d^i_k)
    Tensor<double> R = values_of(f.berwald_hcurvature());
    Tensor<double> g = values_of(f.metric());
    double scale = max_abs(R);
    for (int i = 0; i < 3; ++i)
        for (int h = 0; h < 3; ++h)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    double expect = mu * (g(h, k) * (i == j ? 1.0 : 0.0) - g(h, j) * (i == k ? 1.0 : 0.0));
                    CHECK(std::abs(R(i, h, j, k) - expect) <= 1e-7 * scale);
                }

    // deviation is +mu L^2 h (fixes the global orientation)
    Tensor<double> H = values_of(f.deviation());
    Tensor<double> hmix = values_of(f.phi_operator());
    double l2 = f.L2().value();
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            CHECK(H(i, k) == doctest::Approx(mu * l2 * hmix(i, k)).epsilon(5e-8));
}

TEST_CASE("spray of the flat phi-class is independent of phi") {
    for (const char* preset : {"sqexp", "norm"}) {
        auto spec = MetricSpec::builtin(Family::Lphi, 4, {}, std::string(preset));
        auto points = sample_domain_points(spec, 5, 17);
        const auto& a = spec.a_vector();
        for (auto& [x, y] : points) {
            auto f = frame_at(spec, x, y);
            double ax = 0.0, ay = 0.0;
            for (int i = 0; i < 4; ++i) {
                ax += a[i] * x[i];
                ay += a[i] * y[i];
            }
            Tensor<double> G = values_of(f.spray());
            double scale = std::max(1.0, max_abs(G));
            for (int i = 0; i < 4; ++i)
                CHECK(std::abs(G(i) - (-ay / (1.0 + ax) * y[i])) <= 1e-8 * scale);

            Tensor<double> R = values_of(f.berwald_hcurvature());
            CHECK(max_abs(R) <= 1e-9 * std::max(1.0, f.L2().value()));
        }
    }
}

TEST_CASE("warped product matches its closed forms") {
    auto spec = MetricSpec::builtin(Family::Warped, 3, {}, std::string("exp"));
    std::vector<double> x{0.3, -0.2, 0.5}, y{0.8, -0.5, 1.1};
    auto f = frame_at(spec, x, y);
    double fx = std::exp(x[0]);
    double phi = warp_f1(WarpPreset::Exp, x[0]) / warp_f(WarpPreset::Exp, x[0]);

    Tensor<double> g = values_of(f.metric());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(g(i, j) == doctest::Approx(i == j ? fx * fx : 0.0).epsilon(1e-12));

    Tensor<double> B = values_of(f.berwald_coeffs());
    for (int h = 0; h < 3; ++h)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double expect = phi * ((i == 0 && h == j ? 1.0 : 0.0) + (j == 0 && h == i ? 1.0 : 0.0) -
                                       (i == j && h == 0 ? 1.0 : 0.0));
                CHECK(B(h, i, j) == doctest::Approx(expect).epsilon(1e-9));
            }

    // angular metric normalization: hbar = f^2 (|y|^2 d_ij - y_i y_j)/|y|^2
    Tensor<double> hb = values_of(f.angular_metric());
    double y2 = 0.0;
    for (int i = 0; i < 3; ++i) y2 += y[i] * y[i];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double expect = fx * fx * ((i == j ? y2 : 0.0) - y[i] * y[j]) / y2;
            CHECK(hb(i, j) == doctest::Approx(expect).epsilon(1e-10));
        }
}

TEST_CASE("euler homogeneity suite across the catalog") {
    std::vector<MetricSpec> specs;
    specs.push_back(MetricSpec::builtin(Family::Funk, 3));
    specs.push_back(MetricSpec::builtin(Family::ShenBall, 3));
    specs.push_back(MetricSpec::builtin(Family::Warped, 3, {}, std::string("poly2")));
    for (const auto& spec : specs) {
        auto points = sample_domain_points(spec, 4, 7);
        for (auto& [x, y] : points) {
            auto f = frame_at(spec, x, y, 6);
            auto euler = [&](const TensorJ& t, int deg) {
                double worst = 0.0, scale = 0.0;
                for (const Jet& e : t.data()) scale = std::max(scale, std::abs(e.value()));
                for (const Jet& e : t.data()) {
                    double acc = 0.0;
                    for (int i = 0; i < f.n(); ++i) acc += y[i] * e.dy(i).value();
                    worst = std::max(worst, std::abs(acc - deg * e.value()));
                }
                return worst / std::max(scale, 1e-30);
            };
            CHECK(euler(f.metric(), 0) <= 1e-8);
            CHECK(euler(f.spray(), 2) <= 1e-8);
            CHECK(euler(f.nonlinear_connection(), 1) <= 1e-8);
            CHECK(euler(f.berwald_coeffs(), 0) <= 1e-8);
            CHECK(euler(f.berwald_hcurvature(), 0) <= 1e-7);
        }
    }
}

TEST_CASE("metric from jets matches the finite-difference hessian") {
    auto spec = MetricSpec::builtin(Family::Funk, 3);
    std::vector<double> x{0.2, 0.1, -0.3}, y{1.1, -0.4, 0.6};
    auto f = frame_at(spec, x, y, 2);
    Tensor<double> g = values_of(f.metric());
    PointFn half_l2 = [&](std::span<const double> xs, std::span<const double> ys) {
        double L = spec.value<double>(xs, ys);
        return 0.5 * L * L;
    };
    for (int i = 0; i < 3; ++i) {
        double pure = fd_oracle(half_l2, x, y, CoordKind::Fiber, i, 2, 1e-5);
        CHECK(std::abs(g(i, i) - pure) <= std::max(1e-6, 1e-4 * std::abs(pure)));
        for (int j = i + 1; j < 3; ++j) {
            double mixed = fd_mixed(half_l2, x, y, CoordKind::Fiber, i, CoordKind::Fiber, j, 1e-4);
            CHECK(std::abs(g(i, j) - mixed) <= std::max(1e-6, 1e-4 * std::abs(mixed)));
        }
    }
}

TEST_CASE("first bianchi and pair antisymmetry") {
    auto spec = MetricSpec::builtin(Family::ShenBall, 3);
    auto points = sample_domain_points(spec, 4, 53);
    for (auto& [x, y] : points) {
        auto f = frame_at(spec, x, y);
        Tensor<double> R = values_of(f.berwald_hcurvature());
        double scale = std::max(max_abs(R), 1e-30);
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 3; ++c) {
                        CHECK(R(i, a, b, c) == -R(i, a, c, b));  // exact by construction
                        double cyc = R(i, c, a, b) + R(i, a, b, c) + R(i, b, c, a);
                        CHECK(std::abs(cyc) <= 1e-8 * scale);
                    }
    }
}

TEST_CASE("deviation oracle agreement") {
    for (auto family : {Family::Funk, Family::ShenBall}) {
        auto spec = MetricSpec::builtin(family, 3);
        auto points = sample_domain_points(spec, 3, 11);
        for (auto& [x, y] : points) {
            auto f = frame_at(spec, x, y);
            Tensor<double> a = values_of(f.deviation());
            Tensor<double> b = values_of(f.deviation_direct());
            CHECK(max_abs_diff(a, b) <= 1e-7 * std::max(1.0, max_abs(a)));
        }
    }
}

TEST_CASE("funk deviation encodes curvature -1/4") {
    for (int n : {3, 4}) {
        auto spec = MetricSpec::builtin(Family::Funk, n);
        auto points = sample_domain_points(spec, 4, 3);
        for (auto& [x, y] : points) {
            auto f = PointFrame(spec, x, y, 2, 5);
            Tensor<double> H = values_of(f.deviation());
            double tr = 0.0;
            for (int i = 0; i < n; ++i) tr += H(i, i);
            double k = tr / ((n - 1) * f.L2().value());
            CHECK(k == doctest::Approx(-0.25).epsilon(1e-6));
        }
    }
}

TEST_CASE("singular metric is reported") {
    auto ast = parse_expression("sqrt(y1^2 + 0.0000000000000001*y2^2)");
    auto spec = MetricSpec::expression("degenerate", 2, std::move(ast));
    auto f = frame_at(spec, {0.1, 0.1}, {1.0, 0.5}, 3);
    CHECK_THROWS_AS((void)f.metric_inverse(), SingularMetricError);
}

}  // TEST_SUITE
