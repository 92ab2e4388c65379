#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "finsler/jet.hpp"
#include "finsler/jet_kernels.hpp"
#include "finsler/jet_shape.hpp"

using namespace finsler;

namespace {

std::vector<double> random_array(std::mt19937_64& rng, int count) {
    std::vector<double> v(count);
    for (auto& e : v) e = 2.0 * (static_cast<double>(rng()) / static_cast<double>(UINT64_MAX)) - 1.0;
    return v;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar kernels match a naive loop") {
    std::mt19937_64 rng(7);
    auto a = random_array(rng, 133);
    auto b = random_array(rng, 133);
    std::vector<double> out(133);
    const Kernels& k = scalar_kernels();
    k.add(out.data(), a.data(), b.data(), 133);
    for (int i = 0; i < 133; ++i) CHECK(out[i] == a[i] + b[i]);
    k.axpy(out.data(), 0.5, b.data(), 133);
    for (int i = 0; i < 133; ++i) CHECK(out[i] == a[i] + b[i] + 0.5 * b[i]);
    double d = k.dot(a.data(), b.data(), 133);
    double ref = 0.0;
    for (int i = 0; i < 133; ++i) ref += a[i] * b[i];
    CHECK(d == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("simd kernels agree with the scalar reference") {
    const Kernels* simd = nullptr;
    if (avx2_kernels() && avx2_available()) simd = avx2_kernels();
    if (!simd && neon_kernels() && neon_available()) simd = neon_kernels();
    if (!simd) return;  // host has neither lane; reference-only build

    std::mt19937_64 rng(11);
    for (int count : {1, 4, 7, 64, 511}) {
        auto a = random_array(rng, count);
        auto b = random_array(rng, count);
        std::vector<double> ref(count), got(count);

        scalar_kernels().add(ref.data(), a.data(), b.data(), count);
        simd->add(got.data(), a.data(), b.data(), count);
        CHECK(ref == got);

        scalar_kernels().sub(ref.data(), a.data(), b.data(), count);
        simd->sub(got.data(), a.data(), b.data(), count);
        CHECK(ref == got);

        scalar_kernels().neg(ref.data(), a.data(), count);
        simd->neg(got.data(), a.data(), count);
        CHECK(ref == got);

        scalar_kernels().scal(ref.data(), a.data(), 1.37, count);
        simd->scal(got.data(), a.data(), 1.37, count);
        CHECK(ref == got);

        // axpy lanes may fuse the multiply-add, so compare to rounding
        ref = b;
        got = b;
        scalar_kernels().axpy(ref.data(), -0.77, a.data(), count);
        simd->axpy(got.data(), -0.77, a.data(), count);
        for (int i = 0; i < count; ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-15));

        double dr = scalar_kernels().dot(a.data(), b.data(), count);
        double dg = simd->dot(a.data(), b.data(), count);
        CHECK(dg == doctest::Approx(dr).epsilon(1e-13));
    }
}

TEST_CASE("conv program computes truncated products") {
    // (x1 + 2 y2)^2 over n=2 jets: coefficients are binomials, everything
    // else zero; checked against hand expansion
    const JetShape* s = jet_shape(2, 2, 3);
    Jet f = Jet::coord_x(s, 0, 0.0) + 2.0 * Jet::coord_y(s, 1, 0.0);
    Jet g = f * f;
    CHECK(g.value() == 0.0);
    std::vector<int> x2{2, 0}, zero{0, 0}, y2{0, 2}, x1{1, 0}, y1{0, 1};
    CHECK(g.partial(x2, zero) == 2.0);          // d²/dx1² of x1² = 2
    CHECK(g.partial(zero, y2) == 8.0);          // d²/dy2² of 4 y2² = 8
    std::vector<int> ex{1, 0}, ey{0, 1};
    CHECK(g.partial(ex, ey) == 4.0);            // cross term 2*2*x1*y2
}

TEST_CASE("simd conv agrees with scalar conv on a full-depth product") {
    const Kernels* simd = nullptr;
    if (avx2_kernels() && avx2_available()) simd = avx2_kernels();
    if (!simd && neon_kernels() && neon_available()) simd = neon_kernels();
    if (!simd) return;

    const JetShape* s = jet_shape(3, 2, 5);
    std::mt19937_64 rng(23);
    auto a = random_array(rng, s->ncoeff);
    auto b = random_array(rng, s->ncoeff);
    std::vector<double> ref(s->ncoeff, 0.0), got(s->ncoeff, 0.0);
    for (const auto& blk : s->mul_blocks) {
        scalar_kernels().conv(ref.data(), a.data(), b.data(), s->mul_out.data(), s->mul_row_ptr.data(),
                              s->mul_ia.data(), s->mul_ib.data(), blk.out_begin, blk.out_end, false);
        simd->conv(got.data(), a.data(), b.data(), s->mul_out.data(), s->mul_row_ptr.data(), s->mul_ia.data(),
                   s->mul_ib.data(), blk.out_begin, blk.out_end, false);
    }
    for (int i = 0; i < s->ncoeff; ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

}  // TEST_SUITE
