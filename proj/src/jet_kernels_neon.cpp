#include "finsler/jet_kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace finsler {
namespace {

void add_neon(double* out, const double* a, const double* b, int count) {
    int i = 0;
    for (; i + 2 <= count; i += 2) vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < count; ++i) out[i] = a[i] + b[i];
}

void sub_neon(double* out, const double* a, const double* b, int count) {
    int i = 0;
    for (; i + 2 <= count; i += 2) vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < count; ++i) out[i] = a[i] - b[i];
}

void neg_neon(double* out, const double* a, int count) {
    int i = 0;
    for (; i + 2 <= count; i += 2) vst1q_f64(out + i, vnegq_f64(vld1q_f64(a + i)));
    for (; i < count; ++i) out[i] = -a[i];
}

void scal_neon(double* out, const double* a, double s, int count) {
    float64x2_t vs = vdupq_n_f64(s);
    int i = 0;
    for (; i + 2 <= count; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vs));
    for (; i < count; ++i) out[i] = a[i] * s;
}

void axpy_neon(double* out, double s, const double* a, int count) {
    float64x2_t vs = vdupq_n_f64(s);
    int i = 0;
    for (; i + 2 <= count; i += 2) vst1q_f64(out + i, vfmaq_f64(vld1q_f64(out + i), vs, vld1q_f64(a + i)));
    for (; i < count; ++i) out[i] += s * a[i];
}

double dot_neon(const double* a, const double* b, int count) {
    float64x2_t acc = vdupq_n_f64(0.0);
    int i = 0;
    for (; i + 2 <= count; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < count; ++i) sum += a[i] * b[i];
    return sum;
}

// No gather on NEON; the pair loop stays scalar.
void conv_neon(double* out, const double* a, const double* b, const int32_t* out_idx, const int64_t* row_ptr,
               const int32_t* ia, const int32_t* ib, int row_begin, int row_end, bool accumulate) {
    for (int r = row_begin; r < row_end; ++r) {
        double acc = 0.0;
        for (int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += a[ia[k]] * b[ib[k]];
        if (accumulate)
            out[out_idx[r]] += acc;
        else
            out[out_idx[r]] = acc;
    }
}

const Kernels kNeon = {
    "neon", add_neon, sub_neon, neg_neon, scal_neon, axpy_neon, dot_neon, conv_neon,
};

}  // namespace

bool neon_available() { return true; }
const Kernels* neon_kernels() { return &kNeon; }

}  // namespace finsler

#else

namespace finsler {
bool neon_available() { return false; }
const Kernels* neon_kernels() { return nullptr; }
}  // namespace finsler

#endif
