#include "finsler/jet_kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace finsler {
namespace {

#define FINSLER_AVX2 __attribute__((target("avx2,fma")))

FINSLER_AVX2 void add_avx2(double* out, const double* a, const double* b, int count) {
    int i = 0;
    for (; i + 4 <= count; i += 4)
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < count; ++i) out[i] = a[i] + b[i];
}

FINSLER_AVX2 void sub_avx2(double* out, const double* a, const double* b, int count) {
    int i = 0;
    for (; i + 4 <= count; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < count; ++i) out[i] = a[i] - b[i];
}

FINSLER_AVX2 void neg_avx2(double* out, const double* a, int count) {
    const __m256d zero = _mm256_setzero_pd();
    int i = 0;
    for (; i + 4 <= count; i += 4) _mm256_storeu_pd(out + i, _mm256_sub_pd(zero, _mm256_loadu_pd(a + i)));
    for (; i < count; ++i) out[i] = -a[i];
}

FINSLER_AVX2 void scal_avx2(double* out, const double* a, double s, int count) {
    const __m256d vs = _mm256_set1_pd(s);
    int i = 0;
    for (; i + 4 <= count; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vs));
    for (; i < count; ++i) out[i] = a[i] * s;
}

FINSLER_AVX2 void axpy_avx2(double* out, double s, const double* a, int count) {
    const __m256d vs = _mm256_set1_pd(s);
    int i = 0;
    for (; i + 4 <= count; i += 4)
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vs, _mm256_loadu_pd(a + i), _mm256_loadu_pd(out + i)));
    for (; i < count; ++i) out[i] += s * a[i];
}

FINSLER_AVX2 double dot_avx2(const double* a, const double* b, int count) {
    __m256d acc = _mm256_setzero_pd();
    int i = 0;
    for (; i + 4 <= count; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < count; ++i) sum += a[i] * b[i];
    return sum;
}

FINSLER_AVX2 void conv_avx2(double* out, const double* a, const double* b, const int32_t* out_idx,
                            const int64_t* row_ptr, const int32_t* ia, const int32_t* ib, int row_begin, int row_end,
                            bool accumulate) {
    for (int r = row_begin; r < row_end; ++r) {
        int64_t k = row_ptr[r];
        const int64_t end = row_ptr[r + 1];
        __m256d acc = _mm256_setzero_pd();
        for (; k + 4 <= end; k += 4) {
            __m128i via = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ia + k));
            __m128i vib = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ib + k));
            __m256d va = _mm256_i32gather_pd(a, via, 8);
            __m256d vb = _mm256_i32gather_pd(b, vib, 8);
            acc = _mm256_fmadd_pd(va, vb, acc);
        }
        double lanes[4];
        _mm256_storeu_pd(lanes, acc);
        double sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
        for (; k < end; ++k) sum += a[ia[k]] * b[ib[k]];
        if (accumulate)
            out[out_idx[r]] += sum;
        else
            out[out_idx[r]] = sum;
    }
}

const Kernels kAvx2 = {
    "avx2", add_avx2, sub_avx2, neg_avx2, scal_avx2, axpy_avx2, dot_avx2, conv_avx2,
};

}  // namespace

bool avx2_available() { return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"); }
const Kernels* avx2_kernels() { return &kAvx2; }

}  // namespace finsler

#else

namespace finsler {
bool avx2_available() { return false; }
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace finsler

#endif
