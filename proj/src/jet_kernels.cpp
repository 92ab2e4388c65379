#include "finsler/jet_kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace finsler {
namespace {

void add_scalar(double* out, const double* a, const double* b, int count) {
    for (int i = 0; i < count; ++i) out[i] = a[i] + b[i];
}

void sub_scalar(double* out, const double* a, const double* b, int count) {
    for (int i = 0; i < count; ++i) out[i] = a[i] - b[i];
}

void neg_scalar(double* out, const double* a, int count) {
    for (int i = 0; i < count; ++i) out[i] = -a[i];
}

void scal_scalar(double* out, const double* a, double s, int count) {
    for (int i = 0; i < count; ++i) out[i] = a[i] * s;
}

void axpy_scalar(double* out, double s, const double* a, int count) {
    for (int i = 0; i < count; ++i) out[i] += s * a[i];
}

double dot_scalar(const double* a, const double* b, int count) {
    double acc = 0.0;
    for (int i = 0; i < count; ++i) acc += a[i] * b[i];
    return acc;
}

void conv_scalar(double* out, const double* a, const double* b, const int32_t* out_idx, const int64_t* row_ptr,
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

const Kernels kScalar = {
    "scalar", add_scalar, sub_scalar, neg_scalar, scal_scalar, axpy_scalar, dot_scalar, conv_scalar,
};

const Kernels& select() {
    const char* force = std::getenv("FINSLER_KERNELS");
    if (force) {
        if (std::strcmp(force, "scalar") == 0) return kScalar;
        if (std::strcmp(force, "avx2") == 0 && avx2_kernels() && avx2_available()) return *avx2_kernels();
        if (std::strcmp(force, "neon") == 0 && neon_kernels() && neon_available()) return *neon_kernels();
        return kScalar;
    }
    if (avx2_kernels() && avx2_available()) return *avx2_kernels();
    if (neon_kernels() && neon_available()) return *neon_kernels();
    return kScalar;
}

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

const Kernels& active_kernels() {
    static const Kernels& k = select();
    return k;
}

}  // namespace finsler
