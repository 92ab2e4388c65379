#pragma once

#include <cstdint>

namespace finsler {

/// Flat-array kernels behind jet arithmetic. The scalar set is the reference;
/// the AVX2 and NEON sets must be equivalence-tested against it (same inputs,
/// results equal to within reordering tolerance for conv/dot, bit-equal for
/// the elementwise ops). Selection happens once at startup; the environment
/// variable FINSLER_KERNELS=scalar|avx2|neon forces a specific set.
struct Kernels {
    const char* name;

    void (*add)(double* out, const double* a, const double* b, int count);
    void (*sub)(double* out, const double* a, const double* b, int count);
    void (*neg)(double* out, const double* a, int count);
    void (*scal)(double* out, const double* a, double s, int count);
    void (*axpy)(double* out, double s, const double* a, int count);
    double (*dot)(const double* a, const double* b, int count);

    // Sparse-pair truncated convolution: for each row r in [row_begin,
    // row_end), out[out_idx[r]] (+)= sum over pairs a[ia[k]] * b[ib[k]],
    // k in [row_ptr[r], row_ptr[r+1]).
    void (*conv)(double* out, const double* a, const double* b, const int32_t* out_idx, const int64_t* row_ptr,
                 const int32_t* ia, const int32_t* ib, int row_begin, int row_end, bool accumulate);
};

const Kernels& scalar_kernels();
bool avx2_available();
const Kernels* avx2_kernels();  // nullptr when not compiled for x86
bool neon_available();
const Kernels* neon_kernels();  // nullptr when not compiled for aarch64

/// The set picked at startup for this process.
const Kernels& active_kernels();

}  // namespace finsler
