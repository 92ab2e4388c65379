#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace finsler {

/// Index tables for truncated multivariate Taylor values in the 2n variables
/// (x^1..x^n, y^1..y^n), keeping all mixed monomials with x-degree <= px and
/// y-degree <= py. Multi-indices are enumerated in graded-lex order, so index
/// 0 is always the constant term. Shapes are immutable and shared; obtain one
/// through jet_shape().
struct JetShape {
    int n = 0;
    int px = 0;
    int py = 0;

    int nx = 0;      // number of x multi-indices
    int ny = 0;      // number of y multi-indices
    int ncoeff = 0;  // nx * ny

    // Exponent tables, flattened: x_exp[i*n + v] is the exponent of x^v in
    // x multi-index i. Degrees are cached per index.
    std::vector<int> x_exp, y_exp;
    std::vector<int> x_deg, y_deg;

    // Per-coefficient degrees, coefficient index c = ix*ny + iy.
    std::vector<int> coeff_xdeg, coeff_ydeg;

    // First-derivative extraction. For variable v and destination coefficient
    // c, dx_src[v][c] is the source coefficient (or -1 past the order bound)
    // and dx_scale[v][c] the integer exponent factor.
    std::vector<std::vector<int32_t>> dx_src, dy_src;
    std::vector<std::vector<double>> dx_scale, dy_scale;

    // Truncated-product program, CSR by output coefficient, outputs grouped
    // by (x-degree, y-degree) so a product capped at a validity region can
    // skip whole blocks.
    struct MulBlock {
        int degx = 0, degy = 0;
        int out_begin = 0, out_end = 0;  // range into out_idx / row_ptr rows
    };
    std::vector<MulBlock> mul_blocks;
    std::vector<int32_t> mul_out;      // output coefficient per row
    std::vector<int64_t> mul_row_ptr;  // size rows+1, offsets into mul_ia/ib
    std::vector<int32_t> mul_ia, mul_ib;

    int x_index_of(const int* exp) const;  // -1 if out of range
    int y_index_of(const int* exp) const;

    std::vector<int32_t> x_rank, y_rank;  // packed-exponent lookup tables
};

/// Returns the (process-lifetime, thread-safe) shared shape for the given
/// dimension and orders.
const JetShape* jet_shape(int n, int px, int py);

}  // namespace finsler
