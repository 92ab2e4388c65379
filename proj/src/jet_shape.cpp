#include "finsler/jet_shape.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

namespace finsler {
namespace {

// All multi-indices over nvars variables with total degree <= p, graded-lex.
std::vector<std::vector<int>> enumerate_indices(int nvars, int p) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(nvars, 0);
    // enumerate lexicographically, then stable-sort by degree
    while (true) {
        int deg = 0;
        for (int v : cur) deg += v;
        if (deg <= p) out.push_back(cur);
        int i = nvars - 1;
        while (i >= 0) {
            ++cur[i];
            int d = 0;
            for (int v : cur) d += v;
            if (d <= p) break;
            cur[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        int da = 0, db = 0;
        for (int v : a) da += v;
        for (int v : b) db += v;
        if (da != db) return da < db;
        return a < b;
    });
    return out;
}

int pack(const int* exp, int nvars, int base) {
    int key = 0;
    for (int v = 0; v < nvars; ++v) key = key * base + exp[v];
    return key;
}

void build_rank(const std::vector<int>& exps, int nvars, int p, std::vector<int32_t>& rank) {
    int base = p + 1;
    int size = 1;
    for (int v = 0; v < nvars; ++v) size *= base;
    rank.assign(size, -1);
    int count = static_cast<int>(exps.size()) / nvars;
    for (int i = 0; i < count; ++i) rank[pack(&exps[i * static_cast<size_t>(nvars)], nvars, base)] = i;
}

// For every ordered pair (a, b) of indices whose exponent sum stays within
// the order bound, record the pair under the target index.
std::vector<std::vector<std::pair<int32_t, int32_t>>> pair_lists(const std::vector<int>& exps, int nvars, int p,
                                                                 const std::vector<int32_t>& rank) {
    int count = static_cast<int>(exps.size()) / nvars;
    std::vector<std::vector<std::pair<int32_t, int32_t>>> lists(count);
    std::vector<int> sum(nvars);
    for (int a = 0; a < count; ++a) {
        for (int b = 0; b < count; ++b) {
            int deg = 0;
            for (int v = 0; v < nvars; ++v) {
                sum[v] = exps[a * static_cast<size_t>(nvars) + v] + exps[b * static_cast<size_t>(nvars) + v];
                deg += sum[v];
            }
            if (deg > p) continue;
            int t = rank[pack(sum.data(), nvars, p + 1)];
            if (t >= 0) lists[t].emplace_back(a, b);
        }
    }
    return lists;
}

std::unique_ptr<JetShape> build_shape(int n, int px, int py) {
    auto s = std::make_unique<JetShape>();
    s->n = n;
    s->px = px;
    s->py = py;

    auto xi = enumerate_indices(n, px);
    auto yi = enumerate_indices(n, py);
    s->nx = static_cast<int>(xi.size());
    s->ny = static_cast<int>(yi.size());
    s->ncoeff = s->nx * s->ny;

    s->x_exp.reserve(static_cast<size_t>(s->nx) * n);
    for (auto& e : xi)
        for (int v : e) s->x_exp.push_back(v);
    s->y_exp.reserve(static_cast<size_t>(s->ny) * n);
    for (auto& e : yi)
        for (int v : e) s->y_exp.push_back(v);

    s->x_deg.resize(s->nx);
    for (int i = 0; i < s->nx; ++i) {
        int d = 0;
        for (int v = 0; v < n; ++v) d += s->x_exp[i * static_cast<size_t>(n) + v];
        s->x_deg[i] = d;
    }
    s->y_deg.resize(s->ny);
    for (int i = 0; i < s->ny; ++i) {
        int d = 0;
        for (int v = 0; v < n; ++v) d += s->y_exp[i * static_cast<size_t>(n) + v];
        s->y_deg[i] = d;
    }

    s->coeff_xdeg.resize(s->ncoeff);
    s->coeff_ydeg.resize(s->ncoeff);
    for (int ix = 0; ix < s->nx; ++ix)
        for (int iy = 0; iy < s->ny; ++iy) {
            s->coeff_xdeg[ix * static_cast<size_t>(s->ny) + iy] = s->x_deg[ix];
            s->coeff_ydeg[ix * static_cast<size_t>(s->ny) + iy] = s->y_deg[iy];
        }

    build_rank(s->x_exp, n, px, s->x_rank);
    build_rank(s->y_exp, n, py, s->y_rank);

    // extraction tables: d/dx_v reads coefficient (ix + e_v, iy), scaled by
    // exponent+1 (Taylor-normalized storage)
    s->dx_src.assign(n, std::vector<int32_t>(s->ncoeff, -1));
    s->dx_scale.assign(n, std::vector<double>(s->ncoeff, 0.0));
    s->dy_src.assign(n, std::vector<int32_t>(s->ncoeff, -1));
    s->dy_scale.assign(n, std::vector<double>(s->ncoeff, 0.0));
    std::vector<int> tmp(n);
    for (int v = 0; v < n; ++v) {
        for (int ix = 0; ix < s->nx; ++ix) {
            if (s->x_deg[ix] >= px) continue;
            for (int u = 0; u < n; ++u) tmp[u] = s->x_exp[ix * static_cast<size_t>(n) + u];
            ++tmp[v];
            int src = s->x_rank[pack(tmp.data(), n, px + 1)];
            if (src < 0) continue;
            for (int iy = 0; iy < s->ny; ++iy) {
                int dst = ix * s->ny + iy;
                s->dx_src[v][dst] = src * s->ny + iy;
                s->dx_scale[v][dst] = static_cast<double>(tmp[v]);
            }
        }
        for (int iy = 0; iy < s->ny; ++iy) {
            if (s->y_deg[iy] >= py) continue;
            for (int u = 0; u < n; ++u) tmp[u] = s->y_exp[iy * static_cast<size_t>(n) + u];
            ++tmp[v];
            int src = s->y_rank[pack(tmp.data(), n, py + 1)];
            if (src < 0) continue;
            for (int ix = 0; ix < s->nx; ++ix) {
                int dst = ix * s->ny + iy;
                s->dy_src[v][dst] = ix * s->ny + src;
                s->dy_scale[v][dst] = static_cast<double>(tmp[v]);
            }
        }
    }

    // multiplication program
    auto xpairs = pair_lists(s->x_exp, n, px, s->x_rank);
    auto ypairs = pair_lists(s->y_exp, n, py, s->y_rank);

    // outputs ordered by (xdeg, ydeg) grade blocks
    std::vector<int> order(s->ncoeff);
    for (int i = 0; i < s->ncoeff; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::make_pair(s->coeff_xdeg[a], s->coeff_ydeg[a]) <
               std::make_pair(s->coeff_xdeg[b], s->coeff_ydeg[b]);
    });

    s->mul_row_ptr.push_back(0);
    for (int c : order) {
        int oix = c / s->ny, oiy = c % s->ny;
        if (!s->mul_blocks.empty() && s->mul_blocks.back().degx == s->x_deg[oix] &&
            s->mul_blocks.back().degy == s->y_deg[oiy]) {
            // extend current block
        } else {
            JetShape::MulBlock b;
            b.degx = s->x_deg[oix];
            b.degy = s->y_deg[oiy];
            b.out_begin = static_cast<int>(s->mul_out.size());
            b.out_end = b.out_begin;
            s->mul_blocks.push_back(b);
        }
        s->mul_out.push_back(c);
        for (auto [xa, xb] : xpairs[oix])
            for (auto [ya, yb] : ypairs[oiy]) {
                s->mul_ia.push_back(xa * s->ny + ya);
                s->mul_ib.push_back(xb * s->ny + yb);
            }
        s->mul_row_ptr.push_back(static_cast<int64_t>(s->mul_ia.size()));
        s->mul_blocks.back().out_end = static_cast<int>(s->mul_out.size());
    }

    return s;
}

}  // namespace

int JetShape::x_index_of(const int* exp) const {
    int deg = 0;
    for (int v = 0; v < n; ++v) {
        if (exp[v] < 0) return -1;
        deg += exp[v];
    }
    if (deg > px) return -1;
    return x_rank[pack(exp, n, px + 1)];
}

int JetShape::y_index_of(const int* exp) const {
    int deg = 0;
    for (int v = 0; v < n; ++v) {
        if (exp[v] < 0) return -1;
        deg += exp[v];
    }
    if (deg > py) return -1;
    return y_rank[pack(exp, n, py + 1)];
}

const JetShape* jet_shape(int n, int px, int py) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::unique_ptr<JetShape>> registry;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n, px, py);
    auto it = registry.find(key);
    if (it == registry.end()) it = registry.emplace(key, build_shape(n, px, py)).first;
    return it->second.get();
}

}  // namespace finsler
