#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

#include "finsler/errors.hpp"

namespace finsler {

/// Index variance of a tensor slot.
enum class Var : uint8_t { Co, Con };

/// Dense tensor over one manifold dimension n with per-slot variance
/// metadata. Entries are doubles or jets; shapes at desk scale (n <= 4,
/// rank <= 4), so storage is a flat vector with row-major indexing.
template <class T>
class Tensor {
public:
    Tensor() = default;

    Tensor(int n, std::vector<Var> variance, const T& init)
        : n_(n), var_(std::move(variance)), data_(size_for(n, var_.size()), init) {}

    int n() const { return n_; }
    int rank() const { return static_cast<int>(var_.size()); }
    const std::vector<Var>& variance() const { return var_; }
    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    template <class... I>
    T& operator()(I... idx) {
        return data_[flat(idx...)];
    }

    template <class... I>
    const T& operator()(I... idx) const {
        return data_[flat(idx...)];
    }

private:
    static size_t size_for(int n, size_t rank) {
        size_t s = 1;
        for (size_t i = 0; i < rank; ++i) s *= n;
        return s;
    }

    template <class... I>
    size_t flat(I... idx) const {
        assert(sizeof...(idx) == var_.size());
        size_t f = 0;
        ((f = f * n_ + static_cast<size_t>(idx)), ...);
        return f;
    }

    int n_ = 0;
    std::vector<Var> var_;
    std::vector<T> data_;
};

}  // namespace finsler
