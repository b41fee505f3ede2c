#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace isoperc {

/// Disjoint sets with path halving and union by size.
class DisjointSets {
public:
    using index_type = std::uint32_t;

    DisjointSets() = default;
    explicit DisjointSets(std::size_t n) { reset(n); }

    void reset(std::size_t n) {
        parent_.resize(n);
        std::iota(parent_.begin(), parent_.end(), index_type{0});
        size_.assign(n, 1);
        components_ = n;
    }

    index_type find(index_type x) noexcept {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Returns true when the two elements were in different sets.
    bool unite(index_type a, index_type b) noexcept {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --components_;
        return true;
    }

    bool same(index_type a, index_type b) noexcept { return find(a) == find(b); }
    index_type set_size(index_type x) noexcept { return size_[find(x)]; }
    std::size_t components() const noexcept { return components_; }
    std::size_t size() const noexcept { return parent_.size(); }

private:
    std::vector<index_type> parent_;
    std::vector<index_type> size_;
    std::size_t components_ = 0;
};

} // namespace isoperc
