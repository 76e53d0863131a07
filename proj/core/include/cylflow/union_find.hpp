#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace cylflow {

// Union-find with path compression and union by size.
class UnionFind {
  public:
    explicit UnionFind(std::int64_t n)
        : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1), comps_(n) {
        std::iota(parent_.begin(), parent_.end(), std::int64_t{0});
    }

    std::int64_t find(std::int64_t x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            parent_[static_cast<std::size_t>(x)] =
                parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
            x = parent_[static_cast<std::size_t>(x)];
        }
        return x;
    }

    bool unite(std::int64_t a, std::int64_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
        size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
        --comps_;
        return true;
    }

    bool same(std::int64_t a, std::int64_t b) { return find(a) == find(b); }
    std::int64_t components() const { return comps_; }

  private:
    std::vector<std::int64_t> parent_;
    std::vector<std::int64_t> size_;
    std::int64_t comps_;
};

}  // namespace cylflow
