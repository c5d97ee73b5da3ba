#pragma once

#include <cstdint>
#include <vector>

namespace sflob {

/// Fenwick (binary indexed) tree over int64 weights with prefix sums,
/// point updates and k-th-element search, all O(log n).
class Fenwick {
public:
    Fenwick() = default;
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

    std::size_t size() const { return tree_.empty() ? 0 : tree_.size() - 1; }

    void add(std::size_t i, std::int64_t delta) {
        for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += delta;
    }

    /// Sum of weights at positions [0, i].
    std::int64_t prefix(std::size_t i) const {
        std::int64_t s = 0;
        for (std::size_t j = i + 1; j > 0; j -= j & (~j + 1)) s += tree_[j];
        return s;
    }

    /// Sum over [lo, hi]; empty if lo > hi.
    std::int64_t range(std::size_t lo, std::size_t hi) const {
        if (lo > hi) return 0;
        return prefix(hi) - (lo == 0 ? 0 : prefix(lo - 1));
    }

    std::int64_t total() const { return prefix(size() == 0 ? 0 : size() - 1); }

    /// Smallest position p such that prefix(p) >= k, for 1 <= k <= total().
    /// Returns size() if k exceeds the total weight.
    std::size_t find_kth(std::int64_t k) const {
        std::size_t pos = 0;
        std::size_t mask = 1;
        while ((mask << 1) <= size()) mask <<= 1;
        for (; mask > 0; mask >>= 1) {
            std::size_t next = pos + mask;
            if (next < tree_.size() && tree_[next] < k) {
                pos = next;
                k -= tree_[next];
            }
        }
        return pos;  // 0-based position (pos is count of positions strictly before)
    }

    /// Rebuild from raw weights in O(n).
    void build(const std::vector<std::int64_t>& weights) {
        tree_.assign(weights.size() + 1, 0);
        for (std::size_t i = 0; i < weights.size(); ++i) {
            tree_[i + 1] += weights[i];
            std::size_t parent = (i + 1) + ((i + 1) & (~(i + 1) + 1));
            if (parent < tree_.size()) tree_[parent] += tree_[i + 1];
        }
    }

private:
    std::vector<std::int64_t> tree_;
};

}  // namespace sflob
