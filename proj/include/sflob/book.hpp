#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sflob/fenwick.hpp"
#include "sflob/params.hpp"

namespace sflob {

enum class Side { Ask, Bid };

enum class EventKind { AskLimit, BidLimit, AskCancel, BidCancel, BuyMarket, SellMarket };

const char* to_string(EventKind kind);

/// One realized Poisson event with the book quantities before and after.
/// Midprice lives on the half-integer lattice and is stored doubled so that
/// all bookkeeping stays integral; price units appear only in estimators.
struct EventRecord {
    double time = 0.0;
    EventKind kind{};
    long level = 0;       // absolute tick level acted on
    long rel_level = 0;   // relative level q at action time (asks > 0, bids < 0)
    long long doubled_mid_before = 0;
    long long doubled_mid_after = 0;
    long best_ask_before = 0;
    long best_ask_after = 0;
    long best_bid_before = 0;
    long best_bid_after = 0;
};

/// Dense per-level order counts for one book side over a window of absolute
/// levels, indexed by a Fenwick tree. The window re-centers (grows) whenever
/// an insertion lands outside it; levels never written hold zero orders.
class BookSide {
public:
    BookSide() = default;
    /// Initial span [lo, hi] of absolute levels; grow_margin is the padding
    /// added on each reallocation.
    BookSide(long lo, long hi, long grow_margin);

    long count_at(long level) const;
    void add_order(long level);
    /// Requires count_at(level) >= 1.
    void remove_order(long level);

    std::int64_t total() const { return total_; }
    /// Orders at levels in [lo, hi], clamped to the stored span.
    std::int64_t orders_in(long lo, long hi) const;

    std::optional<long> first_occupied_at_or_above(long level) const;
    std::optional<long> last_occupied_at_or_below(long level) const;

    /// Level holding the k-th order (1-based) among orders at levels in
    /// [lo, hi]. Requires 1 <= k <= orders_in(lo, hi).
    long kth_order_in(long lo, long hi, std::int64_t k) const;

    long span_lo() const { return origin_; }
    long span_hi() const { return origin_ + static_cast<long>(counts_.size()) - 1; }

private:
    void ensure_span(long level);
    void rebuild(long new_lo, long new_hi);

    long origin_ = 0;
    long grow_margin_ = 1024;
    std::vector<std::uint32_t> counts_;
    Fenwick tree_;
    std::int64_t total_ = 0;
};

/// Full mutable order-book microstate.
///
/// Invariants maintained by the event-application functions:
///  - best_ask > best_bid (never crossed),
///  - best_ask == min occupied ask level, best_bid == max occupied bid level,
///  - doubled_mid() == best_ask + best_bid,
///  - both sides non-empty (a removal that would empty a side aborts).
struct BookState {
    ModelParams params;
    BookSide asks;
    BookSide bids;
    long best_ask = 0;
    long best_bid = 0;
    double clock = 0.0;

    long long doubled_mid() const {
        return static_cast<long long>(best_ask) + static_cast<long long>(best_bid);
    }

    /// Ask orders inside the moving window (best_bid, best_bid + L].
    std::int64_t ask_window_orders() const {
        return asks.orders_in(best_bid + 1, best_bid + params.cutoff);
    }
    /// Bid orders inside the moving window [best_ask - L, best_ask).
    std::int64_t bid_window_orders() const {
        return bids.orders_in(best_ask - params.cutoff, best_ask - 1);
    }

    /// Full-scan consistency check of the incrementally maintained bests;
    /// throws Error on violation. Intended for tests.
    void check_invariants() const;
};

/// Counts re-indexed by the relative coordinate: ask levels measured from the
/// best bid, bid levels from the best ask. ask_rel[q] is the count at
/// relative level q (zero for q <= 0 by construction); bid_rel[q] the count
/// at relative level -q.
struct RelativeView {
    long rel_best_ask = 0;  // best_ask - best_bid
    long rel_best_bid = 0;  // best_bid - best_ask
    std::vector<long> ask_rel;
    std::vector<long> bid_rel;
};

RelativeView relative_view(const BookState& state, long depth);

}  // namespace sflob
