#include "sflob/book.hpp"

#include <algorithm>

#include "sflob/errors.hpp"

namespace sflob {

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::AskLimit: return "ask_limit";
        case EventKind::BidLimit: return "bid_limit";
        case EventKind::AskCancel: return "ask_cancel";
        case EventKind::BidCancel: return "bid_cancel";
        case EventKind::BuyMarket: return "buy_market";
        case EventKind::SellMarket: return "sell_market";
    }
    return "?";
}

BookSide::BookSide(long lo, long hi, long grow_margin)
    : origin_(lo), grow_margin_(std::max(grow_margin, 16L)),
      counts_(static_cast<std::size_t>(hi - lo + 1), 0),
      tree_(static_cast<std::size_t>(hi - lo + 1)) {}

long BookSide::count_at(long level) const {
    if (level < origin_ || level > span_hi()) return 0;
    return static_cast<long>(counts_[static_cast<std::size_t>(level - origin_)]);
}

void BookSide::ensure_span(long level) {
    if (level >= origin_ && level <= span_hi()) return;
    const long new_lo = std::min(level, origin_) - (level < origin_ ? grow_margin_ : 0);
    const long new_hi = std::max(level, span_hi()) + (level > span_hi() ? grow_margin_ : 0);
    rebuild(new_lo, new_hi);
}

void BookSide::rebuild(long new_lo, long new_hi) {
    std::vector<std::uint32_t> fresh(static_cast<std::size_t>(new_hi - new_lo + 1), 0);
    const long shift = origin_ - new_lo;
    for (std::size_t i = 0; i < counts_.size(); ++i)
        fresh[i + static_cast<std::size_t>(shift)] = counts_[i];
    counts_ = std::move(fresh);
    origin_ = new_lo;
    std::vector<std::int64_t> weights(counts_.begin(), counts_.end());
    tree_.build(weights);
}

void BookSide::add_order(long level) {
    ensure_span(level);
    const std::size_t i = static_cast<std::size_t>(level - origin_);
    ++counts_[i];
    tree_.add(i, +1);
    ++total_;
}

void BookSide::remove_order(long level) {
    if (count_at(level) < 1) throw EmptyQueue(level);
    const std::size_t i = static_cast<std::size_t>(level - origin_);
    --counts_[i];
    tree_.add(i, -1);
    --total_;
}

std::int64_t BookSide::orders_in(long lo, long hi) const {
    lo = std::max(lo, origin_);
    hi = std::min(hi, span_hi());
    if (lo > hi) return 0;
    return tree_.range(static_cast<std::size_t>(lo - origin_),
                       static_cast<std::size_t>(hi - origin_));
}

std::optional<long> BookSide::first_occupied_at_or_above(long level) const {
    level = std::max(level, origin_);
    if (level > span_hi()) return std::nullopt;
    const std::int64_t before =
        level == origin_ ? 0 : tree_.prefix(static_cast<std::size_t>(level - origin_ - 1));
    if (before + 1 > total_) return std::nullopt;
    return origin_ + static_cast<long>(tree_.find_kth(before + 1));
}

std::optional<long> BookSide::last_occupied_at_or_below(long level) const {
    if (level < origin_) return std::nullopt;
    level = std::min(level, span_hi());
    const std::int64_t upto = tree_.prefix(static_cast<std::size_t>(level - origin_));
    if (upto == 0) return std::nullopt;
    return origin_ + static_cast<long>(tree_.find_kth(upto));
}

long BookSide::kth_order_in(long lo, long hi, std::int64_t k) const {
    lo = std::max(lo, origin_);
    hi = std::min(hi, span_hi());
    const std::int64_t before =
        lo == origin_ ? 0 : tree_.prefix(static_cast<std::size_t>(lo - origin_ - 1));
    const long level = origin_ + static_cast<long>(tree_.find_kth(before + k));
    if (level > hi) throw Error("kth_order_in: rank exceeds orders in range");
    return level;
}

void BookState::check_invariants() const {
    auto scan_min = asks.first_occupied_at_or_above(asks.span_lo());
    auto scan_max = bids.last_occupied_at_or_below(bids.span_hi());
    if (!scan_min || !scan_max) throw Error("invariant: a side is empty");
    if (*scan_min != best_ask) throw Error("invariant: cached best ask differs from scan");
    if (*scan_max != best_bid) throw Error("invariant: cached best bid differs from scan");
    if (!(best_ask > best_bid)) throw Error("invariant: book crossed");
}

RelativeView relative_view(const BookState& state, long depth) {
    RelativeView view;
    view.rel_best_ask = state.best_ask - state.best_bid;
    view.rel_best_bid = state.best_bid - state.best_ask;
    view.ask_rel.assign(static_cast<std::size_t>(depth + 1), 0);
    view.bid_rel.assign(static_cast<std::size_t>(depth + 1), 0);
    for (long q = 1; q <= depth; ++q) {
        view.ask_rel[static_cast<std::size_t>(q)] = state.asks.count_at(state.best_bid + q);
        view.bid_rel[static_cast<std::size_t>(q)] = state.bids.count_at(state.best_ask - q);
    }
    return view;
}

}  // namespace sflob
