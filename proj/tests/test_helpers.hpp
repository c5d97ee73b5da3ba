#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "sflob/book.hpp"
#include "sflob/simulator.hpp"

namespace testhelp {

/// Hand-built book from explicit (level, count) pairs per side; bests are
/// derived from the given orders.
inline sflob::BookState make_book(const sflob::ModelParams& params,
                                  std::initializer_list<std::pair<long, long>> asks,
                                  std::initializer_list<std::pair<long, long>> bids) {
    sflob::BookState state;
    state.params = params;
    const long span = 4 * params.cutoff;
    state.asks = sflob::BookSide(-span, span, params.cutoff);
    state.bids = sflob::BookSide(-span, span, params.cutoff);
    for (const auto& [level, count] : asks)
        for (long i = 0; i < count; ++i) state.asks.add_order(level);
    for (const auto& [level, count] : bids)
        for (long i = 0; i < count; ++i) state.bids.add_order(level);
    state.best_ask = *state.asks.first_occupied_at_or_above(-span);
    state.best_bid = *state.bids.last_occupied_at_or_below(span);
    state.clock = 0.0;
    return state;
}

inline sflob::EventDescriptor mirror(const sflob::EventDescriptor& d) {
    using sflob::EventKind;
    sflob::EventDescriptor m;
    switch (d.kind) {
        case EventKind::AskLimit: m.kind = EventKind::BidLimit; break;
        case EventKind::BidLimit: m.kind = EventKind::AskLimit; break;
        case EventKind::AskCancel: m.kind = EventKind::BidCancel; break;
        case EventKind::BidCancel: m.kind = EventKind::AskCancel; break;
        case EventKind::BuyMarket: m.kind = EventKind::SellMarket; break;
        case EventKind::SellMarket: m.kind = EventKind::BuyMarket; break;
    }
    m.rel_level = -d.rel_level;
    return m;
}

/// Side-swapped, level-negated copy of a book.
inline sflob::BookState mirror_book(const sflob::BookState& src) {
    sflob::BookState state;
    state.params = src.params;
    const long span = 4 * src.params.cutoff +
                      std::max(std::abs(src.asks.span_hi()), std::abs(src.bids.span_lo()));
    state.asks = sflob::BookSide(-span, span, src.params.cutoff);
    state.bids = sflob::BookSide(-span, span, src.params.cutoff);
    for (long level = src.bids.span_lo(); level <= src.bids.span_hi(); ++level)
        for (long i = 0; i < src.bids.count_at(level); ++i) state.asks.add_order(-level);
    for (long level = src.asks.span_lo(); level <= src.asks.span_hi(); ++level)
        for (long i = 0; i < src.asks.count_at(level); ++i) state.bids.add_order(-level);
    state.best_ask = -src.best_bid;
    state.best_bid = -src.best_ask;
    state.clock = src.clock;
    return state;
}

}  // namespace testhelp
