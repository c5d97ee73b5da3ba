#include "sflob/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "sflob/errors.hpp"

namespace sflob {

BookState init_book(const ModelParams& params, Rng& rng) {
    validate(params);
    const long L = params.cutoff;
    const long margin = std::max(1024L, L / 2);

    BookState state;
    state.params = params;
    state.asks = BookSide(-L, 2 * L, margin);
    state.bids = BookSide(-2 * L, L, margin);

    // Best bid at 0, best ask at 1. Window fills: asks over (0, L], bids over
    // [1-L, 0], then one forced order at relative level 1 on each side.
    const double n_st = params.n_st();
    for (long q = 1; q <= L; ++q) {
        const long n = rng.poisson(n_st);
        for (long i = 0; i < n; ++i) state.asks.add_order(q);
    }
    for (long q = 1; q <= L; ++q) {
        const long n = rng.poisson(n_st);
        for (long i = 0; i < n; ++i) state.bids.add_order(1 - q);
    }
    state.asks.add_order(1);
    state.bids.add_order(0);
    state.best_ask = 1;
    state.best_bid = 0;
    state.clock = 0.0;
    return state;
}

double total_intensity(const BookState& state, const ModelParams& params) {
    if (state.asks.total() == 0) throw EmptySide("ask");
    if (state.bids.total() == 0) throw EmptySide("bid");
    const double sub = 2.0 * params.lambda * params.delta * static_cast<double>(params.cutoff);
    const double can = params.v * static_cast<double>(state.ask_window_orders() +
                                                      state.bid_window_orders());
    return sub + can + 2.0 * params.mu;
}

std::pair<double, EventDescriptor> sample_event(const BookState& state,
                                                const ModelParams& params, Rng& rng) {
    if (state.asks.total() == 0) throw EmptySide("ask");
    if (state.bids.total() == 0) throw EmptySide("bid");

    const long L = params.cutoff;
    const double sub_side = params.lambda * params.delta * static_cast<double>(L);
    const std::int64_t n_ask = state.ask_window_orders();
    const std::int64_t n_bid = state.bid_window_orders();

    // Cumulative channel weights; the same summation order defines the total,
    // so the uniform draw below can never land in a zero-rate channel.
    double cum[6];
    cum[0] = sub_side;                                          // ask limit
    cum[1] = cum[0] + sub_side;                                 // bid limit
    cum[2] = cum[1] + params.v * static_cast<double>(n_ask);    // ask cancel
    cum[3] = cum[2] + params.v * static_cast<double>(n_bid);    // bid cancel
    cum[4] = cum[3] + params.mu;                                // buy market
    cum[5] = cum[4] + params.mu;                                // sell market
    const double lambda_tot = cum[5];

    const double wait = rng.exponential(lambda_tot);
    const double u = rng.uniform01() * lambda_tot;

    EventDescriptor desc;
    if (u < cum[0]) {
        desc.kind = EventKind::AskLimit;
        desc.rel_level = 1 + static_cast<long>(rng.uniform_below(static_cast<std::uint64_t>(L)));
    } else if (u < cum[1]) {
        desc.kind = EventKind::BidLimit;
        desc.rel_level = -1 - static_cast<long>(rng.uniform_below(static_cast<std::uint64_t>(L)));
    } else if (u < cum[2]) {
        const std::int64_t k =
            1 + static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(n_ask)));
        const long level = state.asks.kth_order_in(state.best_bid + 1, state.best_bid + L, k);
        desc.kind = EventKind::AskCancel;
        desc.rel_level = level - state.best_bid;
    } else if (u < cum[3]) {
        const std::int64_t k =
            1 + static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(n_bid)));
        const long level = state.bids.kth_order_in(state.best_ask - L, state.best_ask - 1, k);
        desc.kind = EventKind::BidCancel;
        desc.rel_level = level - state.best_ask;
    } else if (u < cum[4]) {
        desc.kind = EventKind::BuyMarket;
        desc.rel_level = state.best_ask - state.best_bid;
    } else {
        desc.kind = EventKind::SellMarket;
        desc.rel_level = state.best_bid - state.best_ask;
    }
    return {wait, desc};
}

namespace {

EventRecord begin_record(const BookState& state, EventKind kind, long level, long q) {
    EventRecord r;
    r.time = state.clock;
    r.kind = kind;
    r.level = level;
    r.rel_level = q;
    r.doubled_mid_before = state.doubled_mid();
    r.best_ask_before = state.best_ask;
    r.best_bid_before = state.best_bid;
    return r;
}

EventRecord finish_record(EventRecord r, const BookState& state) {
    r.doubled_mid_after = state.doubled_mid();
    r.best_ask_after = state.best_ask;
    r.best_bid_after = state.best_bid;
    return r;
}

}  // namespace

EventRecord apply_limit_order(BookState& state, Side side, long q) {
    const long L = state.params.cutoff;
    if (side == Side::Ask) {
        if (q < 1 || q > L) throw WindowViolation(q, L);
        const long level = state.best_bid + q;
        EventRecord r = begin_record(state, EventKind::AskLimit, level, q);
        state.asks.add_order(level);
        if (level < state.best_ask) state.best_ask = level;
        return finish_record(r, state);
    }
    if (q > -1 || q < -L) throw WindowViolation(q, L);
    const long level = state.best_ask + q;
    EventRecord r = begin_record(state, EventKind::BidLimit, level, q);
    state.bids.add_order(level);
    if (level > state.best_bid) state.best_bid = level;
    return finish_record(r, state);
}

EventRecord apply_removal(BookState& state, Side side, long q, bool is_market) {
    if (side == Side::Ask) {
        const long level = state.best_bid + q;
        if (is_market && level != state.best_ask)
            throw Error("market order must execute at the best ask");
        if (state.asks.count_at(level) < 1) throw EmptyQueue(level);
        if (state.asks.total() == 1) throw SideWouldEmpty(state.clock);
        EventRecord r = begin_record(
            state, is_market ? EventKind::BuyMarket : EventKind::AskCancel, level, q);
        state.asks.remove_order(level);
        if (level == state.best_ask && state.asks.count_at(level) == 0)
            state.best_ask = *state.asks.first_occupied_at_or_above(level + 1);
        return finish_record(r, state);
    }
    const long level = state.best_ask + q;
    if (is_market && level != state.best_bid)
        throw Error("market order must execute at the best bid");
    if (state.bids.count_at(level) < 1) throw EmptyQueue(level);
    if (state.bids.total() == 1) throw SideWouldEmpty(state.clock);
    EventRecord r = begin_record(
        state, is_market ? EventKind::SellMarket : EventKind::BidCancel, level, q);
    state.bids.remove_order(level);
    if (level == state.best_bid && state.bids.count_at(level) == 0)
        state.best_bid = *state.bids.last_occupied_at_or_below(level - 1);
    return finish_record(r, state);
}

EventRecord apply_event(BookState& state, const EventDescriptor& desc) {
    switch (desc.kind) {
        case EventKind::AskLimit: return apply_limit_order(state, Side::Ask, desc.rel_level);
        case EventKind::BidLimit: return apply_limit_order(state, Side::Bid, desc.rel_level);
        case EventKind::AskCancel: return apply_removal(state, Side::Ask, desc.rel_level, false);
        case EventKind::BidCancel: return apply_removal(state, Side::Bid, desc.rel_level, false);
        case EventKind::BuyMarket:
            return apply_removal(state, Side::Ask, state.best_ask - state.best_bid, true);
        case EventKind::SellMarket:
            return apply_removal(state, Side::Bid, state.best_bid - state.best_ask, true);
    }
    throw Error("unknown event kind");
}

EventRecord step(BookState& state, const ModelParams& params, Rng& rng) {
    auto [wait, desc] = sample_event(state, params, rng);
    state.clock += wait;
    return apply_event(state, desc);
}

double default_warmup(const ModelParams& params) {
    double w = 50.0 / params.v;
    if (params.mu > 0.0) w = std::max(w, 50.0 / params.mu);
    return w;
}

SimOutcome simulate(const ModelParams& params, const SeedSpec& seed, double warmup_time,
                    double measure_time, double snapshot_interval, EventSink* events,
                    SnapshotSink* snapshots) {
    validate(params);
    SimOutcome out;
    if (measure_time <= 0.0) return out;
    if (snapshot_interval <= 0.0) snapshot_interval = 1.0 / (params.v + params.mu);

    Rng rng(derive_stream_seed(seed));
    BookState state = init_book(params, rng);

    const double t_end = warmup_time + measure_time;
    long long next_snap = 1;
    const long long total_snaps =
        static_cast<long long>(std::floor(measure_time / snapshot_interval));

    try {
        for (;;) {
            auto [wait, desc] = sample_event(state, params, rng);
            const double event_time = state.clock + wait;

            // The book is unchanged between events, so any snapshot times
            // falling before the next event observe the current state.
            while (next_snap <= total_snaps) {
                const double ts = warmup_time + static_cast<double>(next_snap) * snapshot_interval;
                if (ts > event_time || ts > t_end) break;
                if (snapshots) snapshots->on_snapshot(state, ts);
                ++out.snapshots;
                ++next_snap;
            }
            if (event_time >= t_end && next_snap > total_snaps) {
                out.end_clock = t_end;
                break;
            }
            if (event_time >= t_end) {
                // Only trailing snapshots remain; no further events needed.
                while (next_snap <= total_snaps) {
                    if (snapshots)
                        snapshots->on_snapshot(
                            state, warmup_time + static_cast<double>(next_snap) * snapshot_interval);
                    ++out.snapshots;
                    ++next_snap;
                }
                out.end_clock = t_end;
                break;
            }

            state.clock = event_time;
            const EventRecord rec = apply_event(state, desc);
            if (event_time >= warmup_time) {
                ++out.events_measured;
                if (events) events->on_event(rec);
            }
        }
    } catch (const SideWouldEmpty& e) {
        out.completed = false;
        out.aborted_at = e.time;
        out.end_clock = state.clock;
    }
    return out;
}

}  // namespace sflob
