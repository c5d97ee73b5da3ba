#pragma once

#include <cstdint>
#include <utility>

#include "sflob/book.hpp"
#include "sflob/params.hpp"
#include "sflob/rng.hpp"

namespace sflob {

/// A sampled-but-not-yet-applied event. rel_level is the relative price level
/// in the frame of the opposite best: positive for ask-side events, negative
/// for bid-side events. For market orders the target is always the current
/// best, so rel_level is informational.
struct EventDescriptor {
    EventKind kind{};
    long rel_level = 0;
};

/// Fresh book: every window level carries an independent Poisson(n_st) count
/// plus one forced order at relative level 1 per side, so both bests exist.
/// Best bid starts at level 0, best ask at level 1, clock at 0.
BookState init_book(const ModelParams& params, Rng& rng);

/// Exact total event intensity 2*lambda*delta*L + v*(window orders) + 2*mu.
double total_intensity(const BookState& state, const ModelParams& params);

/// Gillespie draw: exponential waiting time at the total intensity plus a
/// channel/level pick proportional to the per-channel rates. Does not mutate
/// the book.
std::pair<double, EventDescriptor> sample_event(const BookState& state,
                                                const ModelParams& params, Rng& rng);

/// Limit-order submission at relative level q (asks: q in [1,L], bids: q in
/// [-L,-1]). Updates the best and doubled midprice when the order improves
/// the touch.
EventRecord apply_limit_order(BookState& state, Side side, long q);

/// Cancellation or market-order execution at relative level q. Market orders
/// must target the best level. Locates the next occupied level when the best
/// queue empties; throws SideWouldEmpty instead of leaving a side with no
/// orders anywhere.
EventRecord apply_removal(BookState& state, Side side, long q, bool is_market);

EventRecord apply_event(BookState& state, const EventDescriptor& desc);

/// Sample one event, advance the clock by its waiting time, apply it.
EventRecord step(BookState& state, const ModelParams& params, Rng& rng);

class EventSink {
public:
    virtual ~EventSink() = default;
    virtual void on_event(const EventRecord& record) = 0;
};

class SnapshotSink {
public:
    virtual ~SnapshotSink() = default;
    virtual void on_snapshot(const BookState& state, double t) = 0;
};

struct SimOutcome {
    bool completed = true;
    double aborted_at = 0.0;   // meaningful when !completed
    long long events_measured = 0;
    long long snapshots = 0;
    double end_clock = 0.0;
};

/// Full event loop: warm-up (events discarded), then a measurement window of
/// the given length during which every event is streamed to the event sink
/// and the book is snapshotted at uniform time intervals. measure_time == 0
/// returns immediately. A SideWouldEmpty abort is reported in the outcome
/// rather than thrown.
SimOutcome simulate(const ModelParams& params, const SeedSpec& seed, double warmup_time,
                    double measure_time, double snapshot_interval, EventSink* events,
                    SnapshotSink* snapshots);

/// Warm-up default: max(50/v, 50/mu if mu>0).
double default_warmup(const ModelParams& params);

}  // namespace sflob
