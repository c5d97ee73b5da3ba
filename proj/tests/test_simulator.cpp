#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "sflob/errors.hpp"
#include "sflob/rng.hpp"
#include "sflob/simulator.hpp"
#include "stat_oracles.hpp"
#include "test_helpers.hpp"

using namespace sflob;
using testhelp::make_book;

TEST_CASE("total intensity adds the four channel totals") {
    const ModelParams p{1000.0, 1.5, 2.5, 1e-4, 100};
    // one ask and one bid at the touch, nothing else
    BookState s = make_book(p, {{1, 1}}, {{0, 1}});
    const double want = 2.0 * p.lambda * p.delta * p.cutoff + 2.0 * p.v + 2.0 * p.mu;
    CHECK(total_intensity(s, p) == doctest::Approx(want).epsilon(1e-12));

    const ModelParams no_mo{1000.0, 1.5, 0.0, 1e-4, 100};
    BookState s2 = make_book(no_mo, {{1, 1}}, {{0, 1}});
    CHECK(total_intensity(s2, no_mo) ==
          doctest::Approx(2.0 * no_mo.lambda * no_mo.delta * no_mo.cutoff + 2.0 * no_mo.v)
              .epsilon(1e-12));
}

TEST_CASE("doubling every queue count doubles only the cancellation term") {
    const ModelParams p{1000.0, 1.5, 2.5, 1e-4, 100};
    BookState s = make_book(p, {{1, 2}, {5, 3}}, {{0, 1}, {-7, 4}});
    BookState d = make_book(p, {{1, 4}, {5, 6}}, {{0, 2}, {-7, 8}});
    const double base = 2.0 * p.lambda * p.delta * p.cutoff + 2.0 * p.mu;
    const double t1 = total_intensity(s, p) - base;
    const double t2 = total_intensity(d, p) - base;
    CHECK(t2 == doctest::Approx(2.0 * t1).epsilon(1e-12));
}

TEST_CASE("market orders dominate when mu dwarfs the other rates") {
    const ModelParams p{1.0, 1e-6, 1e12, 1e-4, 10};
    BookState s = make_book(p, {{1, 5}}, {{0, 5}});
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        auto [wait, desc] = sample_event(s, p, rng);
        const bool market =
            desc.kind == EventKind::BuyMarket || desc.kind == EventKind::SellMarket;
        REQUIRE(market);
    }
}

TEST_CASE("submission levels are uniform over the window") {
    const ModelParams p{1000.0, 1e-9, 0.0, 1e-2, 20};  // submissions dominate
    BookState s = make_book(p, {{1, 1}}, {{0, 1}});
    Rng rng(5);
    std::vector<double> counts(static_cast<std::size_t>(p.cutoff), 0.0);
    long n = 0;
    for (int i = 0; i < 1000000; ++i) {
        auto [wait, desc] = sample_event(s, p, rng);
        if (desc.kind != EventKind::AskLimit) continue;
        counts[static_cast<std::size_t>(desc.rel_level - 1)] += 1.0;
        ++n;
    }
    const std::vector<double> expected(counts.size(),
                                       static_cast<double>(n) / static_cast<double>(p.cutoff));
    const double pval = testoracle::chi2_test(counts, expected);
    CHECK(pval > 1e-3);
}

TEST_CASE("cancellation picks a level proportionally to its queue count") {
    const ModelParams p{1e-9, 1.0, 0.0, 1e-4, 100};  // cancellations dominate
    BookState s = make_book(p, {{2, 1}, {5, 2}, {9, 3}}, {{0, 1}});
    Rng rng(11);
    std::map<long, double> counts;
    long n = 0;
    for (int i = 0; i < 100000; ++i) {
        auto [wait, desc] = sample_event(s, p, rng);
        if (desc.kind != EventKind::AskCancel) continue;
        counts[desc.rel_level] += 1.0;
        ++n;
    }
    // frozen book: levels at relative 2, 5, 9 hold 1, 2, 3 orders
    const std::vector<double> observed{counts[2], counts[5], counts[9]};
    const std::vector<double> expected{n / 6.0, 2.0 * n / 6.0, 3.0 * n / 6.0};
    CHECK(testoracle::chi2_test(observed, expected) > 1e-3);
}

TEST_CASE("waiting times on a frozen book are exponential at the total intensity") {
    const ModelParams p{500.0, 2.0, 1.0, 1e-3, 40};
    BookState s = make_book(p, {{1, 2}, {4, 1}}, {{0, 3}});
    const double rate = total_intensity(s, p);
    Rng rng(13);
    std::vector<double> waits;
    waits.reserve(100000);
    for (int i = 0; i < 100000; ++i) waits.push_back(sample_event(s, p, rng).first);
    const double pval = testoracle::ks_test(
        std::move(waits), [rate](double t) { return 1.0 - std::exp(-rate * t); });
    CHECK(pval > 1e-3);
}

TEST_CASE("zero-rate channels never fire") {
    const ModelParams p{1000.0, 1.0, 0.0, 1e-3, 50};  // no market orders
    Rng rng(derive_stream_seed({3, 0}));
    BookState s = init_book(p, rng);
    for (int i = 0; i < 20000; ++i) {
        const EventRecord r = step(s, p, rng);
        REQUIRE(r.kind != EventKind::BuyMarket);
        REQUIRE(r.kind != EventKind::SellMarket);
    }
}

TEST_CASE("pinned far level relaxes to a Poisson occupancy") {
    // Birth-death harness: submissions and cancellations confined to one far
    // level, best prices pinned by untouched orders at the touch.
    const double mean = 3.0;  // lambda * delta / v
    const ModelParams p{3000.0, 1.0, 0.0, 1e-3, 1000};
    BookState s = make_book(p, {{1, 1}}, {{0, 1}});
    const long target = 500;
    Rng rng(17);

    const double birth = p.lambda * p.delta;
    const double sample_spacing = 3.0 / p.v;
    double t = 0.0, next_sample = sample_spacing;
    std::vector<double> occupancy_counts(40, 0.0);
    long n_samples = 0;
    while (n_samples < 100000) {
        const long n = s.asks.count_at(target);
        const double death = p.v * static_cast<double>(n);
        const double rate = birth + death;
        t += rng.exponential(rate);
        while (next_sample <= t && n_samples < 100000) {
            occupancy_counts[static_cast<std::size_t>(
                std::min<long>(n, 39))] += 1.0;
            ++n_samples;
            next_sample += sample_spacing;
        }
        if (rng.uniform01() * rate < birth)
            apply_limit_order(s, Side::Ask, target);
        else
            apply_removal(s, Side::Ask, target, false);
    }

    // chi-square against Poisson(mean), tail pooled
    std::vector<double> observed, expected;
    double tail_obs = 0.0, tail_exp = 0.0;
    for (int k = 0; k < 40; ++k) {
        const double e = 100000.0 * testoracle::poisson_pmf(k, mean);
        if (e >= 10.0) {
            observed.push_back(occupancy_counts[static_cast<std::size_t>(k)]);
            expected.push_back(e);
        } else {
            tail_obs += occupancy_counts[static_cast<std::size_t>(k)];
            tail_exp += e;
        }
    }
    observed.push_back(tail_obs);
    expected.push_back(tail_exp);
    const double pval = testoracle::chi2_test(observed, expected);
    CHECK(pval > 0.01);
}

TEST_CASE("incremental rate bookkeeping survives a million events") {
    const ModelParams p{2000.0, 1.0, 1.0, 1e-3, 200};
    Rng rng(derive_stream_seed({5, 5}));
    BookState s = init_book(p, rng);
    for (int i = 0; i < 1000000; ++i) {
        step(s, p, rng);
        if (i % 100000 == 0) {
            // recompute the window totals by brute-force level scan
            long long ask_win = 0, bid_win = 0;
            for (long q = 1; q <= p.cutoff; ++q) {
                ask_win += s.asks.count_at(s.best_bid + q);
                bid_win += s.bids.count_at(s.best_ask - q);
            }
            const double brute =
                2.0 * p.lambda * p.delta * p.cutoff + p.v * (ask_win + bid_win) + 2.0 * p.mu;
            const double fast = total_intensity(s, p);
            REQUIRE(std::abs(fast - brute) <= 1e-9 * brute);
        }
    }
    s.check_invariants();
}

TEST_CASE("simulate returns an empty outcome for a zero measurement window") {
    const ModelParams p{1000.0, 1.0, 1.0, 1e-4, 100};
    const SimOutcome out = simulate(p, {1, 0}, 10.0, 0.0, 0.0, nullptr, nullptr);
    CHECK(out.completed);
    CHECK(out.events_measured == 0);
    CHECK(out.snapshots == 0);
}

TEST_CASE("simulate reports a side-emptying abort instead of throwing") {
    // Huge market-order pressure with almost no refill chews one side fast.
    const ModelParams p{1e-6, 1e-6, 1e6, 1e-4, 10};
    const SimOutcome out = simulate(p, {1, 0}, 0.0, 1e9, 1.0, nullptr, nullptr);
    CHECK_FALSE(out.completed);
    CHECK(out.aborted_at >= 0.0);
}

TEST_CASE("identical seeds give identical event streams") {
    const ModelParams p{1000.0, 1.0, 1.0, 1e-3, 100};

    struct Recorder : EventSink {
        std::vector<EventRecord> events;
        void on_event(const EventRecord& r) override { events.push_back(r); }
    } rec1, rec2;

    simulate(p, {123, 4}, 5.0, 20.0, 0.5, &rec1, nullptr);
    simulate(p, {123, 4}, 5.0, 20.0, 0.5, &rec2, nullptr);
    REQUIRE(rec1.events.size() == rec2.events.size());
    CHECK(rec1.events.size() > 0);
    for (std::size_t i = 0; i < rec1.events.size(); ++i) {
        REQUIRE(rec1.events[i].time == rec2.events[i].time);
        REQUIRE(rec1.events[i].kind == rec2.events[i].kind);
        REQUIRE(rec1.events[i].level == rec2.events[i].level);
        REQUIRE(rec1.events[i].doubled_mid_after == rec2.events[i].doubled_mid_after);
    }
}
