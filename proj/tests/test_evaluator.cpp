#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nearshore/evaluator.hpp"

using namespace nearshore;

namespace {

GridSpec grid() { return GridSpec{0.0, 0.0, 0.5, 20, 20}; }

BinaryMap map_of(std::initializer_list<CellIndex> cells) {
    BinaryMap m(grid());
    for (const CellIndex& c : cells) m.set(c.col, c.row, true);
    return m;
}

BinaryMap full_coverage() {
    BinaryMap m(grid());
    std::fill(m.cells.begin(), m.cells.end(), std::uint8_t{1});
    return m;
}

TrackSnapshot snap(Timestamp t, std::uint64_t id, double x, double y,
                   TrackStatus status = TrackStatus::Confirmed) {
    TrackSnapshot s;
    s.t = t;
    s.track_id = id;
    s.status = status;
    s.x = x;
    s.y = y;
    return s;
}

TruthSample truth(Timestamp t, int id, double x, double y) { return TruthSample{t, id, x, y}; }

}  // namespace

TEST_CASE("score_map: estimated equals truth") {
    const BinaryMap m = map_of({{2, 2}, {3, 2}, {4, 2}});
    const BinaryMap docked = map_of({{10, 10}, {11, 10}});
    const MapScore s = score_map(m, m, docked, full_coverage());
    CHECK(s.iou == 1.0);
    CHECK(s.coverage_rate == 1.0);
    CHECK(s.docked_exclusion == 1.0);  // none of the docked cells mapped
}

TEST_CASE("score_map: empty estimate") {
    const BinaryMap truth_map = map_of({{2, 2}, {3, 2}});
    const BinaryMap docked = map_of({{10, 10}});
    const MapScore s = score_map(BinaryMap(grid()), truth_map, docked, full_coverage());
    CHECK(s.iou == 0.0);
    CHECK(s.docked_exclusion == 1.0);
    CHECK(s.coverage_rate == 0.0);
}

TEST_CASE("score_map: mapping the boats zeroes the exclusion rate") {
    const BinaryMap truth_map = map_of({{2, 2}});
    const BinaryMap docked = map_of({{10, 10}, {11, 10}});
    const BinaryMap est = merge_with_enc(truth_map, docked);  // truth plus boats
    const MapScore s = score_map(est, truth_map, docked, full_coverage());
    CHECK(s.docked_exclusion == 0.0);
    CHECK(s.coverage_rate == 1.0);
    CHECK(s.iou == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("score_map iou is symmetric") {
    const BinaryMap a = map_of({{1, 1}, {2, 2}, {3, 3}});
    const BinaryMap b = map_of({{2, 2}, {3, 3}, {4, 4}, {5, 5}});
    const BinaryMap none(grid());
    const double ab = score_map(a, b, none, full_coverage()).iou;
    const double ba = score_map(b, a, none, full_coverage()).iou;
    CHECK(ab == ba);
    CHECK(ab == doctest::Approx(2.0 / 5.0));
}

TEST_CASE("score_map rejects grid mismatches") {
    BinaryMap other(GridSpec{0.0, 0.0, 0.5, 21, 20});
    CHECK_THROWS_AS(score_map(other, map_of({}), map_of({}), full_coverage()), ConfigError);
}

TEST_CASE("score_tracks: one clean track on one target") {
    std::vector<TrackSnapshot> snaps;
    std::vector<TruthSample> truths;
    for (int k = 0; k < 10; ++k) {
        const Timestamp t = k * 100000;
        snaps.push_back(snap(t, 5, 0.1 * k, 0.0));
        truths.push_back(truth(t, 0, 0.1 * k, 0.2));
    }
    const TrackScore s = score_tracks(snaps, truths, 3.0);
    CHECK(s.confirmed_tracks == 1);
    CHECK(s.true_targets == 1);
    CHECK(s.false_tracks == 0);
    REQUIRE(s.per_target.size() == 1);
    CHECK(s.per_target[0].time_to_first_confirmed_s == 0.0);
    CHECK(s.per_target[0].fragmentation == 0);
    CHECK(s.per_target[0].id_switches == 0);
}

TEST_CASE("score_tracks: an extra track in open water is false") {
    std::vector<TrackSnapshot> snaps;
    std::vector<TruthSample> truths;
    for (int k = 0; k < 10; ++k) {
        const Timestamp t = k * 100000;
        snaps.push_back(snap(t, 1, 0.0, 0.0));
        snaps.push_back(snap(t, 2, 50.0, 50.0));  // nowhere near truth
        truths.push_back(truth(t, 0, 0.0, 0.0));
    }
    const TrackScore s = score_tracks(snaps, truths, 3.0);
    CHECK(s.confirmed_tracks == 2);
    CHECK(s.false_tracks == 1);

    // Monotone: adding one more never-matching track adds exactly one.
    for (int k = 0; k < 10; ++k) {
        snaps.push_back(snap(k * 100000, 3, -50.0, -50.0));
    }
    CHECK(score_tracks(snaps, truths, 3.0).false_tracks == 2);
}

TEST_CASE("score_tracks: tentative snapshots do not count as confirmed") {
    std::vector<TrackSnapshot> snaps;
    std::vector<TruthSample> truths;
    for (int k = 0; k < 5; ++k) {
        const Timestamp t = k * 100000;
        snaps.push_back(snap(t, 1, 0.0, 0.0, TrackStatus::Tentative));
        truths.push_back(truth(t, 0, 0.0, 0.0));
    }
    const TrackScore s = score_tracks(snaps, truths, 3.0);
    CHECK(s.confirmed_tracks == 0);
    CHECK(s.tentative_only_tracks == 1);
    CHECK(s.per_target[0].time_to_first_confirmed_s == -1.0);
}

TEST_CASE("score_tracks: lost and re-matched under a new id") {
    // Hand trace: target matched to track 1 at steps 0-2, unmatched at 3-4,
    // matched to track 2 at steps 5-7. Fragmentation 1, id switch 1.
    std::vector<TrackSnapshot> snaps;
    std::vector<TruthSample> truths;
    for (int k = 0; k < 8; ++k) {
        const Timestamp t = k * 100000;
        truths.push_back(truth(t, 0, 1.0 * k, 0.0));
        if (k < 3) snaps.push_back(snap(t, 1, 1.0 * k, 0.5));
        if (k >= 5) snaps.push_back(snap(t, 2, 1.0 * k, -0.5));
    }
    const TrackScore s = score_tracks(snaps, truths, 3.0);
    REQUIRE(s.per_target.size() == 1);
    CHECK(s.per_target[0].fragmentation == 1);
    CHECK(s.per_target[0].id_switches == 1);
    CHECK(s.per_target[0].time_to_first_confirmed_s == 0.0);
    CHECK(s.false_tracks == 0);
    CHECK(s.confirmed_tracks == 2);
}

TEST_CASE("score_tracks: re-matched under the same id counts no switch") {
    std::vector<TrackSnapshot> snaps;
    std::vector<TruthSample> truths;
    for (int k = 0; k < 8; ++k) {
        const Timestamp t = k * 100000;
        truths.push_back(truth(t, 0, 0.0, 0.0));
        if (k < 3 || k >= 5) snaps.push_back(snap(t, 1, 0.0, 0.5));
    }
    const TrackScore s = score_tracks(snaps, truths, 3.0);
    CHECK(s.per_target[0].fragmentation == 1);
    CHECK(s.per_target[0].id_switches == 0);
}

TEST_CASE("greedy assignment is one to one, nearest first") {
    // Two targets close together, one track: the track goes to the nearer.
    std::vector<TrackSnapshot> snaps{snap(0, 1, 0.0, 0.0)};
    std::vector<TruthSample> truths{truth(0, 0, 0.4, 0.0), truth(0, 1, 1.0, 0.0)};
    const auto table = match_table(snaps, truths, 3.0);
    REQUIRE(table.size() == 1);
    CHECK(table.count({0, 0}) == 1);

    // Two tracks, two targets interleaved: both matched, each to its nearest.
    snaps.push_back(snap(0, 2, 1.1, 0.0));
    const auto table2 = match_table(snaps, truths, 3.0);
    REQUIRE(table2.size() == 2);
    CHECK(table2.at({0, 0}) == 1);
    CHECK(table2.at({0, 1}) == 2);
}

TEST_CASE("shrinking the match radius never lowers time-to-first-track") {
    std::vector<TrackSnapshot> snaps;
    std::vector<TruthSample> truths;
    for (int k = 0; k < 10; ++k) {
        const Timestamp t = k * 100000;
        truths.push_back(truth(t, 0, 0.0, 0.0));
        // Track approaches the target over time.
        snaps.push_back(snap(t, 1, 5.0 - 0.5 * k, 0.0));
    }
    double prev = -1.0;
    for (double radius : {4.0, 3.0, 2.0, 1.0}) {
        const TrackScore s = score_tracks(snaps, truths, radius);
        const double ttf = s.per_target[0].time_to_first_confirmed_s;
        if (prev >= 0.0 && ttf >= 0.0) {
            CHECK(ttf >= prev);
        }
        if (ttf >= 0.0) prev = ttf;
    }
}
