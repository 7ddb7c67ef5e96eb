#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nearshore/tracker.hpp"
#include "test_util.hpp"

#include <random>

using namespace nearshore;

namespace {

Track make_track(double x, double y, double vx, double vy, double r = 0.8, double v = 0.9) {
    Track t;
    t.id = 1;
    t.state.mean << x, y, vx, vy;
    t.state.cov = Eigen::Matrix4d::Identity();
    t.state.cov(2, 2) = t.state.cov(3, 3) = 0.5;
    t.existence = r;
    t.visibility = v;
    t.status = TrackStatus::Tentative;
    return t;
}

Detection det_at(double x, double y, Timestamp t = 0) {
    Detection d;
    d.t = t;
    d.x = x;
    d.y = y;
    d.n_points = 5;
    return d;
}

double min_eigenvalue(const Eigen::Matrix4d& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
    return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("predict propagates CV mean, existence, and visibility") {
    TrackerConfig cfg;
    const Track t = make_track(0, 0, 1, 0, 1.0, 1.0);
    const Track p = Tracker::predict(t, 2.0, cfg);
    CHECK(p.state.mean(0) == doctest::Approx(2.0));
    CHECK(p.state.mean(1) == doctest::Approx(0.0));
    CHECK(p.state.mean(2) == doctest::Approx(1.0));
    CHECK(p.existence == doctest::Approx(0.999));        // survival * 1
    CHECK(p.visibility == doctest::Approx(0.95));        // p(vis|vis) * 1

    const Track half = make_track(0, 0, 0, 0, 1.0, 0.0);
    const Track ph = Tracker::predict(half, 1.0, cfg);
    CHECK(ph.visibility == doctest::Approx(0.20));       // p(vis|invis)

    CHECK_THROWS_AS(Tracker::predict(t, 0.0, cfg), ConfigError);
}

TEST_CASE("predict grows covariance with white-noise acceleration") {
    TrackerConfig cfg;
    const Track t = make_track(0, 0, 0, 0);
    const Track p = Tracker::predict(t, 0.5, cfg);
    // F P F' alone keeps trace constant velocity-wise; Q strictly adds.
    CHECK(p.state.cov(0, 0) > t.state.cov(0, 0));
    CHECK(p.state.cov(2, 2) > t.state.cov(2, 2));
    CHECK(min_eigenvalue(p.state.cov) > 0.0);
}

TEST_CASE("gate keeps near detections and drops far ones") {
    TrackerConfig cfg;
    const Track t = make_track(10, 10, 0, 0);
    std::vector<Detection> dets = {det_at(10, 10), det_at(10.5, 9.5), det_at(300, 300)};
    const auto gated = Tracker::gate(t, dets, cfg);
    REQUIRE(gated.size() == 2);
    CHECK(gated[0] == 0);
    CHECK(gated[1] == 1);

    CHECK(Tracker::gate(t, {}, cfg).empty());
}

TEST_CASE("gate threshold is the exact 2-dof chi-square quantile") {
    TrackerConfig cfg;
    CHECK(cfg.gate_threshold() == doctest::Approx(9.21034037197618).epsilon(1e-12));
}

TEST_CASE("update against the scalar PDA hand computation") {
    TrackerConfig cfg;
    Track t = make_track(0, 0, 0, 0, 0.5, 0.8);

    const Detection d = det_at(0.4, -0.2);
    const auto res = Tracker::update_track(t, {d}, {0}, cfg);

    // Hand recomputation with scalar formulas: S = (1 + sz^2) I.
    const double s = 1.0 + cfg.measurement_noise_std * cfg.measurement_noise_std;
    const double d2 = (0.4 * 0.4 + 0.2 * 0.2) / s;
    const double g = std::exp(-0.5 * d2) / (2.0 * M_PI * s);
    const double l1 = g / cfg.clutter_density;
    const double pdg = cfg.detection_probability * cfg.gate_probability * 0.8;
    const double lambda = 1.0 - pdg + pdg * l1;
    const double beta0 = (1.0 - pdg) / lambda;
    const double beta1 = pdg * l1 / lambda;
    const double r_post = lambda * 0.5 / (1.0 - 0.5 + lambda * 0.5);
    const double l_vis = 1.0 - cfg.detection_probability * cfg.gate_probability +
                         cfg.detection_probability * cfg.gate_probability * l1;
    const double v_post = 0.8 * l_vis / (0.8 * l_vis + 0.2);

    CHECK(res.diag.beta_0 == doctest::Approx(beta0).epsilon(1e-12));
    CHECK(res.diag.beta[0] == doctest::Approx(beta1).epsilon(1e-12));
    CHECK(res.diag.weight_sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.track.existence == doctest::Approx(r_post).epsilon(1e-12));
    CHECK(res.track.visibility == doctest::Approx(v_post).epsilon(1e-12));

    // Kalman gain is (1/s) on position; the PDA mean moves beta1 of the way.
    CHECK(res.track.state.mean(0) == doctest::Approx(beta1 * 0.4 / s).epsilon(1e-9));
    CHECK(res.track.state.mean(1) == doctest::Approx(beta1 * -0.2 / s).epsilon(1e-9));
    CHECK(res.track.state.mean(0) > 0.0);
    CHECK(res.track.state.mean(1) < 0.0);
    CHECK(res.track.existence > 0.5);
}

TEST_CASE("missed detection: state frozen, covariance larger, r and v drop") {
    TrackerConfig cfg;
    const Track t = make_track(3, -2, 0.5, 0.1, 0.9, 0.9);

    const auto miss = Tracker::update_track(t, {}, {}, cfg);
    CHECK(miss.diag.beta_0 == doctest::Approx(1.0));
    CHECK(miss.track.state.mean == t.state.mean);
    CHECK(miss.track.existence < t.existence);
    CHECK(miss.track.visibility < t.visibility);

    const Detection d = det_at(3.05, -2.05);
    const auto hit = Tracker::update_track(t, {d}, {0}, cfg);
    CHECK(hit.track.existence > t.existence);
    // Covariance with a detection shrinks relative to the missed case.
    CHECK(hit.track.state.cov.trace() < miss.track.state.cov.trace());
}

TEST_CASE("association weights always sum to one") {
    TrackerConfig cfg;
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        Track t = make_track(u(rng), u(rng), 0, 0, 0.3 + 0.006 * trial, 0.2 + 0.007 * trial);
        std::vector<Detection> dets;
        std::vector<int> assigned;
        const int m = trial % 5;
        for (int i = 0; i < m; ++i) {
            dets.push_back(det_at(t.state.mean(0) + u(rng), t.state.mean(1) + u(rng)));
            assigned.push_back(i);
        }
        const auto res = Tracker::update_track(t, dets, assigned, cfg);
        CHECK(std::abs(res.diag.weight_sum - 1.0) < 1e-12);
        CHECK(min_eigenvalue(res.track.state.cov) > -1e-9);
    }
}

TEST_CASE("birth, confirmation, and termination lifecycle") {
    TrackerConfig cfg;
    Tracker tracker(cfg);

    // An unassociated detection spawns exactly one tentative track.
    auto tracks = tracker.step({det_at(5, 5, 100000)}, 100000);
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].status == TrackStatus::Tentative);
    CHECK(tracks[0].existence == doctest::Approx(cfg.initial_existence));
    CHECK(tracks[0].state.mean(0) == 5.0);
    const std::uint64_t id = tracks[0].id;

    // Repeated hits confirm it and keep the same id.
    for (int k = 1; k <= 20; ++k) {
        tracks = tracker.step({det_at(5, 5, 100000 + k * 100000)}, 100000 + k * 100000);
    }
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].id == id);
    CHECK(tracks[0].status == TrackStatus::Confirmed);
    CHECK(tracks[0].existence > cfg.confirmation_threshold);

    // Starvation terminates it in finite steps, and existence decreases
    // monotonically along the way.
    double prev_r = tracks[0].existence;
    int steps_to_death = 0;
    for (int k = 21; k <= 200 && !tracker.active_tracks().empty(); ++k) {
        tracks = tracker.step({}, 100000 + k * 100000);
        if (!tracks.empty()) {
            CHECK(tracks[0].existence < prev_r);
            prev_r = tracks[0].existence;
        }
        ++steps_to_death;
    }
    CHECK(tracker.active_tracks().empty());
    CHECK(steps_to_death < 150);
}

TEST_CASE("empty detections on an empty tracker stay empty") {
    Tracker tracker(TrackerConfig{});
    CHECK(tracker.step({}, 1).empty());
    CHECK(tracker.step({}, 2).empty());
}

TEST_CASE("step existence recursion matches the standalone oracle") {
    TrackerConfig cfg;
    Tracker tracker(cfg);
    Timestamp t = 100000;
    tracker.step({det_at(0, 0, t)}, t);

    // Recompute r_k for the hit-every-step run with the scalar recursion;
    // the detection sits exactly at the predicted mean.
    double r = cfg.initial_existence;
    std::vector<double> r_oracle;
    Track shadow = tracker.active_tracks()[0];
    for (int k = 1; k <= 20; ++k) {
        t += 100000;
        shadow = Tracker::predict(shadow, 0.1, cfg);
        r = cfg.survival_probability * r;

        const Eigen::Matrix2d s = innovation_covariance(shadow.state, cfg);
        const double g = 1.0 / (2.0 * M_PI * std::sqrt(s.determinant()));  // nu = 0
        const double l1 = g / cfg.clutter_density;
        const double pdg =
            cfg.detection_probability * cfg.gate_probability * shadow.visibility;
        const double lambda = 1.0 - pdg + pdg * l1;
        r = lambda * r / (1.0 - r + lambda * r);
        r_oracle.push_back(r);

        const Detection d = det_at(shadow.state.mean(0), shadow.state.mean(1), t);
        const auto tracks = tracker.step({d}, t);
        REQUIRE(tracks.size() == 1);
        CHECK(tracks[0].existence == doctest::Approx(r).epsilon(1e-9));
        shadow = tracks[0];
    }
    CHECK(r_oracle.back() > 0.99);
}

TEST_CASE("single target with 20 hits yields exactly one confirmed track") {
    TrackerConfig cfg;
    Tracker tracker(cfg);
    std::mt19937_64 rng(109);
    std::normal_distribution<double> noise(0.0, cfg.measurement_noise_std);
    Timestamp t = 0;
    std::vector<Track> tracks;
    for (int k = 0; k < 20; ++k) {
        t += 100000;
        const double x = 1.0 * 0.1 * k;
        tracks = tracker.step({det_at(x + noise(rng), noise(rng), t)}, t);
    }
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].status == TrackStatus::Confirmed);
}

TEST_CASE("occlusion: same id before and after a detection gap") {
    TrackerConfig cfg;
    Tracker tracker(cfg);
    Timestamp t = 0;
    std::vector<Track> tracks;
    // 40 steps of hits on a CV trajectory to settle the velocity estimate.
    for (int k = 0; k < 40; ++k) {
        t += 100000;
        tracks = tracker.step({det_at(0.5 * 0.1 * k, 0.0, t)}, t);
    }
    REQUIRE(tracks.size() == 1);
    const std::uint64_t id = tracks[0].id;
    CHECK(tracks[0].status == TrackStatus::Confirmed);

    // 2 s occlusion: no detections at all.
    for (int k = 0; k < 20; ++k) {
        t += 100000;
        tracks = tracker.step({}, t);
    }
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].id == id);

    // Reappears on the predicted path: same id keeps tracking.
    for (int k = 0; k < 10; ++k) {
        t += 100000;
        const double x = 0.5 * to_seconds(t - 100000);
        tracks = tracker.step({det_at(x, 0.0, t)}, t);
        REQUIRE(tracks.size() == 1);
        CHECK(tracks[0].id == id);
    }
    CHECK(tracks[0].existence > 0.9);
}

TEST_CASE("missed step yields strictly lower visibility than a detected step") {
    TrackerConfig cfg;
    const Track prior = make_track(0, 0, 0, 0, 0.9, 0.7);
    const auto hit = Tracker::update_track(prior, {det_at(0.1, 0.1)}, {0}, cfg);
    const auto miss = Tracker::update_track(prior, {}, {}, cfg);
    CHECK(miss.track.visibility < hit.track.visibility);
    CHECK(miss.track.visibility < prior.visibility);
}

TEST_CASE("r and v stay in [0,1] under random clutter storms") {
    TrackerConfig cfg;
    Tracker tracker(cfg);
    std::mt19937_64 rng(113);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    std::uniform_int_distribution<int> n_dets(0, 6);
    Timestamp t = 0;
    for (int k = 0; k < 300; ++k) {
        t += 100000;
        std::vector<Detection> dets;
        for (int i = 0; i < n_dets(rng); ++i) {
            dets.push_back(det_at(u(rng), u(rng), t));
        }
        for (const Track& tr : tracker.step(dets, t)) {
            CHECK(tr.existence >= 0.0);
            CHECK(tr.existence <= 1.0);
            CHECK(tr.visibility >= 0.0);
            CHECK(tr.visibility <= 1.0);
            CHECK(min_eigenvalue(tr.state.cov) > -1e-9);
        }
    }
}

TEST_CASE("contested detections go to the best-likelihood track") {
    TrackerConfig cfg;
    Tracker tracker(cfg);
    Timestamp t = 0;
    // Two well-separated targets.
    for (int k = 0; k < 15; ++k) {
        t += 100000;
        tracker.step({det_at(0, 0, t), det_at(8, 0, t)}, t);
    }
    REQUIRE(tracker.active_tracks().size() == 2);

    // One detection between them but clearly closer to track A.
    t += 100000;
    StepDiag diag;
    tracker.step({det_at(1.0, 0, t)}, t, &diag);
    REQUIRE(diag.associations.size() == 2);
    // The detection is contested only if gated by both; either way the
    // closer track holds it and the other sees nothing.
    CHECK(diag.associations[0].beta.size() + diag.associations[1].beta.size() <= 1);
}

TEST_CASE("tracker rejects non-increasing timestamps") {
    Tracker tracker(TrackerConfig{});
    tracker.step({}, 1000);
    CHECK_THROWS_AS(tracker.step({}, 1000), ConfigError);
    CHECK_THROWS_AS(tracker.step({}, 900), ConfigError);
}

TEST_CASE("identical detection streams give identical outputs") {
    TrackerConfig cfg;
    std::mt19937_64 rng(127);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::vector<std::vector<Detection>> stream;
    Timestamp t = 0;
    for (int k = 0; k < 100; ++k) {
        t += 100000;
        std::vector<Detection> dets;
        for (int i = 0; i < 3; ++i) dets.push_back(det_at(u(rng), u(rng), t));
        stream.push_back(dets);
    }
    Tracker a(cfg);
    Tracker b(cfg);
    t = 0;
    for (const auto& dets : stream) {
        t += 100000;
        const auto ta = a.step(dets, t);
        const auto tb = b.step(dets, t);
        REQUIRE(ta.size() == tb.size());
        for (std::size_t i = 0; i < ta.size(); ++i) {
            CHECK(ta[i].id == tb[i].id);
            CHECK(ta[i].state.mean == tb[i].state.mean);
            CHECK(ta[i].existence == tb[i].existence);
        }
    }
}

TEST_CASE("monte carlo NEES consistency (reduced size)") {
    const auto res = test_util::run_nees_experiment(50, 60, 0.1, 131);
    CHECK(res.max_weight_error < 1e-12);
    CHECK(res.rv_in_range);
    // Time-averaged NEES within the 95% chi-square band for 4 dof.
    CHECK(res.anees > res.lo_4dof);
    CHECK(res.anees < res.hi_4dof);
    // Final-step NEES across runs is iid chi-square(4): exact interval.
    CHECK(res.final_step_anees > res.final_lo);
    CHECK(res.final_step_anees < res.final_hi);
}
