#pragma once

// Shared helpers for the tracker consistency checks: a chi-square quantile
// (Wilson-Hilferty) and the Monte Carlo NEES experiment used by both the
// unit suite and the acceptance suite.

#include "nearshore/tracker.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>

namespace test_util {

// Closed-form chi-square CDF for even dof.
inline double chi2_cdf_even_dof(double x, int dof) {
    const double h = x / 2.0;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < dof / 2; ++k) {
        term *= h / k;
        sum += term;
    }
    return 1.0 - std::exp(-h) * sum;
}

// Exact (bisection) for small even dof, Wilson-Hilferty for large dof.
// Only the 2.5% / 97.5% tails are needed here.
inline double chi2_quantile(double p, double dof) {
    if (dof <= 200.0 && std::fmod(dof, 2.0) == 0.0) {
        double lo = 0.0;
        double hi = dof + 40.0 * std::sqrt(dof) + 40.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (chi2_cdf_even_dof(mid, static_cast<int>(dof)) < p) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
    const double z = p < 0.5 ? -1.9599639845400545 : 1.9599639845400545;
    const double a = 2.0 / (9.0 * dof);
    const double c = 1.0 - a + z * std::sqrt(a);
    return dof * c * c * c;
}

struct NeesResult {
    double anees = 0.0;  // time- and run-averaged NEES
    // 95% band of a single chi-square(4) sample divided by dof; the
    // time-average concentrates near 4 and must land inside.
    double lo_4dof = 0.0;
    double hi_4dof = 0.0;
    // Exact iid check: NEES of the final step only, one sample per run,
    // with its chi-square(4 * n_runs) interval. Consecutive-step NEES
    // values are serially correlated, so only this slice gets the tight
    // interval.
    double final_step_anees = 0.0;
    double final_lo = 0.0;
    double final_hi = 0.0;
    double max_weight_error = 0.0;  // |beta_0 + sum(beta_i) - 1|
    bool rv_in_range = true;
    int samples = 0;
};

// Clean single-target scenario: perfect detection, everything gated, no
// clutter, visibility pinned at 1. The PDA update then coincides with the
// Kalman update and time-averaged NEES must be chi-square consistent.
inline NeesResult run_nees_experiment(int n_runs, int n_steps, double dt,
                                      std::uint64_t seed) {
    using namespace nearshore;

    TrackerConfig cfg;
    cfg.detection_probability = 1.0;
    cfg.gate_probability = 1.0;
    cfg.survival_probability = 1.0;
    cfg.p_visible_given_visible = 1.0;
    cfg.p_visible_given_invisible = 0.0;
    cfg.initial_visibility = 1.0;
    cfg.clutter_density = 1e-6;

    const double sz = cfg.measurement_noise_std;
    const double sv = cfg.initial_velocity_std;

    Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
    f(0, 2) = dt;
    f(1, 3) = dt;
    Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
    const double qi = cfg.process_noise_intensity;
    q(0, 0) = q(1, 1) = qi * dt * dt * dt / 3.0;
    q(2, 2) = q(3, 3) = qi * dt;
    q(0, 2) = q(2, 0) = qi * dt * dt / 2.0;
    q(1, 3) = q(3, 1) = qi * dt * dt / 2.0;
    const Eigen::Matrix4d q_chol = Eigen::LLT<Eigen::Matrix4d>(q).matrixL();

    Eigen::Matrix4d p0 = Eigen::Matrix4d::Zero();
    p0(0, 0) = p0(1, 1) = sz * sz;
    p0(2, 2) = p0(3, 3) = sv * sv;
    const Eigen::Matrix4d p0_chol = Eigen::LLT<Eigen::Matrix4d>(p0).matrixL();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto randn4 = [&]() {
        return Eigen::Vector4d(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    };

    NeesResult result;
    double nees_sum = 0.0;
    double final_sum = 0.0;
    for (int run = 0; run < n_runs; ++run) {
        Eigen::Vector4d truth(0.0, 0.0, 1.0, 0.5);

        Track track;
        track.id = 1;
        track.state.mean = truth + p0_chol * randn4();
        track.state.cov = p0;
        track.existence = 1.0;
        track.visibility = 1.0;

        for (int k = 0; k < n_steps; ++k) {
            truth = f * truth + q_chol * randn4();
            Detection det;
            det.t = (k + 1) * 100000;
            det.x = truth(0) + sz * gauss(rng);
            det.y = truth(1) + sz * gauss(rng);

            track = Tracker::predict(track, dt, cfg);
            const auto res = Tracker::update_track(track, {det}, {0}, cfg);
            track = res.track;

            result.max_weight_error =
                std::max(result.max_weight_error, std::abs(res.diag.weight_sum - 1.0));
            if (track.existence < 0.0 || track.existence > 1.0 || track.visibility < 0.0 ||
                track.visibility > 1.0) {
                result.rv_in_range = false;
            }

            const Eigen::Vector4d err = track.state.mean - truth;
            const double nees = err.dot(track.state.cov.ldlt().solve(err));
            nees_sum += nees;
            ++result.samples;
            if (k == n_steps - 1) {
                final_sum += nees;
            }
        }
    }
    result.anees = nees_sum / result.samples;
    result.lo_4dof = chi2_quantile(0.025, 4.0);
    result.hi_4dof = chi2_quantile(0.975, 4.0);
    result.final_step_anees = final_sum / n_runs;
    result.final_lo = chi2_quantile(0.025, 4.0 * n_runs) / n_runs;
    result.final_hi = chi2_quantile(0.975, 4.0 * n_runs) / n_runs;
    return result;
}

}  // namespace test_util
