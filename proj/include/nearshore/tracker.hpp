#pragma once

#include "nearshore/detector.hpp"
#include "nearshore/geometry.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace nearshore {

/// 2D constant-velocity state: (x, y, vx, vy).
struct KinematicState {
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
};

enum class TrackStatus : std::uint8_t { Tentative, Confirmed, Terminated };

const char* track_status_name(TrackStatus s);

struct Track {
    std::uint64_t id = 0;
    KinematicState state;
    double existence = 0.0;   // r
    double visibility = 0.0;  // v
    TrackStatus status = TrackStatus::Tentative;
    Timestamp last_update = 0;
    Timestamp born = 0;
    Timestamp confirmed_at = -1;  // -1 until confirmation
};

struct TrackerConfig {
    double process_noise_intensity = 0.5;  // q, m^2/s^3
    double measurement_noise_std = 0.3;    // sigma_z, m
    double clutter_density = 1e-4;         // lambda, per m^2
    double detection_probability = 0.9;    // P_D given visible
    double survival_probability = 0.999;   // per step
    double p_visible_given_visible = 0.95;
    double p_visible_given_invisible = 0.20;
    double gate_probability = 0.99;  // chi-square gate mass, 2 dof
    double confirmation_threshold = 0.90;
    double termination_threshold = 0.05;
    double initial_existence = 0.3;
    double initial_visibility = 0.9;
    double initial_velocity_std = 2.0;  // m/s

    /// Squared-Mahalanobis gate: -2 ln(1 - gate_probability) for 2 dof.
    double gate_threshold() const;
    void validate() const;
};

/// Per-track association weights from one update step.
struct AssociationDiag {
    std::uint64_t track_id = 0;
    double beta_0 = 0.0;
    std::vector<double> beta;  // per assigned gated detection
    double weight_sum = 0.0;   // beta_0 + sum(beta), should be 1
};

struct StepDiag {
    std::vector<AssociationDiag> associations;
};

/// Visibility-augmented IPDA point tracker over CV dynamics.
///
/// Per step: predict every track, gate detections, resolve detections gated
/// by several tracks toward the highest association likelihood, run the
/// moment-matched PDA update per track with Bayes updates of existence and
/// visibility, then spawn tentative tracks from unassociated detections and
/// apply confirmation/termination thresholds.
class Tracker {
public:
    explicit Tracker(const TrackerConfig& cfg);

    /// Full cycle for one detection timestamp. Timestamps must be strictly
    /// increasing. Returns the post-update snapshot of active tracks.
    std::vector<Track> step(const std::vector<Detection>& detections, Timestamp t,
                            StepDiag* diag = nullptr);

    const std::vector<Track>& active_tracks() const { return tracks_; }
    const TrackerConfig& config() const { return cfg_; }

    // Exposed pieces, usable standalone (and in tests).
    static Track predict(const Track& track, double dt, const TrackerConfig& cfg);
    static std::vector<int> gate(const Track& track, const std::vector<Detection>& detections,
                                 const TrackerConfig& cfg);

    struct UpdateResult {
        Track track;
        AssociationDiag diag;
    };
    /// PDA update of one predicted track against its assigned detections.
    static UpdateResult update_track(const Track& track,
                                     const std::vector<Detection>& detections,
                                     const std::vector<int>& assigned,
                                     const TrackerConfig& cfg);

private:
    TrackerConfig cfg_;
    std::vector<Track> tracks_;
    std::uint64_t next_id_ = 1;
    Timestamp last_t_ = 0;
    bool started_ = false;
};

/// Measurement model shared by gate/update: H picks (x, y), R = sigma^2 I.
Eigen::Matrix2d innovation_covariance(const KinematicState& s, const TrackerConfig& cfg);

}  // namespace nearshore
