#include "nearshore/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nearshore {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Eigen::Matrix4d cv_transition(double dt) {
    Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
    f(0, 2) = dt;
    f(1, 3) = dt;
    return f;
}

// White-noise-acceleration process noise of intensity q.
Eigen::Matrix4d cv_process_noise(double dt, double q) {
    const double dt2 = dt * dt;
    const double dt3 = dt2 * dt;
    Eigen::Matrix4d qm = Eigen::Matrix4d::Zero();
    qm(0, 0) = qm(1, 1) = q * dt3 / 3.0;
    qm(2, 2) = qm(3, 3) = q * dt;
    qm(0, 2) = qm(2, 0) = q * dt2 / 2.0;
    qm(1, 3) = qm(3, 1) = q * dt2 / 2.0;
    return qm;
}

void symmetrize(Eigen::Matrix4d& p) { p = 0.5 * (p + p.transpose()).eval(); }

Eigen::Vector2d position_of(const KinematicState& s) { return s.mean.head<2>(); }

}  // namespace

const char* track_status_name(TrackStatus s) {
    switch (s) {
        case TrackStatus::Tentative: return "tentative";
        case TrackStatus::Confirmed: return "confirmed";
        case TrackStatus::Terminated: return "terminated";
    }
    return "?";
}

double TrackerConfig::gate_threshold() const {
    // Quantile of the chi-square distribution with 2 dof is closed-form.
    return -2.0 * std::log1p(-gate_probability);
}

void TrackerConfig::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(detection_probability) || !prob(survival_probability) ||
        !prob(p_visible_given_visible) || !prob(p_visible_given_invisible) ||
        !prob(gate_probability) || !prob(confirmation_threshold) ||
        !prob(termination_threshold) || !prob(initial_existence) ||
        !prob(initial_visibility)) {
        throw ConfigError("tracker probabilities must lie in [0, 1]");
    }
    if (!(process_noise_intensity > 0.0) || !(measurement_noise_std > 0.0) ||
        !(clutter_density > 0.0)) {
        throw ConfigError("q, sigma_z and clutter density must be positive");
    }
    if (!(initial_velocity_std > 0.0)) {
        throw ConfigError("initial velocity std must be positive");
    }
}

Eigen::Matrix2d innovation_covariance(const KinematicState& s, const TrackerConfig& cfg) {
    const double r = cfg.measurement_noise_std * cfg.measurement_noise_std;
    Eigen::Matrix2d out = s.cov.topLeftCorner<2, 2>();
    out(0, 0) += r;
    out(1, 1) += r;
    return out;
}

Track Tracker::predict(const Track& track, double dt, const TrackerConfig& cfg) {
    if (!(dt > 0.0)) {
        throw ConfigError("predict: dt must be positive");
    }
    Track out = track;
    const Eigen::Matrix4d f = cv_transition(dt);
    out.state.mean = f * track.state.mean;
    out.state.cov = f * track.state.cov * f.transpose() +
                    cv_process_noise(dt, cfg.process_noise_intensity);
    symmetrize(out.state.cov);
    out.existence = cfg.survival_probability * track.existence;
    out.visibility = cfg.p_visible_given_visible * track.visibility +
                     cfg.p_visible_given_invisible * (1.0 - track.visibility);
    return out;
}

std::vector<int> Tracker::gate(const Track& track, const std::vector<Detection>& detections,
                               const TrackerConfig& cfg) {
    const Eigen::Matrix2d s = innovation_covariance(track.state, cfg);
    const Eigen::LDLT<Eigen::Matrix2d> ldlt(s);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
        throw ConfigError("gate: innovation covariance is singular");
    }
    const double threshold = cfg.gate_threshold();
    const Eigen::Vector2d z_hat = position_of(track.state);
    std::vector<int> gated;
    for (int i = 0; i < static_cast<int>(detections.size()); ++i) {
        const Eigen::Vector2d nu(detections[i].x - z_hat.x(), detections[i].y - z_hat.y());
        const double d2 = nu.dot(ldlt.solve(nu));
        if (d2 <= threshold) {
            gated.push_back(i);
        }
    }
    return gated;
}

Tracker::UpdateResult Tracker::update_track(const Track& track,
                                            const std::vector<Detection>& detections,
                                            const std::vector<int>& assigned,
                                            const TrackerConfig& cfg) {
    UpdateResult res;
    res.track = track;
    res.diag.track_id = track.id;

    const Eigen::Matrix2d s = innovation_covariance(track.state, cfg);
    const Eigen::LDLT<Eigen::Matrix2d> ldlt(s);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
        throw ConfigError("update: innovation covariance is singular");
    }
    const double det_s = s.determinant();
    const Eigen::Vector2d z_hat = position_of(track.state);

    // Likelihood ratio per detection: N(z; z_hat, S) / lambda.
    const std::size_t m = assigned.size();
    std::vector<Eigen::Vector2d> nus(m);
    std::vector<double> ratios(m);
    double ratio_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Detection& d = detections[static_cast<std::size_t>(assigned[i])];
        nus[i] = Eigen::Vector2d(d.x - z_hat.x(), d.y - z_hat.y());
        const double d2 = nus[i].dot(ldlt.solve(nus[i]));
        const double g = std::exp(-0.5 * d2) / (kTwoPi * std::sqrt(det_s));
        ratios[i] = g / cfg.clutter_density;
        ratio_sum += ratios[i];
    }

    // Effective detection probability scales with the visibility state.
    const double p_dg = cfg.detection_probability * cfg.gate_probability;
    const double p_dg_eff = p_dg * track.visibility;

    // Track likelihood ratio marginalized over visibility; equals the
    // visibility-weighted mix of the visible/invisible measurement models.
    const double lambda_track = 1.0 - p_dg_eff + p_dg_eff * ratio_sum;

    // Association weights conditioned on existence.
    res.diag.beta_0 = (1.0 - p_dg_eff) / lambda_track;
    res.diag.beta.resize(m);
    double weighted_sum = res.diag.beta_0;
    for (std::size_t i = 0; i < m; ++i) {
        res.diag.beta[i] = p_dg_eff * ratios[i] / lambda_track;
        weighted_sum += res.diag.beta[i];
    }
    res.diag.weight_sum = weighted_sum;

    // Existence posterior.
    const double prior_r = track.existence;
    res.track.existence = lambda_track * prior_r / (1.0 - prior_r + lambda_track * prior_r);

    // Visibility posterior: likelihood of the measurement set given visible
    // vs invisible (invisible targets produce clutter-only sets, ratio 1).
    const double l_visible = 1.0 - p_dg + p_dg * ratio_sum;
    const double prior_v = track.visibility;
    res.track.visibility = prior_v * l_visible / (prior_v * l_visible + (1.0 - prior_v));

    res.track.existence = std::clamp(res.track.existence, 0.0, 1.0);
    res.track.visibility = std::clamp(res.track.visibility, 0.0, 1.0);

    if (m == 0) {
        return res;  // beta_0 = 1, state unchanged
    }

    // Moment-matched PDA state update.
    const Eigen::Matrix<double, 4, 2> pht = track.state.cov.leftCols<2>();
    const Eigen::Matrix<double, 4, 2> gain = ldlt.solve(pht.transpose()).transpose();

    Eigen::Vector2d nu_mix = Eigen::Vector2d::Zero();
    Eigen::Matrix2d nu_spread = Eigen::Matrix2d::Zero();
    for (std::size_t i = 0; i < m; ++i) {
        nu_mix += res.diag.beta[i] * nus[i];
        nu_spread += res.diag.beta[i] * nus[i] * nus[i].transpose();
    }
    nu_spread -= nu_mix * nu_mix.transpose();

    res.track.state.mean = track.state.mean + gain * nu_mix;
    const Eigen::Matrix4d p_updated =
        track.state.cov - gain * s * gain.transpose();
    const double beta_det = 1.0 - res.diag.beta_0;
    Eigen::Matrix4d p_new = res.diag.beta_0 * track.state.cov + beta_det * p_updated +
                            gain * nu_spread * gain.transpose();
    symmetrize(p_new);
    res.track.state.cov = p_new;
    return res;
}

Tracker::Tracker(const TrackerConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

std::vector<Track> Tracker::step(const std::vector<Detection>& detections, Timestamp t,
                                 StepDiag* diag) {
    if (started_ && t <= last_t_) {
        throw ConfigError("tracker step timestamps must be strictly increasing (" +
                          std::to_string(t) + " after " + std::to_string(last_t_) + ")");
    }
    const double dt = started_ ? to_seconds(t - last_t_) : 0.0;

    // Predict.
    std::vector<Track> predicted;
    predicted.reserve(tracks_.size());
    for (const Track& tr : tracks_) {
        predicted.push_back(started_ && dt > 0.0 ? predict(tr, dt, cfg_) : tr);
    }

    // Gate, then resolve detections claimed by several tracks: each
    // contested detection contributes only to the track with the highest
    // association likelihood for it.
    const int n_det = static_cast<int>(detections.size());
    std::vector<int> owner(static_cast<std::size_t>(n_det), -1);
    std::vector<double> owner_score(static_cast<std::size_t>(n_det),
                                    -std::numeric_limits<double>::infinity());
    std::vector<std::vector<int>> gated_per_track(predicted.size());
    for (std::size_t k = 0; k < predicted.size(); ++k) {
        gated_per_track[k] = gate(predicted[k], detections, cfg_);
        const Eigen::Matrix2d s = innovation_covariance(predicted[k].state, cfg_);
        const Eigen::LDLT<Eigen::Matrix2d> ldlt(s);
        const double det_s = s.determinant();
        const Eigen::Vector2d z_hat = position_of(predicted[k].state);
        const double p_dg_eff =
            cfg_.detection_probability * cfg_.gate_probability * predicted[k].visibility;
        for (int i : gated_per_track[k]) {
            const Eigen::Vector2d nu(detections[static_cast<std::size_t>(i)].x - z_hat.x(),
                                     detections[static_cast<std::size_t>(i)].y - z_hat.y());
            const double d2 = nu.dot(ldlt.solve(nu));
            const double g = std::exp(-0.5 * d2) / (kTwoPi * std::sqrt(det_s));
            const double score = p_dg_eff * g;
            if (score > owner_score[static_cast<std::size_t>(i)]) {
                owner_score[static_cast<std::size_t>(i)] = score;
                owner[static_cast<std::size_t>(i)] = static_cast<int>(k);
            }
        }
    }

    // Update each track with the detections it owns.
    std::vector<Track> updated;
    updated.reserve(predicted.size());
    if (diag) {
        diag->associations.clear();
    }
    for (std::size_t k = 0; k < predicted.size(); ++k) {
        std::vector<int> assigned;
        for (int i : gated_per_track[k]) {
            if (owner[static_cast<std::size_t>(i)] == static_cast<int>(k)) {
                assigned.push_back(i);
            }
        }
        UpdateResult res = update_track(predicted[k], detections, assigned, cfg_);
        res.track.last_update = t;
        if (diag) {
            diag->associations.push_back(res.diag);
        }
        updated.push_back(res.track);
    }

    // Birth from detections outside every gate.
    std::vector<char> in_any_gate(static_cast<std::size_t>(n_det), 0);
    for (const auto& g : gated_per_track) {
        for (int i : g) {
            in_any_gate[static_cast<std::size_t>(i)] = 1;
        }
    }
    const double r0 = cfg_.measurement_noise_std * cfg_.measurement_noise_std;
    const double v0 = cfg_.initial_velocity_std * cfg_.initial_velocity_std;
    for (int i = 0; i < n_det; ++i) {
        if (in_any_gate[static_cast<std::size_t>(i)]) continue;
        Track tr;
        tr.id = next_id_++;
        tr.state.mean << detections[static_cast<std::size_t>(i)].x,
            detections[static_cast<std::size_t>(i)].y, 0.0, 0.0;
        tr.state.cov = Eigen::Matrix4d::Zero();
        tr.state.cov(0, 0) = tr.state.cov(1, 1) = r0;
        tr.state.cov(2, 2) = tr.state.cov(3, 3) = v0;
        tr.existence = cfg_.initial_existence;
        tr.visibility = cfg_.initial_visibility;
        tr.status = TrackStatus::Tentative;
        tr.born = t;
        tr.last_update = t;
        updated.push_back(tr);
    }

    // Lifecycle.
    std::vector<Track> survivors;
    survivors.reserve(updated.size());
    for (Track& tr : updated) {
        if (tr.status == TrackStatus::Tentative && tr.existence >= cfg_.confirmation_threshold) {
            tr.status = TrackStatus::Confirmed;
            tr.confirmed_at = t;
        }
        if (tr.existence <= cfg_.termination_threshold) {
            tr.status = TrackStatus::Terminated;
            continue;  // id retired, never revived
        }
        survivors.push_back(tr);
    }
    tracks_ = std::move(survivors);
    last_t_ = t;
    started_ = true;
    return tracks_;
}

}  // namespace nearshore
