#include "nearshore/geometry.hpp"

#include <cmath>
#include <string>

namespace nearshore {

namespace {

constexpr double kRotationTol = 1e-9;

void check_rotation(const Eigen::Matrix3d& r) {
    const Eigen::Matrix3d residual = r.transpose() * r - Eigen::Matrix3d::Identity();
    if (residual.cwiseAbs().maxCoeff() > kRotationTol) {
        throw ConfigError("rotation matrix is not orthonormal (|R^T R - I| = " +
                          std::to_string(residual.cwiseAbs().maxCoeff()) + ")");
    }
    if (std::abs(r.determinant() - 1.0) > kRotationTol) {
        throw ConfigError("rotation matrix determinant is not +1 (det = " +
                          std::to_string(r.determinant()) + ")");
    }
}

}  // namespace

const char* frame_name(Frame f) {
    switch (f) {
        case Frame::Lidar: return "lidar";
        case Frame::Camera: return "camera";
        case Frame::World: return "world";
    }
    return "?";
}

bool Point3::is_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation,
                               const Eigen::Vector3d& translation, Frame source, Frame target)
    : rot_(rotation), trans_(translation), source_(source), target_(target) {
    check_rotation(rot_);
}

RigidTransform RigidTransform::identity(Frame frame) {
    return RigidTransform(Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(), frame, frame);
}

RigidTransform RigidTransform::from_quaternion(const Eigen::Quaterniond& q,
                                               const Eigen::Vector3d& translation, Frame source,
                                               Frame target) {
    return RigidTransform(q.normalized().toRotationMatrix(), translation, source, target);
}

RigidTransform RigidTransform::inverse() const {
    RigidTransform out;
    out.rot_ = rot_.transpose();
    out.trans_ = -(rot_.transpose() * trans_);
    out.source_ = target_;
    out.target_ = source_;
    return out;
}

RigidTransform RigidTransform::compose(const RigidTransform& inner) const {
    if (inner.target_ != source_) {
        throw ConfigError(std::string("transform composition frame mismatch: inner targets '") +
                          frame_name(inner.target_) + "', outer expects '" + frame_name(source_) +
                          "'");
    }
    RigidTransform out;
    out.rot_ = rot_ * inner.rot_;
    out.trans_ = rot_ * inner.trans_ + trans_;
    out.source_ = inner.source_;
    out.target_ = target_;
    return out;
}

Point3 transform_point(const Point3& p, const RigidTransform& t) {
    if (p.frame != t.source()) {
        throw ConfigError(std::string("transform_point frame mismatch: point is in '") +
                          frame_name(p.frame) + "', transform maps from '" +
                          frame_name(t.source()) + "'");
    }
    const Eigen::Vector3d v = t.rotation() * p.vec() + t.translation();
    return Point3{v.x(), v.y(), v.z(), t.target()};
}

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) {
        throw ConfigError("camera focal lengths must be positive");
    }
    if (width < 1 || height < 1) {
        throw ConfigError("camera image dimensions must be positive");
    }
    if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height) {
        throw ConfigError("camera principal point must lie inside the image");
    }
}

std::optional<Projection> project_point(const Point3& p_cam, const CameraIntrinsics& k) {
    if (!(p_cam.z > 0.0)) {
        return std::nullopt;
    }
    Projection out;
    out.pixel.x = k.fx * p_cam.x / p_cam.z + k.cx;
    out.pixel.y = k.fy * p_cam.y / p_cam.z + k.cy;
    out.depth = p_cam.z;
    return out;
}

Point3 unproject_pixel(const PixelCoord& px, double depth, const CameraIntrinsics& k) {
    Point3 p;
    p.x = (px.x - k.cx) / k.fx * depth;
    p.y = (px.y - k.cy) / k.fy * depth;
    p.z = depth;
    p.frame = Frame::Camera;
    return p;
}

bool in_image(const PixelCoord& px, const CameraIntrinsics& k) {
    return px.x >= 0.0 && px.x < static_cast<double>(k.width) && px.y >= 0.0 &&
           px.y < static_cast<double>(k.height);
}

RigidTransform interpolate_pose(const std::vector<PoseSample>& poses, Timestamp t) {
    if (poses.empty()) {
        throw ConfigError("interpolate_pose: empty pose sequence");
    }
    if (t < poses.front().t || t > poses.back().t) {
        throw ConfigError("interpolate_pose: timestamp " + std::to_string(t) +
                          " outside pose range [" + std::to_string(poses.front().t) + ", " +
                          std::to_string(poses.back().t) + "]");
    }
    auto it = std::lower_bound(poses.begin(), poses.end(), t,
                               [](const PoseSample& s, Timestamp v) { return s.t < v; });
    if (it->t == t) {
        return it->world_from_lidar;
    }
    const PoseSample& hi = *it;
    const PoseSample& lo = *(it - 1);
    const double alpha =
        static_cast<double>(t - lo.t) / static_cast<double>(hi.t - lo.t);

    const Eigen::Vector3d trans = (1.0 - alpha) * lo.world_from_lidar.translation() +
                                  alpha * hi.world_from_lidar.translation();
    const Eigen::Quaterniond q =
        lo.world_from_lidar.quaternion().slerp(alpha, hi.world_from_lidar.quaternion());
    return RigidTransform::from_quaternion(q, trans, lo.world_from_lidar.source(),
                                           lo.world_from_lidar.target());
}

}  // namespace nearshore
