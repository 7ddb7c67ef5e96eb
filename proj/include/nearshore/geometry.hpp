#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace nearshore {

/// Microseconds since epoch. All sensor streams share one GNSS-style clock.
using Timestamp = std::int64_t;

inline double to_seconds(Timestamp t) { return static_cast<double>(t) * 1e-6; }
inline Timestamp to_timestamp_us(double seconds) {
    return static_cast<Timestamp>(std::llround(seconds * 1e6));
}

enum class Frame : std::uint8_t { Lidar, Camera, World };

const char* frame_name(Frame f);

/// Bad configuration or precondition violation (frame mismatch, grid mismatch, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file; message carries file/line diagnostics.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    Frame frame = Frame::Lidar;

    Eigen::Vector3d vec() const { return {x, y, z}; }
    bool is_finite() const;
};

struct PixelCoord {
    double x = 0.0;
    double y = 0.0;
};

/// Rigid body transform between two named frames. Stored as rotation +
/// translation so rigidity holds by construction; the rotation is checked
/// orthonormal with det +1 to 1e-9 when built from raw matrices.
class RigidTransform {
public:
    RigidTransform() = default;

    RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation,
                   Frame source, Frame target);

    static RigidTransform identity(Frame frame);
    static RigidTransform from_quaternion(const Eigen::Quaterniond& q,
                                          const Eigen::Vector3d& translation,
                                          Frame source, Frame target);

    const Eigen::Matrix3d& rotation() const { return rot_; }
    const Eigen::Vector3d& translation() const { return trans_; }
    Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(rot_); }
    Frame source() const { return source_; }
    Frame target() const { return target_; }

    RigidTransform inverse() const;

    /// this ∘ inner: maps inner.source() -> this->target(). Frames must chain.
    RigidTransform compose(const RigidTransform& inner) const;

private:
    Eigen::Matrix3d rot_ = Eigen::Matrix3d::Identity();
    Eigen::Vector3d trans_ = Eigen::Vector3d::Zero();
    Frame source_ = Frame::Lidar;
    Frame target_ = Frame::Lidar;
};

/// R*p + t. Throws ConfigError when p's frame does not match t's source frame.
Point3 transform_point(const Point3& p, const RigidTransform& t);

struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    void validate() const;
};

struct Projection {
    PixelCoord pixel;
    double depth = 0.0;  // meters along the optical axis
};

/// Pinhole projection of a camera-frame point. nullopt when Z <= 0 (behind).
std::optional<Projection> project_point(const Point3& p_cam, const CameraIntrinsics& k);

/// Back-project a pixel at known depth to a camera-frame point.
Point3 unproject_pixel(const PixelCoord& px, double depth, const CameraIntrinsics& k);

/// Bounds check on real-valued pixel coordinates, before any rounding.
/// [0, width) x [0, height).
bool in_image(const PixelCoord& px, const CameraIntrinsics& k);

struct PoseSample {
    Timestamp t = 0;
    RigidTransform world_from_lidar;
};

/// Linear translation + slerp rotation between the bracketing samples.
/// Exact at sample timestamps. Throws ConfigError outside [first, last].
RigidTransform interpolate_pose(const std::vector<PoseSample>& poses, Timestamp t);

}  // namespace nearshore
