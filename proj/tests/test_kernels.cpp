#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nearshore/kernels.hpp"

#include <random>

using namespace nearshore;

namespace {

std::vector<Point3> random_cloud(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-80.0, 80.0);
    std::uniform_real_distribution<double> uz(0.0, 2.0);
    std::vector<Point3> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back(Point3{u(rng), u(rng), uz(rng), Frame::Lidar});
    }
    return pts;
}

RigidTransform yaw_pose(double yaw, double x, double y) {
    return RigidTransform::from_quaternion(
        Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ())),
        Eigen::Vector3d(x, y, 0.0), Frame::Lidar, Frame::World);
}

BinaryMap random_map(std::mt19937_64& rng, int cols, int rows, double density) {
    BinaryMap m(GridSpec{0.0, 0.0, 0.5, cols, rows});
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& c : m.cells) {
        c = u(rng) < density ? 1 : 0;
    }
    return m;
}

bool hits_equal(const std::vector<RayHit>& a, const std::vector<RayHit>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].hit != b[i].hit || a[i].range != b[i].range ||
            a[i].polygon_id != b[i].polygon_id || a[i].vessel_class != b[i].vessel_class) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("parallel transform matches serial bit for bit") {
    std::mt19937_64 rng(41);
    const auto pts = random_cloud(rng, 5000);
    const RigidTransform tf = yaw_pose(0.7, 12.0, -3.0);
    const auto par = kernels::transform_points(pts, tf);
    const auto ser = kernels::serial::transform_points(pts, tf);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].x == ser[i].x);
        CHECK(par[i].y == ser[i].y);
        CHECK(par[i].z == ser[i].z);
    }
}

TEST_CASE("parallel classify matches serial") {
    std::mt19937_64 rng(43);
    const auto pts = random_cloud(rng, 3000);

    std::vector<CameraView> cams(1);
    cams[0].intrinsics = {600, 600, 640, 360, 1280, 720};
    Eigen::Matrix3d lidar_from_cam;
    lidar_from_cam << 0, 0, 1, -1, 0, 0, 0, -1, 0;
    cams[0].cam_from_lidar =
        RigidTransform(lidar_from_cam, Eigen::Vector3d(0, 0, 1.8), Frame::Camera, Frame::Lidar)
            .inverse();

    MaskFrame mask;
    mask.t = 0;
    mask.width = 1280;
    mask.height = 720;
    InstanceMask inst;
    for (int y = 300; y < 420; ++y) {
        inst.rows.push_back(MaskRow{y, {{500, 800}}});
    }
    mask.instances.push_back(inst);
    const std::vector<const MaskFrame*> masks{&mask};

    const RigidTransform pose = yaw_pose(0.2, 1.0, 2.0);
    const auto par = kernels::classify_points(pts, cams, masks, pose);
    const auto ser = kernels::serial::classify_points(pts, cams, masks, pose);
    REQUIRE(par.size() == ser.size());
    int vessels = 0;
    int candidates = 0;
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].label == ser[i].label);
        CHECK(par[i].wx == ser[i].wx);
        CHECK(par[i].wy == ser[i].wy);
        if (par[i].label == PointLabel::Vessel) ++vessels;
        if (par[i].label == PointLabel::Candidate) ++candidates;
    }
    // The mask and image must both actually trigger for this test to bite.
    CHECK(vessels > 0);
    CHECK(candidates > 0);
}

TEST_CASE("parallel map filter matches serial") {
    std::mt19937_64 rng(47);
    const auto pts = random_cloud(rng, 4000);
    const BinaryMap map = random_map(rng, 200, 200, 0.3);
    const RigidTransform pose = yaw_pose(-0.4, 40.0, 30.0);

    const auto par = kernels::filter_points_by_map(pts, pose, &map);
    const auto ser = kernels::serial::filter_points_by_map(pts, pose, &map);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].x == ser[i].x);
        CHECK(par[i].y == ser[i].y);
    }

    const auto par_nomap = kernels::filter_points_by_map(pts, pose, nullptr);
    CHECK(par_nomap.size() == pts.size());
}

TEST_CASE("separable morphology matches the direct reference") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const BinaryMap m = random_map(rng, 64, 48, 0.25);
        for (int radius : {1, 2, 3}) {
            CHECK(kernels::dilate(m, radius).cells == kernels::serial::dilate(m, radius).cells);
            CHECK(kernels::erode(m, radius).cells == kernels::serial::erode(m, radius).cells);
        }
    }
}

TEST_CASE("morphology radius zero is identity") {
    std::mt19937_64 rng(59);
    const BinaryMap m = random_map(rng, 32, 32, 0.4);
    CHECK(kernels::dilate(m, 0).cells == m.cells);
    CHECK(kernels::erode(m, 0).cells == m.cells);
}

TEST_CASE("parallel rasterization matches serial") {
    EncPolygonSet enc;
    enc.polygons.push_back(
        EncPolygon{Ring{{3, 3}, {20, 5}, {25, 18}, {10, 22}}, {Ring{{8, 8}, {14, 8}, {11, 14}}}});
    enc.polygons.push_back(EncPolygon{Ring{{30, 1}, {38, 2}, {34, 12}}, {}});
    GridSpec g{0.0, 0.0, 0.25, 160, 100};
    CHECK(kernels::rasterize_polygons(enc, g).cells ==
          kernels::serial::rasterize_polygons(enc, g).cells);
}

TEST_CASE("parallel ray casting matches serial") {
    std::vector<WorldPolygon> polys;
    polys.push_back(WorldPolygon{Ring{{10, -5}, {14, -5}, {14, 5}, {10, 5}}, 0, false});
    polys.push_back(WorldPolygon{Ring{{-8, -8}, {-4, -8}, {-6, -3}}, 1, true});
    polys.push_back(WorldPolygon{Ring{{2, 6}, {5, 6}, {5, 9}, {2, 9}}, 2, false});

    const auto par = kernels::cast_rays(polys, Vec2{0, 0}, 0.3, 720, -M_PI, 2 * M_PI / 720, 50.0);
    const auto ser =
        kernels::serial::cast_rays(polys, Vec2{0, 0}, 0.3, 720, -M_PI, 2 * M_PI / 720, 50.0);
    CHECK(hits_equal(par, ser));
}

TEST_CASE("ray casting takes the first intersection") {
    std::vector<WorldPolygon> polys;
    // Wall behind a small target, both crossing the +x axis.
    polys.push_back(WorldPolygon{Ring{{20, -10}, {22, -10}, {22, 10}, {20, 10}}, 0, false});
    polys.push_back(WorldPolygon{Ring{{8, -1}, {10, -1}, {10, 1}, {8, 1}}, 1, true});

    const RayHit hit = kernels::cast_single_ray(polys, Vec2{0, 0}, 0.0, 100.0);
    REQUIRE(hit.hit);
    CHECK(hit.polygon_id == 1);
    CHECK(hit.range == doctest::Approx(8.0));
    CHECK(hit.vessel_class);

    // A ray that misses the target reaches the wall.
    const RayHit wall = kernels::cast_single_ray(polys, Vec2{0, 0}, 0.25, 100.0);
    REQUIRE(wall.hit);
    CHECK(wall.polygon_id == 0);

    // Beyond max range: nothing.
    const RayHit none = kernels::cast_single_ray(polys, Vec2{0, 0}, 0.0, 5.0);
    CHECK_FALSE(none.hit);
}

TEST_CASE("ray casting brute force agreement on random scenes") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<WorldPolygon> polys;
        for (int p = 0; p < 4; ++p) {
            const double cx = u(rng);
            const double cy = u(rng);
            polys.push_back(WorldPolygon{Ring{{cx - 2, cy - 2},
                                              {cx + 2, cy - 2},
                                              {cx + 2, cy + 2},
                                              {cx - 2, cy + 2}},
                                         p, false});
        }
        const auto hits =
            kernels::cast_rays(polys, Vec2{0, 0}, 0.0, 360, -M_PI, 2 * M_PI / 360, 60.0);
        for (int i = 0; i < 360; ++i) {
            if (!hits[static_cast<std::size_t>(i)].hit) continue;
            const double a = -M_PI + i * 2 * M_PI / 360;
            // No other intersection may lie strictly closer: march along the
            // ray and confirm the hit point is not inside any polygon before
            // the reported range.
            const double range = hits[static_cast<std::size_t>(i)].range;
            for (double frac = 0.05; frac < 0.999; frac += 0.05) {
                const double x = std::cos(a) * range * frac;
                const double y = std::sin(a) * range * frac;
                for (const WorldPolygon& poly : polys) {
                    CHECK_FALSE(point_in_ring(x, y, poly.verts));
                }
            }
        }
    }
}
