#include "nearshore/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace nearshore::io {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ParseError("cannot write '" + path + "'");
    }
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw ParseError("short write to '" + path + "'");
    }
}

struct LineReader {
    const std::string& text;
    std::size_t pos = 0;
    int line_no = 0;

    bool next(std::string_view& out) {
        if (pos >= text.size()) {
            return false;
        }
        const std::size_t end = text.find('\n', pos);
        const std::size_t stop = end == std::string::npos ? text.size() : end;
        out = std::string_view(text).substr(pos, stop - pos);
        pos = stop + 1;
        ++line_no;
        if (!out.empty() && out.back() == '\r') {
            out.remove_suffix(1);
        }
        return true;
    }
};

struct FieldParser {
    std::string_view line;
    const std::string& path;
    int line_no;
    std::size_t pos = 0;

    std::string_view next_field() {
        if (pos > line.size()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": missing field");
        }
        const std::size_t comma = line.find(',', pos);
        const std::size_t stop = comma == std::string_view::npos ? line.size() : comma;
        std::string_view f = line.substr(pos, stop - pos);
        pos = stop + 1;
        return f;
    }

    double next_double() {
        const std::string_view f = next_field();
        double v = 0.0;
        const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
        if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": bad number '" +
                             std::string(f) + "'");
        }
        if (!std::isfinite(v)) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": non-finite number '" +
                             std::string(f) + "'");
        }
        return v;
    }

    std::int64_t next_int() {
        const std::string_view f = next_field();
        std::int64_t v = 0;
        const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
        if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": bad integer '" +
                             std::string(f) + "'");
        }
        return v;
    }

    void expect_end() const {
        if (pos <= line.size()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": trailing fields");
        }
    }
};

void append_double(std::string& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    out += buf;
}

void append_double9(std::string& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    out += buf;
}

json grid_to_json(const GridSpec& g) {
    return json{{"origin_x", g.origin_x},
                {"origin_y", g.origin_y},
                {"cell_size", g.cell_size},
                {"n_cols", g.n_cols},
                {"n_rows", g.n_rows}};
}

GridSpec grid_from_json(const json& j) {
    GridSpec g;
    g.origin_x = j.at("origin_x").get<double>();
    g.origin_y = j.at("origin_y").get<double>();
    g.cell_size = j.at("cell_size").get<double>();
    g.n_cols = j.at("n_cols").get<int>();
    g.n_rows = j.at("n_rows").get<int>();
    g.validate();
    return g;
}

std::string sidecar_path(const std::string& pgm_path) {
    fs::path p(pgm_path);
    p.replace_extension(".json");
    return p.string();
}

json ring_to_coords(const Ring& ring) {
    json coords = json::array();
    for (const Vec2& v : ring) {
        coords.push_back(json::array({v.x, v.y}));
    }
    // GeoJSON rings close explicitly.
    coords.push_back(json::array({ring.front().x, ring.front().y}));
    return coords;
}

Ring ring_from_coords(const json& coords, const std::string& path) {
    if (!coords.is_array() || coords.size() < 3) {
        throw ParseError(path + ": polygon ring must be an array of >= 3 positions");
    }
    Ring ring;
    for (const json& pos : coords) {
        if (!pos.is_array() || pos.size() < 2) {
            throw ParseError(path + ": ring position must be [x, y]");
        }
        ring.push_back(Vec2{pos[0].get<double>(), pos[1].get<double>()});
    }
    return normalize_ring(std::move(ring));
}

void add_polygon_coords(EncPolygonSet& out, const json& rings, const std::string& path) {
    if (!rings.is_array() || rings.empty()) {
        throw ParseError(path + ": Polygon coordinates must hold at least one ring");
    }
    EncPolygon poly;
    poly.outer = ring_from_coords(rings[0], path);
    for (std::size_t i = 1; i < rings.size(); ++i) {
        poly.holes.push_back(ring_from_coords(rings[i], path));
    }
    out.polygons.push_back(std::move(poly));
}

void add_geometry(EncPolygonSet& out, const json& geom, const std::string& path) {
    const std::string type = geom.at("type").get<std::string>();
    if (type == "Polygon") {
        add_polygon_coords(out, geom.at("coordinates"), path);
    } else if (type == "MultiPolygon") {
        for (const json& rings : geom.at("coordinates")) {
            add_polygon_coords(out, rings, path);
        }
    } else {
        throw ParseError(path + ": unsupported geometry type '" + type + "'");
    }
}

const char* status_str(TrackStatus s) { return track_status_name(s); }

TrackStatus status_from(const std::string_view s, const std::string& path, int line_no) {
    if (s == "tentative") return TrackStatus::Tentative;
    if (s == "confirmed") return TrackStatus::Confirmed;
    if (s == "terminated") return TrackStatus::Terminated;
    throw ParseError(path + ":" + std::to_string(line_no) + ": unknown track status '" +
                     std::string(s) + "'");
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a_hex(const std::string& data) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(data)));
    return buf;
}

std::vector<LidarFrame> load_lidar_sequence(const std::string& path) {
    const std::string text = read_file(path);
    LineReader reader{text};
    std::string_view line;
    if (!reader.next(line)) {
        return {};
    }
    if (line != "timestamp_us,x,y,z") {
        throw ParseError(path + ":1: expected header 'timestamp_us,x,y,z'");
    }
    std::vector<LidarFrame> frames;
    while (reader.next(line)) {
        if (line.empty()) {
            continue;
        }
        FieldParser fp{line, path, reader.line_no};
        const Timestamp t = fp.next_int();
        Point3 p;
        p.x = fp.next_double();
        p.y = fp.next_double();
        p.z = fp.next_double();
        p.frame = Frame::Lidar;
        fp.expect_end();
        if (frames.empty() || frames.back().t != t) {
            if (!frames.empty() && t < frames.back().t) {
                throw ParseError(path + ":" + std::to_string(reader.line_no) +
                                 ": non-monotonic timestamp");
            }
            frames.push_back(LidarFrame{t, {}});
        }
        frames.back().points.push_back(p);
    }
    return frames;
}

void save_lidar_sequence(const std::vector<LidarFrame>& frames, const std::string& path) {
    std::string out = "timestamp_us,x,y,z\n";
    for (const LidarFrame& f : frames) {
        for (const Point3& p : f.points) {
            out += std::to_string(f.t);
            out += ',';
            append_double(out, p.x);
            out += ',';
            append_double(out, p.y);
            out += ',';
            append_double(out, p.z);
            out += '\n';
        }
    }
    write_file(path, out);
}

std::vector<PoseSample> load_poses(const std::string& path) {
    const std::string text = read_file(path);
    LineReader reader{text};
    std::string_view line;
    if (!reader.next(line) || line != "timestamp_us,x,y,z,qw,qx,qy,qz") {
        throw ParseError(path + ":1: expected header 'timestamp_us,x,y,z,qw,qx,qy,qz'");
    }
    std::vector<PoseSample> poses;
    while (reader.next(line)) {
        if (line.empty()) {
            continue;
        }
        FieldParser fp{line, path, reader.line_no};
        PoseSample s;
        s.t = fp.next_int();
        const double x = fp.next_double();
        const double y = fp.next_double();
        const double z = fp.next_double();
        const double qw = fp.next_double();
        const double qx = fp.next_double();
        const double qy = fp.next_double();
        const double qz = fp.next_double();
        fp.expect_end();
        const double norm = std::sqrt(qw * qw + qx * qx + qy * qy + qz * qz);
        if (std::abs(norm - 1.0) > 1e-6) {
            throw ParseError(path + ":" + std::to_string(reader.line_no) +
                             ": quaternion is not unit (|q| = " + std::to_string(norm) + ")");
        }
        if (!poses.empty() && s.t <= poses.back().t) {
            throw ParseError(path + ":" + std::to_string(reader.line_no) +
                             ": non-increasing timestamp");
        }
        s.world_from_lidar = RigidTransform::from_quaternion(
            Eigen::Quaterniond(qw, qx, qy, qz), Eigen::Vector3d(x, y, z), Frame::Lidar,
            Frame::World);
        poses.push_back(s);
    }
    return poses;
}

void save_poses(const std::vector<PoseSample>& poses, const std::string& path) {
    std::string out = "timestamp_us,x,y,z,qw,qx,qy,qz\n";
    for (const PoseSample& s : poses) {
        const Eigen::Vector3d t = s.world_from_lidar.translation();
        const Eigen::Quaterniond q = s.world_from_lidar.quaternion().normalized();
        out += std::to_string(s.t);
        out += ',';
        append_double(out, t.x());
        out += ',';
        append_double(out, t.y());
        out += ',';
        append_double(out, t.z());
        out += ',';
        append_double9(out, q.w());
        out += ',';
        append_double9(out, q.x());
        out += ',';
        append_double9(out, q.y());
        out += ',';
        append_double9(out, q.z());
        out += '\n';
    }
    write_file(path, out);
}

std::vector<MaskFrame> load_masks(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw ParseError(path + ": mask document must be an array of frames");
    }
    std::vector<MaskFrame> out;
    try {
        for (const json& jf : doc) {
            MaskFrame f;
            f.t = jf.at("timestamp_us").get<Timestamp>();
            f.width = jf.at("width").get<int>();
            f.height = jf.at("height").get<int>();
            for (const json& ji : jf.at("instances")) {
                InstanceMask inst;
                for (const json& jr : ji.at("rows")) {
                    MaskRow row;
                    row.y = jr.at("y").get<int>();
                    for (const json& js : jr.at("spans")) {
                        if (!js.is_array() || js.size() != 2) {
                            throw ParseError(path + ": span must be [x_begin, x_end)");
                        }
                        row.spans.push_back(PixelSpan{js[0].get<int>(), js[1].get<int>()});
                    }
                    inst.rows.push_back(std::move(row));
                }
                f.instances.push_back(std::move(inst));
            }
            f.validate();
            out.push_back(std::move(f));
        }
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    std::sort(out.begin(), out.end(),
              [](const MaskFrame& a, const MaskFrame& b) { return a.t < b.t; });
    return out;
}

void save_masks(const std::vector<MaskFrame>& masks, const std::string& path) {
    json doc = json::array();
    for (const MaskFrame& f : masks) {
        json jf;
        jf["timestamp_us"] = f.t;
        jf["width"] = f.width;
        jf["height"] = f.height;
        json insts = json::array();
        for (const InstanceMask& inst : f.instances) {
            json rows = json::array();
            for (const MaskRow& r : inst.rows) {
                json spans = json::array();
                for (const PixelSpan& s : r.spans) {
                    spans.push_back(json::array({s.x_begin, s.x_end}));
                }
                rows.push_back(json{{"y", r.y}, {"spans", spans}});
            }
            insts.push_back(json{{"rows", rows}});
        }
        jf["instances"] = insts;
        doc.push_back(std::move(jf));
    }
    write_file(path, doc.dump(1) + "\n");
}

std::vector<CameraView> load_calibration(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    auto parse_camera = [&](const json& jc, const std::string& fallback_name) {
        CameraView cam;
        cam.name = jc.value("name", fallback_name);
        const json& k = jc.at("K");
        cam.intrinsics.fx = k.at("fx").get<double>();
        cam.intrinsics.fy = k.at("fy").get<double>();
        cam.intrinsics.cx = k.at("cx").get<double>();
        cam.intrinsics.cy = k.at("cy").get<double>();
        cam.intrinsics.width = k.at("width").get<int>();
        cam.intrinsics.height = k.at("height").get<int>();
        cam.intrinsics.validate();
        const json& h = jc.at("H_cam_lidar");
        const Eigen::Quaterniond q(h.at("qw").get<double>(), h.at("qx").get<double>(),
                                   h.at("qy").get<double>(), h.at("qz").get<double>());
        if (std::abs(q.norm() - 1.0) > 1e-6) {
            throw ParseError(path + ": H_cam_lidar quaternion is not unit");
        }
        cam.cam_from_lidar = RigidTransform::from_quaternion(
            q, Eigen::Vector3d(h.at("x").get<double>(), h.at("y").get<double>(),
                               h.at("z").get<double>()),
            Frame::Lidar, Frame::Camera);
        return cam;
    };
    std::vector<CameraView> out;
    try {
        if (doc.contains("cameras")) {
            int idx = 0;
            for (const json& jc : doc.at("cameras")) {
                out.push_back(parse_camera(jc, "cam" + std::to_string(idx++)));
            }
        } else {
            out.push_back(parse_camera(doc, "cam0"));
        }
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (out.empty()) {
        throw ParseError(path + ": no cameras defined");
    }
    return out;
}

void save_calibration(const std::vector<CameraView>& cameras, const std::string& path) {
    json doc;
    json cams = json::array();
    for (const CameraView& cam : cameras) {
        json jc;
        jc["name"] = cam.name;
        jc["K"] = json{{"fx", cam.intrinsics.fx},   {"fy", cam.intrinsics.fy},
                       {"cx", cam.intrinsics.cx},   {"cy", cam.intrinsics.cy},
                       {"width", cam.intrinsics.width}, {"height", cam.intrinsics.height}};
        const Eigen::Quaterniond q = cam.cam_from_lidar.quaternion().normalized();
        const Eigen::Vector3d t = cam.cam_from_lidar.translation();
        jc["H_cam_lidar"] = json{{"qw", q.w()}, {"qx", q.x()}, {"qy", q.y()}, {"qz", q.z()},
                                 {"x", t.x()},  {"y", t.y()},  {"z", t.z()}};
        cams.push_back(std::move(jc));
    }
    doc["cameras"] = cams;
    write_file(path, doc.dump(1) + "\n");
}

EncPolygonSet load_enc(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    EncPolygonSet out;
    try {
        const std::string type = doc.at("type").get<std::string>();
        if (type == "FeatureCollection") {
            for (const json& feature : doc.at("features")) {
                add_geometry(out, feature.at("geometry"), path);
            }
        } else if (type == "Feature") {
            add_geometry(out, doc.at("geometry"), path);
        } else {
            add_geometry(out, doc, path);
        }
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return out;
}

void save_enc(const EncPolygonSet& enc, const std::string& path) {
    json features = json::array();
    for (const EncPolygon& poly : enc.polygons) {
        json rings = json::array();
        rings.push_back(ring_to_coords(poly.outer));
        for (const Ring& h : poly.holes) {
            rings.push_back(ring_to_coords(h));
        }
        features.push_back(json{{"type", "Feature"},
                                {"properties", json::object()},
                                {"geometry", json{{"type", "Polygon"}, {"coordinates", rings}}}});
    }
    json doc = json{{"type", "FeatureCollection"}, {"features", features}};
    write_file(path, doc.dump(1) + "\n");
}

void save_map(const BinaryMap& map, const std::string& pgm_path, const std::string& config_hash,
              const std::vector<std::string>& input_paths) {
    std::string out = "P5\n" + std::to_string(map.spec.n_cols) + " " +
                      std::to_string(map.spec.n_rows) + "\n255\n";
    out.reserve(out.size() + map.spec.n_cells());
    for (int r = map.spec.n_rows - 1; r >= 0; --r) {
        for (int c = 0; c < map.spec.n_cols; ++c) {
            out += static_cast<char>(map.at(c, r) ? 255 : 0);
        }
    }
    write_file(pgm_path, out);

    json meta;
    meta["grid"] = grid_to_json(map.spec);
    meta["encoding"] = "pgm, 255=static, 0=water, top row is max-y";
    meta["config_hash"] = config_hash;
    meta["inputs"] = input_paths;
    write_file(sidecar_path(pgm_path), meta.dump(1) + "\n");
}

BinaryMap load_map(const std::string& pgm_path) {
    const std::string data = read_file(pgm_path);
    std::istringstream in(data);
    std::string magic;
    int w = 0;
    int h = 0;
    int maxval = 0;
    in >> magic >> w >> h >> maxval;
    if ((magic != "P5" && magic != "P2") || w < 1 || h < 1 || maxval < 1 || maxval > 255) {
        throw ParseError(pgm_path + ": not a P5/P2 graymap");
    }

    json meta;
    try {
        meta = json::parse(read_file(sidecar_path(pgm_path)));
    } catch (const json::exception& e) {
        throw ParseError(sidecar_path(pgm_path) + ": " + e.what());
    }
    GridSpec g = grid_from_json(meta.at("grid"));
    if (g.n_cols != w || g.n_rows != h) {
        throw ParseError(pgm_path + ": raster dimensions disagree with sidecar grid");
    }

    BinaryMap map(g);
    if (magic == "P5") {
        in.get();  // single whitespace after maxval
        for (int r = g.n_rows - 1; r >= 0; --r) {
            for (int c = 0; c < g.n_cols; ++c) {
                const int v = in.get();
                if (v == EOF) {
                    throw ParseError(pgm_path + ": truncated raster");
                }
                map.set(c, r, v > maxval / 2);
            }
        }
    } else {
        for (int r = g.n_rows - 1; r >= 0; --r) {
            for (int c = 0; c < g.n_cols; ++c) {
                int v = 0;
                if (!(in >> v)) {
                    throw ParseError(pgm_path + ": truncated raster");
                }
                map.set(c, r, v > maxval / 2);
            }
        }
    }
    return map;
}

void save_detections(const std::vector<Detection>& detections, const std::string& path) {
    std::string out = "timestamp_us,x,y,n_points\n";
    for (const Detection& d : detections) {
        out += std::to_string(d.t);
        out += ',';
        append_double(out, d.x);
        out += ',';
        append_double(out, d.y);
        out += ',';
        out += std::to_string(d.n_points);
        out += '\n';
    }
    write_file(path, out);
}

std::vector<Detection> load_detections(const std::string& path) {
    const std::string text = read_file(path);
    LineReader reader{text};
    std::string_view line;
    if (!reader.next(line) || line != "timestamp_us,x,y,n_points") {
        throw ParseError(path + ":1: expected header 'timestamp_us,x,y,n_points'");
    }
    std::vector<Detection> out;
    while (reader.next(line)) {
        if (line.empty()) continue;
        FieldParser fp{line, path, reader.line_no};
        Detection d;
        d.t = fp.next_int();
        d.x = fp.next_double();
        d.y = fp.next_double();
        d.n_points = static_cast<int>(fp.next_int());
        fp.expect_end();
        out.push_back(d);
    }
    return out;
}

void save_tracks(const std::vector<TrackSnapshot>& snapshots, const std::string& path) {
    std::string out = "timestamp_us,track_id,status,x,y,vx,vy,r,v,P_xx,P_xy,P_yy\n";
    for (const TrackSnapshot& s : snapshots) {
        out += std::to_string(s.t);
        out += ',';
        out += std::to_string(s.track_id);
        out += ',';
        out += status_str(s.status);
        for (double v : {s.x, s.y, s.vx, s.vy, s.existence, s.visibility}) {
            out += ',';
            append_double(out, v);
        }
        for (double v : {s.p_xx, s.p_xy, s.p_yy}) {
            out += ',';
            append_double9(out, v);
        }
        out += '\n';
    }
    write_file(path, out);
}

std::vector<TrackSnapshot> load_tracks(const std::string& path) {
    const std::string text = read_file(path);
    LineReader reader{text};
    std::string_view line;
    if (!reader.next(line) || line != "timestamp_us,track_id,status,x,y,vx,vy,r,v,P_xx,P_xy,P_yy") {
        throw ParseError(path + ":1: bad track table header");
    }
    std::vector<TrackSnapshot> out;
    while (reader.next(line)) {
        if (line.empty()) continue;
        FieldParser fp{line, path, reader.line_no};
        TrackSnapshot s;
        s.t = fp.next_int();
        s.track_id = static_cast<std::uint64_t>(fp.next_int());
        s.status = status_from(fp.next_field(), path, reader.line_no);
        s.x = fp.next_double();
        s.y = fp.next_double();
        s.vx = fp.next_double();
        s.vy = fp.next_double();
        s.existence = fp.next_double();
        s.visibility = fp.next_double();
        s.p_xx = fp.next_double();
        s.p_xy = fp.next_double();
        s.p_yy = fp.next_double();
        fp.expect_end();
        out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const TrackSnapshot& a, const TrackSnapshot& b) {
        return a.t != b.t ? a.t < b.t : a.track_id < b.track_id;
    });
    return out;
}

void save_truth(const std::vector<TruthSample>& samples, const std::string& path) {
    std::string out = "timestamp_us,target_id,x,y\n";
    for (const TruthSample& s : samples) {
        out += std::to_string(s.t);
        out += ',';
        out += std::to_string(s.target_id);
        out += ',';
        append_double(out, s.x);
        out += ',';
        append_double(out, s.y);
        out += '\n';
    }
    write_file(path, out);
}

std::vector<TruthSample> load_truth(const std::string& path) {
    const std::string text = read_file(path);
    LineReader reader{text};
    std::string_view line;
    if (!reader.next(line) || line != "timestamp_us,target_id,x,y") {
        throw ParseError(path + ":1: expected header 'timestamp_us,target_id,x,y'");
    }
    std::vector<TruthSample> out;
    while (reader.next(line)) {
        if (line.empty()) continue;
        FieldParser fp{line, path, reader.line_no};
        TruthSample s;
        s.t = fp.next_int();
        s.target_id = static_cast<int>(fp.next_int());
        s.x = fp.next_double();
        s.y = fp.next_double();
        fp.expect_end();
        out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const TruthSample& a, const TruthSample& b) {
        return a.t != b.t ? a.t < b.t : a.target_id < b.target_id;
    });
    return out;
}

void save_track_summary(const std::vector<TrackSnapshot>& snapshots, const std::string& path) {
    struct Life {
        Timestamp born = 0;
        Timestamp last = 0;
        Timestamp confirmed = -1;
        int updates = 0;
    };
    std::map<std::uint64_t, Life> lives;
    for (const TrackSnapshot& s : snapshots) {
        auto [it, fresh] = lives.try_emplace(s.track_id);
        if (fresh) {
            it->second.born = s.t;
        }
        it->second.last = s.t;
        ++it->second.updates;
        if (s.status == TrackStatus::Confirmed && it->second.confirmed < 0) {
            it->second.confirmed = s.t;
        }
    }
    json tracks = json::array();
    int confirmed_count = 0;
    for (const auto& [id, life] : lives) {
        json jt;
        jt["id"] = id;
        jt["born_us"] = life.born;
        jt["last_us"] = life.last;
        jt["lifespan_s"] = to_seconds(life.last - life.born);
        if (life.confirmed >= 0) {
            jt["confirmed_us"] = life.confirmed;
            jt["confirmation_delay_s"] = to_seconds(life.confirmed - life.born);
            ++confirmed_count;
        } else {
            jt["confirmed_us"] = nullptr;
        }
        jt["updates"] = life.updates;
        tracks.push_back(std::move(jt));
    }
    json doc;
    doc["tracks"] = tracks;
    doc["total_tracks"] = lives.size();
    doc["confirmed_tracks"] = confirmed_count;
    write_file(path, doc.dump(1) + "\n");
}

void save_score_report(const MapScore* map_score, const TrackScore* track_score,
                       const std::string& json_path, const std::string& csv_path) {
    json doc;
    std::string csv = "metric,value\n";
    auto add = [&](const std::string& name, double value) {
        csv += name + "," + format_double(value) + "\n";
    };
    if (map_score) {
        doc["map"] = json{{"iou", map_score->iou},
                          {"docked_exclusion", map_score->docked_exclusion},
                          {"coverage_rate", map_score->coverage_rate}};
        add("map.iou", map_score->iou);
        add("map.docked_exclusion", map_score->docked_exclusion);
        add("map.coverage_rate", map_score->coverage_rate);
    }
    if (track_score) {
        json per_target = json::array();
        for (const TargetTrackScore& t : track_score->per_target) {
            per_target.push_back(json{{"target_id", t.target_id},
                                      {"time_to_first_confirmed_s", t.time_to_first_confirmed_s},
                                      {"fragmentation", t.fragmentation},
                                      {"id_switches", t.id_switches}});
            add("tracks.target" + std::to_string(t.target_id) + ".time_to_first_s",
                t.time_to_first_confirmed_s);
        }
        doc["tracks"] = json{{"confirmed_tracks", track_score->confirmed_tracks},
                             {"tentative_only_tracks", track_score->tentative_only_tracks},
                             {"true_targets", track_score->true_targets},
                             {"false_tracks", track_score->false_tracks},
                             {"per_target", per_target}};
        add("tracks.confirmed", track_score->confirmed_tracks);
        add("tracks.tentative_only", track_score->tentative_only_tracks);
        add("tracks.true_targets", track_score->true_targets);
        add("tracks.false", track_score->false_tracks);
        add("tracks.fragmentation", track_score->total_fragmentation());
        add("tracks.id_switches", track_score->total_id_switches());
    }
    write_file(json_path, doc.dump(1) + "\n");
    write_file(csv_path, csv);
}

std::vector<Ring> map_boundary_rings(const BinaryMap& map) {
    // Directed cell-edge following; static interior stays on the left.
    struct Vertex {
        int x;
        int y;
        bool operator<(const Vertex& o) const { return x != o.x ? x < o.x : y < o.y; }
    };
    std::map<Vertex, std::vector<Vertex>> edges;  // start -> ends
    const GridSpec& g = map.spec;
    auto at = [&](int c, int r) { return g.contains(c, r) && map.at(c, r); };
    for (int r = 0; r < g.n_rows; ++r) {
        for (int c = 0; c < g.n_cols; ++c) {
            if (!map.at(c, r)) continue;
            if (!at(c, r - 1)) edges[{c, r}].push_back({c + 1, r});          // south
            if (!at(c + 1, r)) edges[{c + 1, r}].push_back({c + 1, r + 1});  // east
            if (!at(c, r + 1)) edges[{c + 1, r + 1}].push_back({c, r + 1});  // north
            if (!at(c - 1, r)) edges[{c, r + 1}].push_back({c, r});          // west
        }
    }
    for (auto& [v, ends] : edges) {
        std::sort(ends.begin(), ends.end());
    }

    std::vector<Ring> rings;
    while (!edges.empty()) {
        const Vertex start = edges.begin()->first;
        Ring ring;
        Vertex cur = start;
        Vertex prev{cur.x - 1, cur.y};  // fake incoming direction
        do {
            ring.push_back(Vec2{g.origin_x + cur.x * g.cell_size,
                                g.origin_y + cur.y * g.cell_size});
            auto it = edges.find(cur);
            if (it == edges.end() || it->second.empty()) {
                break;  // should not happen on well-formed boundaries
            }
            // Prefer the sharpest left turn relative to the incoming
            // direction so touching corners resolve consistently.
            const int dx = cur.x - prev.x;
            const int dy = cur.y - prev.y;
            auto turn_rank = [&](const Vertex& nxt) {
                const int ex = nxt.x - cur.x;
                const int ey = nxt.y - cur.y;
                const int cross = dx * ey - dy * ex;  // left positive
                const int dot = dx * ex + dy * ey;
                if (cross > 0) return 0;  // left
                if (cross == 0 && dot > 0) return 1;  // straight
                return 2;  // right / back
            };
            std::size_t best = 0;
            for (std::size_t i = 1; i < it->second.size(); ++i) {
                if (turn_rank(it->second[i]) < turn_rank(it->second[best])) {
                    best = i;
                }
            }
            const Vertex nxt = it->second[best];
            it->second.erase(it->second.begin() + static_cast<std::ptrdiff_t>(best));
            if (it->second.empty()) {
                edges.erase(it);
            }
            prev = cur;
            cur = nxt;
        } while (!(cur.x == start.x && cur.y == start.y));
        if (ring.size() >= 3) {
            rings.push_back(std::move(ring));
        }
    }
    return rings;
}

void save_boundary_geojson(const std::vector<Ring>& rings, const std::string& path) {
    json features = json::array();
    for (const Ring& ring : rings) {
        json rings_json = json::array();
        rings_json.push_back(ring_to_coords(ring));
        features.push_back(json{{"type", "Feature"},
                                {"properties", json::object()},
                                {"geometry",
                                 json{{"type", "Polygon"}, {"coordinates", rings_json}}}});
    }
    write_file(path, json{{"type", "FeatureCollection"}, {"features", features}}.dump(1) + "\n");
}

void save_manifest(const Manifest& m, const std::string& path) {
    json doc;
    doc["points"] = m.points;
    doc["poses"] = m.poses;
    doc["calib"] = m.calib;
    doc["masks"] = m.masks;
    doc["enc"] = m.enc;
    doc["truth_tracks"] = m.truth_tracks;
    doc["truth_map"] = m.truth_map;
    doc["docked_footprint"] = m.docked_footprint;
    doc["coverage"] = m.coverage;
    doc["grid"] = grid_to_json(m.grid);
    write_file(path, doc.dump(1) + "\n");
}

Manifest load_manifest(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    Manifest m;
    try {
        m.points = doc.at("points").get<std::string>();
        m.poses = doc.at("poses").get<std::string>();
        m.calib = doc.at("calib").get<std::string>();
        m.masks = doc.at("masks").get<std::vector<std::string>>();
        m.enc = doc.value("enc", "");
        m.truth_tracks = doc.value("truth_tracks", "");
        m.truth_map = doc.value("truth_map", "");
        m.docked_footprint = doc.value("docked_footprint", "");
        m.coverage = doc.value("coverage", "");
        m.grid = grid_from_json(doc.at("grid"));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return m;
}

SequenceBundle load_bundle(const std::string& manifest_path) {
    const Manifest m = load_manifest(manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();
    auto resolve = [&](const std::string& p) { return (base / p).string(); };

    SequenceBundle bundle;
    bundle.frames = load_lidar_sequence(resolve(m.points));
    bundle.poses = load_poses(resolve(m.poses));
    bundle.cameras = load_calibration(resolve(m.calib));
    if (m.masks.size() != bundle.cameras.size()) {
        throw ParseError(manifest_path + ": mask file count (" + std::to_string(m.masks.size()) +
                         ") does not match camera count (" +
                         std::to_string(bundle.cameras.size()) + ")");
    }
    for (const std::string& mp : m.masks) {
        bundle.masks_per_camera.push_back(load_masks(resolve(mp)));
    }
    bundle.grid = m.grid;
    return bundle;
}

}  // namespace nearshore::io
