#include "nearshore/config.hpp"

#include "nearshore/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace nearshore {

using nlohmann::json;

const char* map_variant_name(MapVariantKind k) {
    switch (k) {
        case MapVariantKind::None: return "none";
        case MapVariantKind::EncOnly: return "enc_only";
        case MapVariantKind::Dilated: return "dilated";
        case MapVariantKind::Precise: return "precise";
    }
    return "?";
}

MapVariantKind map_variant_from_name(const std::string& name) {
    if (name == "none") return MapVariantKind::None;
    if (name == "enc_only") return MapVariantKind::EncOnly;
    if (name == "dilated") return MapVariantKind::Dilated;
    if (name == "precise") return MapVariantKind::Precise;
    throw ConfigError("unknown map variant '" + name + "' (none|enc_only|dilated|precise)");
}

namespace {

json mapper_to_json(const MapperConfig& c) {
    return json{{"window_seconds", c.window_seconds},
                {"frame_rate_hz", c.frame_rate_hz},
                {"max_range_m", c.max_range_m},
                {"min_observed_fraction", c.min_observed_fraction},
                {"cell_size_m", c.cell_size_m},
                {"dilate_radius_cells", c.dilate_radius_cells},
                {"erode_radius_cells", c.erode_radius_cells},
                {"close_then_open", c.close_then_open}};
}

void mapper_from_json(const json& j, MapperConfig& c) {
    c.window_seconds = j.value("window_seconds", c.window_seconds);
    c.frame_rate_hz = j.value("frame_rate_hz", c.frame_rate_hz);
    c.max_range_m = j.value("max_range_m", c.max_range_m);
    c.min_observed_fraction = j.value("min_observed_fraction", c.min_observed_fraction);
    c.cell_size_m = j.value("cell_size_m", c.cell_size_m);
    c.dilate_radius_cells = j.value("dilate_radius_cells", c.dilate_radius_cells);
    c.erode_radius_cells = j.value("erode_radius_cells", c.erode_radius_cells);
    c.close_then_open = j.value("close_then_open", c.close_then_open);
}

json detector_to_json(const DetectorConfig& c) {
    return json{{"epsilon", c.epsilon}, {"min_points", c.min_points}};
}

void detector_from_json(const json& j, DetectorConfig& c) {
    c.epsilon = j.value("epsilon", c.epsilon);
    c.min_points = j.value("min_points", c.min_points);
}

json tracker_to_json(const TrackerConfig& c) {
    return json{{"process_noise_intensity", c.process_noise_intensity},
                {"measurement_noise_std", c.measurement_noise_std},
                {"clutter_density", c.clutter_density},
                {"detection_probability", c.detection_probability},
                {"survival_probability", c.survival_probability},
                {"p_visible_given_visible", c.p_visible_given_visible},
                {"p_visible_given_invisible", c.p_visible_given_invisible},
                {"gate_probability", c.gate_probability},
                {"confirmation_threshold", c.confirmation_threshold},
                {"termination_threshold", c.termination_threshold},
                {"initial_existence", c.initial_existence},
                {"initial_visibility", c.initial_visibility},
                {"initial_velocity_std", c.initial_velocity_std}};
}

void tracker_from_json(const json& j, TrackerConfig& c) {
    c.process_noise_intensity = j.value("process_noise_intensity", c.process_noise_intensity);
    c.measurement_noise_std = j.value("measurement_noise_std", c.measurement_noise_std);
    c.clutter_density = j.value("clutter_density", c.clutter_density);
    c.detection_probability = j.value("detection_probability", c.detection_probability);
    c.survival_probability = j.value("survival_probability", c.survival_probability);
    c.p_visible_given_visible = j.value("p_visible_given_visible", c.p_visible_given_visible);
    c.p_visible_given_invisible =
        j.value("p_visible_given_invisible", c.p_visible_given_invisible);
    c.gate_probability = j.value("gate_probability", c.gate_probability);
    c.confirmation_threshold = j.value("confirmation_threshold", c.confirmation_threshold);
    c.termination_threshold = j.value("termination_threshold", c.termination_threshold);
    c.initial_existence = j.value("initial_existence", c.initial_existence);
    c.initial_visibility = j.value("initial_visibility", c.initial_visibility);
    c.initial_velocity_std = j.value("initial_velocity_std", c.initial_velocity_std);
}

}  // namespace

std::string PipelineConfig::serialize() const {
    json doc;
    doc["seed"] = seed;
    doc["scenario"] = scenario;
    doc["out_dir"] = out_dir;
    doc["data_manifest"] = data_manifest;
    doc["map_path"] = map_path;
    doc["no_masks"] = no_masks;
    doc["mapper"] = mapper_to_json(mapper);
    doc["detector"] = detector_to_json(detector);
    doc["tracker"] = tracker_to_json(tracker);
    doc["map_variant"] =
        json{{"kind", map_variant_name(variant.kind)}, {"margin_m", variant.margin_m}};
    doc["match_radius_m"] = match_radius_m;
    doc["mask_match_tol_us"] = mask_match_tol_us;
    return doc.dump(1) + "\n";
}

PipelineConfig PipelineConfig::deserialize(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    PipelineConfig c;  // defaults layer
    try {
        c.seed = doc.value("seed", c.seed);
        c.scenario = doc.value("scenario", c.scenario);
        c.out_dir = doc.value("out_dir", c.out_dir);
        c.data_manifest = doc.value("data_manifest", c.data_manifest);
        c.map_path = doc.value("map_path", c.map_path);
        c.no_masks = doc.value("no_masks", c.no_masks);
        if (doc.contains("mapper")) mapper_from_json(doc["mapper"], c.mapper);
        if (doc.contains("detector")) detector_from_json(doc["detector"], c.detector);
        if (doc.contains("tracker")) tracker_from_json(doc["tracker"], c.tracker);
        if (doc.contains("map_variant")) {
            const json& v = doc["map_variant"];
            if (v.contains("kind")) {
                c.variant.kind = map_variant_from_name(v["kind"].get<std::string>());
            }
            c.variant.margin_m = v.value("margin_m", c.variant.margin_m);
        }
        c.match_radius_m = doc.value("match_radius_m", c.match_radius_m);
        c.mask_match_tol_us = doc.value("mask_match_tol_us", c.mask_match_tol_us);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open config '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

void PipelineConfig::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ParseError("cannot write config '" + path + "'");
    }
    out << serialize();
}

std::string PipelineConfig::config_hash() const { return io::fnv1a_hex(serialize()); }

}  // namespace nearshore
