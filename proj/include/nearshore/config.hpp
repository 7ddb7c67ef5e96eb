#pragma once

#include "nearshore/detector.hpp"
#include "nearshore/mapper.hpp"
#include "nearshore/tracker.hpp"

#include <cstdint>
#include <string>

namespace nearshore {

enum class MapVariantKind : std::uint8_t { None, EncOnly, Dilated, Precise };

const char* map_variant_name(MapVariantKind k);
MapVariantKind map_variant_from_name(const std::string& name);

struct MapVariant {
    MapVariantKind kind = MapVariantKind::Precise;
    double margin_m = 2.0;  // used by Dilated
};

/// One declarative document drives every subcommand; absent keys keep their
/// defaults and CLI flags override document values.
struct PipelineConfig {
    std::uint64_t seed = 1;
    std::string scenario = "kayak_undock";
    std::string out_dir = "out";
    std::string data_manifest;  // sequence to map/track; pipeline fills it in
    std::string map_path;       // precise map for track/eval
    bool no_masks = false;

    MapperConfig mapper;
    DetectorConfig detector;
    TrackerConfig tracker;
    MapVariant variant;
    double match_radius_m = 3.0;
    Timestamp mask_match_tol_us = 50000;

    /// Canonical JSON (all keys, sorted); parse(serialize(x)) == x.
    std::string serialize() const;
    static PipelineConfig deserialize(const std::string& text);

    static PipelineConfig load(const std::string& path);
    void save(const std::string& path) const;

    std::string config_hash() const;
};

}  // namespace nearshore
