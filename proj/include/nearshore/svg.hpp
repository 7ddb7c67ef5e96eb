#pragma once

#include "nearshore/detector.hpp"
#include "nearshore/evaluator.hpp"
#include "nearshore/grid.hpp"

#include <string>
#include <vector>

namespace nearshore {

/// Scene overview: map cells, detections, and track polylines with ids,
/// written as a standalone SVG. No plotting runtime involved.
void write_overview_svg(const std::string& path, const BinaryMap* map,
                        const std::vector<Detection>& detections,
                        const std::vector<TrackSnapshot>& snapshots,
                        const std::vector<TruthSample>& truth);

}  // namespace nearshore
