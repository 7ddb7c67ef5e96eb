#pragma once

#include "nearshore/geometry.hpp"

#include <cstdint>
#include <vector>

namespace nearshore {

/// [x_begin, x_end) pixel span on one image row.
struct PixelSpan {
    int x_begin = 0;
    int x_end = 0;
};

struct MaskRow {
    int y = 0;
    std::vector<PixelSpan> spans;
};

/// One vessel instance as row run-lengths. Compact and order-independent
/// for membership tests; instances may overlap.
struct InstanceMask {
    std::vector<MaskRow> rows;

    bool contains(int px, int py) const;
    std::size_t pixel_count() const;
    void add_pixel(int px, int py);  // builder helper; normalize() merges spans
    void normalize();                // sort rows/spans, merge adjacent spans
};

struct MaskFrame {
    Timestamp t = 0;
    int width = 0;
    int height = 0;
    std::vector<InstanceMask> instances;

    /// True when the rounded pixel falls inside any instance.
    bool any_instance_contains(int px, int py) const;
    void validate() const;  // all spans within image bounds
};

/// Nearest frame by timestamp within tol_us; nullptr when none qualifies.
/// Frames must be time-sorted.
const MaskFrame* match_mask_to_frame(const std::vector<MaskFrame>& masks, Timestamp t,
                                     Timestamp tol_us);

}  // namespace nearshore
