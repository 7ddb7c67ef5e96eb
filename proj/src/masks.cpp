#include "nearshore/masks.hpp"

#include <algorithm>
#include <string>

namespace nearshore {

bool InstanceMask::contains(int px, int py) const {
    auto it = std::lower_bound(rows.begin(), rows.end(), py,
                               [](const MaskRow& r, int y) { return r.y < y; });
    if (it == rows.end() || it->y != py) {
        return false;
    }
    for (const PixelSpan& s : it->spans) {
        if (px >= s.x_begin && px < s.x_end) {
            return true;
        }
    }
    return false;
}

std::size_t InstanceMask::pixel_count() const {
    std::size_t n = 0;
    for (const MaskRow& r : rows) {
        for (const PixelSpan& s : r.spans) {
            n += static_cast<std::size_t>(s.x_end - s.x_begin);
        }
    }
    return n;
}

void InstanceMask::add_pixel(int px, int py) {
    for (MaskRow& r : rows) {
        if (r.y == py) {
            r.spans.push_back({px, px + 1});
            return;
        }
    }
    rows.push_back(MaskRow{py, {{px, px + 1}}});
}

void InstanceMask::normalize() {
    std::sort(rows.begin(), rows.end(), [](const MaskRow& a, const MaskRow& b) { return a.y < b.y; });
    for (MaskRow& r : rows) {
        std::sort(r.spans.begin(), r.spans.end(),
                  [](const PixelSpan& a, const PixelSpan& b) { return a.x_begin < b.x_begin; });
        std::vector<PixelSpan> merged;
        for (const PixelSpan& s : r.spans) {
            if (!merged.empty() && s.x_begin <= merged.back().x_end) {
                merged.back().x_end = std::max(merged.back().x_end, s.x_end);
            } else {
                merged.push_back(s);
            }
        }
        r.spans = std::move(merged);
    }
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [](const MaskRow& r) { return r.spans.empty(); }),
               rows.end());
}

bool MaskFrame::any_instance_contains(int px, int py) const {
    for (const InstanceMask& m : instances) {
        if (m.contains(px, py)) {
            return true;
        }
    }
    return false;
}

void MaskFrame::validate() const {
    if (width < 1 || height < 1) {
        throw ParseError("mask frame has non-positive image dimensions");
    }
    for (const InstanceMask& m : instances) {
        for (const MaskRow& r : m.rows) {
            if (r.y < 0 || r.y >= height) {
                throw ParseError("mask row y=" + std::to_string(r.y) + " outside image height " +
                                 std::to_string(height));
            }
            for (const PixelSpan& s : r.spans) {
                if (s.x_begin < 0 || s.x_end > width || s.x_begin >= s.x_end) {
                    throw ParseError("mask span [" + std::to_string(s.x_begin) + ", " +
                                     std::to_string(s.x_end) + ") outside image width " +
                                     std::to_string(width));
                }
            }
        }
    }
}

const MaskFrame* match_mask_to_frame(const std::vector<MaskFrame>& masks, Timestamp t,
                                     Timestamp tol_us) {
    if (masks.empty()) {
        return nullptr;
    }
    auto it = std::lower_bound(masks.begin(), masks.end(), t,
                               [](const MaskFrame& m, Timestamp v) { return m.t < v; });
    const MaskFrame* best = nullptr;
    Timestamp best_dt = tol_us;
    if (it != masks.end() && std::llabs(it->t - t) <= best_dt) {
        best = &*it;
        best_dt = std::llabs(it->t - t);
    }
    if (it != masks.begin()) {
        auto prev = it - 1;
        if (std::llabs(prev->t - t) <= best_dt) {
            best = &*prev;
        }
    }
    return best;
}

}  // namespace nearshore
