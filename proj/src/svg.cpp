#include "nearshore/svg.hpp"

#include "nearshore/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace nearshore {

namespace {

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

void write_overview_svg(const std::string& path, const BinaryMap* map,
                        const std::vector<Detection>& detections,
                        const std::vector<TrackSnapshot>& snapshots,
                        const std::vector<TruthSample>& truth) {
    // World bounds: grid if present, else data extent.
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 1.0;
    double y1 = 1.0;
    if (map) {
        x0 = map->spec.origin_x;
        y0 = map->spec.origin_y;
        x1 = x0 + map->spec.n_cols * map->spec.cell_size;
        y1 = y0 + map->spec.n_rows * map->spec.cell_size;
    } else {
        bool first = true;
        auto grow = [&](double x, double y) {
            if (first) {
                x0 = x1 = x;
                y0 = y1 = y;
                first = false;
                return;
            }
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        };
        for (const Detection& d : detections) grow(d.x, d.y);
        for (const TrackSnapshot& s : snapshots) grow(s.x, s.y);
        for (const TruthSample& s : truth) grow(s.x, s.y);
        if (first) {
            x1 = y1 = 10.0;
        }
        x0 -= 5.0;
        y0 -= 5.0;
        x1 += 5.0;
        y1 += 5.0;
    }

    const double scale = 8.0;  // px per meter
    const double w = (x1 - x0) * scale;
    const double h = (y1 - y0) * scale;
    auto sx = [&](double x) { return (x - x0) * scale; };
    auto sy = [&](double y) { return h - (y - y0) * scale; };  // y up

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w) + "\" height=\"" +
           fmt(h) + "\" viewBox=\"0 0 " + fmt(w) + " " + fmt(h) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#eef6fb\"/>\n";

    // Static cells, merged into horizontal run rectangles per row.
    if (map) {
        out += "<g fill=\"#6b6b6b\">\n";
        for (int r = 0; r < map->spec.n_rows; ++r) {
            int c = 0;
            while (c < map->spec.n_cols) {
                if (!map->at(c, r)) {
                    ++c;
                    continue;
                }
                int end = c;
                while (end < map->spec.n_cols && map->at(end, r)) ++end;
                const double wx = map->spec.origin_x + c * map->spec.cell_size;
                const double wy = map->spec.origin_y + (r + 1) * map->spec.cell_size;
                out += "<rect x=\"" + fmt(sx(wx)) + "\" y=\"" + fmt(sy(wy)) + "\" width=\"" +
                       fmt((end - c) * map->spec.cell_size * scale) + "\" height=\"" +
                       fmt(map->spec.cell_size * scale) + "\"/>\n";
                c = end;
            }
        }
        out += "</g>\n";
    }

    // Detections.
    if (!detections.empty()) {
        out += "<g fill=\"#9ecae1\" fill-opacity=\"0.7\">\n";
        for (const Detection& d : detections) {
            out += "<circle cx=\"" + fmt(sx(d.x)) + "\" cy=\"" + fmt(sy(d.y)) +
                   "\" r=\"1.5\"/>\n";
        }
        out += "</g>\n";
    }

    // Truth trajectories as dashed lines.
    std::map<int, std::vector<const TruthSample*>> truth_by_id;
    for (const TruthSample& s : truth) truth_by_id[s.target_id].push_back(&s);
    for (const auto& [id, pts] : truth_by_id) {
        out += "<polyline fill=\"none\" stroke=\"#444\" stroke-dasharray=\"4 3\" "
               "stroke-width=\"1\" points=\"";
        for (const TruthSample* s : pts) {
            out += fmt(sx(s->x)) + "," + fmt(sy(s->y)) + " ";
        }
        out += "\"/>\n";
    }

    // Track polylines, confirmed solid, colored by id.
    std::map<std::uint64_t, std::vector<const TrackSnapshot*>> by_id;
    for (const TrackSnapshot& s : snapshots) by_id[s.track_id].push_back(&s);
    for (const auto& [id, pts] : by_id) {
        const char* color = kPalette[id % (sizeof kPalette / sizeof kPalette[0])];
        out += "<polyline fill=\"none\" stroke=\"";
        out += color;
        out += "\" stroke-width=\"1.5\" points=\"";
        for (const TrackSnapshot* s : pts) {
            out += fmt(sx(s->x)) + "," + fmt(sy(s->y)) + " ";
        }
        out += "\"/>\n";
        const TrackSnapshot* last = pts.back();
        out += "<text x=\"" + fmt(sx(last->x) + 3) + "\" y=\"" + fmt(sy(last->y) - 3) +
               "\" font-size=\"10\" fill=\"";
        out += color;
        out += "\">";
        out += std::to_string(id);
        out += "</text>\n";
    }

    out += "</svg>\n";

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw ParseError("cannot write '" + path + "'");
    }
    f << out;
}

}  // namespace nearshore
