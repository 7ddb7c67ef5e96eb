#pragma once

#include "nearshore/geometry.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace nearshore {

/// 2D world-aligned grid. origin is the lower-left corner of cell (0,0);
/// cells are half-open: [origin + i*cell, origin + (i+1)*cell). A point on a
/// cell boundary belongs to the higher-index cell.
struct GridSpec {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double cell_size = 0.5;
    int n_cols = 1;
    int n_rows = 1;

    void validate() const;
    bool operator==(const GridSpec& o) const;

    std::size_t n_cells() const {
        return static_cast<std::size_t>(n_cols) * static_cast<std::size_t>(n_rows);
    }
    std::size_t index(int col, int row) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(n_cols) +
               static_cast<std::size_t>(col);
    }
    bool contains(int col, int row) const {
        return col >= 0 && col < n_cols && row >= 0 && row < n_rows;
    }
    double center_x(int col) const { return origin_x + (col + 0.5) * cell_size; }
    double center_y(int row) const { return origin_y + (row + 0.5) * cell_size; }
};

struct CellIndex {
    int col = 0;
    int row = 0;
    bool operator==(const CellIndex& o) const { return col == o.col && row == o.row; }
};

/// Drops z, floors into the grid. nullopt when the point falls outside.
std::optional<CellIndex> world_to_cell(const Point3& p_world, const GridSpec& g);
std::optional<CellIndex> world_to_cell(double x, double y, const GridSpec& g);

/// Binary static-structure grid: one byte per cell, nonzero = static.
struct BinaryMap {
    GridSpec spec;
    std::vector<std::uint8_t> cells;  // row-major, cells[row * n_cols + col]

    BinaryMap() = default;
    explicit BinaryMap(const GridSpec& s) : spec(s), cells(s.n_cells(), 0) {}

    bool at(int col, int row) const { return cells[spec.index(col, row)] != 0; }
    void set(int col, int row, bool v) { cells[spec.index(col, row)] = v ? 1 : 0; }
    std::size_t count_static() const;
    bool operator==(const BinaryMap& o) const { return spec == o.spec && cells == o.cells; }
};

}  // namespace nearshore
