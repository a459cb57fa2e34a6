#pragma once

#include <cstddef>
#include <vector>

#include "navbench/errors.hpp"
#include "navbench/geometry.hpp"

namespace navbench {

// Dense row-major 2D array. Index = y * width + x.
template <class T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : w_(width), h_(height), cells_(static_cast<std::size_t>(width) * height, fill) {
        require(width > 0 && height > 0, "Grid: dimensions must be positive");
    }

    int width() const { return w_; }
    int height() const { return h_; }
    std::size_t size() const { return cells_.size(); }

    bool in_bounds(int x, int y) const { return x >= 0 && x < w_ && y >= 0 && y < h_; }
    bool in_bounds(const GridCell& c) const { return in_bounds(c.x, c.y); }

    T& at(int x, int y) { return cells_[index(x, y)]; }
    const T& at(int x, int y) const { return cells_[index(x, y)]; }
    T& at(const GridCell& c) { return at(c.x, c.y); }
    const T& at(const GridCell& c) const { return at(c.x, c.y); }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * w_ + x;
    }
    std::size_t index(const GridCell& c) const { return index(c.x, c.y); }
    GridCell cell_at(std::size_t idx) const {
        return {static_cast<int>(idx % w_), static_cast<int>(idx / w_)};
    }

    std::vector<T>& cells() { return cells_; }
    const std::vector<T>& cells() const { return cells_; }

    void fill(const T& v) { cells_.assign(cells_.size(), v); }

    template <class U>
    bool same_shape(const Grid<U>& o) const {
        return w_ == o.width() && h_ == o.height();
    }

    bool operator==(const Grid& o) const {
        return w_ == o.w_ && h_ == o.h_ && cells_ == o.cells_;
    }

private:
    int w_ = 0;
    int h_ = 0;
    std::vector<T> cells_;
};

// 8-connected neighbourhood offsets, fixed iteration order.
inline constexpr int kNeighbor8X[8] = {1, -1, 0, 0, 1, 1, -1, -1};
inline constexpr int kNeighbor8Y[8] = {0, 0, 1, -1, 1, -1, 1, -1};

} // namespace navbench
