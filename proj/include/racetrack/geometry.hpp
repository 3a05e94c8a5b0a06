#pragma once

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace racetrack {

/// Offset of region x relative to region y on the ring, in [0, R).
inline int ring_offset(int x, int y, int regions) {
    const int m = (x - y) % regions;
    return m < 0 ? m + regions : m;
}

/// Shorter arc length between two regions `offset` steps apart on the unit circle.
inline double arc_distance(int offset, int regions) {
    if (regions < 2) throw std::invalid_argument("arc_distance: R must be >= 2");
    if (offset < 0 || offset >= regions)
        throw std::out_of_range("arc_distance: offset " + std::to_string(offset) +
                                " outside [0, " + std::to_string(regions) + ")");
    return 2.0 * std::numbers::pi / regions * std::min(offset, regions - offset);
}

inline double ring_distance(int x, int y, int regions) {
    return arc_distance(ring_offset(x, y, regions), regions);
}

/// arc_distance(m, R) for m = 0..R-1.
inline std::vector<double> arc_distances(int regions) {
    std::vector<double> d(static_cast<std::size_t>(regions));
    for (int m = 0; m < regions; ++m) d[static_cast<std::size_t>(m)] = arc_distance(m, regions);
    return d;
}

/// Sum of distances from any region to all regions (y-independent on the ring).
inline double total_arc_distance(int regions) {
    double s = 0.0;
    for (int m = 0; m < regions; ++m) s += arc_distance(m, regions);
    return s;
}

}  // namespace racetrack
