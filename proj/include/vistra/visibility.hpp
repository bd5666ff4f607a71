#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "vistra/graph.hpp"
#include "vistra/time_series.hpp"

namespace vistra::visibility {

enum class Method { VG, LPVG, CLPVG };

std::string_view to_string(Method m);
/// Accepts "vg", "lpvg", "clpvg" (case-insensitive).
Method parse_method(std::string_view s);

struct VgParams {
    Method method = Method::CLPVG;
    std::size_t m = 1;      // penetrable distance; ignored for VG
    double alpha = 10.0;    // curvature; CLPVG only
};

struct Point {
    double t;
    double x;
};

/// Member of the circle pencil through two samples.
struct ChordCircle {
    Point center;
    double radius;
    Point a;
    Point b;
};

/// Circle through a and b selected by alpha. Requires a.t < b.t and alpha != 0.
ChordCircle chord_circle(Point a, Point b, double alpha);

/// Discriminant of the quadratic in x obtained by fixing t = t_c on the
/// circle through a and b. Non-negative for t_c in [t_a, t_b].
double arc_discriminant(Point a, Point b, double alpha, double t_c);

/// Height of the minor arc at t_c (t_a < t_c < t_b). For alpha > 0 the arc
/// sits below the chord, for alpha < 0 above it.
double arc_height(Point a, Point b, double alpha, double t_c);

/// Classic visibility graph. Samples lying exactly on a sight line block it.
Graph build_vg(const TimeSeries& series);

/// Limited penetrable VG: (a, b) are linked when at most m intermediate
/// samples reach or cross the straight sight line.
Graph build_lpvg(const TimeSeries& series, std::size_t m);

/// Circular LPVG: as LPVG with the sight line replaced by the minor arc of
/// the alpha-circle through both samples.
Graph build_clpvg(const TimeSeries& series, std::size_t m, double alpha);

Graph build(const TimeSeries& series, const VgParams& params);

}  // namespace vistra::visibility
