#include "vistra/visibility.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace vistra::visibility {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::VG: return "vg";
        case Method::LPVG: return "lpvg";
        case Method::CLPVG: return "clpvg";
    }
    return "?";
}

Method parse_method(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "vg") return Method::VG;
    if (lower == "lpvg") return Method::LPVG;
    if (lower == "clpvg") return Method::CLPVG;
    throw std::invalid_argument("unknown visibility method '" + std::string(s) + "'");
}

namespace {

void check_alpha(double alpha) {
    if (!std::isfinite(alpha) || alpha == 0.0) throw std::invalid_argument("alpha must be finite and nonzero");
}

// Geometry of the circle pencil through a and b in chord-relative form.
// With dt = t_b - t_a, k = (x_b - x_a)/dt, u = t_c - t_a and the offset
// d = x - (x_a + k*u) from the chord, the circle equation at t = t_c becomes
//   d^2 - beta*d - p = 0,  beta = alpha*dt + k*(dt - 2u),  p = (1 + k^2) u (dt - u).
// For t_a < t_c < t_b p > 0, so one root lies on each side of the chord. The
// minor arc is on the side opposite the center, i.e. d < 0 for alpha > 0.
struct ArcFrame {
    double dt;
    double k;
    double one_plus_k2;
    double alpha_dt;
    bool below;  // alpha > 0

    ArcFrame(double ta, double xa, double tb, double xb, double alpha)
        : dt(tb - ta), k((xb - xa) / (tb - ta)), one_plus_k2(1.0 + k * k), alpha_dt(alpha * (tb - ta)),
          below(alpha > 0.0) {}

    double discriminant(double u, double& beta, double& p) const {
        beta = alpha_dt + k * (dt - 2.0 * u);
        p = one_plus_k2 * u * (dt - u);
        return beta * beta + 4.0 * p;
    }

    // Minor-arc offset from the chord at elapsed time u.
    double offset(double u) const {
        double beta = 0.0, p = 0.0;
        const double sq = std::sqrt(std::max(0.0, discriminant(u, beta, p)));
        if (below) return beta > 0.0 ? -2.0 * p / (beta + sq) : 0.5 * (beta - sq);
        return beta < 0.0 ? 2.0 * p / (sq - beta) : 0.5 * (beta + sq);
    }
};

void check_arc_query(Point a, Point b, double alpha, double t_c) {
    check_alpha(alpha);
    if (!(a.t < b.t)) throw std::invalid_argument("chord endpoints need t_a < t_b");
    if (!(a.t < t_c && t_c < b.t)) throw std::invalid_argument("t_c must lie strictly between t_a and t_b");
}

void check_series(const TimeSeries& series) {
    if (series.size() < 2) throw std::invalid_argument("visibility graphs need at least 2 samples");
}

// Shared O(n^2) pair loop. `blocks(a, b, c)` reports whether sample c reaches
// or crosses the sight curve of (a, b); the scan stops once more than m do.
template <typename Setup>
Graph build_pairs(const TimeSeries& series, std::size_t m, Setup setup) {
    check_series(series);
    const std::size_t n = series.size();
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = series.elapsed(i);
    const auto x = series.values();

    std::vector<Edge> edges;
    for (std::size_t a = 0; a + 1 < n; ++a) {
        edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(a + 1));
        for (std::size_t b = a + 2; b < n; ++b) {
            const auto blocks = setup(t[a], x[a], t[b], x[b]);
            std::size_t hits = 0;
            for (std::size_t c = a + 1; c < b && hits <= m; ++c) {
                if (blocks(t[c], x[c])) ++hits;
            }
            if (hits <= m) edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
        }
    }
    return graph_from_sorted_edges(n, std::move(edges));
}

Graph build_line(const TimeSeries& series, std::size_t m) {
    return build_pairs(series, m, [](double ta, double xa, double tb, double xb) {
        const double dt = tb - ta;
        const double dx = xb - xa;
        // x_c on or above the chord: (x_c - x_a) * dt >= dx * (t_c - t_a)
        return [=](double tc, double xc) { return (xc - xa) * dt >= dx * (tc - ta); };
    });
}

}  // namespace

ChordCircle chord_circle(Point a, Point b, double alpha) {
    check_alpha(alpha);
    if (!(a.t < b.t)) throw std::invalid_argument("chord endpoints need t_a < t_b");
    const Point center{(a.t + b.t) / 2.0 - alpha * (b.x - a.x) / 2.0, (a.x + b.x) / 2.0 + alpha * (b.t - a.t) / 2.0};
    return {center, std::hypot(a.t - center.t, a.x - center.x), a, b};
}

double arc_discriminant(Point a, Point b, double alpha, double t_c) {
    check_arc_query(a, b, alpha, t_c);
    const ArcFrame f(a.t, a.x, b.t, b.x, alpha);
    double beta = 0.0, p = 0.0;
    return f.discriminant(t_c - a.t, beta, p);
}

double arc_height(Point a, Point b, double alpha, double t_c) {
    check_arc_query(a, b, alpha, t_c);
    const ArcFrame f(a.t, a.x, b.t, b.x, alpha);
    const double u = t_c - a.t;
    return a.x + f.k * u + f.offset(u);
}

Graph build_vg(const TimeSeries& series) { return build_line(series, 0); }

Graph build_lpvg(const TimeSeries& series, std::size_t m) { return build_line(series, m); }

Graph build_clpvg(const TimeSeries& series, std::size_t m, double alpha) {
    check_alpha(alpha);
    return build_pairs(series, m, [alpha](double ta, double xa, double tb, double xb) {
        const ArcFrame f(ta, xa, tb, xb, alpha);
        return [f, ta, xa](double tc, double xc) {
            const double u = tc - ta;
            return xc - xa - f.k * u >= f.offset(u);
        };
    });
}

Graph build(const TimeSeries& series, const VgParams& params) {
    switch (params.method) {
        case Method::VG: return build_vg(series);
        case Method::LPVG: return build_lpvg(series, params.m);
        case Method::CLPVG: return build_clpvg(series, params.m, params.alpha);
    }
    throw std::invalid_argument("unknown visibility method");
}

}  // namespace vistra::visibility
