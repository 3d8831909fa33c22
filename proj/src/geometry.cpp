#include "wormlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wormlab::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0) a += kTwoPi;
    return a;
}

}  // namespace

Isometry Isometry::inverse() const {
    // iota(p) = O(p - v)  =>  iota^{-1}(q) = O^T q + v = O^T (q - (-O v)).
    Isometry inv;
    if (kind == IsoKind::rotation) {
        inv.kind = IsoKind::rotation;
        inv.angle = wrap_angle(-angle);
    } else {
        // (R(a)S)^{-1} = S R(-a) = R(a) S: reflections here are involutions.
        inv.kind = IsoKind::reflection;
        inv.angle = angle;
    }
    inv.trans = -1.0 * linear().apply(trans);
    return inv;
}

Point iso_apply(const Isometry& iota, Point p) { return iota.apply(p); }

double iso_distance(const Isometry& i1, const Isometry& i2) {
    const Mat2 o1 = i1.linear(), o2 = i2.linear();
    const Point b = o2.apply(i2.trans) - o1.apply(i1.trans);
    if (i1.kind == i2.kind) {
        // O1 - O2 is a scaled orthogonal map: |(O1-O2)x| = 2|sin(da/2)| |x|.
        const double s = 2.0 * std::abs(std::sin((i1.angle - i2.angle) / 2.0));
        return s + norm(b);
    }
    // Rotation minus reflection has singular values {0, 2}: the image of the
    // unit disk under x -> Ax + b is the segment [b - Aw, b + Aw].
    const Mat2 a = o1 - o2;
    // Top right-singular vector of A from A^T A (symmetric 2x2).
    const Mat2 ata{a.a * a.a + a.c * a.c, a.a * a.b + a.c * a.d,
                   a.a * a.b + a.c * a.d, a.b * a.b + a.d * a.d};
    Point w;
    const double tr = ata.a + ata.d;
    const double disc = std::sqrt(std::max(0.0, (ata.a - ata.d) * (ata.a - ata.d) + 4.0 * ata.b * ata.b));
    const double lmax = 0.5 * (tr + disc);
    if (std::abs(ata.b) > 1e-300) {
        w = Point{ata.b, lmax - ata.a};
    } else {
        w = (ata.a >= ata.d) ? Point{1, 0} : Point{0, 1};
    }
    const double wn = norm(w);
    if (wn == 0.0) return norm(b);
    w = (1.0 / wn) * w;
    const Point aw = a.apply(w);
    return std::max(norm(b + aw), norm(b - aw));
}

double ConvexPolygon::area() const {
    const auto& v = vertices;
    if (v.size() < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % v.size()];
        s += cross(p, q);
    }
    return std::abs(s) / 2.0;
}

std::array<double, 4> ConvexPolygon::bbox() const {
    double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
    double xmax = -xmin, ymax = -xmin;
    for (const Point& p : vertices) {
        xmin = std::min(xmin, p.x);
        ymin = std::min(ymin, p.y);
        xmax = std::max(xmax, p.x);
        ymax = std::max(ymax, p.y);
    }
    return {xmin, ymin, xmax, ymax};
}

ConvexPolygon ConvexPolygon::rect(double x0, double y0, double x1, double y1) {
    return ConvexPolygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

namespace {

// Keep the part of `subject` on the left of directed edge a->b.
std::vector<Point> clip_halfplane(const std::vector<Point>& subject, Point a, Point b) {
    std::vector<Point> out;
    out.reserve(subject.size() + 2);
    const std::size_t n = subject.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point cur = subject[i];
        const Point nxt = subject[(i + 1) % n];
        const double dc = cross(b - a, cur - a);
        const double dn = cross(b - a, nxt - a);
        if (dc >= 0) out.push_back(cur);
        if ((dc > 0 && dn < 0) || (dc < 0 && dn > 0)) {
            const double t = dc / (dc - dn);
            out.push_back(cur + t * (nxt - cur));
        }
    }
    return out;
}

double signed_area2(const std::vector<Point>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
    return s;
}

std::vector<Point> ccw(std::vector<Point> v) {
    if (signed_area2(v) < 0) std::reverse(v.begin(), v.end());
    return v;
}

}  // namespace

double clip_area(const ConvexPolygon& p, const ConvexPolygon& q) {
    if (p.vertices.size() < 3 || q.vertices.size() < 3) return 0.0;
    const auto pb = p.bbox(), qb = q.bbox();
    if (pb[2] < qb[0] || qb[2] < pb[0] || pb[3] < qb[1] || qb[3] < pb[1]) return 0.0;
    std::vector<Point> subject = ccw(p.vertices);
    const std::vector<Point> clipper = ccw(q.vertices);
    for (std::size_t i = 0; i < clipper.size() && !subject.empty(); ++i) {
        subject = clip_halfplane(subject, clipper[i], clipper[(i + 1) % clipper.size()]);
    }
    if (subject.size() < 3) return 0.0;
    return std::abs(signed_area2(subject)) / 2.0;
}

std::vector<Rect> SquareUnion::disjoint_rects() const {
    std::vector<Rect> out;
    if (squares.empty()) return out;
    std::vector<double> xs;
    xs.reserve(squares.size() * 2);
    for (const Square& s : squares) {
        xs.push_back(s.corner.x);
        xs.push_back(s.corner.x + s.side);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double x0 = xs[i], x1 = xs[i + 1];
        if (x1 <= x0) continue;
        // y-intervals of squares spanning this strip, merged.
        std::vector<std::pair<double, double>> spans;
        for (const Square& s : squares) {
            if (s.corner.x <= x0 && s.corner.x + s.side >= x1 && s.side > 0) {
                spans.emplace_back(s.corner.y, s.corner.y + s.side);
            }
        }
        if (spans.empty()) continue;
        std::sort(spans.begin(), spans.end());
        double lo = spans[0].first, hi = spans[0].second;
        for (std::size_t j = 1; j < spans.size(); ++j) {
            if (spans[j].first > hi) {
                out.push_back({x0, lo, x1, hi});
                lo = spans[j].first;
                hi = spans[j].second;
            } else {
                hi = std::max(hi, spans[j].second);
            }
        }
        out.push_back({x0, lo, x1, hi});
    }
    return out;
}

double SquareUnion::area() const {
    double s = 0.0;
    for (const Rect& r : disjoint_rects()) s += r.area();
    return s;
}

double SquareUnion::diameter() const {
    if (squares.empty()) return 0.0;
    double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
    double xmax = -xmin, ymax = -xmin;
    for (const Square& s : squares) {
        xmin = std::min(xmin, s.corner.x);
        ymin = std::min(ymin, s.corner.y);
        xmax = std::max(xmax, s.corner.x + s.side);
        ymax = std::max(ymax, s.corner.y + s.side);
    }
    return std::hypot(xmax - xmin, ymax - ymin);
}

double region_area(const ConvexPolygon& T, const std::vector<Rect>& e_rects, const Isometry& iota) {
    const auto tb = T.bbox();
    double total = 0.0;
    for (const Rect& r : e_rects) {
        ConvexPolygon img;
        img.vertices = {iota.apply({r.x0, r.y0}), iota.apply({r.x1, r.y0}),
                        iota.apply({r.x1, r.y1}), iota.apply({r.x0, r.y1})};
        const auto ib = img.bbox();
        if (ib[2] < tb[0] || tb[2] < ib[0] || ib[3] < tb[1] || tb[3] < ib[1]) continue;
        total += clip_area(T, img);
    }
    return total;
}

double region_area(const ConvexPolygon& T, const SquareUnion& E, const Isometry& iota) {
    return region_area(T, E.disjoint_rects(), iota);
}

namespace {

// Parameter interval of segment a + t(b-a), t in [0,1], inside an axis-aligned
// rect (Liang-Barsky).
bool segment_rect_span(Point a, Point d, const Rect& r, double& t0, double& t1) {
    t0 = 0.0;
    t1 = 1.0;
    const double p[4] = {-d.x, d.x, -d.y, d.y};
    const double q[4] = {a.x - r.x0, r.x1 - a.x, a.y - r.y0, r.y1 - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0) return false;
        } else {
            const double t = q[i] / p[i];
            if (p[i] < 0) {
                if (t > t1) return false;
                t0 = std::max(t0, t);
            } else {
                if (t < t0) return false;
                t1 = std::min(t1, t);
            }
        }
    }
    return t1 > t0;
}

}  // namespace

double segment_length_in(Point a, Point b, const std::vector<Rect>& e_rects, const Isometry& iota) {
    // iota is length-preserving: measure iota^{-1}(segment) against E itself.
    const Isometry inv = iota.inverse();
    const Point ia = inv.apply(a), ib = inv.apply(b);
    const Point d = ib - ia;
    const double len = norm(d);
    if (len == 0.0) return 0.0;
    std::vector<std::pair<double, double>> spans;
    for (const Rect& r : e_rects) {
        double t0, t1;
        if (segment_rect_span(ia, d, r, t0, t1)) spans.emplace_back(t0, t1);
    }
    if (spans.empty()) return 0.0;
    // The rects are interior-disjoint but share edges; merge parameter spans.
    std::sort(spans.begin(), spans.end());
    double total = 0.0, lo = spans[0].first, hi = spans[0].second;
    for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first > hi) {
            total += hi - lo;
            lo = spans[i].first;
            hi = spans[i].second;
        } else {
            hi = std::max(hi, spans[i].second);
        }
    }
    total += hi - lo;
    return total * len;
}

double segment_length_in(Point a, Point b, const SquareUnion& E, const Isometry& iota) {
    return segment_length_in(a, b, E.disjoint_rects(), iota);
}

IsometryNet build_net(double delta, Point center) {
    if (!(delta > 0.0) || delta > 1.0) {
        throw std::invalid_argument("build_net: delta must be in (0, 1]");
    }
    IsometryNet net;
    net.delta = delta;
    net.center = center;
    // Square lattice of spacing delta*sqrt(2) has covering radius delta. The
    // lattice is anchored at the origin, so halving delta refines the net in
    // place and the identity is always a member. The extra 7*delta margin
    // makes the nearest (O', x') pairing land within 3*delta in operator
    // distance for any translation in B(center, 10).
    const double radius = 10.0 + 7.0 * delta;
    const double h = delta * std::sqrt(2.0);
    const int ilo = static_cast<int>(std::floor((center.x - radius) / h));
    const int ihi = static_cast<int>(std::ceil((center.x + radius) / h));
    const int jlo = static_cast<int>(std::floor((center.y - radius) / h));
    const int jhi = static_cast<int>(std::ceil((center.y + radius) / h));
    const int nangles = static_cast<int>(std::ceil(kTwoPi / delta));
    std::vector<double> angles(nangles);
    for (int k = 0; k < nangles; ++k) angles[k] = wrap_angle(k * delta);
    for (int i = ilo; i <= ihi; ++i) {
        for (int j = jlo; j <= jhi; ++j) {
            const Point v{i * h, j * h};
            if (dist(v, center) > radius) continue;
            for (double ang : angles) {
                net.members.push_back({IsoKind::rotation, ang, v});
                net.members.push_back({IsoKind::reflection, ang, v});
            }
        }
    }
    return net;
}

}  // namespace wormlab::geometry
