#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

namespace wormlab::geometry {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double dist(Point a, Point b) { return norm(a - b); }

struct Mat2 {
    // [[a, b], [c, d]]
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
    Point apply(Point p) const { return {a * p.x + b * p.y, c * p.x + d * p.y}; }
    Mat2 transpose() const { return {a, c, b, d}; }
    double det() const { return a * d - b * c; }
};

inline Mat2 operator-(const Mat2& m, const Mat2& n) {
    return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
}

enum class IsoKind { rotation, reflection };

// Planar rigid motion in the form iota(p) = O(p - v). The orthogonal part is
// R(angle) for rotations and R(angle) * diag(1,-1) for reflections.
struct Isometry {
    IsoKind kind = IsoKind::rotation;
    double angle = 0.0;  // [0, 2*pi)
    Point trans{};       // the vector v

    Mat2 linear() const {
        const double c = std::cos(angle), s = std::sin(angle);
        if (kind == IsoKind::rotation) return {c, -s, s, c};
        return {c, s, s, -c};
    }
    Point apply(Point p) const { return linear().apply(p - trans); }
    Isometry inverse() const;
    static Isometry identity() { return {}; }
};

Point iso_apply(const Isometry& iota, Point p);

// sup over |x| <= 1 of |iota1(x) - iota2(x)|; closed form (the linear part of
// the difference is either a scaled orthogonal map or rank one with norm 2).
double iso_distance(const Isometry& iota1, const Isometry& iota2);

struct ConvexPolygon {
    std::vector<Point> vertices;  // counterclockwise

    double area() const;
    std::array<double, 4> bbox() const;  // {xmin, ymin, xmax, ymax}
    static ConvexPolygon rect(double x0, double y0, double x1, double y1);
};

// Area of the intersection of two convex polygons (Sutherland-Hodgman).
double clip_area(const ConvexPolygon& p, const ConvexPolygon& q);

struct Square {
    Point corner;  // lower-left
    double side = 0.0;
};

struct Rect {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    double area() const { return (x1 - x0) * (y1 - y0); }
};

// Possibly-overlapping axis-aligned squares; union semantics everywhere.
struct SquareUnion {
    std::vector<Square> squares;

    bool empty() const { return squares.empty(); }
    double area() const;  // union area
    double diameter() const;
    // Disjoint-interior rectangle partition of the union (vertical strips).
    std::vector<Rect> disjoint_rects() const;
    static SquareUnion single(double x, double y, double side) {
        return SquareUnion{{Square{{x, y}, side}}};
    }
};

// |T ∩ iota(E)|; overlapping squares are union-ed, never double counted.
double region_area(const ConvexPolygon& T, const SquareUnion& E, const Isometry& iota);
double region_area(const ConvexPolygon& T, const std::vector<Rect>& e_rects, const Isometry& iota);

// Length of the part of segment [a,b] inside iota(E).
double segment_length_in(Point a, Point b, const SquareUnion& E, const Isometry& iota);
double segment_length_in(Point a, Point b, const std::vector<Rect>& e_rects, const Isometry& iota);

struct IsometryNet {
    double delta = 0.0;
    Point center{};
    std::vector<Isometry> members;
};

// Translation grid covering B(center, 10) (with a slack margin so the product
// pairing argument lands within 3*delta), rotations at angle spacing delta,
// and the same angles composed with a fixed reflection.
IsometryNet build_net(double delta, Point center);

// Recorded cardinality constant: member count <= kNetCardinality * delta^-3.
inline constexpr double kNetCardinality = 9000.0;

}  // namespace wormlab::geometry
