#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "oracles.hpp"
#include "wormlab/geometry.hpp"
#include "wormlab/rng.hpp"

using namespace wormlab;
using namespace wormlab::geometry;

namespace {

Isometry random_isometry(Rng& rng, double trans_radius, Point center = {0, 0}) {
    Isometry iota;
    iota.kind = rng.below(2) ? IsoKind::reflection : IsoKind::rotation;
    iota.angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double r = trans_radius * std::sqrt(rng.uniform());
    const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    iota.trans = {center.x + r * std::cos(th), center.y + r * std::sin(th)};
    return iota;
}

ConvexPolygon random_convex(Rng& rng) {
    // hull of random points in a random box
    std::vector<Point> pts;
    const double cx = rng.uniform(-1.0, 1.0), cy = rng.uniform(-1.0, 1.0);
    const double s = rng.uniform(0.2, 1.5);
    for (int i = 0; i < 12; ++i) {
        pts.push_back({cx + s * rng.uniform(-1.0, 1.0), cy + s * rng.uniform(-1.0, 1.0)});
    }
    // gift wrapping is overkill; sort by angle around the centroid and keep
    // the hull via repeated cross checks
    Point c{0, 0};
    for (const auto& p : pts) c = c + (1.0 / pts.size()) * p;
    std::sort(pts.begin(), pts.end(), [&](Point a, Point b) {
        return std::atan2(a.y - c.y, a.x - c.x) < std::atan2(b.y - c.y, b.x - c.x);
    });
    // convexify: drop reflex vertices until stable
    bool changed = true;
    while (changed && pts.size() > 3) {
        changed = false;
        for (std::size_t i = 0; i < pts.size();) {
            const Point a = pts[(i + pts.size() - 1) % pts.size()];
            const Point b = pts[i];
            const Point d = pts[(i + 1) % pts.size()];
            if (cross(b - a, d - b) <= 0) {
                pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
            } else {
                ++i;
            }
        }
    }
    return ConvexPolygon{pts};
}

}  // namespace

TEST_CASE("iso_apply basics") {
    const Isometry id = Isometry::identity();
    const Point p = iso_apply(id, {0.3, 0.7});
    CHECK(p.x == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(p.y == doctest::Approx(0.7).epsilon(1e-15));

    Isometry quarter;
    quarter.angle = std::numbers::pi / 2.0;
    const Point q = iso_apply(quarter, {1.0, 0.0});
    CHECK(q.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(q.y == doctest::Approx(1.0).epsilon(1e-12));

    Isometry shift;
    shift.trans = {1.0, 1.0};
    const Point r = iso_apply(shift, {0.0, 0.0});
    CHECK(r.x == doctest::Approx(-1.0));
    CHECK(r.y == doctest::Approx(-1.0));
}

TEST_CASE("isometry inverse is the identity on B(0,100)") {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        const Isometry iota = random_isometry(rng, 5.0);
        const Isometry inv = iota.inverse();
        CHECK(std::abs(iota.linear().det()) == doctest::Approx(1.0).epsilon(1e-12));
        for (int i = 0; i < 5; ++i) {
            const double r = 100.0 * std::sqrt(rng.uniform());
            const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const Point p{r * std::cos(th), r * std::sin(th)};
            const Point back = inv.apply(iota.apply(p));
            CHECK(dist(back, p) < 1e-10);
        }
    }
}

TEST_CASE("iso_distance closed forms") {
    const Isometry id = Isometry::identity();
    CHECK(iso_distance(id, id) == 0.0);

    Isometry shift1, shift2;
    shift1.trans = {0.25, 0.0};
    shift2.trans = {0.25, 0.75};
    CHECK(iso_distance(shift1, shift2) == doctest::Approx(0.75).epsilon(1e-14));

    for (double theta : {0.1, 0.5, 1.2, 3.0}) {
        Isometry rot;
        rot.angle = theta;
        CHECK(iso_distance(id, rot) == doctest::Approx(2.0 * std::sin(theta / 2.0)).epsilon(1e-13));
    }
}

TEST_CASE("iso_distance matches dense sampling") {
    Rng rng(22);
    for (int t = 0; t < 300; ++t) {
        const Isometry a = random_isometry(rng, 2.0);
        const Isometry b = random_isometry(rng, 2.0);
        const double closed = iso_distance(a, b);
        const double sampled = oracles::sampled_iso_distance(a, b);
        CHECK(closed >= sampled - 1e-9);
        CHECK(closed <= sampled + 1e-5 + 1e-3 * sampled);  // sampling undershoots slightly
    }
}

TEST_CASE("iso_distance is a metric on sampled isometries") {
    Rng rng(33);
    for (int t = 0; t < 1000; ++t) {
        const Isometry a = random_isometry(rng, 2.0);
        const Isometry b = random_isometry(rng, 2.0);
        const Isometry c = random_isometry(rng, 2.0);
        const double ab = iso_distance(a, b), ba = iso_distance(b, a);
        CHECK(ab == ba);  // symmetric exactly
        CHECK(iso_distance(a, c) <= ab + iso_distance(b, c) + 1e-12);
        CHECK(ab >= 0.0);
    }
}

TEST_CASE("clip_area on squares") {
    const auto unit = ConvexPolygon::rect(0, 0, 1, 1);
    CHECK(clip_area(unit, unit) == doctest::Approx(1.0).epsilon(1e-14));
    const auto moved = ConvexPolygon::rect(1, 0, 2, 1);
    CHECK(clip_area(unit, moved) == doctest::Approx(0.0));

    // side-1 square rotated 45 degrees about its own center
    ConvexPolygon diamond;
    const double c = 0.5, r = std::sqrt(2.0) / 2.0;
    diamond.vertices = {{c - r, c}, {c, c - r}, {c + r, c}, {c, c + r}};
    const double analytic = 2.0 * (std::sqrt(2.0) - 1.0);
    CHECK(clip_area(unit, diamond) == doctest::Approx(analytic).epsilon(1e-12));
    const double mc = oracles::mc_clip_area(unit, diamond, 10000000, 4242);
    CHECK(clip_area(unit, diamond) == doctest::Approx(mc).epsilon(1e-3));
}

TEST_CASE("clip_area symmetry and domination on random pairs") {
    Rng rng(44);
    for (int t = 0; t < 1000; ++t) {
        const auto p = random_convex(rng);
        const auto q = random_convex(rng);
        if (p.vertices.size() < 3 || q.vertices.size() < 3) continue;
        const double pq = clip_area(p, q), qp = clip_area(q, p);
        CHECK(std::abs(pq - qp) < 1e-12);
        CHECK(pq <= std::min(p.area(), q.area()) + 1e-12);
    }
}

TEST_CASE("region_area basics and union semantics") {
    const auto unit = ConvexPolygon::rect(0, 0, 1, 1);
    const Isometry id = Isometry::identity();
    CHECK(region_area(unit, SquareUnion::single(0, 0, 1), id) == doctest::Approx(1.0));
    CHECK(region_area(unit, SquareUnion{}, id) == doctest::Approx(0.0));

    SquareUnion left_half;
    left_half.squares = {{{0.0, 0.0}, 0.5}, {{0.0, 0.5}, 0.5}};
    CHECK(region_area(unit, left_half, id) == doctest::Approx(0.5).epsilon(1e-13));

    // overlapping squares are not double counted
    SquareUnion overlapping;
    overlapping.squares = {{{0.0, 0.0}, 0.6}, {{0.2, 0.0}, 0.6}};
    CHECK(region_area(unit, overlapping, id) == doctest::Approx(0.8 * 0.6).epsilon(1e-13));
}

TEST_CASE("region_area is monotone in E") {
    Rng rng(55);
    const Isometry id = Isometry::identity();
    for (int t = 0; t < 1000; ++t) {
        const auto poly = random_convex(rng);
        if (poly.vertices.size() < 3) continue;
        SquareUnion e;
        const int base = 1 + static_cast<int>(rng.below(3));
        for (int i = 0; i < base; ++i) {
            e.squares.push_back({{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)},
                                 rng.uniform(0.1, 0.8)});
        }
        const double before = region_area(poly, e, id);
        e.squares.push_back({{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)},
                             rng.uniform(0.1, 0.8)});
        const double after = region_area(poly, e, id);
        CHECK(after >= before - 1e-12);
    }
}

TEST_CASE("segment_length_in basics") {
    const Isometry id = Isometry::identity();
    const auto unit = SquareUnion::single(0, 0, 1);
    CHECK(segment_length_in({0, 0.5}, {1, 0.5}, unit, id) == doctest::Approx(1.0));
    CHECK(segment_length_in({2, 2}, {3, 3}, unit, id) == doctest::Approx(0.0));
    const auto left = SquareUnion::single(0, 0, 0.5);  // [0,0.5]^2
    SquareUnion left_col;
    left_col.squares = {{{0.0, 0.0}, 0.5}, {{0.0, 0.5}, 0.5}};
    CHECK(segment_length_in({0, 0.5}, {1, 0.5}, left_col, id) == doctest::Approx(0.5));
    (void)left;
}

TEST_CASE("segment along a shared rect edge is counted once") {
    const Isometry id = Isometry::identity();
    SquareUnion e;
    e.squares = {{{0.0, 0.0}, 0.5}, {{0.5, 0.0}, 0.5}};  // share the edge x=0.5
    CHECK(segment_length_in({0.5, 0.0}, {0.5, 0.5}, e, id) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("build_net cardinality and identity membership") {
    CHECK_THROWS(build_net(0.0, {0, 0}));
    CHECK_THROWS(build_net(-0.5, {0, 0}));

    const auto net1 = build_net(1.0, {0, 0});
    CHECK(static_cast<double>(net1.members.size()) <= kNetCardinality);

    const auto net_02 = build_net(0.2, {0, 0});
    const auto net_01 = build_net(0.1, {0, 0});
    CHECK(static_cast<double>(net_02.members.size()) <= kNetCardinality / (0.2 * 0.2 * 0.2));
    CHECK(static_cast<double>(net_01.members.size()) <= kNetCardinality / (0.1 * 0.1 * 0.1));
    const double ratio =
        static_cast<double>(net_01.members.size()) / static_cast<double>(net_02.members.size());
    CHECK(ratio >= 6.0);
    CHECK(ratio <= 10.0);

    // identity is a member (origin-anchored lattice, angle 0)
    bool has_id = false;
    for (const auto& m : net1.members) {
        if (m.kind == IsoKind::rotation && m.angle == 0.0 && m.trans.x == 0.0 && m.trans.y == 0.0) {
            has_id = true;
        }
    }
    CHECK(has_id);
}

TEST_CASE("build_net covers random isometries within 3 delta") {
    const double delta = 0.25;
    const Point center{0.5, 0.5};
    const auto net = build_net(delta, center);

    // bucket members by translation for the lookup
    std::map<std::pair<long, long>, std::vector<std::size_t>> buckets;
    auto key = [&](Point v) {
        return std::make_pair(static_cast<long>(std::floor(v.x / delta)),
                              static_cast<long>(std::floor(v.y / delta)));
    };
    for (std::size_t i = 0; i < net.members.size(); ++i) buckets[key(net.members[i].trans)].push_back(i);

    Rng rng(66);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const Isometry iota = random_isometry(rng, 10.0, center);
        // The best member pairs a nearby angle O' with a translation near
        // O'^T O x, which can sit several deltas away from x itself.
        double best = 1e300;
        const double ratio = iota.angle / delta;
        for (double a : {std::floor(ratio) * delta, std::ceil(ratio) * delta}) {
            Isometry probe;
            probe.kind = iota.kind;
            probe.angle = a;
            const Point y = probe.linear().transpose().apply(iota.linear().apply(iota.trans));
            const auto [bi, bj] = key(y);
            for (long di = -2; di <= 2; ++di) {
                for (long dj = -2; dj <= 2; ++dj) {
                    const auto it = buckets.find({bi + di, bj + dj});
                    if (it == buckets.end()) continue;
                    for (std::size_t idx : it->second) {
                        best = std::min(best, iso_distance(iota, net.members[idx]));
                    }
                }
            }
        }
        worst = std::max(worst, best);
        REQUIRE(best <= 3.0 * delta);
    }
    CHECK(worst <= 3.0 * delta);
}
