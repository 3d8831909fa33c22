#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wormlab/modulus.hpp"
#include "wormlab/rng.hpp"

using namespace wormlab;
using namespace wormlab::modulus;
using geometry::Point;

namespace {

CurveFamily horizontal_family(int lines, double width, double height) {
    CurveFamily fam;
    for (int i = 0; i < lines; ++i) {
        const double y = (i + 0.5) * height / lines;
        fam.curves.push_back({{0.0, y}, {width, y}});
    }
    return fam;
}

Polyline random_polyline(Rng& rng, int segments, double max_len) {
    Polyline c;
    Point cur{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    c.push_back(cur);
    double remaining = max_len;
    for (int s = 0; s < segments; ++s) {
        const double step = remaining / (segments - s) * rng.uniform(0.5, 1.0);
        const double th = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        Point nxt{cur.x + step * std::cos(th), cur.y + step * std::sin(th)};
        nxt.x = std::clamp(nxt.x, 0.0, 1.0);
        nxt.y = std::clamp(nxt.y, 0.0, 1.0);
        if (geometry::dist(nxt, cur) < 1e-6) continue;
        remaining -= geometry::dist(nxt, cur);
        c.push_back(nxt);
        cur = nxt;
        if (remaining <= 0) break;
    }
    if (c.size() < 2) c.push_back({cur.x + 0.05, cur.y});
    return c;
}

}  // namespace

TEST_CASE("line_integral basics") {
    Grid grid{8};
    GridDensity ones(grid);
    for (auto& v : ones.values) v = 1.0;
    CHECK(line_integral(ones, {{0.0, 0.33}, {1.0, 0.33}}) == doctest::Approx(1.0).epsilon(1e-12));
    GridDensity zeros(grid);
    CHECK(line_integral(zeros, {{0.0, 0.33}, {1.0, 0.33}}) == doctest::Approx(0.0));
    GridDensity half(grid);
    for (int iy = 0; iy < 8; ++iy) {
        for (int ix = 0; ix < 4; ++ix) half.at(ix, iy) = 2.0;
    }
    CHECK(line_integral(half, {{0.0, 0.5}, {1.0, 0.5}}) == doctest::Approx(1.0).epsilon(1e-12));
    // diagonal through the whole square
    CHECK(line_integral(ones, {{0.0, 0.0}, {1.0, 1.0}}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("is_admissible scaling and failures") {
    Grid grid{16};
    CurveFamily fam;
    fam.curves.push_back({{0.0, 0.4}, {1.0, 0.4}});
    fam.curves.push_back({{0.0, 0.6}, {0.5, 0.6}});
    GridDensity rho(grid);
    for (auto& v : rho.values) v = 2.0;  // shortest curve has length 1/2
    CHECK(is_admissible(rho, fam, 1e-9).first);
    GridDensity zero(grid);
    const auto [ok, worst] = is_admissible(zero, fam, 1e-9);
    CHECK_FALSE(ok);
    CHECK(worst >= 0);
    CHECK_THROWS(is_admissible(rho, fam, -1.0));
}

TEST_CASE("energy closed forms") {
    Grid grid{10};
    GridDensity rho(grid);
    for (auto& v : rho.values) v = 1.0;
    CHECK(energy(rho, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (auto& v : rho.values) v = 3.0;
    CHECK(energy(rho, 2.5) == doctest::Approx(std::pow(3.0, 2.5)).epsilon(1e-12));
    GridDensity ind(grid);
    for (int iy = 0; iy < 5; ++iy) {
        for (int ix = 0; ix < 10; ++ix) ind.at(ix, iy) = 4.0;  // delta = 1/4 on area 1/2
    }
    CHECK(energy(ind, 3.0) == doctest::Approx(0.5 * std::pow(4.0, 3.0)).epsilon(1e-12));
    CHECK_THROWS(energy(rho, 1.0));
}

TEST_CASE("solve_modulus input validation") {
    Grid grid{16};
    CHECK_THROWS(solve_modulus(CurveFamily{}, grid, 2.0, 1e-3));
    CurveFamily fam;
    fam.curves.push_back({{0.2, 0.2}, {0.2, 0.2}});
    CHECK_THROWS(solve_modulus(fam, grid, 2.0, 1e-3));  // zero length
    CurveFamily outside;
    outside.curves.push_back({{2.0, 2.0}, {3.0, 3.0}});
    CHECK_THROWS(solve_modulus(outside, grid, 2.0, 1e-3));
    CurveFamily ok;
    ok.curves.push_back({{0.0, 0.5}, {1.0, 0.5}});
    CHECK_THROWS(solve_modulus(ok, grid, 1.0, 1e-3));  // p must be > 1
}

TEST_CASE("rectangle spanning family matches h * w^{1-p}") {
    // full square, p = 2 at N = 64
    {
        Grid grid{64};
        const auto res = solve_modulus(horizontal_family(64, 1.0, 1.0), grid, 2.0, 1e-4);
        REQUIRE(res.converged);
        CHECK(res.value == doctest::Approx(1.0).epsilon(0.03));
        CHECK(res.dual_bound <= res.value * (1.0 + 1e-9));
    }
    // half-height rectangle (the 2x1 rectangle scaled into the grid), p = 2
    {
        Grid grid{64};
        const auto res = solve_modulus(horizontal_family(32, 1.0, 0.5), grid, 2.0, 1e-4);
        REQUIRE(res.converged);
        CHECK(res.value == doctest::Approx(0.5).epsilon(0.03));
    }
    // p = 4
    {
        Grid grid{64};
        const auto res = solve_modulus(horizontal_family(64, 1.0, 1.0), grid, 4.0, 1e-4);
        REQUIRE(res.converged);
        CHECK(res.value == doctest::Approx(1.0).epsilon(0.03));
    }
}

TEST_CASE("single curve closed form and tube decay") {
    Rng rng(10);
    for (int t = 0; t < 5; ++t) {
        CurveFamily fam;
        fam.curves.push_back(random_polyline(rng, 4, 1.0));
        Grid grid{12};
        const auto res = solve_modulus(fam, grid, 2.0, 1e-6);
        REQUIRE(res.converged);
        const double closed = oracles::single_curve_modulus(fam, grid, 2.0);
        CHECK(res.value == doctest::Approx(closed).epsilon(1e-4));
    }
    // horizontal unit segment: value = 1/N, decreasing in N
    CurveFamily seg;
    seg.curves.push_back({{0.0, 0.501}, {1.0, 0.501}});
    double prev = 1e300;
    for (int n : {8, 16, 32}) {
        const auto res = solve_modulus(seg, Grid{n}, 2.0, 1e-6);
        REQUIRE(res.converged);
        CHECK(res.value == doctest::Approx(1.0 / n).epsilon(1e-3));
        CHECK(res.value < prev);
        prev = res.value;
    }
}

TEST_CASE("solver agrees with the dense projected-gradient oracle") {
    Rng rng(20);
    for (int t = 0; t < 6; ++t) {
        CurveFamily fam;
        const int curves = 1 + static_cast<int>(rng.below(8));
        for (int c = 0; c < curves; ++c) fam.curves.push_back(random_polyline(rng, 3, 0.8));
        Grid grid{t % 2 == 0 ? 8 : 16};
        const double p = t % 3 == 0 ? 4.0 : 2.0;
        const auto res = solve_modulus(fam, grid, p, 1e-6);
        REQUIRE(res.converged);
        const double dense = oracles::dense_modulus(fam, grid, p, 777 + t);
        CHECK(res.value == doctest::Approx(dense).epsilon(1e-4));
    }
}

TEST_CASE("scaling law in the admissibility threshold") {
    Rng rng(30);
    for (int t = 0; t < 4; ++t) {
        CurveFamily fam;
        for (int c = 0; c < 3; ++c) fam.curves.push_back(random_polyline(rng, 3, 0.8));
        Grid grid{12};
        const double p = 2.0 + t;
        const auto base = solve_modulus(fam, grid, p, 1e-6);
        REQUIRE(base.converged);
        for (double s : {0.5, 2.0}) {
            const auto scaled = solve_modulus(fam, grid, p, 1e-6, s);
            REQUIRE(scaled.converged);
            CHECK(scaled.value == doctest::Approx(std::pow(s, p) * base.value).epsilon(1e-4));
        }
    }
}

TEST_CASE("monotonicity and subadditivity via primal-dual pairs") {
    Rng rng(40);
    for (int t = 0; t < 10; ++t) {
        CurveFamily small, big;
        for (int c = 0; c < 3; ++c) small.curves.push_back(random_polyline(rng, 3, 0.7));
        big = small;
        for (int c = 0; c < 3; ++c) big.curves.push_back(random_polyline(rng, 3, 0.7));
        Grid grid{16};
        const auto rs = solve_modulus(small, grid, 2.0, 1e-5);
        const auto rb = solve_modulus(big, grid, 2.0, 1e-5);
        REQUIRE(rs.converged);
        REQUIRE(rb.converged);
        // dual(small) <= OPT(small) <= OPT(big) <= primal(big)
        CHECK(rs.dual_bound <= rb.value + 1e-12);

        // subadditivity: dual(union) <= primal(A) + primal(B)
        CurveFamily a, b;
        for (int c = 0; c < 3; ++c) a.curves.push_back(random_polyline(rng, 3, 0.7));
        for (int c = 0; c < 2; ++c) b.curves.push_back(random_polyline(rng, 3, 0.7));
        CurveFamily uni = a;
        uni.curves.insert(uni.curves.end(), b.curves.begin(), b.curves.end());
        const auto ra = solve_modulus(a, grid, 2.0, 1e-5);
        const auto rbb = solve_modulus(b, grid, 2.0, 1e-5);
        const auto ru = solve_modulus(uni, grid, 2.0, 1e-5);
        REQUIRE(ru.converged);
        CHECK(ru.dual_bound <= ra.value + rbb.value + 1e-12);
    }
}

TEST_CASE("level_sets thresholds and partition") {
    Grid grid{4};
    GridDensity rho(grid);
    for (auto& v : rho.values) v = 0.3;
    auto ls = level_sets(rho);
    CHECK(ls.classes[0].size() == rho.values.size());

    for (auto& v : rho.values) v = 1.0;
    ls = level_sets(rho);
    REQUIRE(ls.j_max == 2);
    CHECK(ls.classes[2].size() == rho.values.size());

    for (auto& v : rho.values) v = 0.5;
    ls = level_sets(rho);
    REQUIRE(ls.j_max == 1);
    CHECK(ls.classes[1].size() == rho.values.size());

    // partition + reconstruction bound on random values
    Rng rng(50);
    for (auto& v : rho.values) v = rng.uniform(0.0, 20.0);
    ls = level_sets(rho);
    std::size_t counted = 0;
    for (const auto& cls : ls.classes) counted += cls.size();
    CHECK(counted == rho.values.size());
    for (std::size_t c = 0; c < rho.values.size(); ++c) {
        const int j = ls.class_of[c];
        const double cap = j == 0 ? 0.5 : std::ldexp(1.0, j - 1);
        const double floor_v = j == 0 ? 0.0 : std::ldexp(1.0, j - 2);
        REQUIRE(rho.values[c] < cap);
        REQUIRE(rho.values[c] >= floor_v);
    }
}

TEST_CASE("witness_check uniform and failing densities") {
    Grid grid{8};
    GridDensity ones(grid);
    for (auto& v : ones.values) v = 1.0;
    const Polyline gamma = {{0.0, 0.52}, {1.0, 0.52}};
    const auto res = witness_check(ones, gamma);
    CHECK(res.integral == doctest::Approx(1.0));
    CHECK(res.found);
    CHECK(res.j_star == 2);
    CHECK(res.value == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(res.chain_ok);

    GridDensity dim(grid);
    for (auto& v : dim.values) v = 0.4;
    const auto fail = witness_check(dim, gamma);
    CHECK(fail.trivially_inadmissible);
    CHECK_FALSE(fail.found);
}

TEST_CASE("witness exists for admissible single-band fixtures") {
    Rng rng(60);
    Grid grid{32};
    int produced = 0;
    for (int t = 0; produced < 20 && t < 200; ++t) {
        const Polyline gamma = random_polyline(rng, 5, 0.9);
        const double glen = polyline_length(gamma);
        if (glen < 0.2 || glen > 1.0) continue;
        // background below 1/2 everywhere, one band j0 on a tube around gamma
        GridDensity rho(grid);
        for (auto& v : rho.values) v = rng.uniform(0.0, 0.45);
        const int j0 = 2 + static_cast<int>(rng.below(5));
        const double v_lo = std::ldexp(1.0, j0 - 2), v_hi = std::ldexp(1.0, j0 - 1);
        double v_band = std::min(v_hi * 0.98, std::max(v_lo, 1.3 / glen));
        if (v_band * glen < 1.05) continue;  // this band cannot reach integral 1
        const auto row = clip_curve(grid, gamma);
        for (const auto& [cell, len] : row.entries) {
            (void)len;
            rho.values[static_cast<std::size_t>(cell)] = v_band;
        }
        const double integ = line_integral(rho, gamma);
        if (integ < 1.0 + 1e-6) continue;
        ++produced;
        const auto res = witness_check(rho, gamma);
        REQUIRE(res.chain_ok);
        REQUIRE(res.found);
        REQUIRE(res.lengths[res.j_star] >= std::ldexp(1.0, -res.j_star));
    }
    REQUIRE(produced == 20);
}

TEST_CASE("moser_probe smoke: positive, stable, monotone") {
    Grid grid{64};
    const auto rep = moser_probe(4.0, 8, 4, grid, 5, IsoMode::identity, 1e-3);
    REQUIRE(rep.coarse.converged);
    REQUIRE(rep.fine.converged);
    CHECK(rep.coarse.value > 0.0);
    CHECK_FALSE(rep.outside_theorem_range);
    CHECK(rep.details.at("witness_samples").size() == 4);

    const auto rep2 = moser_probe(2.0, 2, 3, Grid{32}, 5, IsoMode::identity, 1e-3);
    CHECK(rep2.outside_theorem_range);

    // enlarging the family cannot decrease the modulus
    const auto fam8 = probe_family(8, 4, 5, IsoMode::identity);
    auto fam16 = probe_family(16, 4, 5, IsoMode::identity);
    for (int i = 0; i < 8; ++i) REQUIRE(fam16.curves[i] == fam8.curves[i]);
    const auto r8 = solve_modulus(fam8, grid, 4.0, 1e-4);
    const auto r16 = solve_modulus(fam16, grid, 4.0, 1e-4);
    CHECK(r8.dual_bound <= r16.value + 1e-12);

    // graph_count = 1 reduces to the single-curve modulus
    const auto rep1 = moser_probe(4.0, 1, 4, Grid{64}, 5, IsoMode::identity, 1e-5);
    const auto fam1 = probe_family(1, 4, 5, IsoMode::identity);
    CHECK(rep1.coarse.value ==
          doctest::Approx(oracles::single_curve_modulus(fam1, Grid{64}, 4.0)).epsilon(1e-4));

    // random and net modes produce families inside the unit square
    for (auto mode : {IsoMode::random, IsoMode::net}) {
        const auto fam = probe_family(6, 4, 9, mode);
        for (const auto& c : fam.curves) {
            for (const auto& pt : c) {
                REQUIRE(pt.x >= -1e-9);
                REQUIRE(pt.x <= 1.0 + 1e-9);
                REQUIRE(pt.y >= -1e-9);
                REQUIRE(pt.y <= 1.0 + 1e-9);
            }
        }
    }
}

TEST_CASE("corollary_bound identity and admissibility") {
    Grid grid{16};
    CurveFamily fam;
    fam.curves.push_back({{0.25, 0.5}, {0.75, 0.5}});
    fam.curves.push_back({{0.5, 0.25}, {0.5, 0.75}});
    // grid-aligned cover containing both curves entirely
    geometry::SquareUnion cover;
    cover.squares = {{{0.25, 0.25}, 0.5}};

    const auto rep = corollary_bound(0.5, 4.0, cover, fam, grid);
    CHECK(rep.admissible);
    CHECK(rep.cover_area == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rep.energy_value == doctest::Approx(0.25 * std::pow(2.0, 4.0)).epsilon(1e-12));
    CHECK(rep.identity_lhs == doctest::Approx(rep.identity_rhs).epsilon(1e-12));
    CHECK(rep.solver_value <= rep.energy_value + 1e-9);

    // delta = 1 with full-length curves: rho is the plain indicator
    CurveFamily spanning;
    spanning.curves.push_back({{0.0, 0.5}, {1.0, 0.5}});
    const auto full =
        corollary_bound(1.0, 4.0, geometry::SquareUnion::single(0, 0, 1), spanning, grid);
    CHECK(full.energy_value == doctest::Approx(full.cover_area).epsilon(1e-12));

    // delta = 1 needs curves of cover-length >= 1; these are shorter
    CHECK_THROWS(corollary_bound(1.0, 4.0, cover, fam, grid));
    CHECK_THROWS(corollary_bound(0.0, 4.0, cover, fam, grid));
}

TEST_CASE("solver handles degenerate and awkward instances") {
    // duplicate curves: identical constraints must not break the active set
    CurveFamily dup;
    dup.curves.push_back({{0.0, 0.3}, {1.0, 0.3}});
    dup.curves.push_back({{0.0, 0.3}, {1.0, 0.3}});
    dup.curves.push_back({{0.0, 0.7}, {1.0, 0.7}});
    const auto rdup = solve_modulus(dup, Grid{16}, 2.0, 1e-5);
    REQUIRE(rdup.converged);
    CurveFamily single;
    single.curves.push_back({{0.0, 0.3}, {1.0, 0.3}});
    single.curves.push_back({{0.0, 0.7}, {1.0, 0.7}});
    const auto rsingle = solve_modulus(single, Grid{16}, 2.0, 1e-5);
    CHECK(rdup.value == doctest::Approx(rsingle.value).epsilon(1e-6));

    // high exponent
    const auto rp8 = solve_modulus(single, Grid{16}, 8.0, 1e-4);
    REQUIRE(rp8.converged);
    CHECK(rp8.value > 0.0);
    CHECK(rp8.tol_achieved <= 1e-4);

    // a curve hugging the grid boundary
    CurveFamily edge;
    edge.curves.push_back({{0.0, 0.0}, {1.0, 0.0}});
    edge.curves.push_back({{0.0, 1.0}, {1.0, 1.0}});
    const auto redge = solve_modulus(edge, Grid{16}, 2.0, 1e-5);
    REQUIRE(redge.converged);
    CHECK(redge.value > 0.0);

    // a curve partially outside the grid still integrates over the inside part
    CurveFamily partial;
    partial.curves.push_back({{-0.5, 0.5}, {0.5, 0.5}});
    const auto rpart = solve_modulus(partial, Grid{16}, 2.0, 1e-5);
    REQUIRE(rpart.converged);
    CHECK(rpart.value == doctest::Approx(oracles::single_curve_modulus(partial, Grid{16}, 2.0))
                             .epsilon(1e-4));
}

TEST_CASE("vanishing 2-modulus trend, light version") {
    Rng rng(70);
    const Point hub{0.5, 0.5};
    CurveFamily fam;
    for (int c = 0; c < 60; ++c) {
        const double th = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        const double len = rng.uniform(0.3, 0.49);
        fam.curves.push_back({hub, {hub.x + len * std::cos(th), hub.y + len * std::sin(th)}});
    }
    double prev = 1e300;
    for (int n : {32, 64, 128}) {
        const auto res = solve_modulus(fam, Grid{n}, 2.0, 1e-4);
        REQUIRE(res.converged);
        CHECK(res.value < prev);
        prev = res.value;
    }
}
