#include "wormlab/densitylab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wormlab/parallel.hpp"
#include "wormlab/rng.hpp"

namespace wormlab::density {

using geometry::ConvexPolygon;
using geometry::Isometry;
using geometry::IsoKind;
using geometry::Point;
using geometry::Rect;
using geometry::SquareUnion;

DensityParams make_params(double epsilon, double kappa) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) throw std::domain_error("make_params: epsilon in (0,1)");
    if (!(kappa > 0.0) || kappa > 1.0 / 3.0) throw std::domain_error("make_params: kappa in (0,1/3]");
    DensityParams p;
    p.epsilon = epsilon;
    p.kappa = kappa;
    const double t = (2.0 + kappa) / 3.0 * std::log2(1.0 / epsilon);
    const double snapped = std::round(t);
    if (std::abs(t - snapped) <= 1e-9 * std::max(1.0, std::abs(t))) {
        p.k_eps = static_cast<int>(snapped);
        p.dyadic_exact = true;
    } else {
        p.k_eps = static_cast<int>(std::ceil(t));
        p.dyadic_exact = false;
    }
    return p;
}

RSchedule r_schedule(const DensityParams& params, int k_max) {
    if (k_max < params.k_eps) throw std::invalid_argument("r_schedule: k_max < k_eps");
    RSchedule sched;
    sched.params = params;
    sched.k_max = k_max;
    const double base = std::pow(params.epsilon, 1.0 / 3.0 - params.kappa);
    double r = base / 2.0;
    sched.values.push_back(r);
    for (int k = params.k_eps + 1; k <= k_max; ++k) {
        const double step = k - params.k_eps + 1;
        r += base / (2.0 * step * step);
        sched.values.push_back(r);
    }
    return sched;
}

GenerationView::GenerationView(const graphs::Generation& g) {
    k = g.gen;
    total_area = to_double(g.total_area());
    polys.reserve(g.cells.size());
    ymin = 1.0;
    ymax = 0.0;
    for (const auto& c : g.cells) {
        polys.push_back(c.to_polygon());
        for (const Point& p : polys.back().vertices) {
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
    }
}

double GenerationView::intersection_area(const std::vector<Rect>& e_rects,
                                         const Isometry& iota) const {
    double total = 0.0;
    const double ncells = static_cast<double>(polys.size());
    for (const Rect& r : e_rects) {
        ConvexPolygon img;
        img.vertices = {iota.apply({r.x0, r.y0}), iota.apply({r.x1, r.y0}),
                        iota.apply({r.x1, r.y1}), iota.apply({r.x0, r.y1})};
        const auto bb = img.bbox();
        if (bb[2] < 0.0 || bb[0] > 1.0 || bb[3] < ymin || bb[1] > ymax) continue;
        const int lo = std::max(0, static_cast<int>(std::floor(bb[0] * ncells)));
        const int hi = std::min(static_cast<int>(ncells) - 1,
                                static_cast<int>(std::floor(bb[2] * ncells)));
        for (int i = lo; i <= hi; ++i) total += geometry::clip_area(polys[i], img);
    }
    return total;
}

double density(const graphs::Generation& g, const SquareUnion& E, const Isometry& iota) {
    const GenerationView view(g);
    if (!(view.total_area > 0.0)) throw std::domain_error("density: generation area is zero");
    return view.intersection_area(E.disjoint_rects(), iota) / view.total_area;
}

TrivialBound trivial_density_bound(const graphs::MkSequence& seq, int k, double epsilon) {
    if (k < 0 || k > seq.max_depth) throw std::out_of_range("trivial_density_bound: k out of range");
    TrivialBound b;
    b.tight = static_cast<double>(seq.n[k]) * epsilon;
    b.loose = 10000.0 * k * k * std::ldexp(1.0, k) * epsilon;
    return b;
}

double hoeffding_bound(double t, const std::vector<std::pair<double, double>>& ranges) {
    if (ranges.empty()) throw std::invalid_argument("hoeffding_bound: empty range list");
    if (!(t > 0.0)) throw std::domain_error("hoeffding_bound: t must be positive");
    double denom = 0.0;
    for (const auto& [a, b] : ranges) {
        if (b < a) throw std::invalid_argument("hoeffding_bound: range with b < a");
        denom += (b - a) * (b - a);
    }
    if (denom == 0.0) return 1.0;  // degenerate ranges: trivial bound
    const double n = static_cast<double>(ranges.size());
    return std::exp(-2.0 * n * n * t * t / denom);
}

StringStats string_stats(const graphs::Generation& g, const SquareUnion& E,
                         const graphs::MkSequence& seq) {
    if (g.strings.empty()) throw std::invalid_argument("string_stats: generation has no strings");
    if (g.gen >= seq.max_depth) throw std::out_of_range("string_stats: no child generation in sequence");
    const auto rects = E.disjoint_rects();
    const int kp = g.gen + 1;  // the paper's k: children of g are generation kp
    const double m = static_cast<double>(seq.m[kp]);
    const double card = static_cast<double>(g.strings.size());
    StringStats out;
    out.card_strings = static_cast<int>(g.strings.size());
    const Isometry id = Isometry::identity();
    for (const auto& s : g.strings) {
        StringStat st;
        for (int i = s.lo; i <= s.hi; ++i) {
            const auto& cell = g.cells[i];
            st.area += to_double(cell.width * cell.height);
            st.inter += geometry::region_area(cell.to_polygon(), rects, id);
        }
        st.d = st.area > 0 ? std::clamp(st.inter / st.area, 0.0, 1.0) : 0.0;
        st.b = std::min(1.0, m * st.inter / st.area);
        out.sum_b_sq += st.b * st.b;
        // coefficient relating the sharp bound to |S∩E| k^2 2^k card(S_{k-1})
        const double paper_scale = st.area * kp * kp * std::ldexp(1.0, kp) * card;
        out.c_b = std::max(out.c_b, m / paper_scale);
        out.per_string.push_back(st);
    }
    return out;
}

std::vector<double> draw_string_ratios(const graphs::Generation& g, const graphs::MkSequence& seq,
                                       const SquareUnion& E, const graphs::PileChooser& choose) {
    const graphs::Generation next = graphs::child(g, seq, choose);
    const auto rects = E.disjoint_rects();
    const Isometry id = Isometry::identity();
    std::vector<double> ratios;
    ratios.reserve(g.strings.size());
    for (const auto& s : g.strings) {
        double inter = 0.0, area = 0.0;
        for (int i = s.lo; i <= s.hi; ++i) {
            for (int child_pos : {2 * i, 2 * i + 1}) {
                const auto& cell = next.cells[child_pos];
                area += to_double(cell.width * cell.height);
                inter += geometry::region_area(cell.to_polygon(), rects, id);
            }
        }
        ratios.push_back(area > 0 ? inter / area : 0.0);
    }
    return ratios;
}

namespace {

Point union_center(const SquareUnion& E) {
    // A point of E itself: the center of the first square.
    const auto& s = E.squares.front();
    return {s.corner.x + s.side / 2.0, s.corner.y + s.side / 2.0};
}

struct EImage {
    Point center;
    double radius;  // circumscribed radius of E's bbox
};

EImage e_bounds(const SquareUnion& E) {
    double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
    for (const auto& s : E.squares) {
        xmin = std::min(xmin, s.corner.x);
        ymin = std::min(ymin, s.corner.y);
        xmax = std::max(xmax, s.corner.x + s.side);
        ymax = std::max(ymax, s.corner.y + s.side);
    }
    return {{(xmin + xmax) / 2.0, (ymin + ymax) / 2.0},
            std::hypot(xmax - xmin, ymax - ymin) / 2.0};
}

// Fast reject: can iota(E) meet the strip [0,1] x [ymin, ymax]?
bool image_near_graph(const EImage& eb, const Isometry& iota, double ymin, double ymax) {
    const Point c = iota.apply(eb.center);
    return c.x > -eb.radius && c.x < 1.0 + eb.radius && c.y > ymin - eb.radius &&
           c.y < ymax + eb.radius;
}

}  // namespace

SupDensityResult sup_density_net(const graphs::Generation& g, const SquareUnion& E, double delta) {
    if (E.empty()) throw std::invalid_argument("sup_density_net: E is empty");
    SupDensityResult out;
    out.diam_warning = E.diameter() > 2.0;
    const auto net = geometry::build_net(delta, union_center(E));
    const GenerationView view(g);
    const auto rects = E.disjoint_rects();
    const EImage eb = e_bounds(E);
    out.argmax = net.members.front();
    for (const Isometry& iota : net.members) {
        if (!image_near_graph(eb, iota, view.ymin, view.ymax)) continue;
        const double d = view.intersection_area(rects, iota) / view.total_area;
        if (d > out.value) {
            out.value = d;
            out.argmax = iota;
        }
    }
    return out;
}

double proof_delta(const DensityParams& params, int k, double n_k, double c_cont) {
    const double base = std::pow(params.epsilon, 1.0 / 3.0 - params.kappa);
    const double step = k - params.k_eps + 1;
    return base / (2.0 * c_cont * n_k * step * step);
}

TailReport continuity_experiment(const graphs::Generation& g, const SquareUnion& E, int trials,
                                 std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("continuity_experiment: trials must be >= 1");
    if (E.empty()) throw std::invalid_argument("continuity_experiment: E is empty");
    const GenerationView view(g);
    const auto rects = E.disjoint_rects();
    const double base_scale = std::ldexp(1.0, -view.k);
    double max_ratio = 0.0;
    double max_ratio_rot_only = 0.0;
    std::vector<double> ratios;
    ratios.reserve(static_cast<std::size_t>(trials));
    const double cell_height = view.total_area;  // 1/n_k
    Rng rng = substream(seed, {0xC0});
    for (int t = 0; t < trials; ++t) {
        // Aim a boundary edge of E through a random cell, aligned with the
        // cell's long axis, and perturb at the cell-height scale: that is the
        // extremal configuration for the area-difference ratio.
        const int cell = static_cast<int>(rng.below(view.polys.size()));
        const auto& poly = view.polys[cell];
        const auto cb = poly.bbox();
        const Point target{(cb[0] + cb[2]) / 2.0, (cb[1] + cb[3]) / 2.0};
        const double cell_slope = (poly.vertices[1].y - poly.vertices[0].y) /
                                  (poly.vertices[1].x - poly.vertices[0].x);
        const auto& sq = E.squares[rng.below(E.squares.size())];
        const double frac = rng.uniform();
        Point edge_pt;
        switch (rng.below(4)) {
            case 0: edge_pt = {sq.corner.x + frac * sq.side, sq.corner.y}; break;
            case 1: edge_pt = {sq.corner.x + frac * sq.side, sq.corner.y + sq.side}; break;
            case 2: edge_pt = {sq.corner.x, sq.corner.y + frac * sq.side}; break;
            default: edge_pt = {sq.corner.x + sq.side, sq.corner.y + frac * sq.side}; break;
        }
        Isometry i1;
        const bool reflect = rng.below(2) == 1;
        i1.kind = reflect ? IsoKind::reflection : IsoKind::rotation;
        if (t % 4 == 0) {
            i1.angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        } else {
            const double base = std::atan(cell_slope) + (rng.below(2) ? std::numbers::pi : 0.0);
            const double tilt = 8.0 * cell_height / base_scale;  // a few cell aspects
            i1.angle = base + tilt * rng.uniform(-1.0, 1.0);
        }
        i1.trans = edge_pt - i1.linear().transpose().apply(target);
        Isometry i2 = i1;
        if (t % 16 != 0) {  // keep exact-equality pairs in the mix
            const double eta = std::pow(
                10.0, rng.uniform(std::log10(0.005 * cell_height), std::log10(base_scale)));
            i2.angle += eta * rng.uniform(-1.0, 1.0);
            i2.trans = i2.trans + Point{eta * rng.uniform(-1.0, 1.0), eta * rng.uniform(-1.0, 1.0)};
        }
        const double d = geometry::iso_distance(i1, i2);
        if (d == 0.0) {
            ratios.push_back(0.0);
            continue;
        }
        double worst = 0.0;
        for (const auto& poly : view.polys) {
            const double a1 = geometry::region_area(poly, rects, i1);
            const double a2 = geometry::region_area(poly, rects, i2);
            worst = std::max(worst, std::abs(a1 - a2));
        }
        const double ratio = worst / (base_scale * d);
        ratios.push_back(ratio);
        max_ratio = std::max(max_ratio, ratio);
        if (!reflect) max_ratio_rot_only = std::max(max_ratio_rot_only, ratio);
    }
    std::sort(ratios.begin(), ratios.end());
    TailReport rep;
    rep.trials = trials;
    rep.exceed_count = 0;
    rep.empirical_rate = 0.0;
    rep.paper_bound = 0.0;
    rep.params = {{"k", view.k}, {"trials", trials}, {"seed", seed}};
    rep.details = {{"c_cont", max_ratio},
                   {"c_cont_rotation_only", max_ratio_rot_only},
                   {"ratio_median", ratios[ratios.size() / 2]},
                   {"ratio_p90", ratios[static_cast<std::size_t>(0.9 * (ratios.size() - 1))]}};
    return rep;
}

double intersection_length(const graphs::OmegaSample& w, int k, const SquareUnion& E,
                           const Isometry& iota) {
    if (k < 0 || k > w.depth()) throw std::out_of_range("intersection_length: k out of range");
    const auto pts = graphs::graph_polyline(w, k);
    const auto rects = E.disjoint_rects();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        total += geometry::segment_length_in(pts[i], pts[i + 1], rects, iota);
    }
    return total;
}

DyadicPartition dyadic_partition(const SquareUnion& E, double epsilon) {
    const double area = E.area();
    if (!(area < epsilon)) throw std::domain_error("dyadic_partition: requires |E| < epsilon");
    DyadicPartition out;
    if (E.empty()) return out;
    const auto rects = E.disjoint_rects();
    double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
    for (const auto& r : rects) {
        xmin = std::min(xmin, r.x0);
        ymin = std::min(ymin, r.y0);
        xmax = std::max(xmax, r.x1);
        ymax = std::max(ymax, r.y1);
    }
    const int ilo = std::max(-15, static_cast<int>(std::floor(xmin)));
    const int ihi = std::min(15, static_cast<int>(std::ceil(xmax)) - 1);
    const int jlo = std::max(-15, static_cast<int>(std::floor(ymin)));
    const int jhi = std::min(15, static_cast<int>(std::ceil(ymax)) - 1);
    for (int i = ilo; i <= ihi; ++i) {
        for (int j = jlo; j <= jhi; ++j) {
            double mass = 0.0;
            for (const auto& r : rects) {
                const double w = std::min(r.x1, double(i + 1)) - std::max(r.x0, double(i));
                const double h = std::min(r.y1, double(j + 1)) - std::max(r.y0, double(j));
                if (w > 0 && h > 0) mass += w * h;
            }
            if (mass <= 0.0) {
                out.infinity.emplace_back(i, j);
                continue;
            }
            int cls = 0;
            while (cls < 60 && mass <= epsilon * std::ldexp(1.0, -cls - 1)) ++cls;
            out.classes[cls].emplace_back(i, j);
        }
    }
    for (const auto& [j, squares] : out.classes) {
        if (static_cast<double>(squares.size()) >= std::ldexp(1.0, j + 1)) {
            throw std::logic_error("dyadic_partition: card D_j bound violated");
        }
    }
    return out;
}

TailReport density_tail_experiment(const SquareUnion& E, const DensityParams& params, int K,
                                   double delta, int trials, std::uint64_t seed, int threads) {
    const double area = E.area();
    if (!(area <= params.epsilon * (1.0 + 1e-12))) {
        throw std::domain_error("density_tail_experiment: requires |E| <= epsilon");
    }
    if (K < 0) throw std::invalid_argument("density_tail_experiment: K must be >= 0");
    if (trials < 1) throw std::invalid_argument("density_tail_experiment: trials must be >= 1");
    const double threshold = std::pow(params.epsilon, 1.0 / 3.0 - params.kappa);
    const geometry::IsometryNet net =
        E.empty() ? geometry::IsometryNet{delta, {0, 0}, {}} : geometry::build_net(delta, union_center(E));
    const auto rects = E.disjoint_rects();
    const EImage eb = E.empty() ? EImage{{0, 0}, 0.0} : e_bounds(E);
    // The r-schedule starts at k_eps; truncations below that depth simply
    // have no schedule to report.
    const std::vector<double> sched_values =
        K >= params.k_eps ? r_schedule(params, K).values : std::vector<double>{};

    std::vector<double> trial_max(trials, 0.0);
    std::vector<double> trial_max_below(trials, 0.0);
    std::vector<std::vector<double>> per_k(trials);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        const graphs::OmegaSample w =
            graphs::sample_omega(K, mix_key(seed, static_cast<std::uint64_t>(t)));
        auto& row = per_k[t];
        row.resize(K + 1, 0.0);
        for (int k = 0; k <= K; ++k) {
            const GenerationView view(w.gens[k]);
            double sup = 0.0;
            for (const Isometry& iota : net.members) {
                if (!image_near_graph(eb, iota, view.ymin, view.ymax)) continue;
                sup = std::max(sup, view.intersection_area(rects, iota) / view.total_area);
            }
            row[k] = sup;
            trial_max[t] = std::max(trial_max[t], sup);
            if (k <= params.k_eps) trial_max_below[t] = std::max(trial_max_below[t], sup);
        }
    });

    long exceed = 0, exceed_below = 0;
    std::vector<double> max_per_k(K + 1, 0.0);
    for (int t = 0; t < trials; ++t) {
        if (trial_max[t] >= threshold) ++exceed;
        if (trial_max_below[t] >= threshold) ++exceed_below;
        for (int k = 0; k <= K; ++k) max_per_k[k] = std::max(max_per_k[k], per_k[t][k]);
    }

    // (eq:condkepsilon) at k = k_eps: 10000 k^2 2^k eps < eps^{1/3-kappa}/2.
    const double cond_lhs =
        10000.0 * params.k_eps * params.k_eps * std::ldexp(1.0, params.k_eps) * params.epsilon;
    const double cond_rhs = threshold / 2.0;

    TailReport rep;
    rep.trials = trials;
    rep.exceed_count = exceed;
    rep.empirical_rate = static_cast<double>(exceed) / trials;
    rep.paper_bound = std::pow(params.epsilon, 3.0);
    rep.params = {{"epsilon", params.epsilon}, {"kappa", params.kappa}, {"k_eps", params.k_eps},
                  {"K", K},                    {"delta", delta},        {"trials", trials},
                  {"seed", seed},              {"E_area", area}};
    rep.details = {{"threshold", threshold},
                   {"exceed_below_k_eps", exceed_below},
                   {"max_density_per_k", max_per_k},
                   {"r_schedule", sched_values},
                   {"condkepsilon_lhs", cond_lhs},
                   {"condkepsilon_rhs", cond_rhs},
                   {"condkepsilon_holds", cond_lhs < cond_rhs},
                   {"net_members", net.members.size()},
                   {"net_c_measured", static_cast<double>(net.members.size()) * delta * delta * delta},
                   {"truncated_at_K", K}};
    return rep;
}

TailReport intersection_tail_experiment(const SquareUnion& E, const DensityParams& params, int K,
                                        double delta, int trials, std::uint64_t seed, int threads) {
    const double area = E.area();
    if (!(area < params.epsilon)) {
        throw std::domain_error("intersection_tail_experiment: requires |E| < epsilon");
    }
    if (trials < 1) throw std::invalid_argument("intersection_tail_experiment: trials must be >= 1");
    const double threshold = std::pow(params.epsilon, 1.0 / 3.0 - params.kappa);
    const auto rects = E.disjoint_rects();
    const EImage eb = E.empty() ? EImage{{0, 0}, 0.0} : e_bounds(E);
    const geometry::IsometryNet net =
        E.empty() ? geometry::IsometryNet{delta, {0, 0}, {}} : geometry::build_net(delta, union_center(E));

    std::vector<double> trial_sup(trials, 0.0);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        const graphs::OmegaSample w =
            graphs::sample_omega(K, mix_key(seed, 0x1000 + static_cast<std::uint64_t>(t)));
        const auto pts = graphs::graph_polyline(w, K);
        double sup = 0.0;
        for (const Isometry& iota : net.members) {
            if (!image_near_graph(eb, iota, 0.0, 1.0)) continue;
            // x-window of segments the image can touch
            const Point c = iota.apply(eb.center);
            const std::size_t nseg = pts.size() - 1;
            const int lo = std::max(0, static_cast<int>(std::floor((c.x - eb.radius) * nseg)));
            const int hi = std::min(static_cast<int>(nseg) - 1,
                                    static_cast<int>(std::floor((c.x + eb.radius) * nseg)));
            double len = 0.0;
            for (int i = lo; i <= hi; ++i) {
                len += geometry::segment_length_in(pts[i], pts[i + 1], rects, iota);
            }
            sup = std::max(sup, len);
        }
        trial_sup[t] = sup;
    });

    long exceed = 0;
    double max_sup = 0.0;
    for (double s : trial_sup) {
        if (s > threshold) ++exceed;
        max_sup = std::max(max_sup, s);
    }

    TailReport rep;
    rep.trials = trials;
    rep.exceed_count = exceed;
    rep.empirical_rate = static_cast<double>(exceed) / trials;
    rep.paper_bound = params.epsilon;
    rep.params = {{"epsilon", params.epsilon}, {"kappa", params.kappa}, {"k_eps", params.k_eps},
                  {"K", K},                    {"delta", delta},        {"trials", trials},
                  {"seed", seed},              {"E_area", area}};
    rep.details = {{"threshold", threshold},
                   {"max_intersection_length", max_sup},
                   {"net_members", net.members.size()},
                   {"net_c_measured", static_cast<double>(net.members.size()) * delta * delta * delta},
                   {"truncated_at_K", K}};
    if (!E.empty() && E.diameter() <= 2.0) {
        rep.details["diam_le_2_bound"] = params.epsilon * params.epsilon;  // Lemma 3.3 comparison
    }
    if (!E.empty()) {
        const auto part = dyadic_partition(E, params.epsilon);
        nlohmann::json breakdown = nlohmann::json::array();
        for (const auto& [cls, squares] : part.classes) {
            breakdown.push_back({{"class", cls},
                                 {"card", squares.size()},
                                 {"card_bound", std::ldexp(1.0, cls + 1)}});
        }
        rep.details["dyadic_classes"] = breakdown;
        rep.details["dyadic_infinity_card"] = part.infinity.size();
    }
    return rep;
}

}  // namespace wormlab::density
