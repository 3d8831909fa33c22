#include "wormlab/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "wormlab/parallel.hpp"
#include "wormlab/rng.hpp"
#include "wormlab/wormgraphs.hpp"

namespace wormlab::modulus {

using geometry::Isometry;
using geometry::IsoKind;
using geometry::Point;

double polyline_length(const Polyline& c) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) len += geometry::dist(c[i], c[i + 1]);
    return len;
}

namespace {

template <typename Fn>
void for_each_cell_length(Grid grid, const Polyline& curve, Fn&& fn) {
    const int n = grid.n;
    std::vector<double> ts;
    for (std::size_t s = 0; s + 1 < curve.size(); ++s) {
        const Point a = curve[s], b = curve[s + 1];
        const Point d = b - a;
        const double len = geometry::norm(d);
        if (len == 0.0) continue;
        ts.clear();
        ts.push_back(0.0);
        ts.push_back(1.0);
        // crossings with the grid lines x = i/n and y = j/n
        if (d.x != 0.0) {
            const double xmin = std::min(a.x, b.x), xmax = std::max(a.x, b.x);
            for (int i = static_cast<int>(std::ceil(xmin * n)); i <= static_cast<int>(std::floor(xmax * n)); ++i) {
                const double t = (static_cast<double>(i) / n - a.x) / d.x;
                if (t > 0.0 && t < 1.0) ts.push_back(t);
            }
        }
        if (d.y != 0.0) {
            const double ymin = std::min(a.y, b.y), ymax = std::max(a.y, b.y);
            for (int j = static_cast<int>(std::ceil(ymin * n)); j <= static_cast<int>(std::floor(ymax * n)); ++j) {
                const double t = (static_cast<double>(j) / n - a.y) / d.y;
                if (t > 0.0 && t < 1.0) ts.push_back(t);
            }
        }
        std::sort(ts.begin(), ts.end());
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
            const double dt = ts[i + 1] - ts[i];
            if (dt <= 1e-15) continue;
            const double tm = (ts[i] + ts[i + 1]) / 2.0;
            const Point mid = a + tm * d;
            if (mid.x < 0.0 || mid.x > 1.0 || mid.y < 0.0 || mid.y > 1.0) continue;
            const int ix = std::min(n - 1, static_cast<int>(mid.x * n));
            const int iy = std::min(n - 1, static_cast<int>(mid.y * n));
            fn(iy * n + ix, dt * len);
        }
    }
}

}  // namespace

SparseRow clip_curve(Grid grid, const Polyline& curve) {
    std::map<int, double> acc;
    double total = 0.0;
    for_each_cell_length(grid, curve, [&](int cell, double len) {
        acc[cell] += len;
        total += len;
    });
    SparseRow row;
    row.entries.assign(acc.begin(), acc.end());
    row.in_grid_length = total;
    return row;
}

double line_integral(const GridDensity& rho, const Polyline& gamma) {
    double sum = 0.0;
    for_each_cell_length(rho.grid, gamma, [&](int cell, double len) {
        sum += rho.values[static_cast<std::size_t>(cell)] * len;
    });
    return sum;
}

std::pair<bool, int> is_admissible(const GridDensity& rho, const CurveFamily& fam, double slack) {
    if (slack < 0.0) throw std::invalid_argument("is_admissible: slack must be >= 0");
    if (fam.curves.empty()) return {true, -1};
    double worst = std::numeric_limits<double>::infinity();
    int worst_idx = 0;
    for (std::size_t i = 0; i < fam.curves.size(); ++i) {
        const double v = line_integral(rho, fam.curves[i]);
        if (v < worst) {
            worst = v;
            worst_idx = static_cast<int>(i);
        }
    }
    return {worst >= 1.0 - slack, worst_idx};
}

double energy(const GridDensity& rho, double p) {
    if (!(p > 1.0)) throw std::domain_error("energy: requires p > 1");
    const double a = rho.grid.cell_area();
    double sum = 0.0;
    for (double v : rho.values) {
        if (v > 0.0) sum += std::pow(v, p) * a;
    }
    return sum;
}

namespace {

struct DualState {
    // Maximize g(lambda) = th * sum(lambda) - c0 * sum_c w_c^q over lambda >= 0,
    // where w = sum_i lambda_i row_i and the primal map is
    // rho_c = (w_c / (p * A))^{1/(p-1)}.
    const std::vector<SparseRow>* rows;
    std::vector<int> active;
    std::vector<double> lambda;
    std::vector<double> w;  // dense over cells
    double p, q, inv_pm1, cell_area, c0, threshold;

    DualState(const std::vector<SparseRow>& r, int ncells, double p_, double a, double th)
        : rows(&r), w(static_cast<std::size_t>(ncells), 0.0), p(p_), q(p_ / (p_ - 1.0)),
          inv_pm1(1.0 / (p_ - 1.0)), cell_area(a), threshold(th) {
        c0 = (1.0 - 1.0 / p) * std::pow(p * cell_area, -inv_pm1);
    }

    void rebuild_w(const std::vector<double>& lam) {
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < active.size(); ++i) {
            if (lam[i] == 0.0) continue;
            for (const auto& [cell, len] : (*rows)[active[i]].entries) {
                w[static_cast<std::size_t>(cell)] += lam[i] * len;
            }
        }
    }

    double rho_at(double wc) const { return wc <= 0.0 ? 0.0 : std::pow(wc / (p * cell_area), inv_pm1); }

    double objective(const std::vector<double>& lam) {
        rebuild_w(lam);
        double sum_l = 0.0;
        for (double l : lam) sum_l += l;
        double sum_wq = 0.0;
        for (std::size_t i = 0; i < active.size(); ++i) {
            for (const auto& [cell, len] : (*rows)[active[i]].entries) {
                const double wc = w[static_cast<std::size_t>(cell)];
                if (wc > 0.0) {
                    sum_wq += std::pow(wc, q);
                    w[static_cast<std::size_t>(cell)] = -wc;  // visit each support cell once
                }
            }
        }
        for (auto& wc : w) wc = std::abs(wc);
        return threshold * sum_l - c0 * sum_wq;
    }

    // gradient at current w (assumed consistent with lam)
    void gradient(std::vector<double>& grad) const {
        grad.assign(active.size(), 0.0);
        for (std::size_t i = 0; i < active.size(); ++i) {
            double integ = 0.0;
            for (const auto& [cell, len] : (*rows)[active[i]].entries) {
                integ += len * rho_at(w[static_cast<std::size_t>(cell)]);
            }
            grad[i] = threshold - integ;
        }
    }
};

}  // namespace

ModulusResult solve_modulus(const CurveFamily& fam, Grid grid, double p, double tol,
                            double threshold) {
    if (!(p > 1.0)) throw std::domain_error("solve_modulus: requires p > 1");
    if (fam.curves.empty()) throw std::invalid_argument("solve_modulus: empty curve family");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_modulus: tol must be positive");
    if (!(threshold > 0.0)) throw std::invalid_argument("solve_modulus: threshold must be positive");
    if (grid.n < 2) throw std::invalid_argument("solve_modulus: grid resolution must be >= 2");
    const int ncells = grid.n * grid.n;

    for (std::size_t i = 0; i < fam.curves.size(); ++i) {
        if (fam.curves[i].size() < 2 || !(polyline_length(fam.curves[i]) > 0.0)) {
            throw std::invalid_argument("solve_modulus: curve " + std::to_string(i) +
                                        " has no positive length");
        }
    }
    std::vector<SparseRow> rows(fam.curves.size());
    parallel_for(fam.curves.size(), default_threads(),
                 [&](std::size_t i) { rows[i] = clip_curve(grid, fam.curves[i]); });
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!(rows[i].in_grid_length > 0.0)) {
            throw std::domain_error("solve_modulus: curve " + std::to_string(i) +
                                    " has no length inside the grid");
        }
    }

    DualState st(rows, ncells, p, grid.cell_area(), threshold);
    const long iter_cap = 100000;
    long iters = 0;

    // Closed-form start: one constraint tight.
    st.active.push_back(0);
    {
        double sum_q = 0.0;
        for (const auto& [cell, len] : rows[0].entries) sum_q += std::pow(len, st.q);
        // integral(rho(lambda)) = lambda^{1/(p-1)} (pA)^{-1/(p-1)} sum l^q = th
        const double lam = p * grid.cell_area() *
                           std::pow(threshold / sum_q, p - 1.0);
        st.lambda.push_back(lam);
    }

    std::vector<double> integrals(rows.size(), 0.0);
    auto primal_pair = [&](double& value, double& min_integral, int& argmin) {
        // feasible primal by rescaling rho(lambda) to meet the worst constraint
        parallel_for(rows.size(), rows.size() > 64 ? default_threads() : 1, [&](std::size_t i) {
            double integ = 0.0;
            for (const auto& [cell, len] : rows[i].entries) {
                integ += len * st.rho_at(st.w[static_cast<std::size_t>(cell)]);
            }
            integrals[i] = integ;
        });
        min_integral = std::numeric_limits<double>::infinity();
        argmin = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (integrals[i] < min_integral) {
                min_integral = integrals[i];
                argmin = static_cast<int>(i);
            }
        }
        double e = 0.0;
        for (std::size_t i = 0; i < st.active.size(); ++i) {
            for (const auto& [cell, len] : rows[st.active[i]].entries) {
                const double wc = st.w[static_cast<std::size_t>(cell)];
                if (wc > 0.0) {
                    e += std::pow(st.rho_at(wc), p) * grid.cell_area();
                    st.w[static_cast<std::size_t>(cell)] = -wc;
                }
            }
        }
        for (auto& wc : st.w) wc = std::abs(wc);
        if (min_integral <= 0.0) {
            value = std::numeric_limits<double>::infinity();
        } else {
            value = e * std::pow(threshold / min_integral, p);
        }
    };

    double g_cur = st.objective(st.lambda);
    std::vector<double> grad, grad_prev, lam_prev;
    std::vector<TraceRow> trace;
    double step = 1.0;
    // Allowed constraint violation must be well below tol: scaling the primal
    // onto the feasible set inflates the energy by about p times the slack.
    const double viol_slack = tol / (4.0 * p);
    double inner_tol_scale = std::min(1e-4, tol * 0.02);

    const int max_rounds = static_cast<int>(fam.curves.size()) * 4 + 64;
    for (int round = 0; round < max_rounds && iters < iter_cap; ++round) {
        // ---- inner: projected BB ascent on the active set ----
        const double inner_tol = threshold * inner_tol_scale;
        grad_prev.clear();
        lam_prev.clear();
        for (int it = 0; it < 4000 && iters < iter_cap; ++it, ++iters) {
            st.rebuild_w(st.lambda);
            st.gradient(grad);
            double pg = 0.0;
            for (std::size_t i = 0; i < grad.size(); ++i) {
                const double g_i = (st.lambda[i] > 0.0) ? grad[i] : std::max(grad[i], 0.0);
                pg = std::max(pg, std::abs(g_i));
            }
            if (pg <= inner_tol) break;
            if (!grad_prev.empty()) {
                // Barzilai-Borwein step from the last accepted move
                double sy = 0.0, yy = 0.0;
                for (std::size_t i = 0; i < grad.size(); ++i) {
                    const double s_i = st.lambda[i] - lam_prev[i];
                    const double y_i = grad[i] - grad_prev[i];
                    sy += s_i * y_i;
                    yy += y_i * y_i;
                }
                if (yy > 0.0 && sy < 0.0) step = std::clamp(-sy / yy, 1e-12, 1e12);
            }
            lam_prev = st.lambda;
            grad_prev = grad;
            double trial_step = step;
            bool accepted = false;
            for (int bt = 0; bt < 60; ++bt) {
                std::vector<double> lam_new(st.lambda.size());
                for (std::size_t i = 0; i < lam_new.size(); ++i) {
                    lam_new[i] = std::max(0.0, lam_prev[i] + trial_step * grad[i]);
                }
                const double g_new = st.objective(lam_new);
                if (g_new >= g_cur - 1e-14 * std::abs(g_cur)) {
                    // require non-decrease; BB steps are often non-monotone but
                    // safeguarding keeps the dual certificate moving up
                    st.lambda = std::move(lam_new);
                    g_cur = g_new;
                    accepted = true;
                    break;
                }
                trial_step /= 4.0;
            }
            if (!accepted) break;
        }

        // ---- outer: check all constraints, add the most violated ----
        st.rebuild_w(st.lambda);
        double value, min_integral;
        int worst;
        primal_pair(value, min_integral, worst);
        const double dual = g_cur;
        const double gap = (value - dual) / std::max(value, 1e-300);
        trace.push_back({iters, value, dual});
        const bool violated = min_integral < threshold * (1.0 - viol_slack);
        const bool in_active = std::find(st.active.begin(), st.active.end(), worst) != st.active.end();

        if (!violated && gap <= tol) {
            // converged: materialize the feasible density
            ModulusResult res;
            res.density = GridDensity(grid);
            const double scale = threshold / min_integral;
            for (std::size_t i = 0; i < st.active.size(); ++i) {
                for (const auto& [cell, len] : rows[st.active[i]].entries) {
                    res.density.values[static_cast<std::size_t>(cell)] =
                        scale * st.rho_at(st.w[static_cast<std::size_t>(cell)]);
                }
            }
            res.value = value;
            res.dual_bound = dual;
            res.iterations = iters;
            res.tol_achieved = gap;
            res.converged = true;
            res.active = st.active;
            res.multipliers = st.lambda;
            res.trace = std::move(trace);
            return res;
        }
        if (violated && !in_active) {
            st.active.push_back(worst);
            st.lambda.push_back(0.0);
            g_cur = st.objective(st.lambda);
        } else {
            // stalled round: the ascent needs a tighter stationarity target
            inner_tol_scale = std::max(inner_tol_scale * 0.25, 1e-13);
        }
    }

    // Non-convergence: return best primal/dual pair, flagged.
    st.rebuild_w(st.lambda);
    double value, min_integral;
    int unused_argmin;
    primal_pair(value, min_integral, unused_argmin);
    ModulusResult res;
    res.density = GridDensity(grid);
    if (min_integral > 0.0) {
        const double scale = threshold / min_integral;
        for (std::size_t i = 0; i < st.active.size(); ++i) {
            for (const auto& [cell, len] : rows[st.active[i]].entries) {
                res.density.values[static_cast<std::size_t>(cell)] =
                    scale * st.rho_at(st.w[static_cast<std::size_t>(cell)]);
            }
        }
    }
    res.value = value;
    res.dual_bound = g_cur;
    res.iterations = iters;
    res.tol_achieved = (value - g_cur) / std::max(value, 1e-300);
    res.converged = false;
    res.active = st.active;
    res.multipliers = st.lambda;
    res.trace = std::move(trace);
    return res;
}

LevelSets level_sets(const GridDensity& rho) {
    LevelSets ls;
    ls.class_of.resize(rho.values.size());
    for (std::size_t c = 0; c < rho.values.size(); ++c) {
        const double v = rho.values[c];
        int j = 0;
        if (v >= 0.5) j = static_cast<int>(std::floor(std::log2(v))) + 2;
        ls.class_of[c] = j;
        if (j >= static_cast<int>(ls.classes.size())) ls.classes.resize(j + 1);
        ls.classes[static_cast<std::size_t>(j)].push_back(static_cast<int>(c));
        ls.j_max = std::max(ls.j_max, j);
    }
    return ls;
}

WitnessResult witness_check(const GridDensity& rho, const Polyline& gamma) {
    WitnessResult out;
    out.integral = line_integral(rho, gamma);
    if (out.integral < 1.0 - 1e-9) {
        out.trivially_inadmissible = true;
        return out;
    }
    const LevelSets ls = level_sets(rho);
    out.lengths.assign(static_cast<std::size_t>(ls.j_max) + 1, 0.0);
    double total_len = 0.0;
    for_each_cell_length(rho.grid, gamma, [&](int cell, double len) {
        out.lengths[static_cast<std::size_t>(ls.class_of[static_cast<std::size_t>(cell)])] += len;
        total_len += len;
    });
    // 1 <= integral <= H^1(gamma)/2 + (1/2) sum_j 2^j l_j
    double rhs = total_len / 2.0;
    for (int j = 1; j <= ls.j_max; ++j) rhs += 0.5 * std::ldexp(1.0, j) * out.lengths[j];
    out.chain_ok = out.integral <= rhs + 1e-9;
    for (int j = 1; j <= ls.j_max; ++j) {
        if (out.lengths[j] >= std::ldexp(1.0, -j)) {
            const double v = std::ldexp(1.0, j) * out.lengths[j];
            if (!out.found || v > out.value) {
                out.found = true;
                out.j_star = j;
                out.value = v;
            }
        }
    }
    return out;
}

CurveFamily probe_family(int graph_count, int depth, std::uint64_t seed, IsoMode iso_mode) {
    CurveFamily fam;
    geometry::IsometryNet net;
    if (iso_mode == IsoMode::net) net = geometry::build_net(0.5, {0.5, 0.5});
    for (int i = 0; i < graph_count; ++i) {
        const auto w = graphs::sample_omega(depth, mix_key(seed, static_cast<std::uint64_t>(i)));
        Polyline pts = graphs::graph_polyline(w, depth);
        std::string label = "graph seed=" + std::to_string(w.seed);
        auto bbox_of = [](const Polyline& c) {
            double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
            for (const Point& p : c) {
                xmin = std::min(xmin, p.x);
                ymin = std::min(ymin, p.y);
                xmax = std::max(xmax, p.x);
                ymax = std::max(ymax, p.y);
            }
            return std::array<double, 4>{xmin, ymin, xmax, ymax};
        };
        auto apply_iso = [&](const Isometry& iota) {
            Polyline moved(pts.size());
            for (std::size_t j = 0; j < pts.size(); ++j) moved[j] = iota.apply(pts[j]);
            return moved;
        };
        if (iso_mode == IsoMode::random) {
            Rng rng = substream(seed, {0xA11, static_cast<std::uint64_t>(i)});
            bool placed = false;
            for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
                Isometry iota;
                iota.kind = rng.below(2) ? IsoKind::reflection : IsoKind::rotation;
                iota.angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
                Polyline rotated(pts.size());
                for (std::size_t j = 0; j < pts.size(); ++j) {
                    rotated[j] = iota.linear().apply(pts[j]);
                }
                const auto bb = bbox_of(rotated);
                if (bb[2] - bb[0] > 1.0 || bb[3] - bb[1] > 1.0) continue;
                const double cx = rng.uniform(-bb[0], 1.0 - bb[2]);
                const double cy = rng.uniform(-bb[1], 1.0 - bb[3]);
                for (auto& pt : rotated) pt = pt + Point{cx, cy};
                pts = rotated;
                label += " iso=rand angle=" + std::to_string(iota.angle);
                placed = true;
            }
            if (!placed) label += " iso=identity_fallback";
        } else if (iso_mode == IsoMode::net) {
            bool placed = false;
            const std::size_t start = (static_cast<std::size_t>(i) * 7919) % net.members.size();
            for (std::size_t off = 0; off < net.members.size() && !placed; ++off) {
                const Isometry& iota = net.members[(start + off) % net.members.size()];
                Polyline moved = apply_iso(iota);
                const auto bb = bbox_of(moved);
                if (bb[0] >= 0.0 && bb[1] >= 0.0 && bb[2] <= 1.0 && bb[3] <= 1.0) {
                    pts = moved;
                    label += " iso=net#" + std::to_string((start + off) % net.members.size());
                    placed = true;
                }
            }
            if (!placed) label += " iso=identity_fallback";
        } else {
            label += " iso=identity";
        }
        fam.curves.push_back(std::move(pts));
        fam.labels.push_back(std::move(label));
    }
    return fam;
}

ProbeReport moser_probe(double p, int graph_count, int depth, Grid grid, std::uint64_t seed,
                        IsoMode iso_mode, double tol) {
    if (graph_count < 1) throw std::invalid_argument("moser_probe: graph_count must be >= 1");
    ProbeReport rep;
    rep.outside_theorem_range = p <= 3.0;
    const CurveFamily fam = probe_family(graph_count, depth, seed, iso_mode);
    rep.coarse = solve_modulus(fam, grid, p, tol);
    rep.fine = solve_modulus(fam, Grid{grid.n * 2}, p, tol);
    rep.normalized_coarse = rep.coarse.value * grid.n;
    rep.normalized_fine = rep.fine.value * (2.0 * grid.n);
    rep.refinement_change = std::abs(rep.normalized_fine - rep.normalized_coarse) /
                            std::max(rep.normalized_coarse, 1e-300);
    // witness samples against the coarse density
    nlohmann::json witnesses = nlohmann::json::array();
    const int sample_count = std::min<int>(4, graph_count);
    for (int i = 0; i < sample_count; ++i) {
        const auto wres = witness_check(rep.coarse.density, fam.curves[static_cast<std::size_t>(i)]);
        witnesses.push_back({{"curve", i},
                             {"found", wres.found},
                             {"j_star", wres.j_star},
                             {"value", wres.value},
                             {"integral", wres.integral},
                             {"trivially_inadmissible", wres.trivially_inadmissible}});
    }
    rep.details = {{"p", p},
                   {"graph_count", graph_count},
                   {"depth", depth},
                   {"grid", grid.n},
                   {"seed", seed},
                   {"iso_mode", iso_mode == IsoMode::identity ? "identity"
                                : iso_mode == IsoMode::random ? "random"
                                                              : "net"},
                   {"outside_theorem_range", rep.outside_theorem_range},
                   {"value_at_N", rep.coarse.value},
                   {"value_at_2N", rep.fine.value},
                   {"cell_width_corrected_at_N", rep.normalized_coarse},
                   {"cell_width_corrected_at_2N", rep.normalized_fine},
                   {"witness_samples", witnesses}};
    return rep;
}

CorollaryReport corollary_bound(double delta, double p, const geometry::SquareUnion& cover,
                                const CurveFamily& fam, Grid grid, double tol) {
    if (!(delta > 0.0) || delta > 1.0) throw std::domain_error("corollary_bound: delta in (0, 1]");
    if (!(p > 1.0)) throw std::domain_error("corollary_bound: requires p > 1");
    const auto rects = cover.disjoint_rects();
    const Isometry id = Isometry::identity();
    CorollaryReport rep;
    rep.delta = delta;
    rep.p = p;
    rep.min_cover_length = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fam.curves.size(); ++i) {
        double len = 0.0;
        const auto& c = fam.curves[i];
        for (std::size_t s = 0; s + 1 < c.size(); ++s) {
            len += geometry::segment_length_in(c[s], c[s + 1], rects, id);
        }
        rep.min_cover_length = std::min(rep.min_cover_length, len);
        if (len < delta - 1e-9) {
            throw std::domain_error("corollary_bound: curve " + std::to_string(i) +
                                    " meets the cover in length " + std::to_string(len) +
                                    " < delta");
        }
    }
    // rho = delta^{-1} on cells that intersect the cover
    GridDensity rho(grid);
    const int n = grid.n;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const double x0 = static_cast<double>(ix) / n, x1 = static_cast<double>(ix + 1) / n;
            const double y0 = static_cast<double>(iy) / n, y1 = static_cast<double>(iy + 1) / n;
            for (const auto& r : rects) {
                if (std::min(r.x1, x1) > std::max(r.x0, x0) &&
                    std::min(r.y1, y1) > std::max(r.y0, y0)) {
                    rho.at(ix, iy) = 1.0 / delta;
                    break;
                }
            }
        }
    }
    double marked = 0.0;
    for (double v : rho.values) {
        if (v > 0.0) marked += grid.cell_area();
    }
    rep.cover_area = marked;
    rep.energy_value = energy(rho, p);
    rep.admissible = fam.curves.empty() ? true : is_admissible(rho, fam, 1e-9).first;
    rep.identity_lhs = marked;
    rep.identity_rhs = std::pow(delta, p) * rep.energy_value;
    if (!fam.curves.empty()) {
        const ModulusResult res = solve_modulus(fam, grid, p, tol);
        rep.solver_value = res.value;
        rep.solver_times_half_delta_p = 0.5 * std::pow(delta, p) * res.value;
    }
    return rep;
}

}  // namespace wormlab::modulus
