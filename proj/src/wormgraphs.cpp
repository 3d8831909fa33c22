#include "wormlab/wormgraphs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wormlab/rng.hpp"

namespace wormlab::graphs {

MkSequence build_sequence(int K) {
    if (K < 0 || K > 24) throw std::invalid_argument("build_sequence: K must be in [0, 24]");
    MkSequence seq;
    seq.max_depth = K;
    seq.m = {1};
    seq.n = {1};
    for (int k = 1; k <= K; ++k) {
        const std::int64_t target = 100LL * k * k * (std::int64_t(1) << k);
        const std::int64_t mk = (target + seq.n[k - 1] - 1) / seq.n[k - 1];
        seq.m.push_back(mk);
        seq.n.push_back(mk * seq.n[k - 1]);
    }
    return seq;
}

Rat slope_budget(const MkSequence& seq) {
    Rat sum = 0;
    for (int k = 1; k <= seq.max_depth; ++k) sum += Rat(std::int64_t(1) << k, seq.n[k]);
    return sum;
}

geometry::ConvexPolygon ParCell::to_polygon() const {
    const Rat x1 = x0 + width;
    const Rat yl = y0, yr = bottom_at(x1);
    geometry::ConvexPolygon p;
    p.vertices = {{to_double(x0), to_double(yl)},
                  {to_double(x1), to_double(yr)},
                  {to_double(x1), to_double(yr + height)},
                  {to_double(x0), to_double(yl + height)}};
    return p;
}

bool ParCell::contains(const ParCell& other) const {
    if (other.x0 < x0 || other.x0 + other.width > x0 + width) return false;
    // Both boundaries are linear in x, so checking the two vertical sides of
    // `other` suffices.
    const Rat x_right = other.x0 + other.width;
    for (const Rat& x : {other.x0, x_right}) {
        const Rat lo = other.bottom_at(x);
        const Rat base = bottom_at(x);
        if (lo < base || lo + other.height > base + height) return false;
    }
    return true;
}

Rat Generation::total_area() const {
    Rat s = 0;
    for (const ParCell& c : cells) s += c.width * c.height;
    return s;
}

Generation root() {
    Generation g;
    g.gen = 0;
    ParCell c;
    c.gen = 0;
    c.index = 1;
    c.x0 = 0;
    c.width = 1;
    c.y0 = 0;
    c.slope = 0;
    c.height = 1;
    c.flag = CellFlag::normal;
    g.cells = {c};
    g.strings = {{0, 0}};
    return g;
}

namespace {

struct Layout {
    std::vector<StringRange> strings;
    std::vector<int> exceptional;
};

// Strings of (ideally) 2^{gen/2} normal cells separated by single exceptional
// cells; all strings but the last share one length L, the last carries the
// surplus or deficit; first and last cells always normal. The last string
// must stay inside the factor-4 length band, so candidates may drop a few
// separators (making the last string longer) instead of leaving a runt.
Layout flag_layout(int gen, int ncells) {
    const std::int64_t s = std::max<std::int64_t>(1, std::llround(std::pow(2.0, 0.5 * gen)));
    const double band_lo = std::max(1.0, std::pow(2.0, 0.5 * gen - 2.0));
    const double band_hi = std::pow(2.0, 0.5 * gen + 2.0);
    struct Candidate {
        std::int64_t band_violation = 0;
        std::int64_t ldist = 0;
        std::int64_t tdist = 0;
        std::int64_t L = 0;
        std::int64_t gaps = 0;
        std::int64_t t = 0;
        bool valid = false;
    };
    Candidate best;
    for (std::int64_t L : {s, s + 1, s + 2, s - 1, s - 2}) {
        if (L < 1) continue;
        const std::int64_t gaps0 = (ncells - 1) / (L + 1);
        for (std::int64_t r = 0; r <= 3; ++r) {
            const std::int64_t gaps = gaps0 - r;
            if (gaps < 1) break;
            const std::int64_t t = ncells - gaps * (L + 1);
            if (t < 1) continue;
            Candidate c;
            c.L = L;
            c.gaps = gaps;
            c.t = t;
            c.band_violation =
                (static_cast<double>(t) < band_lo || static_cast<double>(t) > band_hi) ? 1 : 0;
            c.ldist = std::llabs(L - s);
            c.tdist = std::llabs(t - s);
            c.valid = true;
            auto key = [](const Candidate& x) {
                return std::tuple(x.band_violation, x.ldist, x.tdist);
            };
            if (!best.valid || key(c) < key(best)) best = c;
        }
    }
    Layout out;
    if (!best.valid) {
        out.strings.push_back({0, ncells - 1});
        return out;
    }
    int start = 0;
    for (std::int64_t i = 0; i < best.gaps; ++i) {
        out.strings.push_back({start, start + static_cast<int>(best.L) - 1});
        out.exceptional.push_back(start + static_cast<int>(best.L));
        start += static_cast<int>(best.L) + 1;
    }
    out.strings.push_back({start, ncells - 1});
    return out;
}

}  // namespace

Generation child(const Generation& g, const MkSequence& seq, const PileChooser& choose,
                 std::vector<int>* choices_out) {
    const int k = g.gen;
    if (k >= seq.max_depth) throw std::out_of_range("child: depth exhausted");
    const std::int64_t m = seq.m[k + 1];
    const Rat h_child(1, seq.n[k + 1]);

    // One pile index per maximal normal string.
    std::vector<int> piles(g.strings.size());
    std::vector<int> pile_of_cell(g.cells.size(), 0);
    for (std::size_t si = 0; si < g.strings.size(); ++si) {
        const int j = choose(k + 1, static_cast<int>(si), m);
        if (j < 1 || j > m) throw std::runtime_error("child: pile choice out of range");
        piles[si] = j;
        for (int i = g.strings[si].lo; i <= g.strings[si].hi; ++i) pile_of_cell[i] = j;
    }
    if (choices_out) *choices_out = piles;

    Generation next;
    next.gen = k + 1;
    next.cells.resize(g.cells.size() * 2);
    const Layout layout = flag_layout(k + 1, static_cast<int>(next.cells.size()));
    next.strings = layout.strings;
    next.exceptional = layout.exceptional;

    auto emit = [&](int parent_pos, const Rat& y_base, const Rat& slope) {
        const ParCell& p = g.cells[parent_pos];
        const Rat half = p.width / 2;
        for (int half_idx = 0; half_idx < 2; ++half_idx) {
            ParCell c;
            c.gen = k + 1;
            c.index = 2 * parent_pos + half_idx + 1;
            c.x0 = p.x0 + half_idx * half;
            c.width = half;
            c.y0 = half_idx == 0 ? y_base : y_base + slope * half;
            c.slope = slope;
            c.height = h_child;
            next.cells[2 * parent_pos + half_idx] = c;
        }
    };

    for (std::size_t si = 0; si < g.strings.size(); ++si) {
        const Rat offset = Rat(piles[si] - 1) * h_child;
        for (int i = g.strings[si].lo; i <= g.strings[si].hi; ++i) {
            const ParCell& p = g.cells[i];
            emit(i, p.y0 + offset, p.slope);
        }
    }
    for (int i : g.exceptional) {
        const ParCell& p = g.cells[i];
        // Both neighbors are normal and already subdivided; connect the right
        // vertical side V' of the left neighbor's chosen pile to the left
        // side V'' of the right neighbor's.
        const int j_left = pile_of_cell[i - 1];
        const int j_right = pile_of_cell[i + 1];
        const Rat y_left = p.y0 + Rat(j_left - 1) * h_child;
        const Rat y_right = p.bottom_at(p.x0 + p.width) + Rat(j_right - 1) * h_child;
        const Rat slope = (y_right - y_left) / p.width;
        emit(i, y_left, slope);
    }
    for (std::size_t pos = 0; pos < next.cells.size(); ++pos) {
        next.cells[pos].flag = CellFlag::normal;
    }
    for (int e : next.exceptional) next.cells[e].flag = CellFlag::exceptional;
    return next;
}

PileChooser seeded_chooser(std::uint64_t seed) {
    return [seed](int next_gen, int string_index, std::int64_t m) {
        Rng r = substream(seed, {static_cast<std::uint64_t>(next_gen),
                                 static_cast<std::uint64_t>(string_index)});
        return static_cast<int>(1 + r.below(static_cast<std::uint64_t>(m)));
    };
}

OmegaSample sample_omega(int K, std::uint64_t seed) {
    return sample_omega(K, seed, seeded_chooser(seed));
}

OmegaSample sample_omega(int K, std::uint64_t seed, const PileChooser& choose) {
    if (K < 0 || K > 24) throw std::invalid_argument("sample_omega: K must be in [0, 24]");
    OmegaSample w;
    w.seq = build_sequence(K);
    w.seed = seed;
    w.gens.reserve(K + 1);
    w.gens.push_back(root());
    for (int k = 0; k < K; ++k) {
        std::vector<int> piles;
        w.gens.push_back(child(w.gens.back(), w.seq, choose, &piles));
        w.choices.push_back(std::move(piles));
    }
    return w;
}

namespace {

// Depth-K cell position containing x, ties toward the left cell.
int cell_position(const OmegaSample& w, const Rat& x) {
    const int K = w.depth();
    const Rat scaled = x * rat_pow2(K);
    BigInt fl = numerator(scaled) / denominator(scaled);
    int pos = fl.convert_to<int>();
    if (Rat(fl) == scaled && pos >= 1) pos -= 1;  // on a shared vertical side
    return std::min<int>(pos, static_cast<int>(w.gens[K].cells.size()) - 1);
}

}  // namespace

double eval_f(const OmegaSample& w, const Rat& x) {
    if (x < 0 || x > 1) throw std::domain_error("eval_f: x outside [0, 1]");
    if (w.depth() < 0) throw std::invalid_argument("eval_f: empty sample");
    const ParCell& c = w.gens[w.depth()].cells[cell_position(w, x)];
    return to_double(c.bottom_at(x) + c.height / 2);
}

double eval_f(const OmegaSample& w, double x) {
    if (!(x >= 0.0) || !(x <= 1.0)) throw std::domain_error("eval_f: x outside [0, 1]");
    const int K = w.depth();
    const auto& cells = w.gens[K].cells;
    const double scaled = std::ldexp(x, K);
    int pos = static_cast<int>(scaled);
    if (static_cast<double>(pos) == scaled && pos >= 1) pos -= 1;
    pos = std::min<int>(pos, static_cast<int>(cells.size()) - 1);
    const ParCell& c = cells[pos];
    return to_double(c.y0) + to_double(c.slope) * (x - to_double(c.x0)) + 0.5 * to_double(c.height);
}

std::vector<geometry::Point> graph_polyline(const OmegaSample& w, int k) {
    if (k < 0 || k > w.depth()) throw std::out_of_range("graph_polyline: depth out of range");
    const Generation& g = w.gens[k];
    std::vector<geometry::Point> pts;
    pts.reserve(g.cells.size() + 1);
    for (const ParCell& c : g.cells) {
        pts.push_back({to_double(c.x0), to_double(c.y0 + c.height / 2)});
    }
    const ParCell& last = g.cells.back();
    pts.push_back({1.0, to_double(last.bottom_at(last.x0 + last.width) + last.height / 2)});
    return pts;
}

Rat slope_sup_exact(const OmegaSample& w) {
    Rat sup = 0;
    for (const Generation& g : w.gens) {
        for (const ParCell& c : g.cells) {
            const Rat a = c.slope < 0 ? Rat(-c.slope) : c.slope;
            if (a > sup) sup = a;
        }
    }
    return sup;
}

double slope_sup(const OmegaSample& w) { return to_double(slope_sup_exact(w)); }

QuadtreeSet quadtree_sample(int depth, std::uint64_t seed) {
    if (depth < 0 || depth > 16) throw std::invalid_argument("quadtree_sample: depth must be in [0, 16]");
    QuadtreeSet q;
    q.depth = depth;
    q.seed = seed;
    q.kept.resize(depth + 1);
    q.kept[0] = {{0, 0}};
    static constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    static constexpr int kChild[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    for (int d = 0; d < depth; ++d) {
        q.kept[d + 1].reserve(q.kept[d].size() * 2);
        for (const auto& [i, j] : q.kept[d]) {
            Rng r = substream(seed, {static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(j)});
            const int pick = static_cast<int>(r.below(6));
            for (int which : kPairs[pick]) {
                q.kept[d + 1].emplace_back(2 * i + kChild[which][0], 2 * j + kChild[which][1]);
            }
        }
    }
    return q;
}

}  // namespace wormlab::graphs
