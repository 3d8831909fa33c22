#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "wormlab/geometry.hpp"
#include "wormlab/rat.hpp"

namespace wormlab::graphs {

// m_0 = 1, n_k = prod_{j<=k} m_j, with 100 k^2 2^k <= n_k <= 10000 k^2 2^k
// for 1 <= k <= max_depth. That window forces sum 2^k/n_k < 1/3.
struct MkSequence {
    int max_depth = 0;
    std::vector<std::int64_t> m;  // m[0..max_depth]
    std::vector<std::int64_t> n;  // n[0..max_depth]
};

MkSequence build_sequence(int K);

// sum_{k=1..max_depth} 2^k / n_k, exact.
Rat slope_budget(const MkSequence& seq);

enum class CellFlag { normal, exceptional };

// One generation-k parallelogram. The region is
//   { (x, y) : x0 <= x <= x0+width, 0 <= y - y0 - slope*(x - x0) <= height }.
struct ParCell {
    int gen = 0;
    int index = 1;  // 1-based position within the generation
    Rat x0, width, y0, slope, height;
    CellFlag flag = CellFlag::normal;

    Rat bottom_at(const Rat& x) const { return y0 + slope * (x - x0); }
    geometry::ConvexPolygon to_polygon() const;
    bool contains(const ParCell& other) const;  // exact rational containment
};

struct StringRange {
    int lo = 0, hi = 0;  // inclusive 0-based cell positions
    int size() const { return hi - lo + 1; }
};

struct Generation {
    int gen = 0;
    std::vector<ParCell> cells;        // ordered left to right
    std::vector<StringRange> strings;  // maximal runs of normal cells
    std::vector<int> exceptional;      // 0-based positions

    Rat total_area() const;
};

Generation root();

// Pile choice for one maximal normal string: returns j in {1..m}. Kept as an
// interface so tests can force constant or adversarial choices.
using PileChooser = std::function<int(int next_gen, int string_index, std::int64_t m)>;

PileChooser seeded_chooser(std::uint64_t seed);

Generation child(const Generation& g, const MkSequence& seq, const PileChooser& choose,
                 std::vector<int>* choices_out = nullptr);

struct OmegaSample {
    MkSequence seq;
    std::vector<Generation> gens;          // 0..K
    std::vector<std::vector<int>> choices; // choices[k][s]: pile used when building gens[k+1]
    std::uint64_t seed = 0;

    int depth() const { return static_cast<int>(gens.size()) - 1; }
};

OmegaSample sample_omega(int K, std::uint64_t seed);
OmegaSample sample_omega(int K, std::uint64_t seed, const PileChooser& choose);

// Midpoint of the vertical fiber of the depth-K cell containing x; ties at
// shared vertical sides resolve to the left cell.
double eval_f(const OmegaSample& w, const Rat& x);
double eval_f(const OmegaSample& w, double x);

// 2^k + 1 vertices: shared-fiber midpoints plus the two boundary fibers.
std::vector<geometry::Point> graph_polyline(const OmegaSample& w, int k);

double slope_sup(const OmegaSample& w);
Rat slope_sup_exact(const OmegaSample& w);

// Random AD-regular test sets: per retained dyadic square, keep 2 of the 4
// children, uniformly over the 6 pairs.
struct QuadtreeSet {
    int depth = 0;
    // kept[d] lists squares (i, j) of side 2^-d, meaning [i,i+1]x[j,j+1] * 2^-d.
    std::vector<std::vector<std::pair<int, int>>> kept;
    std::uint64_t seed = 0;
};

QuadtreeSet quadtree_sample(int depth, std::uint64_t seed);

}  // namespace wormlab::graphs
