#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wormlab/geometry.hpp"
#include "wormlab/wormgraphs.hpp"

namespace wormlab::density {

inline constexpr double kLambda = 0.5;

struct DensityParams {
    double epsilon = 0.0;
    double kappa = 0.0;
    int k_eps = 0;
    bool dyadic_exact = false;  // whether eps^{-(2+kappa)/3} is exactly a power of 2
};

DensityParams make_params(double epsilon, double kappa);

// r_{k_eps} = eps^{1/3-kappa}/2, then increments eps^{1/3-kappa}/(2 (k-k_eps+1)^2);
// increasing, with sup below eps^{1/3-kappa}.
struct RSchedule {
    DensityParams params;
    int k_max = 0;
    std::vector<double> values;  // index 0 corresponds to k = params.k_eps

    double at(int k) const { return values.at(static_cast<std::size_t>(k - params.k_eps)); }
};

RSchedule r_schedule(const DensityParams& params, int k_max);

// Float view of a generation: cell polygons plus the uniform x-indexing used
// to clip only the cells near a small image.
struct GenerationView {
    explicit GenerationView(const graphs::Generation& g);

    int k = 0;
    double total_area = 0.0;  // 1/n_k
    std::vector<geometry::ConvexPolygon> polys;
    double ymin = 0.0, ymax = 1.0;

    // Sum of |T ∩ iota(E)| over cells, E given by its disjoint rectangles.
    double intersection_area(const std::vector<geometry::Rect>& e_rects,
                             const geometry::Isometry& iota) const;
};

// D_{iota(E)}(G_k) = |G_k ∩ iota(E)| / |G_k|.
double density(const graphs::Generation& g, const geometry::SquareUnion& E,
               const geometry::Isometry& iota);

struct TrivialBound {
    double tight = 0.0;  // n_k * eps
    double loose = 0.0;  // 10000 k^2 2^k eps
};

TrivialBound trivial_density_bound(const graphs::MkSequence& seq, int k, double epsilon);

double hoeffding_bound(double t, const std::vector<std::pair<double, double>>& ranges);

struct StringStat {
    double area = 0.0;   // |S|
    double inter = 0.0;  // |E ∩ S|
    double d = 0.0;      // |E ∩ S| / |S|
    double b = 0.0;      // min{1, m_{k} |E ∩ S| / |S|}: the sharp X_S range bound
};

struct StringStats {
    std::vector<StringStat> per_string;
    double sum_b_sq = 0.0;
    double c_b = 0.0;  // measured coefficient in the paper-form bound
    int card_strings = 0;
};

StringStats string_stats(const graphs::Generation& g, const geometry::SquareUnion& E,
                         const graphs::MkSequence& seq);

// X_S for one child draw: |S ∩ G_child ∩ E| / |S ∩ G_child| per string.
std::vector<double> draw_string_ratios(const graphs::Generation& g, const graphs::MkSequence& seq,
                                       const geometry::SquareUnion& E,
                                       const graphs::PileChooser& choose);

struct SupDensityResult {
    double value = 0.0;
    geometry::Isometry argmax;
    bool diam_warning = false;
};

SupDensityResult sup_density_net(const graphs::Generation& g, const geometry::SquareUnion& E,
                                 double delta);

// The proof's net resolution eps^{1/3-kappa} / (2 C n_k (k-k_eps+1)^2).
double proof_delta(const DensityParams& params, int k, double n_k, double c_cont);

struct TailReport {
    long trials = 0;
    long exceed_count = 0;
    double empirical_rate = 0.0;
    double paper_bound = 0.0;
    nlohmann::json params;   // parameter echo
    nlohmann::json details;  // measured constants, per-k records, breakdowns
};

// Measures the Lemma 3.1 ratio |T∩i1(E)| - |T∩i2(E)| over 2^-k ||i1 - i2||;
// the max is the artifact's continuity constant.
TailReport continuity_experiment(const graphs::Generation& g, const geometry::SquareUnion& E,
                                 int trials, std::uint64_t seed);

// Length of the depth-k polyline inside iota(E). Differs from the limit
// graph's intersection by at most the polyline length near the image boundary.
double intersection_length(const graphs::OmegaSample& w, int k, const geometry::SquareUnion& E,
                           const geometry::Isometry& iota);

struct DyadicPartition {
    // class j holds unit squares [i,i+1]x[j,j+1] with eps 2^{-j-1} < |E∩Q| <= eps 2^{-j}
    std::map<int, std::vector<std::pair<int, int>>> classes;
    std::vector<std::pair<int, int>> infinity;  // squares meeting the clip box with |E∩Q| = 0
};

DyadicPartition dyadic_partition(const geometry::SquareUnion& E, double epsilon);

TailReport density_tail_experiment(const geometry::SquareUnion& E, const DensityParams& params,
                                   int K, double delta, int trials, std::uint64_t seed,
                                   int threads = 1);

TailReport intersection_tail_experiment(const geometry::SquareUnion& E, const DensityParams& params,
                                        int K, double delta, int trials, std::uint64_t seed,
                                        int threads = 1);

}  // namespace wormlab::density
