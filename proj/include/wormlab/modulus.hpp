#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wormlab/geometry.hpp"

namespace wormlab::modulus {

struct Grid {
    int n = 2;  // N x N cells over [0,1]^2
    double cell_area() const { return 1.0 / (static_cast<double>(n) * n); }
};

struct GridDensity {
    Grid grid;
    std::vector<double> values;  // row-major, idx = iy * n + ix

    explicit GridDensity(Grid g = {}) : grid(g), values(static_cast<std::size_t>(g.n) * g.n, 0.0) {}
    double& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * grid.n + ix]; }
    double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * grid.n + ix]; }
};

using Polyline = std::vector<geometry::Point>;

struct CurveFamily {
    std::vector<Polyline> curves;
    std::vector<std::string> labels;  // optional, parallel to curves when present
};

double polyline_length(const Polyline& c);

// Per-cell lengths of a polyline, exact segment-grid clipping. Portions
// outside [0,1]^2 carry no density and are skipped.
struct SparseRow {
    std::vector<std::pair<int, double>> entries;  // (cell, length), cell-sorted
    double in_grid_length = 0.0;
};

SparseRow clip_curve(Grid grid, const Polyline& curve);

double line_integral(const GridDensity& rho, const Polyline& gamma);

// min over curves of the line integral >= 1 - slack; also the argmin curve.
std::pair<bool, int> is_admissible(const GridDensity& rho, const CurveFamily& fam, double slack);

double energy(const GridDensity& rho, double p);

struct TraceRow {
    long iteration = 0;
    double primal = 0.0;
    double dual = 0.0;
};

struct ModulusResult {
    double value = 0.0;       // primal (feasible) energy
    double dual_bound = 0.0;  // certified lower bound from the multipliers
    GridDensity density;
    long iterations = 0;
    double tol_achieved = 0.0;
    bool converged = false;
    std::vector<int> active;            // constraint-generation active set
    std::vector<double> multipliers;    // parallel to active
    std::vector<TraceRow> trace;        // one row per outer round
};

// Constraint generation over the separable convex energy; inner solves run
// projected gradient ascent on the Lagrangian dual (Barzilai-Borwein step with
// a backtracking safeguard). Deterministic given inputs.
ModulusResult solve_modulus(const CurveFamily& fam, Grid grid, double p, double tol,
                            double threshold = 1.0);

struct LevelSets {
    std::vector<std::vector<int>> classes;  // classes[j] = cells, j = 0..j_max
    int j_max = 0;
    std::vector<int> class_of;  // per cell
};

// E_0 = {rho < 1/2}, E_j = {2^{j-2} <= rho < 2^{j-1}} for j >= 1.
LevelSets level_sets(const GridDensity& rho);

struct WitnessResult {
    bool found = false;
    int j_star = 0;
    double value = 0.0;  // 2^{j*} * l_{j*}
    bool trivially_inadmissible = false;
    double integral = 0.0;
    bool chain_ok = false;
    std::vector<double> lengths;  // l_j per class
};

WitnessResult witness_check(const GridDensity& rho, const Polyline& gamma);

enum class IsoMode { identity, random, net };

struct ProbeReport {
    ModulusResult coarse;  // at N
    ModulusResult fine;    // at 2N
    // Raw values of finite thin-curve families decay like 1/N (the optimal
    // density concentrates on one-cell tubes), so refinement stability is
    // judged on the cell-width-corrected value N * mod_p; both are reported.
    double normalized_coarse = 0.0;
    double normalized_fine = 0.0;
    double refinement_change = 0.0;  // relative change of the corrected value
    bool outside_theorem_range = false;  // p <= 3
    nlohmann::json details;
};

ProbeReport moser_probe(double p, int graph_count, int depth, Grid grid, std::uint64_t seed,
                        IsoMode iso_mode, double tol = 1e-3);

CurveFamily probe_family(int graph_count, int depth, std::uint64_t seed, IsoMode iso_mode);

struct CorollaryReport {
    double delta = 0.0;
    double p = 0.0;
    double cover_area = 0.0;     // area of the marked cells
    double energy_value = 0.0;   // integral of rho^p
    bool admissible = false;
    double identity_lhs = 0.0;   // cover_area
    double identity_rhs = 0.0;   // delta^p * energy
    double min_cover_length = 0.0;
    double solver_value = 0.0;
    double solver_times_half_delta_p = 0.0;
};

// rho = delta^{-1} * indicator(cover) on the grid; every curve must meet the
// cover in length >= delta.
CorollaryReport corollary_bound(double delta, double p, const geometry::SquareUnion& cover,
                                const CurveFamily& fam, Grid grid, double tol = 1e-3);

}  // namespace wormlab::modulus
