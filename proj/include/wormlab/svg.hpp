#pragma once

#include <string>

#include "wormlab/modulus.hpp"
#include "wormlab/wormgraphs.hpp"

namespace wormlab::svg {

// Filled cell quadrilaterals, exceptional cells in a distinct color.
std::string generation_svg(const graphs::Generation& g);

// Grayscale-to-red heatmap of rho with the curve family overlaid.
std::string density_heatmap_svg(const modulus::GridDensity& rho, const modulus::CurveFamily* fam);

}  // namespace wormlab::svg
