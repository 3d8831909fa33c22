#pragma once

#include <string>

#include <json.hpp>

#include "wormlab/densitylab.hpp"
#include "wormlab/modulus.hpp"
#include "wormlab/wormgraphs.hpp"

namespace wormlab::serialize {

// JSON schemas carry a "schema" tag; rationals are "numerator/denominator"
// strings. Cell indices, string ranges and exceptional lists are 1-based in
// the files, matching each cell's "index" field.

nlohmann::json generation_to_json(const graphs::Generation& g);
graphs::Generation generation_from_json(const nlohmann::json& j);

nlohmann::json omega_to_json(const graphs::OmegaSample& w);
graphs::OmegaSample omega_from_json(const nlohmann::json& j);

nlohmann::json tail_report_to_json(const density::TailReport& rep);
std::string tail_report_to_csv(const density::TailReport& rep);

nlohmann::json modulus_instance_to_json(const modulus::CurveFamily& fam, modulus::Grid grid,
                                        double p, double tol);
void modulus_instance_from_json(const nlohmann::json& j, modulus::CurveFamily& fam,
                                modulus::Grid& grid, double& p, double& tol);

nlohmann::json modulus_result_to_json(const modulus::ModulusResult& res, double p);
std::string modulus_trace_to_csv(const modulus::ModulusResult& res);

}  // namespace wormlab::serialize
