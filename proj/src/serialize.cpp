#include "wormlab/serialize.hpp"

#include <sstream>
#include <stdexcept>

namespace wormlab::serialize {

using nlohmann::json;

namespace {

json cell_to_json(const graphs::ParCell& c) {
    return {{"index", c.index},
            {"x0", rat_string(c.x0)},
            {"width", rat_string(c.width)},
            {"y0", rat_string(c.y0)},
            {"slope", rat_string(c.slope)},
            {"height", rat_string(c.height)},
            {"flag", c.flag == graphs::CellFlag::normal ? "normal" : "exceptional"}};
}

graphs::ParCell cell_from_json(const json& j, int gen) {
    graphs::ParCell c;
    c.gen = gen;
    c.index = j.at("index").get<int>();
    c.x0 = parse_rat(j.at("x0").get<std::string>());
    c.width = parse_rat(j.at("width").get<std::string>());
    c.y0 = parse_rat(j.at("y0").get<std::string>());
    c.slope = parse_rat(j.at("slope").get<std::string>());
    c.height = parse_rat(j.at("height").get<std::string>());
    const std::string flag = j.at("flag").get<std::string>();
    if (flag != "normal" && flag != "exceptional") {
        throw std::invalid_argument("cell flag must be normal|exceptional");
    }
    c.flag = flag == "normal" ? graphs::CellFlag::normal : graphs::CellFlag::exceptional;
    return c;
}

}  // namespace

json generation_to_json(const graphs::Generation& g) {
    json cells = json::array();
    for (const auto& c : g.cells) cells.push_back(cell_to_json(c));
    json strings = json::array();
    for (const auto& s : g.strings) strings.push_back({s.lo + 1, s.hi + 1});
    json exceptional = json::array();
    for (int e : g.exceptional) exceptional.push_back(e + 1);
    return {{"k", g.gen}, {"cells", cells}, {"strings", strings}, {"exceptional", exceptional}};
}

graphs::Generation generation_from_json(const json& j) {
    graphs::Generation g;
    g.gen = j.at("k").get<int>();
    for (const auto& jc : j.at("cells")) g.cells.push_back(cell_from_json(jc, g.gen));
    for (const auto& js : j.at("strings")) {
        g.strings.push_back({js.at(0).get<int>() - 1, js.at(1).get<int>() - 1});
    }
    for (const auto& je : j.at("exceptional")) g.exceptional.push_back(je.get<int>() - 1);
    return g;
}

json omega_to_json(const graphs::OmegaSample& w) {
    json gens = json::array();
    for (const auto& g : w.gens) gens.push_back(generation_to_json(g));
    return {{"schema", "wormlab.omega/1"},
            {"seed", w.seed},
            {"sequence", {{"max_depth", w.seq.max_depth}, {"m", w.seq.m}, {"n", w.seq.n}}},
            {"choices", w.choices},
            {"generations", gens}};
}

graphs::OmegaSample omega_from_json(const json& j) {
    if (j.at("schema").get<std::string>() != "wormlab.omega/1") {
        throw std::invalid_argument("unexpected omega schema");
    }
    graphs::OmegaSample w;
    w.seed = j.at("seed").get<std::uint64_t>();
    const auto& js = j.at("sequence");
    w.seq.max_depth = js.at("max_depth").get<int>();
    w.seq.m = js.at("m").get<std::vector<std::int64_t>>();
    w.seq.n = js.at("n").get<std::vector<std::int64_t>>();
    w.choices = j.at("choices").get<std::vector<std::vector<int>>>();
    for (const auto& jg : j.at("generations")) w.gens.push_back(generation_from_json(jg));
    return w;
}

json tail_report_to_json(const density::TailReport& rep) {
    return {{"schema", "wormlab.tail-report/1"},
            {"trials", rep.trials},
            {"exceed_count", rep.exceed_count},
            {"empirical_rate", rep.empirical_rate},
            {"paper_bound", rep.paper_bound},
            {"params", rep.params},
            {"details", rep.details}};
}

std::string tail_report_to_csv(const density::TailReport& rep) {
    std::ostringstream out;
    out << "trials,exceed_count,empirical_rate,paper_bound\n";
    out << rep.trials << "," << rep.exceed_count << "," << rep.empirical_rate << ","
        << rep.paper_bound << "\n";
    return out.str();
}

json modulus_instance_to_json(const modulus::CurveFamily& fam, modulus::Grid grid, double p,
                              double tol) {
    json curves = json::array();
    for (const auto& c : fam.curves) {
        json pts = json::array();
        for (const auto& pt : c) pts.push_back({pt.x, pt.y});
        curves.push_back(pts);
    }
    json out = {{"schema", "wormlab.modulus-instance/1"},
                {"grid", grid.n},
                {"p", p},
                {"tol", tol},
                {"curves", curves}};
    if (!fam.labels.empty()) out["labels"] = fam.labels;
    return out;
}

void modulus_instance_from_json(const json& j, modulus::CurveFamily& fam, modulus::Grid& grid,
                                double& p, double& tol) {
    if (j.at("schema").get<std::string>() != "wormlab.modulus-instance/1") {
        throw std::invalid_argument("unexpected modulus instance schema");
    }
    grid.n = j.at("grid").get<int>();
    p = j.at("p").get<double>();
    tol = j.value("tol", 1e-3);
    fam.curves.clear();
    for (const auto& jc : j.at("curves")) {
        modulus::Polyline c;
        for (const auto& jp : jc) c.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
        fam.curves.push_back(std::move(c));
    }
    if (j.contains("labels")) fam.labels = j.at("labels").get<std::vector<std::string>>();
}

json modulus_result_to_json(const modulus::ModulusResult& res, double p) {
    return {{"schema", "wormlab.modulus-result/1"},
            {"value", res.value},
            {"dual_bound", res.dual_bound},
            {"converged", res.converged},
            {"iterations", res.iterations},
            {"tol_achieved", res.tol_achieved},
            {"grid", res.density.grid.n},
            {"p", p},
            {"active", res.active},
            {"multipliers", res.multipliers},
            {"density", res.density.values}};
}

std::string modulus_trace_to_csv(const modulus::ModulusResult& res) {
    std::ostringstream out;
    out << "iteration,primal,dual\n";
    for (const auto& row : res.trace) {
        out << row.iteration << "," << row.primal << "," << row.dual << "\n";
    }
    return out.str();
}

}  // namespace wormlab::serialize
