#include "cdad/errors.hpp"
#include "cdad/guarantee_solver.hpp"
#include "cdad/model_io.hpp"
#include "cdad/simulator.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace cdad;

namespace {

py::object to_py(const nlohmann::json& j)
{
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_py(const py::object& o)
{
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict bounds_dict(const HybridAutomaton& m)
{
    py::dict out;
    for (const auto& [q, b] : compute_bounds(m)) {
        py::dict d;
        d["delta"] = b.delta;
        d["z_star"] = b.z_star;
        d["d_star"] = b.d_star;
        d["threshold"] = b.threshold ? py::cast(*b.threshold) : py::none();
        out[py::int_(q)] = d;
    }
    return out;
}

py::dict regions_dict(const HybridAutomaton& m)
{
    auto box_list = [](const Box& b) {
        py::list l;
        for (const auto& iv : b.axes()) l.append(py::make_tuple(iv.lo, iv.hi));
        return l;
    };
    const auto r = decompose_regions(m);
    py::list inter;
    for (const auto& b : r.intermediate) inter.append(box_list(b));
    py::dict normal;
    for (const auto& n : r.normal) {
        py::list holes;
        for (const auto& h : n.holes) holes.append(box_list(h));
        normal[py::int_(n.state)] = py::dict(py::arg("invariant") = box_list(n.invariant), py::arg("holes") = holes);
    }
    py::dict neighbors;
    for (const auto& [ti, nb] : r.neighbors) neighbors[py::int_(ti)] = nb.value;
    py::dict out;
    out["intermediate"] = inter;
    out["normal"] = normal;
    out["neighbors"] = neighbors;
    return out;
}

/// Trace as columns: matrices are samples x dimension.
py::dict trace_dict(const std::vector<TraceRecord>& trace)
{
    const auto rows = static_cast<Eigen::Index>(trace.size());
    const auto n = trace.empty() ? 0 : trace.front().x.size();
    Matrix x(rows, n), y(rows, n), xh(rows, n), r(rows, n), a(rows, n);
    Eigen::VectorXd t(rows), vol(rows);
    std::vector<long> q(trace.size());
    std::vector<bool> alarm(trace.size()), steady(trace.size()), violation(trace.size());
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& rec = trace[static_cast<std::size_t>(i)];
        x.row(i) = rec.x;
        y.row(i) = rec.y;
        xh.row(i) = rec.x_hat;
        r.row(i) = rec.residual;
        a.row(i) = rec.attack;
        t(i) = rec.t;
        vol(i) = rec.volume;
        q[static_cast<std::size_t>(i)] = rec.q;
        alarm[static_cast<std::size_t>(i)] = rec.alarm();
        steady[static_cast<std::size_t>(i)] = rec.steady;
        violation[static_cast<std::size_t>(i)] = rec.safety_violation;
    }
    py::dict d;
    d["t"] = t;
    d["x"] = x;
    d["y"] = y;
    d["x_hat"] = xh;
    d["residual"] = r;
    d["attack"] = a;
    d["q"] = q;
    d["volume"] = vol;
    d["alarm"] = alarm;
    d["steady"] = steady;
    d["safety_violation"] = violation;
    return d;
}

ScenarioConfig configure(const ScenarioConfig& base, std::optional<std::uint64_t> seed,
                         std::optional<std::string> attack, std::optional<double> duration)
{
    ScenarioConfig cfg = base;
    if (seed) cfg.seed = *seed;
    if (attack) cfg.attack = *attack == "none" ? std::nullopt : std::optional(parse_attack(*attack));
    if (duration) cfg.duration = *duration;
    return cfg;
}

struct PySimulator {
    LoadedScenario loaded;
    std::unique_ptr<Simulator> sim;

    explicit PySimulator(LoadedScenario ls)
        : loaded(std::move(ls)), sim(std::make_unique<Simulator>(loaded.model)) {}
};

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Conflict-driven anomaly detection core";

    static py::exception<Error> base(m, "CdadError");
    py::register_exception<ModelError>(m, "ModelError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<NoGuaranteeError>(m, "NoGuaranteeError", base.ptr());

    py::class_<HybridAutomaton>(m, "Model")
        .def_static("train_gate", &builtin_train_gate)
        .def_static("from_file", [](const std::string& p) { return load_model(p); })
        .def_static("from_dict", [](const py::object& o) { return model_from_json(from_py(o)); })
        .def("to_dict", [](const HybridAutomaton& a) { return to_py(model_to_json(a)); })
        .def_property_readonly("name", [](const HybridAutomaton& a) { return a.name; })
        .def_property_readonly("dim", &HybridAutomaton::dim)
        .def("validate", [](const HybridAutomaton& a) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& v : validate_model(a)) out.emplace_back(to_string(v.kind), v.message);
            return out;
        })
        .def("regions", &regions_dict)
        .def("observability_horizon", [](const HybridAutomaton& a) {
            return check_current_state_observability(build_observer(extract_fsm(a))).k;
        })
        .def("deltas", [](const HybridAutomaton& a) {
            std::map<StateId, int> out;
            for (const auto& [q, d] : compute_all_deltas(a)) out[q] = d.delta;
            return out;
        })
        .def("bounds", &bounds_dict)
        .def("classify_fdia", [](const HybridAutomaton& a, StateId q, const std::vector<int>& gamma) {
            const auto c = classify_fdia(a, q, gamma);
            return py::make_tuple(to_string(c.verdict), c.message);
        }, py::arg("state"), py::arg("gamma"));

    py::class_<PySimulator>(m, "Simulator")
        .def(py::init([](const std::string& source) { return new PySimulator(load_scenario(source)); }),
             py::arg("source") = "train-gate")
        .def_property_readonly("model", [](const PySimulator& s) { return s.loaded.model; })
        .def("run", [](const PySimulator& s, std::optional<std::uint64_t> seed, std::optional<std::string> attack,
                       std::optional<double> duration) {
            const auto cfg = configure(s.loaded.scenario, seed, attack, duration);
            RunResult res;
            {
                py::gil_scoped_release nogil;
                res = s.sim->run(cfg);
            }
            return py::make_tuple(to_py(summary_to_json(res.summary)), trace_dict(res.trace));
        }, py::arg("seed") = py::none(), py::arg("attack") = py::none(), py::arg("duration") = py::none())
        .def("sweep", [](const PySimulator& s, std::uint64_t first, std::uint64_t last,
                         std::optional<std::string> attack, unsigned workers) {
            const auto cfg = configure(s.loaded.scenario, std::nullopt, attack, std::nullopt);
            std::vector<RunSummary> out;
            {
                py::gil_scoped_release nogil;
                out = sweep(*s.sim, cfg, first, last, workers);
            }
            py::list l;
            for (const auto& r : out) l.append(to_py(summary_to_json(r)));
            return l;
        }, py::arg("first"), py::arg("last"), py::arg("attack") = py::none(), py::arg("workers") = 0);
}
