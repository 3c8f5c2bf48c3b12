#include "cdad/model_io.hpp"

#include "cdad/errors.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace cdad {

using nlohmann::json;

namespace io {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where)
{
    if (!obj.is_object()) throw ModelError(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj.items())
        if (!ok.count(item.key())) throw ModelError(where + ": unknown key '" + item.key() + "'");
}

Vector to_vector(const json& arr, const std::string& where)
{
    if (!arr.is_array()) throw ModelError(where + ": expected an array of numbers");
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw ModelError(where + ": expected a number");
        v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    return v;
}

Matrix to_matrix(const json& rows, const std::string& where)
{
    if (!rows.is_array() || rows.empty()) throw ModelError(where + ": expected a non-empty array of rows");
    const std::size_t cols = rows[0].is_array() ? rows[0].size() : 0;
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!rows[r].is_array() || rows[r].size() != cols)
            throw ModelError(where + ": ragged matrix rows");
        m.row(static_cast<Eigen::Index>(r)) = to_vector(rows[r], where).transpose();
    }
    return m;
}

json from_vector(const Vector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json from_matrix(const Matrix& m)
{
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(from_vector(m.row(r).transpose()));
    return out;
}

}  // namespace io

namespace {

template <typename T>
T required(const json& obj, const char* key, const std::string& where)
{
    if (!obj.contains(key)) throw ModelError(where + ": missing key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ModelError(where + ": bad value for '" + key + "': " + e.what());
    }
}

Box parse_invariant(const json& arr, const std::string& where)
{
    if (!arr.is_array()) throw ModelError(where + ": invariant must be a list of [lo, hi]");
    std::vector<Interval> axes;
    for (const auto& iv : arr) {
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
            throw ModelError(where + ": invariant entries must be [lo, hi]");
        axes.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
    return Box(std::move(axes));
}

}  // namespace

HybridAutomaton model_from_json(const json& doc)
{
    io::reject_unknown_keys(doc,
                            {"name", "states", "events", "transitions", "noise", "input_bound",
                             "sampling_period", "dwell_time", "theta", "scenario"},
                            "model");
    HybridAutomaton m;
    m.name = doc.value("name", std::string{});

    for (const auto& s : required<json>(doc, "states", "model")) {
        io::reject_unknown_keys(s, {"id", "A", "B", "invariant", "nominal"}, "state");
        DiscreteState st;
        st.id = required<int>(s, "id", "state");
        const std::string where = "state " + std::to_string(st.id);
        st.dynamics.A = io::to_matrix(required<json>(s, "A", where), where + " A");
        st.dynamics.B = io::to_matrix(required<json>(s, "B", where), where + " B");
        st.invariant = parse_invariant(required<json>(s, "invariant", where), where);
        st.nominal = s.value("nominal", true);
        m.states.push_back(std::move(st));
    }

    for (const auto& e : required<json>(doc, "events", "model")) {
        io::reject_unknown_keys(e, {"id", "kind", "observable"}, "event");
        Event ev;
        ev.id = required<std::string>(e, "id", "event");
        const auto kind = required<std::string>(e, "kind", "event " + ev.id);
        if (kind == "input")
            ev.kind = EventKind::input;
        else if (kind == "output")
            ev.kind = EventKind::output;
        else
            throw ModelError("event " + ev.id + ": kind must be 'input' or 'output'");
        ev.observable = e.value("observable", true);
        m.events.push_back(std::move(ev));
    }

    for (const auto& t : required<json>(doc, "transitions", "model")) {
        io::reject_unknown_keys(t, {"source", "input_event", "output_event", "target", "guard"},
                                "transition");
        Transition tr;
        tr.source = required<int>(t, "source", "transition");
        tr.target = required<int>(t, "target", "transition");
        tr.input_event = required<std::string>(t, "input_event", "transition");
        tr.output_event = required<std::string>(t, "output_event", "transition");
        if (t.contains("guard")) {
            const auto& g = t.at("guard");
            io::reject_unknown_keys(g, {"axis", "sign", "threshold"}, "guard");
            tr.guard = Guard{required<int>(g, "axis", "guard"), required<int>(g, "sign", "guard"),
                             required<double>(g, "threshold", "guard")};
        }
        m.transitions.push_back(std::move(tr));
    }

    const auto& noise = required<json>(doc, "noise", "model");
    io::reject_unknown_keys(noise, {"w", "v"}, "noise");
    m.noise.w = io::to_vector(required<json>(noise, "w", "noise"), "noise.w");
    m.noise.v = io::to_vector(required<json>(noise, "v", "noise"), "noise.v");
    m.input_bound = required<double>(doc, "input_bound", "model");
    m.sampling_period = required<double>(doc, "sampling_period", "model");
    m.dwell_time = required<int>(doc, "dwell_time", "model");
    m.theta = required<double>(doc, "theta", "model");

    m.check_structure();
    return m;
}

HybridAutomaton parse_model(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError(std::string("model is not valid JSON: ") + e.what());
    }
    return model_from_json(doc);
}

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ModelError(path.string() + " is not valid JSON: " + e.what());
    }
}

HybridAutomaton load_model(const std::filesystem::path& path)
{
    return model_from_json(read_json_file(path));
}

json model_to_json(const HybridAutomaton& m)
{
    json doc;
    if (!m.name.empty()) doc["name"] = m.name;
    doc["states"] = json::array();
    for (const auto& s : m.states) {
        json inv = json::array();
        for (const auto& iv : s.invariant.axes()) inv.push_back({iv.lo, iv.hi});
        json js{{"id", s.id},
                {"A", io::from_matrix(s.dynamics.A)},
                {"B", io::from_matrix(s.dynamics.B)},
                {"invariant", inv}};
        if (!s.nominal) js["nominal"] = false;
        doc["states"].push_back(std::move(js));
    }
    doc["events"] = json::array();
    for (const auto& e : m.events)
        doc["events"].push_back({{"id", e.id},
                                 {"kind", e.kind == EventKind::input ? "input" : "output"},
                                 {"observable", e.observable}});
    doc["transitions"] = json::array();
    for (const auto& t : m.transitions) {
        json jt{{"source", t.source},
                {"input_event", t.input_event},
                {"output_event", t.output_event},
                {"target", t.target}};
        if (t.guard)
            jt["guard"] = {{"axis", t.guard->axis},
                           {"sign", t.guard->sign},
                           {"threshold", t.guard->threshold}};
        doc["transitions"].push_back(std::move(jt));
    }
    doc["noise"] = {{"w", io::from_vector(m.noise.w)}, {"v", io::from_vector(m.noise.v)}};
    doc["input_bound"] = m.input_bound;
    doc["sampling_period"] = m.sampling_period;
    doc["dwell_time"] = m.dwell_time;
    doc["theta"] = m.theta;
    return doc;
}

}  // namespace cdad
