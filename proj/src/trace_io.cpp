#include "cdad/simulator.hpp"

#include <iomanip>
#include <ostream>

namespace cdad {

using nlohmann::json;

namespace {

void put_vector(std::ostream& os, const Vector& v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << v(i);
}

void put_header(std::ostream& os, const char* prefix, Eigen::Index n)
{
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << prefix << i;
}

json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace)
{
    const Eigen::Index n = trace.empty() ? 0 : trace.front().x.size();
    os << "k,t";
    put_header(os, "x", n);
    put_header(os, "y", n);
    put_header(os, "x_hat", n);
    put_header(os, "r", n);
    put_header(os, "attack", n);
    os << ",q,q_hat,steady,detecting,conflict_a,conflict_b,conflict_c,alarm,volume,"
          "residual_norm,error_norm,safety_violation,event\n";
    const auto old = os.precision(12);
    for (const auto& r : trace) {
        os << r.k << ',' << r.t;
        put_vector(os, r.x);
        put_vector(os, r.y);
        put_vector(os, r.x_hat);
        put_vector(os, r.residual);
        put_vector(os, r.attack);
        os << ',' << r.q << ",\"" << to_string(r.node) << "\"," << r.steady << ',' << r.detecting << ','
           << r.conflict_a << ',' << r.conflict_b << ',' << r.conflict_c << ',' << r.alarm() << ','
           << r.volume << ',' << r.residual_norm << ',' << r.error_norm << ',' << r.safety_violation
           << ',';
        if (r.event) os << *r.event;
        os << '\n';
    }
    os.precision(old);
}

void write_trace_jsonl(std::ostream& os, const std::vector<TraceRecord>& trace)
{
    for (const auto& r : trace) {
        json j{{"k", r.k},
               {"t", r.t},
               {"x", vec(r.x)},
               {"y", vec(r.y)},
               {"x_hat", vec(r.x_hat)},
               {"r", vec(r.residual)},
               {"attack", vec(r.attack)},
               {"q", r.q},
               {"q_hat", r.node},
               {"steady", r.steady},
               {"detecting", r.detecting},
               {"conflict_a", r.conflict_a},
               {"conflict_b", r.conflict_b},
               {"conflict_c", r.conflict_c},
               {"alarm", r.alarm()},
               {"volume", r.volume},
               {"residual_norm", r.residual_norm},
               {"error_norm", r.error_norm},
               {"safety_violation", r.safety_violation}};
        j["event"] = r.event ? json(*r.event) : json(nullptr);
        os << j.dump() << '\n';
    }
}

json summary_to_json(const RunSummary& s)
{
    json j{{"seed", s.seed},
           {"samples", s.samples},
           {"end_time", s.end_time},
           {"halted", s.halted},
           {"residual_threshold", s.residual_threshold},
           {"dwell_ok", s.dwell_ok},
           {"unsupported", s.unsupported},
           {"max_residual_steady", s.max_residual_steady},
           {"max_error_steady", s.max_error_steady},
           {"max_volume", s.max_volume},
           {"volume_bound", s.volume_bound},
           {"observer_consistent", s.observer_consistent},
           {"conflict_count", s.conflict_count}};
    if (s.conflict_alarm) {
        const auto& a = *s.conflict_alarm;
        j["conflict_alarm"] = {{"t", a.t},           {"k", a.k},
                               {"state", a.state},   {"conflict_a", a.conflict_a},
                               {"conflict_b", a.conflict_b}, {"conflict_c", a.conflict_c}};
    } else {
        j["conflict_alarm"] = nullptr;
    }
    j["residual_alarm"] = s.residual_alarm ? json(*s.residual_alarm) : json(nullptr);
    if (s.violation)
        j["safety_violation"] = {{"t", s.violation->t}, {"k", s.violation->k}, {"x", vec(s.violation->x)}};
    else
        j["safety_violation"] = nullptr;
    j["events"] = json::array();
    for (const auto& e : s.events)
        j["events"].push_back({{"t", e.t},
                               {"k", e.k},
                               {"transition", e.transition},
                               {"source", e.source},
                               {"target", e.target},
                               {"input", e.pair.input},
                               {"output", e.pair.output},
                               {"x", vec(e.x)}});
    return j;
}

}  // namespace cdad
