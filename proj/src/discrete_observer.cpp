#include "cdad/discrete_observer.hpp"

#include "cdad/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace cdad {

std::optional<std::size_t> ObserverFsm::find(const ObserverNode& node) const
{
    auto it = std::find(nodes.begin(), nodes.end(), node);
    if (it == nodes.end()) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
}

std::vector<EventPair> ObserverFsm::active_pairs(std::size_t node) const
{
    std::vector<EventPair> out;
    for (const auto& [key, target] : transitions)
        if (key.first == node) out.push_back(key.second);
    return out;
}

ObserverFsm build_observer(const Fsm& fsm)
{
    ObserverFsm obs;
    ObserverNode root = fsm.states;
    std::sort(root.begin(), root.end());
    obs.nodes.push_back(root);
    obs.root = 0;

    std::deque<std::size_t> pending{0};
    while (!pending.empty()) {
        const std::size_t cur = pending.front();
        pending.pop_front();
        const ObserverNode members = obs.nodes[cur];

        std::map<EventPair, std::set<StateId>> successors;
        for (const auto& t : fsm.transitions)
            if (std::binary_search(members.begin(), members.end(), t.source))
                successors[{t.input_event, t.output_event}].insert(t.target);

        for (const auto& [pair, targets] : successors) {
            ObserverNode next(targets.begin(), targets.end());
            auto idx = obs.find(next);
            if (!idx) {
                obs.nodes.push_back(next);
                idx = obs.nodes.size() - 1;
                pending.push_back(*idx);
            }
            obs.transitions[{cur, pair}] = *idx;
        }
    }

    const auto verdict = check_current_state_observability(obs);
    if (verdict.observable) obs.k = verdict.k;
    return obs;
}

Observability check_current_state_observability(const ObserverFsm& obs)
{
    const std::size_t n = obs.nodes.size();
    std::vector<std::vector<std::size_t>> succ(n);
    for (const auto& [key, target] : obs.transitions) succ[key.first].push_back(target);

    auto reachable_from = [&](std::size_t start) {
        std::vector<bool> seen(n, false);
        std::deque<std::size_t> q;
        for (std::size_t s : succ[start]) q.push_back(s);
        while (!q.empty()) {
            const std::size_t v = q.front();
            q.pop_front();
            if (seen[v]) continue;
            seen[v] = true;
            for (std::size_t s : succ[v]) q.push_back(s);
        }
        return seen;
    };

    // Nodes reachable along arbitrarily long runs: anything on or after a cycle.
    std::vector<bool> unbounded(n, false);
    for (std::size_t v = 0; v < n; ++v) {
        const auto r = reachable_from(v);
        if (!r[v]) continue;
        unbounded[v] = true;
        for (std::size_t u = 0; u < n; ++u)
            if (r[u]) unbounded[u] = true;
    }

    Observability out;
    for (std::size_t v = 0; v < n; ++v)
        if (unbounded[v] && obs.nodes[v].size() > 1) out.offending.push_back(obs.nodes[v]);
    if (!out.offending.empty()) return out;

    // The non-singleton nodes now live in an acyclic prefix; k is one past the
    // longest root path that still ends in one of them.
    std::vector<std::vector<std::size_t>> pred(n);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t s : succ[v])
            if (!unbounded[v] && !unbounded[s]) pred[s].push_back(v);
    // Longest root path to v through bounded nodes, -1 if none.
    std::vector<int> memo(n, -2);
    std::function<int(std::size_t)> depth_to = [&](std::size_t v) -> int {
        if (memo[v] != -2) return memo[v];
        int best = (v == obs.root) ? 0 : -1;
        for (std::size_t p : pred[v]) {
            const int d = depth_to(p);
            if (d >= 0) best = std::max(best, d + 1);
        }
        return memo[v] = best;
    };

    int k = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (unbounded[v] || obs.nodes[v].size() <= 1) continue;
        const int d = depth_to(v);
        if (d >= 0) k = std::max(k, d + 1);
    }
    out.observable = true;
    out.k = k;
    return out;
}

std::size_t step_discrete(const ObserverFsm& obs, std::size_t node, const EventPair& pair)
{
    if (node >= obs.nodes.size()) throw PreconditionError("observer node index out of range");
    auto it = obs.transitions.find({node, pair});
    if (it == obs.transitions.end())
        throw DiscreteInconsistency("event pair (" + pair.input + ", " + pair.output +
                                    ") is not active at node " + to_string(obs.nodes[node]));
    return it->second;
}

std::string to_string(const ObserverNode& node)
{
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < node.size(); ++i) os << (i ? "," : "") << node[i];
    os << '}';
    return os.str();
}

}  // namespace cdad
