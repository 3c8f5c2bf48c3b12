#pragma once

#include "cdad/hybrid_model.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cdad {

/// Observed (input, output) event pair.
struct EventPair {
    std::string input;
    std::string output;
    friend auto operator<=>(const EventPair&, const EventPair&) = default;
};

/// Set of candidate discrete states, sorted by id.
using ObserverNode = std::vector<StateId>;

struct ObserverFsm {
    std::vector<ObserverNode> nodes;
    std::size_t root = 0;
    std::map<std::pair<std::size_t, EventPair>, std::size_t> transitions;
    std::optional<int> k;  ///< observability horizon, empty when not current-state observable

    std::optional<std::size_t> find(const ObserverNode& node) const;
    std::vector<EventPair> active_pairs(std::size_t node) const;
    const ObserverNode& node(std::size_t index) const { return nodes.at(index); }
};

/// Subset construction from the unknown-initial-state root Q_n.
ObserverFsm build_observer(const Fsm& fsm);

struct Observability {
    bool observable = false;
    int k = 0;
    /// Non-singleton nodes that stay reachable along arbitrarily long runs.
    std::vector<ObserverNode> offending;
};

Observability check_current_state_observability(const ObserverFsm& obs);

/// Successor node; throws DiscreteInconsistency when the pair is not active.
std::size_t step_discrete(const ObserverFsm& obs, std::size_t node, const EventPair& pair);

std::string to_string(const ObserverNode& node);

}  // namespace cdad
