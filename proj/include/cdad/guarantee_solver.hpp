#pragma once

#include "cdad/reachability.hpp"

#include <limits>
#include <map>
#include <optional>

namespace cdad {

inline constexpr double kUnavailable = std::numeric_limits<double>::infinity();
inline constexpr double kBisectionTolerance = 1e-9;

/// theta + 2 v, v being the largest measurement-noise bound.
double estimation_margin(const HybridAutomaton& model);

/// One guard's robust problems in reflected coordinates: sign * x[axis] is the
/// coordinate that grows toward the guard, and every threshold below is in
/// that coordinate.
struct GuardProblem {
    int axis = 0;
    int sign = 1;
    double threshold = 0.0;  ///< c_G
    double neighbor = 0.0;   ///< c_L
    double epsilon = 0.0;
    Box invariant;           ///< source invariant, original coordinates
    Vector row_next;         ///< sign * row `axis` of the target state's A
    double sigma_next = 0.0; ///< one-step disturbance of the target state
    int delta = 0;
    Vector row_horizon;      ///< sign * row `axis` of A_q^delta
    double sigma_horizon = 0.0;
    double margin = 0.0;     ///< theta + 2 v
};

GuardProblem make_guard_problem(const HybridAutomaton& model, const RegionDecomposition& regions,
                                std::size_t transition, int delta);

double solve_z_star(const GuardProblem& problem);
double solve_d_star(const GuardProblem& problem);

/// Largest one-step reach of the guard facet along the guard direction
/// (reflected coordinates, so it is comparable with the guard threshold).
double guard_epsilon(const HybridAutomaton& model, std::size_t transition);

/// Smallest injected offset that is guaranteed to trip Conflict B right after
/// the guard is crossed. Throws GeometryError when the search slab is empty.
double solve_z_star(const HybridAutomaton& model, const RegionDecomposition& regions,
                    std::size_t transition);

/// Smallest offset past the guard that is guaranteed to trip Conflict C with
/// horizon `delta`; kUnavailable when none exists inside the invariant or when
/// delta is 0.
double solve_d_star(const HybridAutomaton& model, const RegionDecomposition& regions,
                    std::size_t transition, int delta);

/// max a.x over the box by enumerating its 2^n vertices (n <= 10).
double oracle_box_optimum(const Vector& a, const Box& box);

struct GuardBound {
    std::size_t transition = 0;
    double epsilon = 0.0;
    double z_star = 0.0;
    double d_star = kUnavailable;
};

struct StateBound {
    StateId state = 0;
    int delta = 0;
    std::vector<GuardBound> guards;
    double z_star = kUnavailable;
    double d_star = kUnavailable;
    std::optional<double> threshold;  ///< empty when no arm is available
};

/// max(z*, d*) + theta + 2v over the available arms; NoGuaranteeError if none.
double theorem1_threshold(const HybridAutomaton& model, const StateBound& bound);

std::map<StateId, StateBound> compute_bounds(const HybridAutomaton& model);

}  // namespace cdad
