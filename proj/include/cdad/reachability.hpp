#pragma once

#include "cdad/hybrid_model.hpp"

#include <map>

namespace cdad {

/// {center + G b : b in [-1, 1]^p}
class Zonotope {
public:
    Zonotope() = default;
    Zonotope(Vector center, Matrix generators);

    static Zonotope point(const Vector& c);
    static Zonotope from_box(const Box& box);

    std::size_t dim() const { return static_cast<std::size_t>(center_.size()); }
    std::size_t order() const { return static_cast<std::size_t>(generators_.cols()); }
    const Vector& center() const { return center_; }
    const Matrix& generators() const { return generators_; }

    /// Half-width of the hull on each axis: sum of |g_ij| over generators.
    Vector radius() const;
    Box interval_hull() const;
    /// Every generator has at most one nonzero coordinate.
    bool is_axis_aligned() const;
    /// Point for a given coefficient vector b in [-1, 1]^p.
    Vector at(const Vector& b) const;

private:
    Vector center_;
    Matrix generators_;
};

Zonotope linear_map(const Matrix& M, const Zonotope& z);
/// Minkowski sum with the infinity-ball of radius sigma.
Zonotope inflate(const Zonotope& z, double sigma);

/// Induced infinity norm (max absolute row sum).
double inf_norm(const Matrix& M);

/// Accumulated disturbance radius after `steps` steps in state q.
double noise_radius(const HybridAutomaton& model, StateId q, int steps);

/// A_q^steps Z inflated by noise_radius(q, steps).
Zonotope reach(const HybridAutomaton& model, StateId q, const Zonotope& z, int steps);

/// Exact closed-set intersection test.
bool intersects_box(const Zonotope& z, const Box& box);

inline constexpr int kDeltaSearchCap = 10000;

/// Guard facet used as the start set of the horizon search: the guard
/// hyperplane cut with Inv_q and the target invariant, falling back to Inv_q
/// alone when the target invariant misses the plane.
Box guard_facet(const HybridAutomaton& model, std::size_t transition);

struct DeltaResult {
    StateId state = 0;
    int delta = 0;
    std::map<std::size_t, int> per_guard;  ///< transition index -> horizon
};

DeltaResult compute_delta(const HybridAutomaton& model, const RegionDecomposition& regions,
                          StateId q);
std::map<StateId, DeltaResult> compute_all_deltas(const HybridAutomaton& model);

}  // namespace cdad
