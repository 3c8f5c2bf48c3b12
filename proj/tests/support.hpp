#pragma once

#include "cdad/hybrid_model.hpp"
#include "cdad/simulator.hpp"

#include <Eigen/Eigenvalues>

#include <random>

namespace cdad::test {

inline HybridAutomaton train_gate() { return builtin_train_gate(); }

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows)
{
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

inline Vector vec(std::initializer_list<double> vals)
{
    Vector v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v(i++) = x;
    return v;
}

/// One state, scalar dynamics x+ = a x + b u + w, invariant [lo, hi] and a
/// self-loop guard x >= threshold.
inline HybridAutomaton scalar_model(double a, double b, double mu, double w, double lo, double hi,
                                    double threshold)
{
    HybridAutomaton m;
    m.name = "scalar";
    m.states.push_back({1, {mat({{a}}), mat({{b}})}, Box({{lo, hi}}), true});
    m.events = {{"go", EventKind::input, true}, {"seen", EventKind::output, true}};
    m.transitions.push_back({1, "go", "seen", 1, Guard{0, 1, threshold}});
    m.noise = {vec({w}), vec({0.0})};
    m.input_bound = mu;
    m.sampling_period = 1.0;
    m.dwell_time = 0;
    m.theta = 0.0;
    return m;
}

/// Stable or marginally stable random matrix: random entries scaled so the
/// spectral radius is at most `rho`.
inline Matrix random_stable(std::mt19937_64& gen, int n, double rho)
{
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = d(gen);
    Eigen::EigenSolver<Matrix> es(A, false);
    const double r = es.eigenvalues().cwiseAbs().maxCoeff();
    return r > 0 ? Matrix(A * (rho / r)) : A;
}

}  // namespace cdad::test
