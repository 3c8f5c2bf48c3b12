#include "cdad/continuous_observer.hpp"

#include "cdad/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace cdad {

const KalmanGain& KalmanBank::at(StateId q) const
{
    auto it = gains.find(q);
    if (it == gains.end()) throw PreconditionError("no Kalman gain for state " + std::to_string(q));
    return it->second;
}

Matrix process_covariance(const HybridAutomaton& model)
{
    const Vector sd = model.noise.w / 3.0;
    return sd.array().square().matrix().asDiagonal();
}

Matrix measurement_covariance(const HybridAutomaton& model)
{
    const Vector sd = model.noise.v / 3.0;
    return sd.array().square().matrix().asDiagonal();
}

namespace {

KalmanGain solve_riccati(const Matrix& A, const Matrix& W, const Matrix& V, StateId q)
{
    const auto n = A.rows();
    const Matrix I = Matrix::Identity(n, n);
    KalmanGain g;
    Matrix P = A * A.transpose() + W + I;  // any positive definite start converges
    double inc = 0.0;
    for (int it = 1; it <= kRiccatiMaxIterations; ++it) {
        const Matrix S = P + V;
        const Matrix K = S.transpose().ldlt().solve(P.transpose()).transpose();
        const Matrix Ppost = (I - K) * P;
        Matrix Pn = A * Ppost * A.transpose() + W;
        Pn = 0.5 * (Pn + Pn.transpose());
        inc = (Pn - P).cwiseAbs().maxCoeff();
        P = Pn;
        if (!std::isfinite(inc)) break;
        if (inc < kRiccatiTolerance) {
            g.iterations = it;
            g.final_increment = inc;
            g.P_prior = P;
            g.K = (P + V).transpose().ldlt().solve(P.transpose()).transpose();
            g.P_posterior = (I - g.K) * P;
            break;
        }
    }
    if (g.iterations == 0)
        throw SynthesisError("Riccati recursion did not converge for state " + std::to_string(q) +
                             " (last increment " + std::to_string(inc) + ")");

    const Matrix closed = A - g.K * A;
    Eigen::EigenSolver<Matrix> es(closed, false);
    if (es.eigenvalues().cwiseAbs().maxCoeff() >= 1.0)
        throw SynthesisError("closed-loop estimator for state " + std::to_string(q) +
                             " is not stable");
    return g;
}

}  // namespace

KalmanBank synthesize_gains(const HybridAutomaton& model)
{
    model.check_structure();
    const Matrix W = process_covariance(model);
    const Matrix V = measurement_covariance(model);
    KalmanBank bank;
    for (const auto& s : model.states)
        if (s.nominal) bank.gains.emplace(s.id, solve_riccati(s.dynamics.A, W, V, s.id));
    return bank;
}

ContinuousEstimate initial_estimate(const HybridAutomaton& model, const Vector& y)
{
    if (!y.allFinite()) throw NumericError("non-finite measurement");
    ContinuousEstimate e;
    e.x_hat = y;
    e.residual = Vector::Zero(y.size());
    e.steady = model.dwell_time == 0;
    e.error_bound = model.theta;
    return e;
}

ContinuousEstimate step_continuous(const KalmanBank& bank, const HybridAutomaton& model,
                                   StateId q, const Vector& x_hat, const Vector& u,
                                   const Vector& y, long samples_elapsed)
{
    const auto& dyn = model.state(q).dynamics;
    if (x_hat.size() != dyn.A.rows() || y.size() != dyn.A.rows() || u.size() != dyn.B.cols())
        throw PreconditionError("step_continuous: dimension mismatch");
    if (!x_hat.allFinite() || !u.allFinite() || !y.allFinite())
        throw NumericError("step_continuous: non-finite input");

    const Matrix& K = bank.at(q).K;
    const Vector pred = dyn.A * x_hat + dyn.B * u;
    ContinuousEstimate e;
    e.x_hat = pred + K * (y - pred);
    e.residual = y - e.x_hat;
    e.steady = samples_elapsed >= model.dwell_time;
    e.error_bound = model.theta;
    return e;
}

bool check_dwell(const HybridAutomaton& model, const std::vector<long>& event_times)
{
    for (std::size_t i = 1; i < event_times.size(); ++i)
        if (event_times[i] - (event_times[i - 1] + 1) <= model.dwell_time) return false;
    return true;
}

}  // namespace cdad
