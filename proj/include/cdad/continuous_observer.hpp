#pragma once

#include "cdad/hybrid_model.hpp"

#include <map>
#include <vector>

namespace cdad {

struct KalmanGain {
    Matrix K;
    Matrix P_prior;      ///< steady-state one-step prediction covariance
    Matrix P_posterior;  ///< steady-state filtered covariance
    int iterations = 0;
    double final_increment = 0.0;
};

/// Steady-state gains, one per nominal discrete state.
struct KalmanBank {
    std::map<StateId, KalmanGain> gains;

    const KalmanGain& at(StateId q) const;
};

inline constexpr double kRiccatiTolerance = 1e-9;
inline constexpr int kRiccatiMaxIterations = 100000;

/// Noise covariances are diagonal with standard deviation bound/3.
Matrix process_covariance(const HybridAutomaton& model);
Matrix measurement_covariance(const HybridAutomaton& model);

/// Iterates the discrete Riccati recursion to a fixed point for every nominal
/// state and checks that A - K A is Schur stable.
KalmanBank synthesize_gains(const HybridAutomaton& model);

struct ContinuousEstimate {
    Vector x_hat;
    Vector residual;  ///< y - x_hat
    bool steady = false;
    double error_bound = 0.0;
};

/// First sample: no prior estimate, so the measurement is taken as the estimate.
ContinuousEstimate initial_estimate(const HybridAutomaton& model, const Vector& y);

/// One predict/update with the gain of discrete state q. `u` is the input applied
/// over the previous sampling period; `samples_elapsed` counts samples since the
/// filter started and drives the steady flag.
ContinuousEstimate step_continuous(const KalmanBank& bank, const HybridAutomaton& model,
                                   StateId q, const Vector& x_hat, const Vector& u,
                                   const Vector& y, long samples_elapsed);

/// True when every gap between consecutive event samples exceeds the dwell time.
bool check_dwell(const HybridAutomaton& model, const std::vector<long>& event_times);

}  // namespace cdad
