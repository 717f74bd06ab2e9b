#pragma once

#include "qnet/sim_time.h"

namespace qnet {

/// Fidelity of a Werner state with respect to Phi+. Always within [1/4, 1].
class WernerFidelity {
public:
    static constexpr double kMixed = 0.25;

    /// Throws std::domain_error outside [1/4, 1] (a 1e-12 tolerance absorbs rounding).
    explicit WernerFidelity(double value);

    double value() const { return value_; }

    /// Weight of the Phi+ projector in the Werner decomposition, (4F - 1) / 3.
    double werner_parameter() const { return (4.0 * value_ - 1.0) / 3.0; }

    auto operator<=>(const WernerFidelity&) const = default;

private:
    double value_;
};

/// Noise and hardware parameters shared by the physics formulas.
///
/// `gate_error` and `measurement_error` are the depolarizing probability of a
/// two-qubit gate and the classical flip probability of a single-qubit
/// measurement.
struct NoiseParams {
    double gate_error = 0.01;
    double measurement_error = 0.005;
    double coherence_time_s = 2.0;
    WernerFidelity initial_fidelity{0.9};
    double attenuation_db_per_km = 0.2;
    double repetition_rate_hz = 1e10;
    double light_speed_km_per_s = 2e5;

    /// Throws InvalidParameter naming the first offending field.
    void validate() const;
};

/// Storage decay of a pair held in two memories with coherence time tau for t.
WernerFidelity decay_fidelity(WernerFidelity in, double t_s, double tau_s);

/// Output fidelity of a noisy entanglement swap on two Werner pairs.
WernerFidelity swap_fidelity(WernerFidelity f1, WernerFidelity f2, const NoiseParams& p);

/// Heralded generation success per attempt: fiber transmittance over the
/// whole link times the 1/2 linear-optics Bell-state-analyzer ceiling.
double link_success_probability(const NoiseParams& p, double link_length_km);

/// Time between generation attempts on a link: the emission period, floored
/// by the heralding round trip to the midpoint analyzer.
double attempt_period(const NoiseParams& p, double link_length_km);

SimTime attempt_period_time(const NoiseParams& p, double link_length_km);

} // namespace qnet
