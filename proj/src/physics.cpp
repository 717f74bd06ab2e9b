#include "qnet/physics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qnet/error.h"

namespace qnet {

namespace {
constexpr double kRangeSlack = 1e-12;
}

WernerFidelity::WernerFidelity(double value)
{
    if (!(value >= kMixed - kRangeSlack && value <= 1.0 + kRangeSlack))
        throw std::domain_error("Werner fidelity " + std::to_string(value) + " outside [0.25, 1]");
    value_ = std::clamp(value, kMixed, 1.0);
}

void NoiseParams::validate() const
{
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(gate_error))
        throw InvalidParameter("gate_error must be in [0, 1]");
    if (!unit(measurement_error))
        throw InvalidParameter("measurement_error must be in [0, 1]");
    if (!(coherence_time_s > 0.0))
        throw InvalidParameter("coherence_time_s must be > 0");
    if (!(attenuation_db_per_km >= 0.0))
        throw InvalidParameter("attenuation_db_per_km must be >= 0");
    if (!(repetition_rate_hz > 0.0))
        throw InvalidParameter("repetition_rate_hz must be > 0");
    if (!(light_speed_km_per_s > 0.0))
        throw InvalidParameter("light_speed_km_per_s must be > 0");
}

WernerFidelity decay_fidelity(WernerFidelity in, double t_s, double tau_s)
{
    if (!(t_s >= 0.0))
        throw InvalidParameter("decay_fidelity: storage time must be >= 0");
    if (!(tau_s > 0.0))
        throw InvalidParameter("decay_fidelity: coherence time must be > 0");
    // Written around the fixed point 1/4 so that composition is exact up to
    // rounding and decay(1/4, t) == 1/4.
    const double retained = std::exp(-2.0 * t_s / tau_s);
    return WernerFidelity{WernerFidelity::kMixed + (in.value() - WernerFidelity::kMixed) * retained};
}

WernerFidelity swap_fidelity(WernerFidelity f1, WernerFidelity f2, const NoiseParams& p)
{
    const double F1 = f1.value();
    const double F2 = f2.value();
    const double e1 = (1.0 - F1) / 3.0;
    const double e2 = (1.0 - F2) / 3.0;
    const double pg = p.gate_error;
    const double pm = p.measurement_error;

    const double both = e1 * e2; // grouped so the result is exactly symmetric
    const double correct = F1 * F2 + 3.0 * both;        // Phi+ after an ideal swap
    const double flipped = F1 * e2 + e1 * F2 + 2.0 * both; // each other Bell state
    // Both outcomes read correctly with (1-pm)^2; any misread maps a residual
    // Bell error back onto Phi+ with total weight pm(2-pm).
    const double body = (1.0 - pm) * (1.0 - pm) * correct + pm * (2.0 - pm) * flipped;
    return WernerFidelity{pg / 4.0 + (1.0 - pg) * body};
}

double link_success_probability(const NoiseParams& p, double link_length_km)
{
    if (!(link_length_km > 0.0))
        throw InvalidParameter("link_success_probability: link length must be > 0");
    const double half = link_length_km / 2.0;
    const double arm = std::pow(10.0, -p.attenuation_db_per_km * half / 10.0);
    return 0.5 * arm * arm;
}

double attempt_period(const NoiseParams& p, double link_length_km)
{
    if (!(link_length_km >= 0.0))
        throw InvalidParameter("attempt_period: link length must be >= 0");
    return std::max(1.0 / p.repetition_rate_hz, link_length_km / p.light_speed_km_per_s);
}

SimTime attempt_period_time(const NoiseParams& p, double link_length_km)
{
    return std::max(SimTime::from_ps(1), SimTime::from_seconds(attempt_period(p, link_length_km)));
}

} // namespace qnet
