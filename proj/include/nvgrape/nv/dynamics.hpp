#pragma once

#include <complex>

#include <Eigen/Core>

#include "nvgrape/nv/params.hpp"

namespace nvgrape::nv {

// Real state layout: nine populations followed by (Re, Im) of the
// coherences <s12>, <s13>, <s23>. The conjugate coherences are implied.
inline constexpr int kStateDim = 15;
inline constexpr int kIdxC12 = 9;
inline constexpr int kIdxC13 = 11;
inline constexpr int kIdxC23 = 13;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using Generator = Eigen::Matrix<double, kStateDim, kStateDim>;

class NvState {
public:
    NvState() : values_(StateVector::Zero()) {}
    explicit NvState(const StateVector& values) : values_(values) {}

    // Pure state in a single level (1-based label).
    static NvState in_level(int level);

    // 1-based level label, as in the model's level scheme.
    double population(int level) const { return values_(level - 1); }
    double& population(int level) { return values_(level - 1); }

    std::complex<double> c12() const { return {values_(kIdxC12), values_(kIdxC12 + 1)}; }
    std::complex<double> c13() const { return {values_(kIdxC13), values_(kIdxC13 + 1)}; }
    std::complex<double> c23() const { return {values_(kIdxC23), values_(kIdxC23 + 1)}; }

    double total_population() const { return values_.head<kLevels>().sum(); }

    const StateVector& values() const { return values_; }
    StateVector& values() { return values_; }

    // Set when steady_state clamped round-off negative populations to zero.
    bool clamped = false;

private:
    StateVector values_;
};

// state' = generator * state.
struct LinearDynamics {
    Generator generator = Generator::Zero();
    NvModelParams params;

    StateVector derivative(const StateVector& x) const { return generator * x; }
};

// The coherence equations carry the decay bracket as a multiplier of the
// coherence itself. The drive term of d<s12>/dt includes the <s32>
// cross-coupling between the two microwave branches, and each decay
// bracket uses exactly the rates listed in the model equations.
LinearDynamics build_system(const NvModelParams& params);

struct SteadyStateOptions {
    // Bound on ||M x||_inf / ||M||_inf after normalisation.
    double residual_tolerance = 1e-9;
    // Negative populations above -tolerance are clamped to zero.
    double positivity_tolerance = 1e-10;
};

// Solves M x = 0 with sum(p) = 1 by swapping the p1 row for the
// normalisation row. Throws NumericError if that system is singular.
NvState steady_state(const LinearDynamics& system, const SteadyStateOptions& options = {});

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    // Smallest step, relative to max(|t|, t_final), before giving up.
    double min_step_fraction = 1e-14;
    long max_steps = 2'000'000;
};

struct IntegrationStats {
    long accepted = 0;
    long rejected = 0;
};

// Adaptive TR-BDF2 (L-stable, second order) with step-doubling error
// control. dt is the initial step. Linear invariants such as sum(p) are
// preserved to round-off.
NvState time_evolve(const LinearDynamics& system, const NvState& initial, double t_final,
                    double dt, const IntegratorOptions& options = {},
                    IntegrationStats* stats = nullptr);

// Total NV- excited-state radiative emission rate Gamma_sp (p4 + p5 + p6),
// plus Gamma_sp0 p9 when params.include_nv0_emission is set.
double photoluminescence(const NvState& state, const NvModelParams& params);

} // namespace nvgrape::nv
