#include "nvgrape/nv/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "nvgrape/errors.hpp"

namespace nvgrape::nv {

NvState NvState::in_level(int level) {
    if (level < 1 || level > kLevels) {
        throw ConfigError("level label out of range: " + std::to_string(level));
    }
    NvState s;
    s.population(level) = 1.0;
    return s;
}

LinearDynamics build_system(const NvModelParams& params) {
    const RateTable r = resolve_rates(params);

    LinearDynamics sys;
    sys.params = params;
    Generator& m = sys.generator;
    m.setZero();

    // Zero-based population indices.
    constexpr int p1 = 0, p2 = 1, p3 = 2, p4 = 3, p5 = 4, p6 = 5, p7 = 6, p8 = 7, p9 = 8;
    constexpr int u = kIdxC12, v = kIdxC12 + 1;  // <s12>
    constexpr int s = kIdxC13, t = kIdxC13 + 1;  // <s13>
    constexpr int a = kIdxC23, b = kIdxC23 + 1;  // <s23>

    const double lam = r.pump;
    const double om = params.coupling;

    // Ground triplet. Drive contributes iOmega(<s31> - <s13> + <s21> - <s12>)
    // = 2 Omega (Im <s12> + Im <s13>) to p1.
    m(p1, p1) = -(lam + r.g21 + r.g31);
    m(p1, p2) = r.g12;
    m(p1, p3) = r.g13;
    m(p1, p4) = r.gamma_sp;
    m(p1, p7) = r.singlet_decay[0];
    m(p1, p9) = r.recombination[0];
    m(p1, v) = 2.0 * om;
    m(p1, t) = 2.0 * om;

    m(p2, p1) = r.g21;
    m(p2, p2) = -(lam + r.g12);
    m(p2, p5) = r.gamma_sp;
    m(p2, p7) = r.singlet_decay[1];
    m(p2, p9) = r.recombination[1];
    m(p2, v) = -2.0 * om;

    m(p3, p1) = r.g31;
    m(p3, p3) = -(lam + r.g13);
    m(p3, p6) = r.gamma_sp;
    m(p3, p7) = r.singlet_decay[2];
    m(p3, p9) = r.recombination[2];
    m(p3, t) = -2.0 * om;

    // Excited triplet.
    m(p4, p1) = lam;
    m(p4, p4) = -(r.gamma_sp + r.isc[0] + r.ionisation[0]);
    m(p5, p2) = lam;
    m(p5, p5) = -(r.gamma_sp + r.isc[1] + r.ionisation[1]);
    m(p6, p3) = lam;
    m(p6, p6) = -(r.gamma_sp + r.isc[2] + r.ionisation[2]);

    // Singlet.
    m(p7, p4) = r.isc[0];
    m(p7, p5) = r.isc[1];
    m(p7, p6) = r.isc[2];
    m(p7, p7) = -(r.singlet_decay[0] + r.singlet_decay[1] + r.singlet_decay[2]);

    // NV0.
    m(p8, p4) = r.ionisation[0];
    m(p8, p5) = r.ionisation[1];
    m(p8, p6) = r.ionisation[2];
    m(p8, p8) = -r.lambda_0;
    m(p8, p9) = r.gamma_sp0;
    m(p9, p8) = r.lambda_0;
    m(p9, p9) = -(r.gamma_sp0 + r.recombination[0] + r.recombination[1] + r.recombination[2]);

    const double d12 = params.detuning_12();
    const double d13 = params.detuning_13();
    const double d23 = d12 - d13;
    const double k12 = 0.5 * (r.dephasing + r.g12 + r.g21 + 2.0 * lam);
    const double k13 = 0.5 * (r.dephasing + r.g13 + r.g31 + 2.0 * lam);
    const double k23 = 0.5 * (2.0 * r.dephasing + r.g12 + r.g13 + 2.0 * lam);

    // d<s12>/dt = iOmega(<s32> + p2 - p1) - (i D12 + k12) <s12>
    m(u, u) = -k12;
    m(u, v) = d12;
    m(u, b) = om;
    m(v, u) = -d12;
    m(v, v) = -k12;
    m(v, a) = om;
    m(v, p2) = om;
    m(v, p1) = -om;

    // d<s13>/dt = iOmega(<s23> + p3 - p1) - (i D13 + k13) <s13>
    m(s, s) = -k13;
    m(s, t) = d13;
    m(s, b) = -om;
    m(t, s) = -d13;
    m(t, t) = -k13;
    m(t, a) = om;
    m(t, p3) = om;
    m(t, p1) = -om;

    // d<s23>/dt = iOmega(<s13> - <s21>) + (i(D12 - D13) - k23) <s23>
    m(a, a) = -k23;
    m(a, b) = -d23;
    m(a, v) = -om;
    m(a, t) = -om;
    m(b, a) = d23;
    m(b, b) = -k23;
    m(b, u) = -om;
    m(b, s) = om;

    return sys;
}

NvState steady_state(const LinearDynamics& system, const SteadyStateOptions& options) {
    Generator a = system.generator;
    StateVector rhs = StateVector::Zero();
    a.row(0).setZero();
    a.row(0).head<kLevels>().setOnes();
    rhs(0) = 1.0;

    // Rows span ~1e3..1e10 rad/s; equilibrate before factorising.
    for (int i = 0; i < kStateDim; ++i) {
        const double scale = a.row(i).cwiseAbs().maxCoeff();
        if (scale > 0.0) {
            a.row(i) /= scale;
            rhs(i) /= scale;
        }
    }

    Eigen::FullPivLU<Generator> lu(a);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        std::ostringstream msg;
        msg << "steady-state system is singular (rank " << lu.rank() << " of " << kStateDim
            << "); check for vanishing rates";
        throw NumericError(msg.str());
    }
    StateVector x = lu.solve(rhs);

    NvState state(x);
    for (int level = 1; level <= kLevels; ++level) {
        double& p = state.population(level);
        if (p < 0.0) {
            if (p < -options.positivity_tolerance) {
                throw NumericError("steady-state population p" + std::to_string(level) +
                                   " is negative beyond tolerance");
            }
            p = 0.0;
            state.clamped = true;
        }
    }
    if (state.clamped) {
        state.values().head<kLevels>() /= state.total_population();
    }

    const double scale = system.generator.cwiseAbs().rowwise().sum().maxCoeff();
    const double residual = (system.generator * state.values()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && residual > options.residual_tolerance * scale) {
        std::ostringstream msg;
        msg << "steady-state residual " << residual / scale << " exceeds tolerance";
        throw NumericError(msg.str());
    }
    return state;
}

namespace {

// One TR-BDF2 step for x' = M x; the trapezoidal and BDF2 stages share
// the matrix I - d h M.
class TrBdf2Stepper {
public:
    explicit TrBdf2Stepper(const Generator& m) : m_(m) {}

    StateVector step(const StateVector& y, double h) {
        if (h != cached_h_) {
            lu_.compute(Generator::Identity() - (kD * h) * m_);
            cached_h_ = h;
        }
        const StateVector yg = lu_.solve(y + (kD * h) * (m_ * y));
        return lu_.solve(kW1 * yg - kW0 * y);
    }

private:
    static constexpr double kGamma = 2.0 - 1.4142135623730951;
    static constexpr double kD = 0.5 * kGamma;
    static constexpr double kW1 = 1.0 / (kGamma * (2.0 - kGamma));
    static constexpr double kW0 = (1.0 - kGamma) * (1.0 - kGamma) / (kGamma * (2.0 - kGamma));

    const Generator& m_;
    Eigen::PartialPivLU<Generator> lu_;
    double cached_h_ = -1.0;
};

} // namespace

NvState time_evolve(const LinearDynamics& system, const NvState& initial, double t_final,
                    double dt, const IntegratorOptions& options, IntegrationStats* stats) {
    if (!std::isfinite(t_final) || t_final < 0.0) {
        throw ConfigError("t_final must be finite and non-negative");
    }
    if (t_final == 0.0) return initial;
    if (!std::isfinite(dt) || dt <= 0.0) {
        throw ConfigError("dt must be positive");
    }

    TrBdf2Stepper full(system.generator);
    TrBdf2Stepper half(system.generator);

    StateVector y = initial.values();
    double t = 0.0;
    double h = std::min(dt, t_final);
    IntegrationStats local;
    const double h_min = options.min_step_fraction * t_final;

    while (t < t_final) {
        if (local.accepted + local.rejected >= options.max_steps) {
            throw NumericError("time_evolve exceeded the maximum number of steps");
        }
        if (h < h_min) {
            std::ostringstream msg;
            msg << "step-size underflow at t = " << t << " s (h = " << h
                << "); check rates for stiffness misconfiguration";
            throw NumericError(msg.str());
        }
        const bool last = t + h >= t_final;
        const double step = last ? t_final - t : h;

        const StateVector big = full.step(y, step);
        const StateVector small = half.step(half.step(y, 0.5 * step), 0.5 * step);

        double err = 0.0;
        for (int i = 0; i < kStateDim; ++i) {
            const double scale =
                options.atol + options.rtol * std::max(std::abs(y(i)), std::abs(small(i)));
            err = std::max(err, std::abs(small(i) - big(i)) / (3.0 * scale));
        }
        if (!std::isfinite(err)) {
            throw NumericError("time_evolve produced a non-finite state");
        }

        const double factor =
            err == 0.0 ? 5.0 : std::clamp(0.9 * std::cbrt(1.0 / err), 0.2, 5.0);
        if (err <= 1.0) {
            y = small;
            t = last ? t_final : t + step;
            ++local.accepted;
        } else {
            ++local.rejected;
        }
        h = step * factor;
    }

    if (stats) *stats = local;
    return NvState(y);
}

double photoluminescence(const NvState& state, const NvModelParams& params) {
    double pl = params.gamma_sp * (state.population(4) + state.population(5) + state.population(6));
    if (params.include_nv0_emission) {
        pl += params.gamma_sp0 * state.population(9);
    }
    return pl;
}

} // namespace nvgrape::nv
