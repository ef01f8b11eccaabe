#include "nvgrape/odmr/lorentzian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "nvgrape/errors.hpp"

namespace nvgrape::odmr {

using Vector7 = Eigen::Matrix<double, 7, 1>;
using Matrix7 = Eigen::Matrix<double, 7, 7>;

Vector7 LorentzianParams::pack() const {
    Vector7 v;
    v << baseline, dips[0].amplitude, dips[0].center, dips[0].hwhm, dips[1].amplitude,
        dips[1].center, dips[1].hwhm;
    return v;
}

LorentzianParams LorentzianParams::unpack(const Vector7& v) {
    LorentzianParams p;
    p.baseline = v(0);
    p.dips[0] = {v(1), v(2), v(3)};
    p.dips[1] = {v(4), v(5), v(6)};
    return p;
}

double double_lorentzian(double f, const LorentzianParams& p) {
    double y = p.baseline;
    for (const Dip& d : p.dips) {
        const double w2 = d.hwhm * d.hwhm;
        const double x = f - d.center;
        y -= d.amplitude * w2 / (x * x + w2);
    }
    return y;
}

Eigen::VectorXd double_lorentzian(const Eigen::VectorXd& f, const LorentzianParams& p) {
    return f.unaryExpr([&](double x) { return double_lorentzian(x, p); });
}

double residual_sum_of_squares(const Eigen::VectorXd& f, const Eigen::VectorXd& y,
                               const LorentzianParams& p) {
    return (y - double_lorentzian(f, p)).squaredNorm();
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
    }
    return m;
}

void check_input(const Eigen::VectorXd& f, const Eigen::VectorXd& y) {
    if (f.size() != y.size()) throw ConfigError("frequency and PL arrays differ in length");
    if (f.size() < 7) throw ConfigError("double-Lorentzian fit needs at least 7 points");
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f(i)) || !std::isfinite(y(i))) {
            throw ConfigError("spectrum contains non-finite values");
        }
        if (i > 0 && !(f(i) > f(i - 1))) {
            throw ConfigError("frequencies must be strictly increasing");
        }
    }
}

// Residuals and Jacobian of the model in normalised coordinates.
void model_jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Vector7& p,
                    Eigen::VectorXd& r, Eigen::Matrix<double, Eigen::Dynamic, 7>& jac) {
    const Eigen::Index m = x.size();
    r.resize(m);
    jac.resize(m, 7);
    for (Eigen::Index i = 0; i < m; ++i) {
        double model = p(0);
        jac(i, 0) = 1.0;
        for (int k = 0; k < 2; ++k) {
            const double amp = p(1 + 3 * k);
            const double c = p(2 + 3 * k);
            const double w = p(3 + 3 * k);
            const double dx = x(i) - c;
            const double w2 = w * w;
            const double den = dx * dx + w2;
            const double shape = w2 / den;
            model -= amp * shape;
            jac(i, 1 + 3 * k) = -shape;
            jac(i, 2 + 3 * k) = -amp * 2.0 * w2 * dx / (den * den);
            jac(i, 3 + 3 * k) = -amp * 2.0 * w * dx * dx / (den * den);
        }
        r(i) = y(i) - model;
    }
}

} // namespace

namespace {

// Seeds in order of preference: the second centre at the preferred
// separation, then (if different) at one hwhm.
std::vector<LorentzianParams> seeds(const Eigen::VectorXd& f, const Eigen::VectorXd& y,
                                    const FitOptions& options) {
    const Eigen::Index m = f.size();

    std::vector<double> sorted(y.data(), y.data() + m);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t q = std::max<std::size_t>(1, sorted.size() / 4);
    const double baseline = median(std::vector<double>(sorted.end() - q, sorted.end()));

    std::vector<double> gaps(m - 1);
    for (Eigen::Index i = 0; i + 1 < m; ++i) gaps[i] = f(i + 1) - f(i);
    const double step = median(gaps);
    const double span = f(m - 1) - f(0);
    const double hwhm = std::clamp(options.initial_hwhm, 2.0 * step, span / 8.0);

    // Light smoothing so noise spikes do not seed the centres.
    const int half = static_cast<int>(std::lround(0.25 * hwhm / step));
    Eigen::VectorXd smooth(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
        const Eigen::Index hi = std::min<Eigen::Index>(m - 1, i + half);
        smooth(i) = y.segment(lo, hi - lo + 1).mean();
    }

    std::vector<Eigen::Index> minima;
    for (Eigen::Index i = 0; i < m; ++i) {
        const bool left = i == 0 || smooth(i) < smooth(i - 1);
        const bool right = i == m - 1 || smooth(i) <= smooth(i + 1);
        if (left && right) minima.push_back(i);
    }
    std::sort(minima.begin(), minima.end(),
              [&](Eigen::Index a, Eigen::Index b) { return smooth(a) < smooth(b); });

    const Eigen::Index first = minima.empty() ? 0 : minima.front();
    const double depth1 = baseline - smooth(first);

    // Second seed: deepest significant minimum at the preferred separation,
    // then at one hwhm, then a fixed offset beside the first dip.
    auto pick = [&](double min_sep) -> std::optional<Eigen::Index> {
        for (Eigen::Index i : minima) {
            if (i == first) continue;
            if (baseline - smooth(i) < 0.2 * depth1) continue;
            if (std::abs(f(i) - f(first)) >= min_sep) return i;
        }
        return std::nullopt;
    };
    const std::optional<Eigen::Index> wide = pick(options.min_separation_factor * hwhm);
    const std::optional<Eigen::Index> near = pick(hwhm);

    auto make = [&](std::optional<Eigen::Index> second) {
        LorentzianParams p;
        p.baseline = baseline;
        p.dips[0] = {std::max(depth1, 1e-12 * std::abs(baseline)), f(first), hwhm};
        if (second) {
            p.dips[1] = {std::max(baseline - smooth(*second), 1e-12 * std::abs(baseline)),
                         f(*second), hwhm};
        } else {
            const double right = std::min(f(first) + 2.0 * hwhm, f(m - 1));
            const double left = std::max(f(first) - 2.0 * hwhm, f(0));
            const double c2 = (right - f(first) >= f(first) - left) ? right : left;
            p.dips[1] = {0.5 * p.dips[0].amplitude, c2, hwhm};
        }
        return p;
    };

    std::vector<LorentzianParams> out{make(wide ? wide : near)};
    if (wide && near && *wide != *near) out.push_back(make(near));
    return out;
}

} // namespace

LorentzianParams initial_guess(const Eigen::VectorXd& f, const Eigen::VectorXd& y,
                               const FitOptions& options) {
    check_input(f, y);
    return seeds(f, y, options).front();
}

namespace {
LorentzianFit levenberg_marquardt(const Eigen::VectorXd& f, const Eigen::VectorXd& y,
                                  const LorentzianParams& start, const FitOptions& options);
} // namespace

LorentzianFit fit_spectrum(const Eigen::VectorXd& f, const Eigen::VectorXd& y,
                           const std::optional<LorentzianParams>& init,
                           const FitOptions& options) {
    check_input(f, y);
    const Eigen::Index m = f.size();

    LorentzianFit fit;
    const double y_scale = y.cwiseAbs().maxCoeff();
    if (!(y_scale > 0.0) || y.maxCoeff() - y.minCoeff() <= 1e-12 * y_scale) {
        fit.params.baseline = y.mean();
        fit.params.dips[0] = {0.0, f(0) + 0.25 * (f(m - 1) - f(0)), options.initial_hwhm};
        fit.params.dips[1] = {0.0, f(0) + 0.75 * (f(m - 1) - f(0)), options.initial_hwhm};
        fit.rss = residual_sum_of_squares(f, y, fit.params);
        fit.converged = true;
        fit.degenerate = true;
        return fit;
    }

    if (init) return levenberg_marquardt(f, y, *init, options);
    LorentzianFit best;
    bool have = false;
    for (const LorentzianParams& start : seeds(f, y, options)) {
        LorentzianFit trial = levenberg_marquardt(f, y, start, options);
        const bool better = !have || (trial.converged && !best.converged) ||
                            (trial.converged == best.converged && trial.rss < best.rss);
        if (better) best = std::move(trial);
        have = true;
    }
    return best;
}

namespace {

LorentzianFit levenberg_marquardt(const Eigen::VectorXd& f, const Eigen::VectorXd& y,
                                  const LorentzianParams& start, const FitOptions& options) {
    const Eigen::Index m = f.size();
    const double y_scale = y.cwiseAbs().maxCoeff();
    LorentzianFit fit;

    // Work in x = (f - mid) / span, yn = y / y_scale.
    const double mid = 0.5 * (f(0) + f(m - 1));
    const double span = f(m - 1) - f(0);
    const Eigen::VectorXd x = (f.array() - mid) / span;
    const Eigen::VectorXd yn = y / y_scale;

    Vector7 scale;
    scale << y_scale, y_scale, span, span, y_scale, span, span;
    Vector7 offset = Vector7::Zero();
    offset(2) = mid;
    offset(5) = mid;

    Vector7 p = (start.pack() - offset).cwiseQuotient(scale);

    Eigen::VectorXd r;
    Eigen::Matrix<double, Eigen::Dynamic, 7> jac;
    model_jacobian(x, yn, p, r, jac);
    double rss = r.squaredNorm();
    const double floor = 1e-30 * yn.squaredNorm();

    double lambda = 1e-3;
    int iter = 0;
    bool converged = false;
    while (iter < options.max_iterations) {
        ++iter;
        const Matrix7 jtj = jac.transpose() * jac;
        const Vector7 g = jac.transpose() * r;
        Matrix7 a = jtj;
        const double diag_floor = 1e-12 * jtj.diagonal().maxCoeff();
        for (int k = 0; k < 7; ++k) a(k, k) += lambda * std::max(jtj(k, k), diag_floor);
        const Vector7 delta = a.ldlt().solve(g);

        const Vector7 trial = p + delta;
        Eigen::VectorXd r_trial;
        Eigen::Matrix<double, Eigen::Dynamic, 7> jac_trial;
        model_jacobian(x, yn, trial, r_trial, jac_trial);
        const double rss_trial = r_trial.squaredNorm();

        if (std::isfinite(rss_trial) && rss_trial < rss) {
            const double change = (rss - rss_trial) / rss;
            p = trial;
            r = std::move(r_trial);
            jac = std::move(jac_trial);
            rss = rss_trial;
            lambda = std::max(lambda / 10.0, 1e-15);
            if (change < options.rss_rtol || rss <= floor) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e16) {
                // No descent direction left at working precision.
                converged = true;
                break;
            }
        }
    }

    // Back to physical units, dips ordered by centre, widths positive.
    p(3) = std::abs(p(3));
    p(6) = std::abs(p(6));
    Matrix7 cov = Matrix7::Zero();
    {
        const Matrix7 jtj = jac.transpose() * jac;
        Eigen::FullPivLU<Matrix7> lu(jtj);
        if (lu.isInvertible() && m > 7) {
            cov = lu.inverse() * (rss / static_cast<double>(m - 7));
        }
    }
    Vector7 phys = p.cwiseProduct(scale) + offset;
    cov = scale.asDiagonal() * cov * scale.asDiagonal();
    if (phys(5) < phys(2)) {
        Eigen::PermutationMatrix<7> perm;
        perm.indices() << 0, 4, 5, 6, 1, 2, 3;
        phys = perm.transpose() * phys;
        cov = perm.transpose() * cov * perm;
    }

    fit.params = LorentzianParams::unpack(phys);
    fit.covariance = cov;
    fit.rss = rss * y_scale * y_scale;
    fit.iterations = iter;
    fit.converged = converged;
    fit.contrast_1 = fit.params.dips[0].amplitude / fit.params.baseline;
    fit.contrast_2 = fit.params.dips[1].amplitude / fit.params.baseline;
    return fit;
}

} // namespace

LorentzianFit fit_spectrum(const nv::OdmrSpectrum& spectrum,
                           const std::optional<LorentzianParams>& init,
                           const FitOptions& options) {
    return fit_spectrum(spectrum.frequencies, spectrum.pl, init, options);
}

ContrastSummary contrast_summary(const LorentzianFit& fit) {
    ContrastSummary s;
    s.contrast_1 = fit.contrast_1;
    s.contrast_2 = fit.contrast_2;
    s.deeper = std::max(fit.contrast_1, fit.contrast_2);
    s.mean = 0.5 * (fit.contrast_1 + fit.contrast_2);
    s.summed = fit.contrast_1 + fit.contrast_2;
    return s;
}

double extract_contrast(const LorentzianFit& fit, bool force) {
    if (!fit.converged && !force) {
        throw NumericError("refusing to extract contrast from an unconverged fit");
    }
    return contrast_summary(fit).deeper;
}

Vector7 rss_gradient(const Eigen::VectorXd& f, const Eigen::VectorXd& y,
                     const LorentzianParams& p, double rel_step) {
    const Vector7 base = p.pack();
    Vector7 grad;
    for (int k = 0; k < 7; ++k) {
        const double h = rel_step * std::max(std::abs(base(k)), 1e-300);
        Vector7 up = base, down = base;
        up(k) += h;
        down(k) -= h;
        const double rp = residual_sum_of_squares(f, y, LorentzianParams::unpack(up));
        const double rm = residual_sum_of_squares(f, y, LorentzianParams::unpack(down));
        grad(k) = base(k) * (rp - rm) / (2.0 * h);
    }
    return grad;
}

double dip_fwhm(const Eigen::VectorXd& f, const Eigen::VectorXd& y, double baseline) {
    if (f.size() != y.size() || f.size() < 3) return 0.0;
    Eigen::Index imin;
    const double ymin = y.minCoeff(&imin);
    const double half = 0.5 * (baseline + ymin);
    if (!(baseline > ymin)) return 0.0;

    Eigen::Index lo = imin;
    while (lo > 0 && y(lo) < half) --lo;
    Eigen::Index hi = imin;
    while (hi < y.size() - 1 && y(hi) < half) ++hi;
    if (y(lo) < half || y(hi) < half) return 0.0;

    auto cross = [&](Eigen::Index a, Eigen::Index b) {
        const double t = (half - y(a)) / (y(b) - y(a));
        return f(a) + t * (f(b) - f(a));
    };
    return cross(hi - 1, hi) - cross(lo, lo + 1);
}

} // namespace nvgrape::odmr
