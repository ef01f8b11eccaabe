#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nvgrape/errors.hpp"
#include "nvgrape/io/kv_config.hpp"
#include "nvgrape/io/svg_plot.hpp"
#include "nvgrape/mie/ellipse.hpp"
#include "nvgrape/mie/fields.hpp"
#include "nvgrape/mie/mie.hpp"
#include "nvgrape/nv/odmr.hpp"
#include "nvgrape/odmr/lorentzian.hpp"
#include "nvgrape/odmr/spectrum_io.hpp"

namespace fs = std::filesystem;
using namespace nvgrape;

namespace {

enum ExitCode : int {
    kOk = 0,
    kConfigFailure = 2,
    kNumericFailure = 3,
    kIoFailure = 4,
    kNotConverged = 5,
};

struct Common {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;
};

io::KvConfig load_config(const Common& c, const std::set<std::string>& allowed) {
    io::KvConfig cfg;
    if (!c.config_path.empty()) cfg = io::KvConfig::load(c.config_path);
    for (const auto& o : c.overrides) cfg.set_assignment(o);
    cfg.require_known(allowed);
    return cfg;
}

fs::path output_dir(const Common& c) {
    std::string dir = c.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv("NVGRAPE_OUT_DIR");
        dir = env && *env ? env : ".";
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
    return dir;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

// ---- NV model ---------------------------------------------------------------

const std::set<std::string> kNvKeys = {
    "pump_rate",      "dephasing_rate",   "omega_12",          "omega_13",
    "gamma_sp",       "gamma_sp0",        "gamma_12",          "gamma_21",
    "gamma_s",        "nv0_pump_ratio",   "ionisation_ratio",  "recombination_ratio",
    "temperature_k",  "include_nv0_emission"};

nv::NvModelParams nv_params(const io::KvConfig& cfg) {
    nv::NvModelParams p;
    p.pump_rate = cfg.get_double("pump_rate", p.pump_rate);
    p.dephasing_rate = cfg.get_double("dephasing_rate", p.dephasing_rate);
    p.omega_12 = cfg.get_double("omega_12", p.omega_12);
    p.omega_13 = cfg.get_double("omega_13", p.omega_13);
    p.omega_mw = p.omega_12;
    p.gamma_sp = cfg.get_double("gamma_sp", p.gamma_sp);
    p.gamma_sp0 = cfg.get_double("gamma_sp0", p.gamma_sp0);
    p.gamma_12 = cfg.get_double("gamma_12", p.gamma_12);
    p.gamma_21 = cfg.get_double("gamma_21", p.gamma_21);
    p.gamma_s = cfg.get_double("gamma_s", p.gamma_s);
    p.nv0_pump_ratio = cfg.get_double("nv0_pump_ratio", p.nv0_pump_ratio);
    p.ionisation_ratio = cfg.get_double("ionisation_ratio", p.ionisation_ratio);
    p.recombination_ratio = cfg.get_double("recombination_ratio", p.recombination_ratio);
    if (cfg.has("temperature_k")) p.temperature_k = cfg.get_double("temperature_k", 0.0);
    p.include_nv0_emission = cfg.get_bool("include_nv0_emission", p.include_nv0_emission);
    p.validate();
    return p;
}

int cmd_odmr_simulate(const Common& c) {
    std::set<std::string> keys = kNvKeys;
    keys.insert({"f_start", "f_stop", "points", "couplings", "normalize", "noise"});
    const auto cfg = load_config(c, keys);
    nv::NvModelParams p = nv_params(cfg);

    const double f_start = cfg.get_double("f_start", 2.82e9);
    const double f_stop = cfg.get_double("f_stop", 2.92e9);
    const int points = cfg.get_int("points", 401);
    const std::vector<double> couplings =
        cfg.get_list("couplings", {0.0, kTwoPi * 0.3e6, kTwoPi * 1e6, kTwoPi * 3e6});
    const bool normalize = cfg.get_bool("normalize", false);
    const double noise = cfg.get_double("noise", 0.0);
    if (noise < 0.0) throw ConfigError("config key 'noise' must be non-negative");
    for (double om : couplings) {
        if (!(om >= 0.0)) throw ConfigError("config key 'couplings' must be non-negative");
    }

    const fs::path dir = output_dir(c);
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    io::LinePlot plot;
    plot.title = "Simulated ODMR";
    plot.x_label = "microwave frequency (GHz)";
    plot.y_label = normalize ? "PL (normalised)" : "PL (photons/s)";
    for (std::size_t k = 0; k < couplings.size(); ++k) {
        p.coupling = couplings[k];
        auto s = nv::odmr_spectrum(p, f_start, f_stop, points, normalize);
        if (noise > 0.0) {
            const double scale = noise * s.pl.maxCoeff();
            for (Eigen::Index i = 0; i < s.size(); ++i) {
                s.pl(i) = std::max(s.pl(i) + scale * gauss(rng), 1e-300);
            }
        }
        const std::string name = "odmr_spectrum_" + std::to_string(k) + ".csv";
        odmr::write_spectrum_csv((dir / name).string(), s);

        std::ostringstream label;
        label << "Omega/2pi = " << couplings[k] / kTwoPi / 1e6 << " MHz";
        plot.series.push_back({label.str(), s.frequencies / 1e9, s.pl, false});
        std::cout << name << "  " << label.str() << "  min/max PL = "
                  << s.pl.minCoeff() / s.pl.maxCoeff() << "\n";
    }
    io::write_text_file((dir / "odmr_spectra.svg").string(), io::render_line_plot(plot));
    return kOk;
}

int cmd_odmr_fit(const Common& c, const std::string& input) {
    const auto cfg = load_config(c, {"initial_hwhm", "max_iterations", "plot"});
    odmr::FitOptions opt;
    opt.initial_hwhm = cfg.get_double("initial_hwhm", opt.initial_hwhm);
    opt.max_iterations = cfg.get_int("max_iterations", opt.max_iterations);
    if (!(opt.initial_hwhm > 0.0)) throw ConfigError("config key 'initial_hwhm' must be positive");
    if (opt.max_iterations < 1) throw ConfigError("config key 'max_iterations' must be at least 1");

    const auto spectrum = odmr::load_spectrum_csv(input);
    const auto fit = odmr::fit_spectrum(spectrum, std::nullopt, opt);
    const auto summary = odmr::contrast_summary(fit);
    const auto& q = fit.params;

    std::vector<std::pair<std::string, std::string>> rows = {
        {"baseline", fmt(q.baseline)},
        {"center_1_hz", fmt(q.dips[0].center)},
        {"hwhm_1_hz", fmt(q.dips[0].hwhm)},
        {"amplitude_1", fmt(q.dips[0].amplitude)},
        {"center_2_hz", fmt(q.dips[1].center)},
        {"hwhm_2_hz", fmt(q.dips[1].hwhm)},
        {"amplitude_2", fmt(q.dips[1].amplitude)},
        {"contrast_1_percent", fmt(100.0 * summary.contrast_1)},
        {"contrast_2_percent", fmt(100.0 * summary.contrast_2)},
        {"contrast_deeper_percent", fmt(100.0 * summary.deeper)},
        {"contrast_mean_percent", fmt(100.0 * summary.mean)},
        {"contrast_summed_percent", fmt(100.0 * summary.summed)},
        {"rss", fmt(fit.rss)},
        {"iterations", std::to_string(fit.iterations)},
        {"converged", fit.converged ? "true" : "false"},
        {"degenerate", fit.degenerate ? "true" : "false"},
    };
    std::ostringstream report;
    report << "key,value\n";
    for (const auto& [k, v] : rows) report << k << ',' << v << '\n';

    const fs::path dir = output_dir(c);
    io::write_text_file((dir / "fit_report.csv").string(), report.str());
    std::cout << report.str();

    if (cfg.get_bool("plot", true)) {
        io::LinePlot plot;
        plot.title = "Double-Lorentzian fit";
        plot.x_label = "microwave frequency (GHz)";
        plot.y_label = "PL";
        plot.series.push_back({"data", spectrum.frequencies / 1e9, spectrum.pl, true});
        plot.series.push_back(
            {"fit", spectrum.frequencies / 1e9, odmr::double_lorentzian(spectrum.frequencies, q), false});
        io::write_text_file((dir / "fit_overlay.svg").string(), io::render_line_plot(plot));
    }

    if (!fit.converged) {
        std::cerr << "error: fit did not converge after " << fit.iterations << " iterations\n";
        return kNotConverged;
    }
    return kOk;
}

// ---- Mie --------------------------------------------------------------------

const std::set<std::string> kMieKeys = {"n1", "n1_imag", "n2", "mu1", "mu2",
                                        "frequency", "n_max", "orders"};

mie::MieConfig mie_config(const io::KvConfig& cfg) {
    mie::MieConfig m;
    m.n1 = mie::Complex(cfg.get_double("n1", m.n1.real()), cfg.get_double("n1_imag", m.n1.imag()));
    m.n2 = cfg.get_double("n2", m.n2);
    m.mu1 = cfg.get_double("mu1", m.mu1);
    m.mu2 = cfg.get_double("mu2", m.mu2);
    m.frequency = cfg.get_double("frequency", m.frequency);
    m.radius = cfg.get_double("radius", m.radius);
    if (cfg.has("n_max")) m.n_max = cfg.get_int("n_max", 10);
    m.validate();
    return m;
}

std::vector<int> orders(const io::KvConfig& cfg) {
    std::vector<int> out;
    for (double v : cfg.get_list("orders", {1.0, 2.0, 3.0})) {
        if (v != std::floor(v) || v < 1.0 || v > 50.0) {
            throw ConfigError("config key 'orders' must list integers in 1..50");
        }
        out.push_back(static_cast<int>(v));
    }
    return out;
}

int cmd_mie_resonances(const Common& c) {
    std::set<std::string> keys = kMieKeys;
    keys.insert({"modes", "rho_min", "rho_max", "grid_points"});
    const auto cfg = load_config(c, keys);
    const auto m = mie_config(cfg);
    const int modes = cfg.get_int("modes", 1);
    const double rho_min = cfg.get_double("rho_min", 0.05);
    const double rho_max = cfg.get_double("rho_max", 3.0);
    mie::ResonanceScan scan;
    scan.grid_points = cfg.get_int("grid_points", scan.grid_points);

    const fs::path dir = output_dir(c);
    std::ostringstream csv;
    csv << "order,mode_index,rho_res,radius_m,residual\n";
    io::LinePlot plot;
    plot.title = "Characteristic function |D_n|";
    plot.x_label = "size parameter rho";
    plot.y_label = "log10 |D_n|";
    for (int n : orders(cfg)) {
        const auto res = mie::find_resonances(n, m, rho_min, rho_max, modes, scan);
        Eigen::VectorXd rho(400), val(400), mx(res.size()), my(res.size());
        for (int i = 0; i < 400; ++i) {
            rho(i) = rho_min + (rho_max - rho_min) * i / 399.0;
            val(i) = std::log10(std::abs(mie::characteristic_fn(n, rho(i), m)));
        }
        for (std::size_t k = 0; k < res.size(); ++k) {
            const auto& r = res[k];
            csv << r.order << ',' << r.mode_index << ',' << fmt(r.rho_res) << ',' << fmt(r.radius)
                << ',' << fmt(r.residual) << '\n';
            mx(k) = r.rho_res;
            my(k) = std::log10(r.residual);
        }
        plot.series.push_back({"n = " + std::to_string(n), rho, val, false});
        plot.series.push_back({"minima n = " + std::to_string(n), mx, my, true});
    }
    io::write_text_file((dir / "resonances.csv").string(), csv.str());
    io::write_text_file((dir / "resonances.svg").string(), io::render_line_plot(plot));
    std::cout << csv.str();
    return kOk;
}

mie::Plane parse_plane(const std::string& s) {
    if (s == "xy") return mie::Plane::XY;
    if (s == "xz") return mie::Plane::XZ;
    if (s == "yz") return mie::Plane::YZ;
    throw ConfigError("config key 'plane' must be xy, xz or yz");
}

int cmd_mie_fieldmap(const Common& c) {
    std::set<std::string> keys = kMieKeys;
    keys.insert({"radius", "plane", "resolution", "extent_factor", "lobe_radius_factor"});
    const auto cfg = load_config(c, keys);
    mie::MieConfig base = mie_config(cfg);
    const std::string plane_name = cfg.get_string("plane", "yz");
    const mie::Plane plane = parse_plane(plane_name);
    const int resolution = cfg.get_int("resolution", 81);
    const double extent_factor = cfg.get_double("extent_factor", 1.5);
    const double lobe_factor = cfg.get_double("lobe_radius_factor", 0.95);
    if (!(extent_factor > 0.0)) throw ConfigError("config key 'extent_factor' must be positive");
    if (!(lobe_factor > 0.0)) throw ConfigError("config key 'lobe_radius_factor' must be positive");

    const fs::path dir = output_dir(c);
    std::ostringstream lobes;
    lobes << "order,radius_m,lobes_h\n";
    for (int n : orders(cfg)) {
        mie::MieConfig m = base;
        if (!cfg.has("radius")) {
            m.radius = mie::find_resonances(n, m, 0.05, 3.0, 1)[0].radius;
        }
        const auto map = mie::field_map(m, plane, extent_factor * m.radius, resolution);
        std::ostringstream csv;
        csv << "x,y,abs_E,abs_H\n";
        for (Eigen::Index i = 0; i < map.u.size(); ++i) {
            for (Eigen::Index j = 0; j < map.v.size(); ++j) {
                csv << fmt(map.u(i)) << ',' << fmt(map.v(j)) << ',' << fmt(map.abs_e(i, j)) << ','
                    << fmt(map.abs_h(i, j)) << '\n';
            }
        }
        const std::string stem = "fieldmap_n" + std::to_string(n);
        io::write_text_file((dir / (stem + ".csv")).string(), csv.str());
        io::write_text_file((dir / (stem + ".svg")).string(),
                            io::render_heatmap("|H|, order " + std::to_string(n) + ", " + plane_name +
                                                   " plane",
                                               map.u, map.v, map.abs_h));

        const mie::MieSolution sol(m);
        const auto prof = mie::circle_profile(sol, plane, lobe_factor * m.radius, 720);
        const int count = mie::count_cyclic_peaks(prof.abs_h);
        lobes << n << ',' << fmt(m.radius) << ',' << count << '\n';
        std::cout << stem << ".csv  radius = " << m.radius << " m  |H| lobes = " << count << "\n";
    }
    io::write_text_file((dir / "fieldmap_lobes.csv").string(), lobes.str());
    return kOk;
}

int cmd_size_grapes(const Common& c) {
    const auto cfg = load_config(c, {"semi_major", "alpha", "frequency"});
    const double a = cfg.get_double("semi_major", 13.5e-3);
    const double alpha = cfg.get_double("alpha", 0.645);
    const double f = cfg.get_double("frequency", 2.87e9);
    const double b = mie::size_ellipsoid(a, alpha, f);
    const double perimeter = mie::ellipse_perimeter(a, b);

    std::ostringstream csv;
    csv << "semi_major_m,alpha,frequency_hz,wavelength_m,semi_minor_m,perimeter_m\n"
        << fmt(a) << ',' << fmt(alpha) << ',' << fmt(f) << ',' << fmt(kSpeedOfLight / f) << ','
        << fmt(b) << ',' << fmt(perimeter) << '\n';
    const fs::path dir = output_dir(c);
    io::write_text_file((dir / "size_grapes.csv").string(), csv.str());
    std::cout << "semi-minor axis b = " << b * 1e3 << " mm (minor axis " << 2e3 * b
              << " mm), perimeter = " << perimeter * 1e3 << " mm\n";
    return kOk;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "key = value configuration file");
    sub->add_option("--out", c.out_dir, "output directory (default $NVGRAPE_OUT_DIR or .)");
    sub->add_option("--seed", c.seed, "random seed for synthetic noise");
    sub->add_option("--set", c.overrides, "override a configuration key, key=value (repeatable)")
        ->allow_extra_args(false);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"NV-centre ODMR and microwave resonator toolkit"};
    app.require_subcommand(1);
    Common common;
    std::string fit_input;

    auto* odmr_cmd = app.add_subcommand("odmr", "ODMR simulation and fitting");
    odmr_cmd->require_subcommand(1);
    auto* simulate = odmr_cmd->add_subcommand("simulate", "steady-state ODMR spectra");
    auto* fit = odmr_cmd->add_subcommand("fit", "double-Lorentzian fit of a spectrum CSV");
    fit->add_option("input", fit_input, "CSV with header frequency_hz,pl")->required();

    auto* mie_cmd = app.add_subcommand("mie", "dielectric sphere resonances and fields");
    mie_cmd->require_subcommand(1);
    auto* resonances = mie_cmd->add_subcommand("resonances", "resonance table");
    auto* fieldmap = mie_cmd->add_subcommand("fieldmap", "|E| and |H| cross-sections");

    auto* size = app.add_subcommand("size-grapes", "minor axis for a resonant ellipse");

    for (auto* sub : {simulate, fit, resonances, fieldmap, size}) add_common(sub, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigFailure;
    }

    try {
        if (simulate->parsed()) return cmd_odmr_simulate(common);
        if (fit->parsed()) return cmd_odmr_fit(common, fit_input);
        if (resonances->parsed()) return cmd_mie_resonances(common);
        if (fieldmap->parsed()) return cmd_mie_fieldmap(common);
        if (size->parsed()) return cmd_size_grapes(common);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigFailure;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumericFailure;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIoFailure;
    }
    return kConfigFailure;
}
