// Command-line front end: carpets, slices, screen patterns, revival scans,
// self-validation, and canonical figure presets.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcarpet/qcarpet.hpp"

namespace fs = std::filesystem;
using namespace qcarpet;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunConfig load_config(const std::string& path) {
    return parse_config(slurp(path));
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory " + cfg.out_dir);
    return dir;
}

void note_written(const fs::path& p) { std::cout << "wrote " << p.string() << "\n"; }

// Carpet over one revival period starting at the collapse time.
DensityField compute_carpet(const RunConfig& cfg, long y_pts, long t_pts,
                            unsigned workers) {
    WellConfig well = cfg.well();
    ModalCoefficients coeffs = slit_coefficients(well, cfg.slit(), (int)cfg.N);
    SpaceTimeGrid grid;
    grid.y = symmetric_linspace(well.length, (std::size_t)y_pts);
    grid.t = uniform_times(well.t_measure, well.t_measure + well.revival_time(),
                           (std::size_t)t_pts);
    require_grid_valid(grid, well);
    return carpet(coeffs, well, grid, workers);
}

void write_carpet_outputs(const RunConfig& cfg, const DensityField& field,
                          const fs::path& dir, const std::string& stem) {
    if (cfg.format == "pgm" || cfg.format == "both") {
        fs::path p = dir / (stem + ".pgm");
        write_pgm_carpet(p.string(), field);
        note_written(p);
    }
    if (cfg.format == "csv" || cfg.format == "both") {
        fs::path p = dir / (stem + ".csv");
        std::ofstream f(p.string(), std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + p.string());
        f << "t,y,density\n";
        for (std::size_t r = 0; r < field.rows(); ++r)
            for (std::size_t c = 0; c < field.cols(); ++c)
                f << detail::fmt15(field.grid.t[r]) << ',' << detail::fmt15(field.grid.y[c])
                  << ',' << detail::fmt15(field.at(r, c)) << '\n';
        if (!f) throw std::runtime_error("write failed for " + p.string());
        note_written(p);
    }
}

int run_carpet(const std::string& config_path, unsigned workers) {
    RunConfig cfg = load_config(config_path);
    fs::path dir = prepare_out_dir(cfg);
    DensityField field =
        compute_carpet(cfg, cfg.carpet_y_points(), cfg.t_points, workers);
    write_carpet_outputs(cfg, field, dir, "carpet");
    return 0;
}

int run_slice(const std::string& config_path, std::vector<double> times) {
    RunConfig cfg = load_config(config_path);
    if (times.empty()) times = cfg.t_list;
    if (times.empty())
        throw validation_error("slice: no times given (use --t or config t_list)");
    WellConfig well = cfg.well();
    for (double t : times)
        if (t < well.t_measure)
            throw validation_error("slice: time before t_measure");
    fs::path dir = prepare_out_dir(cfg);
    ModalCoefficients coeffs = slit_coefficients(well, cfg.slit(), (int)cfg.N);
    auto y = symmetric_linspace(well.length, (std::size_t)cfg.y_points);
    for (std::size_t k = 0; k < times.size(); ++k) {
        auto res = density_slice(coeffs, well, y, times[k]);
        fs::path p = dir / ("slice_" + std::to_string(k) + ".csv");
        write_csv_slice(p.string(), y, res.density);
        std::cout << "wrote " << p.string() << " t=" << detail::fmt15(times[k]) << "\n";
    }
    return 0;
}

int run_screen(const std::string& config_path, std::vector<double> dists) {
    RunConfig cfg = load_config(config_path);
    if (dists.empty()) dists = cfg.d_list;
    if (dists.empty())
        throw validation_error("screen: no distances given (use --d or config d_list)");
    WellConfig well = cfg.well();
    BeamConfig beam = cfg.beam();
    fs::path dir = prepare_out_dir(cfg);
    ModalCoefficients coeffs = slit_coefficients(well, cfg.slit(), (int)cfg.N);
    auto y = symmetric_linspace(well.length, (std::size_t)cfg.y_points);
    for (std::size_t k = 0; k < dists.size(); ++k) {
        auto density = screen_pattern(coeffs, well, beam, y, dists[k]);
        fs::path p = dir / ("screen_" + std::to_string(k) + ".csv");
        write_csv_slice(p.string(), y, density);
        std::cout << "wrote " << p.string() << " d=" << detail::fmt15(dists[k])
                  << " t=" << detail::fmt15(time_of_flight(dists[k], beam, well)) << "\n";
    }
    return 0;
}

int run_revivals(const std::string& config_path, double t_max, double step,
                 double threshold) {
    RunConfig cfg = load_config(config_path);
    WellConfig well = cfg.well();
    double T = well.revival_time();
    if (t_max <= 0.0) t_max = 1.1 * T;
    if (step <= 0.0) step = T / 512.0;
    fs::path dir = prepare_out_dir(cfg);
    ModalCoefficients coeffs = slit_coefficients(well, cfg.slit(), (int)cfg.N);
    auto y = symmetric_linspace(well.length, (std::size_t)cfg.y_points);
    RevivalReport rep = revival_scan(coeffs, well, y, well.t_measure,
                                     well.t_measure + t_max, step, threshold);
    fs::path p = dir / "revivals.csv";
    write_revival_report(p.string(), rep);
    note_written(p);
    for (const auto& h : rep.hits)
        std::cout << "hit t=" << detail::fmt15(h.time) << " metric="
                  << detail::fmt15(h.metric) << " class=" << to_string(h.kind)
                  << " copies=" << h.copies << "\n";
    return 0;
}

int run_validate(const std::string& config_path) {
    RunConfig cfg = load_config(config_path);
    WellConfig well = cfg.well();
    SlitAperture slit = cfg.slit();
    bool ok = true;

    // modal coefficients: adaptive quadrature must reproduce the closed form
    long n_check = std::min<long>(cfg.N, 200);
    ModalCoefficients closed = slit_coefficients(well, slit, (int)n_check);
    ModalCoefficients quad = coefficients_by_quadrature(
        well, CollapseProfile::rectangular(slit), (int)n_check);
    double worst = 0.0;
    for (long n = 1; n <= n_check; ++n)
        worst = std::max(worst, std::fabs(closed.c(n) - quad.c(n)));
    bool pass_q = worst <= 1e-10;
    ok = ok && pass_q;
    std::cout << "VALIDATE quadrature_vs_closed_form "
              << (pass_q ? "PASS" : "FAIL") << " max_abs_diff="
              << detail::fmt15(worst) << " modes=" << n_check << "\n";

    // grid evolution must track the modal evolution at reduced size
    long n_cn = std::min<long>(cfg.N, 50);
    ModalCoefficients coeffs = slit_coefficients(well, slit, (int)n_cn);
    const std::size_t M = 8192;
    const double T = well.revival_time();
    const double dt = 7.853981633974483e-7 * T;
    const std::size_t steps = 2000;
    LatticeState init = sample_state(coeffs, well, M);
    LatticeState evolved = crank_nicolson_evolve(init, well, dt, steps);
    auto yl = evolved.lattice();
    auto ref = density_slice(coeffs, well, yl,
                             well.t_measure + dt * (double)steps);
    double nrms = l2_density_distance(evolved.density(), ref.density);
    bool pass_cn = nrms <= 5e-3;
    ok = ok && pass_cn;
    std::cout << "VALIDATE grid_vs_modal_evolution " << (pass_cn ? "PASS" : "FAIL")
              << " nrms=" << detail::fmt15(nrms) << " modes=" << n_cn
              << " grid=" << M << " steps=" << steps << "\n";

    if (!ok) throw std::runtime_error("validate: checks failed");
    std::cout << "VALIDATE all PASS\n";
    return 0;
}

int run_figures(const std::string& config_path, unsigned workers) {
    RunConfig cfg = load_config(config_path);
    WellConfig well = cfg.well();
    BeamConfig beam = cfg.beam();
    double T = well.revival_time();
    fs::path dir = prepare_out_dir(cfg);
    ModalCoefficients coeffs = slit_coefficients(well, cfg.slit(), (int)cfg.N);
    auto y = symmetric_linspace(well.length, (std::size_t)cfg.y_points);

    // fig1: full-period carpet
    DensityField field =
        compute_carpet(cfg, cfg.carpet_y_points(), cfg.t_points, workers);
    {
        fs::path p = dir / "fig1_carpet.pgm";
        write_pgm_carpet(p.string(), field);
        note_written(p);
    }

    auto emit = [&](const std::string& name, double t) {
        auto res = density_slice(coeffs, well, y, t);
        fs::path p = dir / name;
        write_csv_slice(p.string(), y, res.density);
        std::cout << "wrote " << p.string() << " t=" << detail::fmt15(t) << "\n";
    };
    emit("fig2_collapse.csv", well.t_measure);                   // rectangle
    emit("fig3_nearfield.csv", well.t_measure + 1e-4 * T);       // edge waves
    emit("fig4_farfield.csv", well.t_measure + 1e-2 * T);        // sinc regime
    emit("fig5_quarter_period.csv", well.t_measure + 0.25 * T);  // two copies
    emit("fig6_half_period.csv", well.t_measure + 0.5 * T);      // mirrored copy
    emit("fig7_revival.csv", well.t_measure + T);                // full revival
    {
        double D = revival_distance(beam, well);
        auto density = screen_pattern(coeffs, well, beam, y, D);
        fs::path p = dir / "fig7_screen_revival.csv";
        write_csv_slice(p.string(), y, density);
        std::cout << "wrote " << p.string() << " d=" << detail::fmt15(D) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral simulator for collapse-and-revival dynamics in a box"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned workers = 1;
    std::vector<double> times, dists;
    double t_max = 0.0, step = 0.0, threshold = 1e-3;

    auto* c_carpet = app.add_subcommand("carpet", "Density field over one revival period");
    c_carpet->add_option("config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    c_carpet->add_option("--workers", workers, "Worker threads (0 = hardware)");

    auto* c_slice = app.add_subcommand("slice", "Density slices at fixed times");
    c_slice->add_option("config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    c_slice->add_option("--t", times, "Slice time (repeatable)");

    auto* c_screen = app.add_subcommand("screen", "Patterns on screens at fixed distances");
    c_screen->add_option("config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    c_screen->add_option("--d", dists, "Screen distance (repeatable)");

    auto* c_revivals = app.add_subcommand("revivals", "Scan for pattern reappearances");
    c_revivals->add_option("config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    c_revivals->add_option("--t-max", t_max, "Scan horizon past the collapse time");
    c_revivals->add_option("--step", step, "Scan step");
    c_revivals->add_option("--threshold", threshold, "Hit threshold on the distance metric");

    auto* c_validate = app.add_subcommand("validate", "Cross-check the two evolution paths");
    c_validate->add_option("config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);

    auto* c_figures = app.add_subcommand("figures", "Canonical output presets");
    c_figures->add_option("config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    c_figures->add_option("--workers", workers, "Worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(c_carpet)) return run_carpet(config_path, workers);
        if (app.got_subcommand(c_slice)) return run_slice(config_path, times);
        if (app.got_subcommand(c_screen)) return run_screen(config_path, dists);
        if (app.got_subcommand(c_revivals))
            return run_revivals(config_path, t_max, step, threshold);
        if (app.got_subcommand(c_validate)) return run_validate(config_path);
        if (app.got_subcommand(c_figures)) return run_figures(config_path, workers);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
