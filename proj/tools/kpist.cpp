// kpist — forward/inverse spectral transforms for the x-periodic, y-decaying
// KP-II Cauchy problem, plus the split-step reference integrator.
//
// Exit codes: 0 ok, 2 configuration error, 3 convergence failure,
// 4 validation failure.

#include "kpist/acceptance.hpp"
#include "kpist/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace kpist;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::string times_csv;
    double tol = -1.0;
    int max_iter = -1;
    int n_max = -1;
    int threads = 0;
    bool oracle = false;
    bool force = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_config) {
    auto* c = cmd->add_option("--config", f.config_path, "run configuration file");
    if (needs_config) c->required();
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--times", f.times_csv, "comma separated time list");
    cmd->add_option("--tol", f.tol, "solver tolerance override");
    cmd->add_option("--max-iter", f.max_iter, "iteration cap override");
    cmd->add_option("--n-max", f.n_max, "highest contour index override");
    cmd->add_option("--threads", f.threads, "parallel map width");
    cmd->add_flag("--oracle", f.oracle, "compare against the split-step integrator");
    cmd->add_flag("--force", f.force, "run outside the smallness region");
}

struct Run {
    CylinderGrid grid;
    int n_max = 3;
    Field u0;
    ForwardOptions fwd;
    InverseConfig inv;
    PdeConfig pde;
    std::vector<double> times{0.0};
    std::string potential_spec;
};

std::string short_num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::vector<double> parse_times(const std::string& csv) {
    std::vector<double> out;
    std::istringstream is(csv);
    std::string item;
    while (std::getline(is, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

Run load_run(const CommonFlags& f) {
    Run r;
    io::KeyValueDoc doc = io::KeyValueDoc::parse_file(f.config_path);
    r.grid = make_grid(doc.get_double("grid.ell"), doc.get_int("grid.Nx"), doc.get_int("grid.Ny"),
                       doc.get_double("grid.Ly"));
    r.n_max = doc.get_int("contour.n_max", 3);

    std::string family = doc.get_string("potential.family", "cosine-gaussian");
    if (doc.has("potential.file")) {
        r.u0 = io::load_field(doc.get_string("potential.file"));
        if (!(r.u0.grid == r.grid))
            throw ConfigError("potential file grid does not match [grid] section");
        r.potential_spec = "file " + doc.get_string("potential.file");
    } else if (family == "cosine-gaussian") {
        double amp = doc.get_double("potential.amplitude", 0.02);
        r.u0 = cosine_gaussian_potential(r.grid, amp);
        r.potential_spec = "cosine-gaussian amplitude=" + io::format_double(amp);
    } else if (family == "zero") {
        r.u0 = Field(r.grid);
        r.potential_spec = "zero";
    } else {
        throw ConfigError("unknown potential family '" + family + "'");
    }

    r.fwd.tol = doc.get_double("forward.tol", 1e-12);
    r.fwd.max_iter = doc.get_int("forward.max_iter", 300);
    r.inv.delta = doc.get_double("inverse.delta", 0.0);
    r.inv.tol = doc.get_double("inverse.tol", 1e-9);
    r.inv.max_iter = doc.get_int("inverse.max_iter", 80);
    r.inv.plemelj_orientation = doc.get_int("inverse.orientation", +1);
    r.pde.dt = doc.get_double("pde.dt", 1e-3);
    r.pde.dealias = doc.get_bool("pde.dealias", true);
    if (doc.has("run.times")) r.times = doc.get_list("run.times");
    if (doc.has("run.threads")) set_num_threads(doc.get_int("run.threads"));

    if (!f.times_csv.empty()) r.times = parse_times(f.times_csv);
    if (f.n_max > 0) r.n_max = f.n_max;
    if (f.tol > 0.0) {
        r.fwd.tol = f.tol;
        r.inv.tol = f.tol;
    }
    if (f.max_iter > 0) {
        r.fwd.max_iter = f.max_iter;
        r.inv.max_iter = f.max_iter;
    }
    if (f.threads > 0) set_num_threads(f.threads);
    return r;
}

void preflight(const Run& r, bool force) {
    if (r.u0.max_abs() == 0.0) return;
    SmallnessReport sm = smallness_report(r.u0);
    if (!sm.ok && !force)
        throw ConfigError("potential violates the smallness hypothesis (ratio " +
                          io::format_double(sm.ratio) + " >= 1); pass --force to proceed");
    double br = r.u0.boundary_residual();
    if (br > 1e-10 * r.u0.max_abs() && !force)
        throw ConfigError("potential does not decay at the y boundary (residual " +
                          io::format_double(br) + "); enlarge Ly or pass --force");
}

void write_manifest(const Run& r, const fs::path& out) {
    RunManifest m;
    m.grid = r.grid;
    m.n_max = r.n_max;
    m.inverse = r.inv;
    m.inverse.delta = r.inv.delta > 0.0
                          ? r.inv.delta
                          : r.grid.dxi() / (4.0 * r.grid.omega * r.n_max);
    m.pde = r.pde;
    m.times = r.times;
    m.potential_spec = r.potential_spec;
    io::save_manifest(m, out / "manifest.txt");
}

void write_decay_report(const SpectralData& F, const fs::path& path) {
    DecayReport d = decay_report(F);
    std::ofstream os(path);
    os << "lambda_norm: " << io::format_double(d.lambda_norm) << "\n";
    os << "forward_margin: " << io::format_double(d.forward_margin) << "\n";
    os << "gamma_c: " << io::format_double(d.gamma_c) << "\n";
    os << "linf: " << io::format_double(d.linf) << "\n";
    os << "l2_rez: " << io::format_double(d.l2_rez) << "\n";
    os << "wzeta2: " << io::format_double(d.wzeta2) << "\n";
    for (int ci = 0; ci < F.contours.num_contours(); ++ci)
        os << "n " << F.contours.contour_n(ci) << " sup_bound "
           << io::format_double(d.sup_bound[ci]) << " l2_bound "
           << io::format_double(d.l2_bound[ci]) << "\n";
}

int cmd_forward(const CommonFlags& f) {
    Run r = load_run(f);
    preflight(r, f.force);
    fs::create_directories(f.out_dir);
    SpectralData F = forward_transform(r.u0, make_contour_grid(r.grid, r.n_max), r.fwd);
    io::save_spectral(F, fs::path(f.out_dir) / "F0.spectral");
    io::save_field(r.u0, fs::path(f.out_dir) / "u0.field", io::FieldPayload::binary, true);
    write_decay_report(F, fs::path(f.out_dir) / "decay_report.txt");
    write_manifest(r, f.out_dir);
    std::cout << "wrote " << (fs::path(f.out_dir) / "F0.spectral").string() << "\n";
    return 0;
}

int cmd_evolve(const CommonFlags& f, const std::string& input) {
    SpectralData F = io::load_spectral(input);
    std::vector<double> times = f.times_csv.empty() ? std::vector<double>{0.0}
                                                    : parse_times(f.times_csv);
    fs::create_directories(f.out_dir);
    for (double t : times) {
        SpectralData Ft = evolve(F, t);
        std::string name = "F_t" + short_num(F.time + t) + ".spectral";
        io::save_spectral(Ft, fs::path(f.out_dir) / name);
        std::cout << "wrote " << (fs::path(f.out_dir) / name).string() << "\n";
    }
    return 0;
}

int cmd_inverse(const CommonFlags& f, const std::string& input) {
    SpectralData F = io::load_spectral(input);
    InverseConfig inv;
    if (f.tol > 0.0) inv.tol = f.tol;
    if (f.max_iter > 0) inv.max_iter = f.max_iter;
    if (f.threads > 0) set_num_threads(f.threads);
    DecayReport d = decay_report(F);
    if (!(d.forward_margin < 1.0) && !f.force)
        throw ConfigError("spectral data violates the contraction condition (margin " +
                          io::format_double(d.forward_margin) + "); pass --force to attempt");
    fs::create_directories(f.out_dir);
    BoundaryTraceSet W = solve_boundary_traces(F, inv);
    Reconstruction rec = reconstruct_potential(F, W, inv);
    io::save_traces(W, fs::path(f.out_dir) / "traces");
    io::save_field(rec.u, fs::path(f.out_dir) / "u_rec.field", io::FieldPayload::binary, true);
    std::cout << "reconstruction written, trace sweeps " << W.iterations << ", imag residual "
              << io::format_double(rec.imag_residual) << "\n";
    return 0;
}

int cmd_pde(const CommonFlags& f) {
    Run r = load_run(f);
    preflight(r, f.force);
    fs::create_directories(f.out_dir);
    std::sort(r.times.begin(), r.times.end());
    PdeConfig cfg = r.pde;
    cfg.t_end = r.times.empty() ? 0.0 : r.times.back();
    std::vector<Field> snaps;
    PdeRunInfo info;
    pde_solve(r.u0, cfg, &info, r.times, &snaps);
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        std::string name = "u_pde_t" + short_num(r.times[i]) + ".field";
        io::save_field(snaps[i], fs::path(f.out_dir) / name, io::FieldPayload::binary, true);
    }
    write_manifest(r, f.out_dir);
    std::cout << "steps " << info.steps << ", zero-mass residual "
              << io::format_double(info.zero_mass_residual_max) << "\n";
    return 0;
}

int cmd_solve(const CommonFlags& f) {
    Run r = load_run(f);
    preflight(r, f.force);
    fs::create_directories(f.out_dir);
    IstOptions opt;
    opt.n_max = r.n_max;
    opt.forward = r.fwd;
    opt.inverse = r.inv;
    IstResult res = ist_solve(r.u0, r.times, opt);
    io::save_spectral(res.F0, fs::path(f.out_dir) / "F0.spectral");
    write_decay_report(res.F0, fs::path(f.out_dir) / "decay_report.txt");

    std::vector<Field> pde_snaps;
    if (f.oracle) {
        std::vector<double> sorted = r.times;
        std::sort(sorted.begin(), sorted.end());
        PdeConfig cfg = r.pde;
        cfg.t_end = sorted.back();
        pde_solve(r.u0, cfg, nullptr, sorted, &pde_snaps);
    }

    std::vector<std::tuple<double, double, double>> metrics;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        double t = r.times[i];
        std::string name = "u_ist_t" + short_num(t) + ".field";
        io::save_field(res.u[i], fs::path(f.out_dir) / name, io::FieldPayload::binary, true);
        if (t == 0.0) {
            CompareReport c = compare(res.u[i], r.u0);
            metrics.push_back({t, c.l2_rel, c.linf_rel});
        } else if (f.oracle) {
            CompareReport c = compare(res.u[i], pde_snaps[i]);
            metrics.push_back({t, c.l2_rel, c.linf_rel});
            std::string pname = "u_pde_t" + short_num(t) + ".field";
            io::save_field(pde_snaps[i], fs::path(f.out_dir) / pname, io::FieldPayload::binary, true);
        }
    }
    io::save_metrics(metrics, fs::path(f.out_dir) / "metrics.csv");
    write_manifest(r, f.out_dir);
    for (const auto& [t, l2, linf] : metrics)
        std::cout << "t=" << short_num(t) << " l2_rel=" << io::format_double(l2) << "\n";
    return 0;
}

int cmd_validate(const CommonFlags& f) {
    if (f.threads > 0) set_num_threads(f.threads);
    fs::create_directories(f.out_dir);
    std::ostringstream table;
    auto results = run_acceptance(std::cout);
    int failures = 0;
    for (const auto& r : results) {
        table << (r.pass ? "PASS" : "FAIL") << "," << r.id << "," << r.name << "," << r.detail
              << "\n";
        if (!r.pass) ++failures;
    }
    std::ofstream(fs::path(f.out_dir) / "validation.csv") << "status,id,name,detail\n"
                                                          << table.str();
    return failures == 0 ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"inverse spectral transform solver for the semi-periodic KP-II problem"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string input_file;

    auto* forward = app.add_subcommand("forward", "compute spectral data from a potential");
    add_common(forward, flags, true);
    auto* evolve_cmd = app.add_subcommand("evolve", "apply the linear time evolution to stored data");
    evolve_cmd->add_option("input", input_file, "spectral data file")->required();
    add_common(evolve_cmd, flags, false);
    auto* inverse = app.add_subcommand("inverse", "reconstruct the potential from spectral data");
    inverse->add_option("input", input_file, "spectral data file")->required();
    add_common(inverse, flags, false);
    auto* pde = app.add_subcommand("pde", "run the split-step reference integrator");
    add_common(pde, flags, true);
    auto* solve = app.add_subcommand("solve", "full transform pipeline at the requested times");
    add_common(solve, flags, true);
    auto* validate = app.add_subcommand("validate", "run the acceptance battery");
    add_common(validate, flags, false);
    auto* roundtrip = app.add_subcommand("roundtrip", "verify byte-exact save/load of an artifact");
    roundtrip->add_option("input", input_file, "artifact file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (forward->parsed()) return cmd_forward(flags);
        if (evolve_cmd->parsed()) return cmd_evolve(flags, input_file);
        if (inverse->parsed()) return cmd_inverse(flags, input_file);
        if (pde->parsed()) return cmd_pde(flags);
        if (solve->parsed()) return cmd_solve(flags);
        if (validate->parsed()) return cmd_validate(flags);
        if (roundtrip->parsed()) {
            bool ok = io::verify_roundtrip(input_file);
            std::cout << (ok ? "round trip ok" : "round trip mismatch") << "\n";
            return ok ? 0 : 2;
        }
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
