// Batch front end: classify | solve | futaki | sweep | audit, driven by a
// flat key = value config file.  Exit codes: 0 success, 2 malformed config,
// 3 solver non-convergence, 4 continuation step underflow.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gvx/config.hpp"
#include "gvx/diagnostics.hpp"
#include "gvx/futaki.hpp"
#include "gvx/gravitating.hpp"
#include "gvx/version.hpp"

namespace fs = std::filesystem;
using namespace gvx;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitStepUnderflow = 4;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

GridPtr make_grid(const RunConfig& c) {
    if (c.surface == "torus")
        return make_torus_grid(c.n1, c.n2, cplx(c.lattice_re, c.lattice_im));
    return make_sphere_grid(c.n1, c.n2);
}

void write_manifest(const RunConfig& c, const std::string& status) {
    fs::create_directories(c.out);
    std::ofstream m(fs::path(c.out) / "manifest.txt");
    m << "# run manifest\n";
    m << "version = " << kVersion << "\n";
    m << "status = " << status << "\n";
    m << serialize_config(c);
}

void write_path_log(const RunConfig& c, const ContinuityResult& res) {
    std::ofstream log(fs::path(c.out) / "path.log");
    log << "# t r1_sup r2_sup y_min y_max osc_f osc_v integral_first integral_second "
           "integral_log blowup\n";
    for (const auto& st : res.states) {
        const auto& m = st.monitors;
        log << fmt(st.t) << " " << fmt(st.r1_sup) << " " << fmt(st.r2_sup) << " "
            << fmt(m.y_min) << " " << fmt(m.y_max) << " " << fmt(m.osc_f) << " "
            << fmt(m.osc_v) << " " << fmt(m.integral_first) << " "
            << fmt(m.integral_second) << " " << fmt(m.integral_log) << " "
            << (m.blowup_flag ? 1 : 0) << "\n";
    }
}

int cmd_classify(const RunConfig& c) {
    const Divisor d = parse_divisor(c.divisor);
    const StabilityClass sc = classify_divisor(d);
    const int n = d.degree();
    const int lmax = hilbert_mumford_exponent(d);
    std::cout << "divisor = " << serialize_divisor(d) << "\n";
    std::cout << "degree N = " << n << "\n";
    std::cout << "stability = " << to_string(sc) << "\n";
    std::cout << "hilbert_mumford_exponent = " << lmax << "\n";
    std::cout << "bradlow_admissible(tau = " << fmt(c.tau)
              << ") = " << (bradlow_admissible(n, c.tau) ? "true" : "false") << "\n";
    const double alpha = c.alpha > 0.0 ? c.alpha : 1.0;
    const cplx character = futaki_limit_certificate(n, lmax, alpha, c.tau);
    const cplx certificate = futaki_limit_certificate(n, n - lmax, alpha, c.tau);
    std::cout << "futaki_character(l = " << lmax << ", alpha = " << fmt(alpha)
              << ") = " << fmt(character.imag()) << "i"
              << (character == cplx(0.0, 0.0) ? " (zero)" : " (nonzero)") << "\n";
    std::cout << "futaki_certificate(l = " << (n - lmax) << ") = " << fmt(certificate.imag())
              << "i\n";
    std::cout << "maximal_weight = " << fmt(maximal_weight(n, lmax, alpha, c.tau)) << "\n";
    return kExitOk;
}

int cmd_futaki(const RunConfig& c) {
    if (c.surface != "sphere") {
        std::cerr << "futaki: sphere surface required\n";
        return kExitConfig;
    }
    const GridPtr grid = make_grid(c);
    const double alpha = c.alpha > 0.0 ? c.alpha : 1.0;
    const cplx closed = futaki_closed_form(c.futaki_n, c.futaki_l, alpha, c.tau);
    const FutakiResult quad = futaki_quadrature(c.futaki_l, c.futaki_n, alpha, c.tau, grid);
    const double err = std::abs(quad.value - closed);
    // relative agreement, or absolute when the target is an exact zero
    const bool agree = std::abs(closed) > 0.0 ? err < 1e-5 * std::abs(closed) : err < 1e-8;
    std::cout << "config: N = " << c.futaki_n << " l = " << c.futaki_l
              << " alpha = " << fmt(alpha) << " tau = " << fmt(c.tau) << "\n";
    std::cout << "closed_form = " << fmt(closed.imag()) << "i\n";
    std::cout << "quadrature  = " << fmt(quad.value.imag()) << "i  (re "
              << fmt(quad.value.real()) << ")\n";
    std::cout << "sub_integral_vertical = " << fmt(quad.sub_vertical) << "  (target "
              << fmt(std::numbers::pi * (2.0 * c.futaki_l - c.futaki_n)) << ")\n";
    std::cout << "sub_integral_coupling = " << fmt(quad.sub_coupling) << "  (target 0)\n";
    std::cout << "error = " << fmt(err) << " ("
              << (std::abs(closed) > 0.0 ? "relative bound 1e-5" : "absolute bound 1e-8")
              << ")\n";
    return agree ? kExitOk : kExitNonConvergence;
}

int solve_torus(const RunConfig& c) {
    const GridPtr grid = make_grid(c);
    const Divisor d = parse_divisor(c.divisor);
    const ScalarField higgs = higgs_norm_torus(d, grid);
    const int n = d.degree();

    if (c.solver == "vortex" || (c.solver == "auto" && c.alpha == 0.0)) {
        VortexOptions vo;
        vo.tol = c.tol;
        vo.max_iter = c.max_iter;
        std::ofstream rlog;
        if (c.verbose) {
            fs::create_directories(c.out);
            rlog.open(fs::path(c.out) / "residuals.log");
            rlog << "# iter residual_sup\n";
            vo.on_iteration = [&rlog](int it, double r) {
                rlog << it << " " << fmt(r) << "\n";
            };
        }
        VortexSolution sol = solve_vortex(grid, higgs, n, c.tau, vo);
        write_manifest(c, to_string(sol.status));
        if (sol.status != SolveStatus::Converged) {
            std::cout << "vortex: " << to_string(sol.status) << " (" << sol.detail
                      << "), residual " << fmt(sol.residual_sup) << "\n";
            return kExitNonConvergence;
        }
        write_field((fs::path(c.out) / "f.dat").string(), sol.f);
        GravState st;
        st.f = sol.f;
        st.v = ScalarField(grid, 0.0);
        st.t = 0.0;
        ModelParams p = ModelParams::make(1, n, c.tau, 0.0);
        AuditReport rep = audit_state(st, p, grid, higgs, c.tol);
        std::ofstream(fs::path(c.out) / "audit.txt") << rep.to_text();
        std::cout << "vortex: converged in " << sol.iterations << " iterations, residual "
                  << fmt(sol.residual_sup) << "\n";
        std::cout << rep.to_text();
        return rep.all_pass() ? kExitOk : kExitNonConvergence;
    }

    ContinuityOptions opts;
    opts.tol = c.tol;
    opts.max_newton = c.max_iter;
    opts.step_init = c.step_init;
    opts.step_min = c.step_min;
    ContinuityResult res = solve_continuity(grid, higgs, n, c.tau, c.alpha, opts);
    write_manifest(c, to_string(res.status));
    write_path_log(c, res);
    if (res.status != SolveStatus::Converged) {
        std::cout << "continuity: " << to_string(res.status) << " (" << res.detail
                  << "), last t = " << fmt(res.last_t) << "\n";
        return res.status == SolveStatus::StepUnderflow ? kExitStepUnderflow
                                                        : kExitNonConvergence;
    }
    const GravState& st = res.states.back();
    write_field((fs::path(c.out) / "f.dat").string(), st.f);
    write_field((fs::path(c.out) / "v.dat").string(), st.v);
    ModelParams p = ModelParams::make(1, n, c.tau, st.t);
    AuditReport rep = audit_state(st, p, grid, higgs, c.tol);
    std::ofstream(fs::path(c.out) / "audit.txt") << rep.to_text();
    std::cout << "continuity: reached alpha = " << fmt(st.t) << " in "
              << res.states.size() << " accepted states\n";
    std::cout << rep.to_text();
    return rep.all_pass() ? kExitOk : kExitNonConvergence;
}

int solve_sphere(const RunConfig& c) {
    const GridPtr grid = make_grid(c);
    const Divisor d = parse_divisor(c.divisor);
    const int n = d.degree();

    if (c.solver == "vortex") {
        const ScalarField higgs = higgs_norm_sphere(d, grid);
        VortexOptions vo;
        vo.tol = c.tol;
        vo.max_iter = c.max_iter;
        VortexSolution sol = solve_vortex(grid, higgs, n, c.tau, vo);
        write_manifest(c, to_string(sol.status));
        if (sol.status != SolveStatus::Converged) {
            std::cout << "vortex: " << to_string(sol.status) << " (" << sol.detail << ")\n";
            return kExitNonConvergence;
        }
        write_field((fs::path(c.out) / "f.dat").string(), sol.f);
        std::cout << "vortex: converged in " << sol.iterations << " iterations, residual "
                  << fmt(sol.residual_sup) << "\n";
        return kExitOk;
    }

    EbOptions opts;
    opts.tol = c.tol;
    opts.max_newton = c.max_iter;
    EbResult res = solve_einstein_bogomolnyi_sphere(d, c.tau, c.tol, grid, opts);
    write_manifest(c, to_string(res.status));
    if (res.status != SolveStatus::Converged) {
        std::cout << "einstein-bogomolnyi: " << to_string(res.status) << " (" << res.detail
                  << ")\n";
        std::cout << "stability = " << to_string(res.stability) << "\n";
        if (res.stability != StabilityClass::Stable &&
            res.futaki_certificate != cplx(0.0, 0.0)) {
            std::cout << "futaki_certificate = " << fmt(res.futaki_certificate.imag())
                      << "i (nonzero: no solution exists for this divisor)\n";
        }
        return kExitNonConvergence;
    }
    write_field((fs::path(c.out) / "f.dat").string(), res.state.f);
    write_field((fs::path(c.out) / "v.dat").string(), res.state.v);
    ModelParams p = ModelParams::einstein_bogomolnyi(n, c.tau);
    const ScalarField higgs = higgs_norm_sphere(d, grid);
    AuditReport rep = audit_state(res.state, p, grid, higgs, std::max(c.tol, 1e-8));
    std::ofstream(fs::path(c.out) / "audit.txt") << rep.to_text();
    std::cout << "einstein-bogomolnyi: converged, residual " << fmt(res.residual_sup)
              << ", second-equation residual " << fmt(res.v_residual_sup) << "\n";
    std::cout << rep.to_text();
    return rep.all_pass() ? kExitOk : kExitNonConvergence;
}

int cmd_solve(const RunConfig& c) {
    return c.surface == "torus" ? solve_torus(c) : solve_sphere(c);
}

int cmd_audit(const RunConfig& c) { return cmd_solve(c); }

int cmd_sweep(const RunConfig& c) {
    if (c.sweep_param != "alpha" && c.sweep_param != "tau") {
        std::cerr << "sweep: sweep_param must be alpha or tau\n";
        return kExitConfig;
    }
    std::vector<double> values;
    std::stringstream ss(c.sweep_values);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) values.push_back(std::stod(item));
    }
    if (values.empty()) {
        std::cerr << "sweep: no sweep_values\n";
        return kExitConfig;
    }
    int worst = kExitOk;
    for (size_t k = 0; k < values.size(); ++k) {
        RunConfig rc = c;
        rc.command = "solve";
        if (c.sweep_param == "alpha") rc.alpha = values[k];
        else rc.tau = values[k];
        rc.out = (fs::path(c.out) / ("run_" + std::to_string(k))).string();
        std::cout << "--- sweep " << c.sweep_param << " = " << fmt(values[k]) << " -> "
                  << rc.out << "\n";
        const int code = cmd_solve(rc);
        std::cout << "--- exit " << code << "\n";
        worst = std::max(worst, code);
    }
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gravitating vortex solver"};
    app.set_version_flag("--version", std::string(kVersion));
    std::string config_path;
    std::string command;
    std::string out_override;
    double tol_override = -1.0;
    std::uint64_t seed_override = 0;
    bool seed_set = false, verbose = false;
    app.add_option("command", command, "classify | solve | futaki | sweep | audit");
    app.add_option("--config", config_path, "config file (key = value)")->required();
    app.add_option("--out", out_override, "output directory override");
    app.add_option("--tol", tol_override, "tolerance override");
    app.add_option("--seed", seed_override, "seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_flag("--verbose", verbose, "verbose solver logging");
    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        cfg = load_config_file(config_path);
        if (!command.empty()) cfg.command = command;
        if (!out_override.empty()) cfg.out = out_override;
        if (tol_override > 0.0) cfg.tol = tol_override;
        if (seed_set) cfg.seed = seed_override;
        if (verbose) cfg.verbose = true;
        const auto errs = validate_config(cfg);
        if (!errs.empty()) {
            for (const auto& e : errs) std::cerr << "config error: " << e << "\n";
            return kExitConfig;
        }
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (cfg.command == "classify") return cmd_classify(cfg);
        if (cfg.command == "solve") return cmd_solve(cfg);
        if (cfg.command == "audit") return cmd_audit(cfg);
        if (cfg.command == "futaki") return cmd_futaki(cfg);
        if (cfg.command == "sweep") return cmd_sweep(cfg);
        std::cerr << "unknown command: " << cfg.command << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
