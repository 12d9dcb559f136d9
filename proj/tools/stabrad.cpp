// stabrad: structured eps-stability radius solver front end.
//
// Subcommands: radius-delta, radius-eps, stability-radius, pseudospectrum,
// verify-bounds, sample-joint. See README.md for the full tour.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "stabrad/bounds.hpp"
#include "stabrad/errors.hpp"
#include "stabrad/inner.hpp"
#include "stabrad/io.hpp"
#include "stabrad/outer.hpp"
#include "stabrad/pseudospectra.hpp"

namespace {

using namespace stabrad;

struct MatrixSource {
    std::string matrix_file;
    std::string generator; // e.g. "grcar:10"
    double shift = 1.0;
    bool allow_large = false;
};

struct LoadedProblem {
    ComplexMatrix a;
    std::vector<IndexPair> pattern; // file/generator sparsity pattern
};

LoadedProblem load_matrix(const MatrixSource& src) {
    LoadedProblem p;
    if (!src.matrix_file.empty()) {
        MatrixMarketData data = read_matrix_market_file(src.matrix_file);
        p.a = std::move(data.matrix);
        p.pattern = std::move(data.pattern);
    } else if (!src.generator.empty()) {
        const auto colon = src.generator.find(':');
        const std::string name = src.generator.substr(0, colon);
        if (name != "grcar")
            throw SolverError("unknown generator '" + name + "' (available: grcar:N)");
        if (colon == std::string::npos)
            throw SolverError("generator needs a size, e.g. grcar:10");
        const int n = std::stoi(src.generator.substr(colon + 1));
        p.a = grcar(n, src.shift);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (p.a(i, j) != Complex(0.0)) p.pattern.emplace_back(i, j);
    } else {
        throw SolverError("no matrix given: use --matrix or --generator");
    }
    if (!p.a.is_square()) throw DimensionMismatch("input matrix must be square");
    if (p.a.rows() > 1500 && !src.allow_large)
        throw SolverError("matrix dimension " + std::to_string(p.a.rows()) +
                          " exceeds the n <= 1500 guard; pass --allow-large to proceed");
    return p;
}

StructureSpace parse_structure(const std::string& spec, const LoadedProblem& p) {
    const int n = p.a.rows();
    if (spec == "full-real") return StructureSpace::full_real(n);
    if (spec == "full-complex") return StructureSpace::full_complex(n);
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "sparsity-real" || kind == "sparsity-complex") {
        std::vector<IndexPair> pattern;
        if (arg == "self" || arg.empty())
            pattern = p.pattern;
        else
            pattern = read_pattern_file(arg);
        return kind == "sparsity-real" ? StructureSpace::sparsity_real(n, std::move(pattern))
                                       : StructureSpace::sparsity_complex(n, std::move(pattern));
    }
    if (kind == "toeplitz-real") {
        const auto comma = arg.find(',');
        if (comma == std::string::npos)
            throw SolverError("toeplitz-real needs a band, e.g. toeplitz-real:1,3");
        return StructureSpace::toeplitz_band_real(n, std::stoi(arg.substr(0, comma)),
                                                  std::stoi(arg.substr(comma + 1)));
    }
    throw SolverError("unknown structure spec '" + spec + "'");
}

GridSpec parse_grid(const std::string& spec, const ComplexMatrix& a) {
    if (spec.empty()) return default_grid(a, 0.2, 200, 200);
    GridSpec g{};
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf:%lf:%d:%d", &g.re_min, &g.re_max, &g.im_min,
                    &g.im_max, &g.nx, &g.ny) != 6)
        throw SolverError("grid spec must be remin:remax:immin:immax:nx:ny");
    return g;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw SolverError("cannot write '" + path.string() + "'");
    out << content;
}

// Run metadata (wall time and such) lives in a side file so the primary
// artifacts stay byte-identical across reruns.
void write_run_meta(const std::filesystem::path& dir, const std::string& mode,
                    double seconds) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    const long long ms = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    std::ostringstream out;
    out << "{\n  \"schema\": \"stabrad/1\",\n  \"mode\": \"" << mode << "\",\n"
        << "  \"unix_ms\": " << ms << ",\n  \"wall_seconds\": " << format_full(seconds)
        << "\n}\n";
    write_text_file(dir / "run_meta.json", out.str());
}

void export_trace(const std::filesystem::path& dir, const OuterTrace& trace) {
    std::filesystem::create_directories(dir);
    write_text_file(dir / "trace.txt", trace_table(trace));
    write_text_file(dir / "trace.json", trace_json(trace));
    // extremal perturbations: E (rank-1 direction), Delta = delta*eta*Pi^S(E),
    // Theta = eps*E
    const RankOneState& st = trace.extremal;
    if (!st.u.empty()) {
        const ComplexMatrix e = outer_product(st.u, st.v);
        write_matrix_market_file((dir / "E.mtx").string(), e, "unit rank-1 direction E = u v*");
        write_matrix_market_file((dir / "Theta.mtx").string(), trace.eps * e,
                                 "unstructured perturbation Theta = eps E");
        if (st.eta > 0.0) {
            const ComplexMatrix delta_mat = (trace.delta * st.eta * st.sign) * st.structured;
            write_matrix_market_file((dir / "Delta.mtx").string(), delta_mat,
                                     "structured perturbation Delta = delta eta Pi^S(E)");
        }
    }
}

int run_radius(const MatrixSource& src, const std::string& structure_spec, OuterConfig cfg,
               const std::string& output) {
    const LoadedProblem p = load_matrix(src);
    const StructureSpace s = parse_structure(structure_spec, p);
    const auto t0 = std::chrono::steady_clock::now();
    const OuterTrace trace = solve_radius(p.a, s, cfg);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::cout << trace_table(trace);
    for (const std::string& w : trace.warnings) std::cerr << "warning: " << w << "\n";
    if (!output.empty()) {
        export_trace(output, trace);
        write_run_meta(output, cfg.mode == OuterMode::SolveDelta ? "radius-delta" : "radius-eps",
                       seconds);
    }
    return trace.status == OuterStatus::Converged ? 0 : 6;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"structured eps-stability radius solver"};
    app.require_subcommand(1);

    MatrixSource src;
    std::string structure_spec = "sparsity-real:self";
    std::string output;
    std::string grid_spec;
    std::string levels_spec;
    std::string forcing_spec = "noise";
    std::string integrator = "splitting";
    std::string eig_mode = "auto";
    double eps = 0.0, delta = 0.0;
    double tol0 = 0.0, tol_floor = 1e-8;
    double horizon = 20.0;
    int k_max = 30, max_inner = 5000, restarts = 1, samples = 100, ode_steps = 20000;
    bool both_signs = false, fixed_radius = false;
    std::uint64_t seed = 20240901;

    auto add_matrix_options = [&](CLI::App* cmd) {
        cmd->add_option("--matrix", src.matrix_file, "Matrix Market file");
        cmd->add_option("--generator", src.generator, "built-in generator, e.g. grcar:10");
        cmd->add_option("--shift", src.shift, "shift for the grcar generator (default 1)");
        cmd->add_flag("--allow-large", src.allow_large, "lift the n <= 1500 size guard");
        cmd->add_option("--output", output, "directory for result artifacts");
        cmd->add_option("--seed", seed, "random seed for sampling modes");
    };
    auto add_solver_options = [&](CLI::App* cmd) {
        cmd->add_option("--structure", structure_spec,
                        "structure space: sparsity-real:self|PATH, sparsity-complex:...,"
                        " toeplitz-real:p,q, full-real, full-complex");
        cmd->add_option("--tol0", tol0, "initial outer tolerance (0 = automatic)");
        cmd->add_option("--tol-floor", tol_floor, "outer tolerance floor (default 1e-8)");
        cmd->add_option("--kmax", k_max, "maximum outer iterations");
        cmd->add_option("--max-inner-steps", max_inner, "inner eigensolve budget per solve");
        cmd->add_flag("--both-signs", both_signs, "scan both signs of the structured term");
        cmd->add_option("--restarts", restarts, "inner trajectories per solve (default 1)");
        cmd->add_option("--integrator", integrator, "splitting | full-euler");
        cmd->add_option("--eig", eig_mode,
                        "per-step eigensolver: auto | dense | tracked (default auto: warm"
                        " inverse-iteration refinement above n = 256)");
    };

    CLI::App* cmd_delta = app.add_subcommand(
        "radius-delta", "compute the structured eps-stability radius delta_eps^S");
    add_matrix_options(cmd_delta);
    add_solver_options(cmd_delta);
    cmd_delta->add_option("--eps", eps, "fixed eps > 0")->required();

    CLI::App* cmd_eps = app.add_subcommand(
        "radius-eps", "compute eps (best uniform resolvent bound 1/eps) for a fixed delta");
    add_matrix_options(cmd_eps);
    add_solver_options(cmd_eps);
    cmd_eps->add_option("--delta", delta, "fixed delta >= 0")->required();

    CLI::App* cmd_star = app.add_subcommand("stability-radius",
                                            "compute the unstructured stability radius eps*");
    add_matrix_options(cmd_star);
    cmd_star->add_option("--kmax", k_max, "maximum outer iterations");

    CLI::App* cmd_ps = app.add_subcommand("pseudospectrum",
                                          "sigma_min grid and optional level-set contours");
    add_matrix_options(cmd_ps);
    cmd_ps->add_option("--grid", grid_spec, "remin:remax:immin:immax:nx:ny (default: auto)");
    cmd_ps->add_option("--levels", levels_spec, "comma-separated contour levels");

    CLI::App* cmd_vb = app.add_subcommand("verify-bounds",
                                          "sampled certification of the transient bounds");
    add_matrix_options(cmd_vb);
    cmd_vb->add_option("--structure", structure_spec, "structure space spec");
    cmd_vb->add_option("--eps", eps, "eps of the certified bound 1/eps")->required();
    cmd_vb->add_option("--delta", delta, "perturbation size delta");
    cmd_vb->add_option("--samples", samples, "number of sampled perturbations (default 100)");
    cmd_vb->add_option("--horizon", horizon, "time horizon T (default 20)");
    cmd_vb->add_option("--ode-steps", ode_steps, "RK4 steps (default 20000)");
    cmd_vb->add_option("--forcing", forcing_spec, "noise | harmonic:omega");
    cmd_vb->add_option("--grid", grid_spec, "grid for the contour bound (optional)");

    CLI::App* cmd_sj = app.add_subcommand(
        "sample-joint", "sample eigenvalue clouds of the joint pseudospectrum");
    add_matrix_options(cmd_sj);
    cmd_sj->add_option("--structure", structure_spec, "structure space spec");
    cmd_sj->add_option("--eps", eps, "unstructured radius eps")->required();
    cmd_sj->add_option("--delta", delta, "structured radius delta")->required();
    cmd_sj->add_option("--samples", samples, "number of clouds (default 100)");
    cmd_sj->add_flag("--fixed-radius", fixed_radius,
                     "sample on the sphere instead of in the ball");

    CLI11_PARSE(app, argc, argv);

    InnerOptions inner;
    inner.max_steps = max_inner;
    inner.try_both_signs = both_signs;
    inner.restarts = restarts;
    inner.seed = seed;
    if (eig_mode == "dense")
        inner.eig_solve = EigSolve::Dense;
    else if (eig_mode == "tracked")
        inner.eig_solve = EigSolve::Tracked;
    else if (eig_mode != "auto")
        throw SolverError("unknown eigensolver mode '" + eig_mode + "'");

    if (cmd_delta->parsed() || cmd_eps->parsed()) {
        OuterConfig cfg;
        cfg.mode = cmd_delta->parsed() ? OuterMode::SolveDelta : OuterMode::SolveEps;
        cfg.eps = eps;
        cfg.delta = delta;
        cfg.tol0 = tol0;
        cfg.tol_floor = tol_floor;
        cfg.k_max = k_max;
        cfg.inner = inner;
        if (integrator == "full-euler")
            cfg.full_flow = true;
        else if (integrator != "splitting")
            throw SolverError("unknown integrator '" + integrator + "'");
        return run_radius(src, structure_spec, cfg, output);
    }

    if (cmd_star->parsed()) {
        const LoadedProblem p = load_matrix(src);
        StabilityRadiusOptions opts;
        opts.k_max = k_max;
        const auto t0 = std::chrono::steady_clock::now();
        const OuterTrace trace = stability_radius_trace(p.a, opts);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << trace_table(trace);
        std::cout << "eps* = " << format_full(trace.final_value) << "\n";
        for (const std::string& w : trace.warnings) std::cerr << "warning: " << w << "\n";
        if (!output.empty()) {
            export_trace(output, trace);
            write_run_meta(output, "stability-radius", seconds);
        }
        return trace.status == OuterStatus::Converged ? 0 : 6;
    }

    if (cmd_ps->parsed()) {
        const LoadedProblem p = load_matrix(src);
        const GridSpec grid = parse_grid(grid_spec, p.a);
        const ResolventField field = resolvent_field(p.a, grid);
        const std::filesystem::path dir = output.empty() ? "." : output;
        std::filesystem::create_directories(dir);
        {
            std::ofstream out(dir / "field.csv");
            write_field_csv(out, field);
        }
        if (!levels_spec.empty()) {
            std::ostringstream contour_text;
            contour_text << "level,segment_id,re,im\n";
            std::istringstream ls(levels_spec);
            std::string tok;
            while (std::getline(ls, tok, ',')) {
                const double level = std::stod(tok);
                const std::vector<ContourPolyline> polys = extract_level_set(field, level);
                std::ostringstream one;
                write_contours_csv(one, polys, level);
                const std::string body = one.str();
                contour_text << body.substr(body.find('\n') + 1);
            }
            write_text_file(dir / "contours.csv", contour_text.str());
        }
        std::cout << "field: " << grid.nx << "x" << grid.ny << " nodes -> "
                  << (dir / "field.csv").string() << "\n";
        return 0;
    }

    if (cmd_vb->parsed()) {
        const LoadedProblem p = load_matrix(src);
        const StructureSpace s = parse_structure(structure_spec, p);
        Forcing forcing;
        if (forcing_spec.rfind("harmonic", 0) == 0) {
            forcing.kind = Forcing::Kind::Harmonic;
            const auto colon = forcing_spec.find(':');
            if (colon != std::string::npos)
                forcing.omega = std::stod(forcing_spec.substr(colon + 1));
        } else if (forcing_spec != "noise") {
            throw SolverError("unknown forcing '" + forcing_spec + "'");
        }
        const L2Report report =
            verify_l2_bound(p.a, s, eps, delta, samples, forcing, horizon, ode_steps, seed);
        std::cout << "max L2 ratio " << format_full(report.max_ratio) << " vs bound "
                  << format_full(report.bound) << " (" << report.violations.size()
                  << " violations, sampled certification)\n";
        const std::filesystem::path dir = output.empty() ? "." : output;
        std::filesystem::create_directories(dir);
        write_text_file(dir / "l2_report.json", l2_report_json(report));
        if (!grid_spec.empty()) {
            const ResolventField field = resolvent_field(p.a, parse_grid(grid_spec, p.a));
            const ContourBound cb = contour_bound(p.a, eps, delta, field);
            std::cout << "contour bound |Gamma|/(2 pi eps) = " << format_full(cb.bound) << "\n";
            write_text_file(dir / "contour_bound.json", contour_bound_json(cb));
        }
        return report.violations.empty() ? 0 : 6;
    }

    if (cmd_sj->parsed()) {
        const LoadedProblem p = load_matrix(src);
        const StructureSpace s = parse_structure(structure_spec, p);
        const std::vector<EigenCloud> clouds =
            joint_pseudospectrum_sample(p.a, s, eps, delta, samples, seed, fixed_radius);
        const std::filesystem::path dir = output.empty() ? "." : output;
        std::filesystem::create_directories(dir);
        {
            std::ofstream out(dir / "clouds.csv");
            write_clouds_csv(out, clouds);
        }
        double max_re = -1e300;
        for (const EigenCloud& c : clouds)
            for (const Complex& l : c.eigenvalues) max_re = std::max(max_re, l.real());
        std::cout << clouds.size() << " clouds -> " << (dir / "clouds.csv").string()
                  << "; max Re = " << format_full(max_re) << "\n";
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    // grid and sampling modes run their own worker pool; keep the BLAS
    // backend single-threaded underneath it
    setenv("OPENBLAS_NUM_THREADS", "1", /*overwrite=*/0);
    try {
        return dispatch(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const NotHurwitz& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 6;
    } catch (const BudgetExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 6;
    } catch (const DegenerateEigenvalue& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 7;
    } catch (const ZeroStructuredPart& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 7;
    } catch (const ZeroStructuredGradient& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 7;
    } catch (const ContourEscapesWindow& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 8;
    } catch (const OpenContour& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 8;
    } catch (const StepSizeUnstable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 9;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const NonFiniteInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 10;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 10;
    }
}
