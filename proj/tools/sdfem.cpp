#include "sdfem/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

using namespace sdfem;

namespace {

constexpr int kExitFailedRow = 1;
constexpr int kExitConfig = 2;

struct SolverOptions {
    std::string method = "gmres";
    std::string precond = "ilu0";
    int restart = 60;
    int max_iterations = 10000;
    double tol = 1e-10;

    void add(CLI::App* app) {
        app->add_option("--solver", method, "gmres or direct")->capture_default_str();
        app->add_option("--precond", precond, "none, jacobi or ilu0")->capture_default_str();
        app->add_option("--restart", restart, "GMRES restart length")->capture_default_str();
        app->add_option("--max-iters", max_iterations, "GMRES iteration cap")->capture_default_str();
        app->add_option("--tol", tol, "relative residual tolerance")->capture_default_str();
    }

    SolverConfig config() const {
        SolverConfig c;
        c.method = parse_solver_method(method);
        c.preconditioner = parse_preconditioner(precond);
        c.restart = restart;
        c.max_iterations = max_iterations;
        c.rel_residual_tol = tol;
        c.validate();
        return c;
    }
};

struct RunOptions {
    std::string problem = "paper-benchmark";
    std::vector<int> N{8, 16, 32, 64, 128, 256};
    std::vector<double> eps{1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14, 1e-16};
    std::vector<std::string> delta{"standard"};
    double c_star = 0.5;
    double rho = 2.5;
    bool full = false;
    std::string out;
    std::string format = "csv";
    std::string dump_mesh;
    std::string dump_matrix;
    SolverOptions solver;
};

int run(const RunOptions& o) {
    ExperimentConfig cfg;
    cfg.problem = o.problem;
    cfg.N_list = o.N;
    if (o.full && std::find(cfg.N_list.begin(), cfg.N_list.end(), 512) == cfg.N_list.end() &&
        (cfg.N_list.empty() || cfg.N_list.back() < 512))
        cfg.N_list.push_back(512);
    cfg.eps_list = o.eps;
    cfg.variants.clear();
    for (const auto& d : o.delta)
        cfg.variants.push_back(parse_delta_variant(d));
    cfg.c_star = o.c_star;
    cfg.rho = o.rho;
    cfg.solver = o.solver.config();
    const auto format = parse_table_format(o.format);
    cfg.validate();

    if (!o.dump_mesh.empty() || !o.dump_matrix.empty()) {
        const auto p = make_problem(cfg.problem, cfg.eps_list.front());
        const AxisSpec xs{cfg.N_list.front(), p.epsilon, p.beta1, cfg.rho};
        const AxisSpec ys{cfg.N_list.front(), p.epsilon, p.beta2, cfg.rho};
        const auto mesh = build_mesh(xs, ys);
        if (!o.dump_mesh.empty()) {
            std::ofstream os(o.dump_mesh);
            if (!os) throw IoError("cannot open '" + o.dump_mesh + "'");
            for (int N : cfg.N_list)
                write_mesh_dump(os, build_mesh({N, p.epsilon, p.beta1, cfg.rho}, {N, p.epsilon, p.beta2, cfg.rho}));
        }
        if (!o.dump_matrix.empty()) {
            std::ofstream os(o.dump_matrix);
            if (!os) throw IoError("cannot open '" + o.dump_matrix + "'");
            const DeltaField delta(cfg.variants.front(), cfg.c_star, mesh);
            write_coordinate(os, assemble_system(mesh, p, delta, cfg.assembly).matrix);
        }
    }

    const auto tables = run_experiment(cfg);
    const std::string text = render_tables(tables, format);
    if (o.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(o.out, std::ios::binary);
        if (!os || !(os << text)) throw IoError("cannot write '" + o.out + "'");
    }

    int failed = 0;
    for (const auto& t : tables)
        for (const auto& r : t.rows)
            if (r.failed) {
                std::fprintf(stderr, "row failed: N=%d eps=%g delta=%s: %s\n", r.N, r.eps, to_string(r.variant),
                             r.failure.c_str());
                ++failed;
            }
    return failed ? kExitFailedRow : 0;
}

struct GridOptions {
    GridConfig grid;
    std::string delta = "standard";
    std::string out;
    SolverOptions solver;
};

int grid(GridOptions o) {
    o.grid.variant = parse_delta_variant(o.delta);
    o.grid.solver = o.solver.config();
    if (o.out.empty())
        std::cout << render_error_grid(o.grid);
    else
        emit_error_grid(o.grid, o.out);
    return 0;
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

// Property checks that need nothing beyond the library.
int verify(double c_star) {
    std::vector<Check> checks;
    const double eps = 1e-8;
    const auto p = benchmark_problem(eps);
    auto mesh_for = [](int N, double e) { return build_mesh({N, e, 2.0, 2.5}, {N, e, 1.0, 2.5}); };
    char buf[160];

    const auto report = validate_problem(p, 33);
    checks.push_back({"coefficient bounds", report.ok(), ""});

    {
        const auto q = benchmark_problem(0.1);
        std::mt19937 gen(1);
        std::uniform_real_distribution<double> u(0.01, 0.99);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const double x = u(gen), y = u(gen), h = 1e-5;
            auto val = [&](double a, double b) { return eval_exact(q, Point::from_values(a, b)); };
            const double c = val(x, y);
            const double lap = (val(x + h, y) + val(x - h, y) + val(x, y + h) + val(x, y - h) - 4 * c) / (h * h);
            const double fd = -0.1 * lap + 2 * (val(x + h, y) - val(x - h, y)) / (2 * h) +
                              (val(x, y + h) - val(x, y - h)) / (2 * h) + c;
            worst = std::max(worst, std::fabs(fd - eval_source(q, Point::from_values(x, y))));
        }
        std::snprintf(buf, sizeof buf, "max |f - FD| = %.2e", worst);
        checks.push_back({"source against finite differences", worst <= 1e-4, buf});
    }

    {
        double worst = 0.0;
        for (double e : {1e-2, 1e-4})
            for (int N : {8, 16}) {
                const auto mesh = mesh_for(N, e);
                const auto r = layer_integral_oracle(e, 2.0, mesh.x_s(), mesh.x_t(), mesh.x_axis().coarse_step());
                worst = std::max({worst, std::fabs(r.smooth_closed - r.smooth_quadrature) / r.smooth_closed,
                                  std::fabs(r.ramp_closed - r.ramp_quadrature) / r.ramp_closed});
            }
        std::snprintf(buf, sizeof buf, "max relative gap %.2e", worst);
        checks.push_back({"layer integral closed forms", worst <= 1e-12, buf});
    }

    {
        std::mt19937 gen(2);
        std::normal_distribution<double> normal;
        double worst = std::numeric_limits<double>::infinity();
        for (int N : {8, 32})
            for (auto variant : {DeltaVariant::Standard, DeltaVariant::Modified}) {
                const auto mesh = mesh_for(N, eps);
                const DeltaField delta(variant, c_star, mesh);
                const auto sys = assemble_system(mesh, p, delta);
                for (int t = 0; t < 100; ++t) {
                    std::vector<double> v(sys.dimension());
                    for (double& x : v) x = normal(gen);
                    const auto Av = sys.matrix.multiply(v);
                    double form = 0.0;
                    for (std::size_t k = 0; k < v.size(); ++k) form += v[k] * Av[k];
                    const double sd =
                        discrete_norm(p, DiscreteFunction::from_interior(mesh, v), ErrorRegion::Global, delta).sd_norm;
                    worst = std::min(worst, form / (sd * sd));
                }
            }
        std::snprintf(buf, sizeof buf, "min v'Av / ||v||_SD^2 = %.4f", worst);
        checks.push_back({"discrete coercivity", worst >= 0.5, buf});
    }

    {
        std::vector<double> g, s;
        for (int N = 8; N <= 128; N *= 2) {
            const auto mesh = mesh_for(N, eps);
            const DeltaField delta(DeltaVariant::Modified, c_star, mesh);
            const auto uI = interpolant(p, mesh);
            g.push_back(error_norm(p, uI, ErrorRegion::Global, delta).sd_norm * N / std::log(N));
            s.push_back(error_norm(p, uI, ErrorRegion::OmegaS, delta).sd_norm * std::pow(N, 1.5));
        }
        const double sg = *std::max_element(g.begin(), g.end()) / *std::min_element(g.begin(), g.end());
        const double ss = *std::max_element(s.begin(), s.end()) / *std::min_element(s.begin(), s.end());
        std::snprintf(buf, sizeof buf, "global max/min %.3f, smooth max/min %.3f", sg, ss);
        checks.push_back({"interpolation error ratios", sg <= 3.0 && ss <= 3.0, buf});
    }

    {
        SolverConfig direct;
        direct.method = SolverMethod::DirectLU;
        double worst = 0.0;
        for (int N : {8, 16, 32}) {
            const auto mesh = mesh_for(N, eps);
            const auto sys = assemble_system(mesh, p, DeltaField(DeltaVariant::Standard, c_star, mesh));
            const auto a = solve(sys, SolverConfig{});
            const auto b = solve(sys, direct);
            double diff = 0.0, scale = 0.0;
            for (std::size_t k = 0; k < a.solution.size(); ++k) {
                diff = std::max(diff, std::fabs(a.solution[k] - b.solution[k]));
                scale = std::max(scale, std::fabs(b.solution[k]));
            }
            worst = std::max(worst, diff / scale);
        }
        std::snprintf(buf, sizeof buf, "max relative difference %.2e", worst);
        checks.push_back({"GMRES against direct LU", worst <= 1e-8, buf});
    }

    int failed = 0;
    for (const auto& c : checks) {
        std::printf("[%s] %s%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.empty() ? "" : ": ",
                    c.detail.c_str());
        failed += !c.pass;
    }
    return failed ? kExitFailedRow : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streamline diffusion FEM on Shishkin meshes"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "convergence tables over N and eps");
    run_cmd->add_option("--problem", run_opts.problem)->capture_default_str();
    run_cmd->add_option("--N", run_opts.N, "comma separated mesh sizes")->delimiter(',');
    run_cmd->add_option("--eps", run_opts.eps, "comma separated perturbation parameters")->delimiter(',');
    run_cmd->add_option("--delta", run_opts.delta, "standard, modified, or both comma separated")->delimiter(',');
    run_cmd->add_option("--cstar", run_opts.c_star, "stabilization constant")->capture_default_str();
    run_cmd->add_option("--rho", run_opts.rho, "transition width factor")->capture_default_str();
    run_cmd->add_flag("--full", run_opts.full, "append N=512 to the sweep");
    run_cmd->add_option("--out", run_opts.out, "output file, stdout when omitted");
    run_cmd->add_option("--format", run_opts.format, "csv, markdown or json")->capture_default_str();
    run_cmd->add_option("--dump-mesh", run_opts.dump_mesh, "write breakpoints of every mesh in the sweep");
    run_cmd->add_option("--dump-matrix", run_opts.dump_matrix,
                        "write the matrix of the first (N, eps, delta) case as row col value lines");
    run_opts.solver.add(run_cmd);

    GridOptions grid_opts;
    auto* grid_cmd = app.add_subcommand("grid", "pointwise error samples of one case as JSON");
    grid_cmd->add_option("--problem", grid_opts.grid.problem)->capture_default_str();
    grid_cmd->add_option("--N", grid_opts.grid.N)->capture_default_str();
    grid_cmd->add_option("--eps", grid_opts.grid.eps)->capture_default_str();
    grid_cmd->add_option("--delta", grid_opts.delta)->capture_default_str();
    grid_cmd->add_option("--cstar", grid_opts.grid.c_star)->capture_default_str();
    grid_cmd->add_option("--samples", grid_opts.grid.samples_per_cell, "samples per cell and direction")
        ->capture_default_str();
    grid_cmd->add_option("--out", grid_opts.out, "output file, stdout when omitted");
    grid_opts.solver.add(grid_cmd);

    double verify_cstar = ExperimentConfig{}.c_star;
    auto* verify_cmd = app.add_subcommand("verify", "oracle, coercivity and interpolation checks");
    verify_cmd->add_option("--cstar", verify_cstar)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run_cmd) return run(run_opts);
        if (*grid_cmd) return grid(grid_opts);
        if (*verify_cmd) return verify(verify_cstar);
    } catch (const SolverError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailedRow;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return 0;
}
