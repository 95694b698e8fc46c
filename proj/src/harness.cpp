#include "sdfem/harness.hpp"

#include "sdfem/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

namespace sdfem {

namespace {

constexpr const char* kVersion = "sdfem 1.0.0";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string sci(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

void ExperimentConfig::validate() const {
    if (N_list.empty()) throw ConfigError("N list is empty");
    if (eps_list.empty()) throw ConfigError("eps list is empty");
    if (variants.empty()) throw ConfigError("no delta variant selected");
    for (std::size_t k = 0; k < N_list.size(); ++k) {
        if (N_list[k] < 4 || N_list[k] % 2 != 0)
            throw ConfigError("every N must be even and >= 4");
        if (k > 0 && N_list[k] <= N_list[k - 1])
            throw ConfigError("N list must be strictly increasing");
    }
    const int max_N = N_list.back();
    for (double eps : eps_list)
        if (!(eps > 0.0) || eps > 1.0 / max_N)
            throw ConfigError("every eps must lie in (0, 1/max(N)]");
    if (!(c_star > 0.0)) throw ConfigError("c_star must be positive");
    if (norm_quad_order < 4) throw ConfigError("norm quadrature order must be >= 4");
    solver.validate();
}

CaseResult run_case(const std::string& problem_name, int N, double eps, DeltaVariant variant, double c_star,
                    const SolverConfig& solver, const AssemblyOptions& assembly, int norm_quad_order,
                    double rho) {
    ProblemSpec problem = make_problem(problem_name, eps);
    ShishkinMesh2D mesh = build_mesh({N, eps, problem.beta1, rho}, {N, eps, problem.beta2, rho});
    DeltaField delta(variant, c_star, mesh);
    CaseResult out{mesh, problem, delta, {}, {}};

    auto& rec = out.record;
    rec.N = N;
    rec.eps = eps;
    rec.variant = variant;
    rec.c_star = c_star;

    const SparseSystem sys = assemble_system(out.mesh, out.problem, out.delta, assembly);
    try {
        out.solve = solve(sys, solver);
    } catch (const SolverError& e) {
        rec.failed = true;
        rec.failure = e.what();
    }
    rec.solver_iters = out.solve.stats.iterations;
    rec.residual = out.solve.stats.relative_residual;
    if (!rec.failed && !out.solve.stats.converged) {
        rec.failed = true;
        rec.failure = out.solve.stats.failure == SolverError::Kind::Breakdown ? "breakdown"
                                                                               : "max iterations exceeded";
    }
    if (rec.failed) {
        rec.e_eps_global = rec.e_sd_global = rec.e_eps_omegas = rec.e_sd_omegas = kNaN;
        return out;
    }

    const auto u_h = DiscreteFunction::from_interior(out.mesh, out.solve.solution);
    const auto global = error_norm(out.problem, u_h, ErrorRegion::Global, out.delta, norm_quad_order);
    const auto smooth = error_norm(out.problem, u_h, ErrorRegion::OmegaS, out.delta, norm_quad_order);
    rec.e_eps_global = global.eps_norm;
    rec.e_sd_global = global.sd_norm;
    rec.e_eps_omegas = smooth.eps_norm;
    rec.e_sd_omegas = smooth.sd_norm;
    return out;
}

void fill_rates(TableArtifact& table) {
    auto& rows = table.rows;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        auto& r = rows[k];
        r.rate_eps_global = r.rate_sd_global = r.rate_eps_omegas = r.rate_sd_omegas = std::nullopt;
        if (k + 1 >= rows.size()) continue;
        const auto& next = rows[k + 1];
        if (next.N != 2 * r.N || r.failed || next.failed) continue;
        r.rate_eps_global = rate(r.e_eps_global, next.e_eps_global);
        r.rate_sd_global = rate(r.e_sd_global, next.e_sd_global);
        r.rate_eps_omegas = rate(r.e_eps_omegas, next.e_eps_omegas);
        r.rate_sd_omegas = rate(r.e_sd_omegas, next.e_sd_omegas);
    }
}

std::vector<TableArtifact> run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<TableArtifact> tables;
    for (double eps : config.eps_list) {
        for (DeltaVariant variant : config.variants) {
            TableArtifact t;
            t.problem = config.problem;
            t.eps = eps;
            t.variant = variant;
            t.c_star = config.c_star;
            t.solver = to_string(config.solver.method);
            t.preconditioner = config.solver.method == SolverMethod::DirectLU
                                   ? "none"
                                   : to_string(config.solver.preconditioner);
            t.timestamp = utc_timestamp();
            t.version = kVersion;
            for (int N : config.N_list) {
                auto res = run_case(config.problem, N, eps, variant, config.c_star, config.solver,
                                    config.assembly, config.norm_quad_order, config.rho);
                t.rows.push_back(res.record);
            }
            fill_rates(t);
            tables.push_back(std::move(t));
        }
    }
    return tables;
}

TableFormat parse_table_format(const std::string& s) {
    if (s == "csv") return TableFormat::Csv;
    if (s == "markdown" || s == "md") return TableFormat::Markdown;
    if (s == "json") return TableFormat::Json;
    throw ConfigError("unknown table format '" + s + "'");
}

namespace {

constexpr const char* kCsvHeader =
    "N,eps,variant,cstar,e_eps_global,rate_eps_global,e_sd_global,rate_sd_global,"
    "e_eps_omegas,rate_eps_omegas,e_sd_omegas,rate_sd_omegas,solver_iters,residual";

std::string optional_cell(const std::optional<double>& v, const char* empty) {
    return v ? sci(*v) : std::string(empty);
}

void csv_rows(std::ostringstream& os, const TableArtifact& t) {
    for (const auto& r : t.rows) {
        os << r.N << ',' << sci(r.eps) << ',' << to_string(r.variant) << ',' << sci(r.c_star) << ','
           << sci(r.e_eps_global) << ',' << optional_cell(r.rate_eps_global, "") << ','
           << sci(r.e_sd_global) << ',' << optional_cell(r.rate_sd_global, "") << ','
           << sci(r.e_eps_omegas) << ',' << optional_cell(r.rate_eps_omegas, "") << ','
           << sci(r.e_sd_omegas) << ',' << optional_cell(r.rate_sd_omegas, "") << ','
           << r.solver_iters << ',' << sci(r.residual) << '\n';
    }
}

std::string fixed_rate(const std::optional<double>& v) {
    if (!v) return "---";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", *v);
    return buf;
}

void markdown(std::ostringstream& os, const TableArtifact& t) {
    os << "### " << t.problem << ", eps = " << sci(t.eps) << ", delta = " << to_string(t.variant)
       << ", c_star = " << sci(t.c_star) << "\n\n";
    os << "| N | e_eps | Rate | e_SD | Rate | e_eps(Omega_s) | Rate | e_SD(Omega_s) | Rate | iters | residual |\n";
    os << "|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : t.rows) {
        os << "| " << r.N << " | " << sci(r.e_eps_global) << " | " << fixed_rate(r.rate_eps_global) << " | "
           << sci(r.e_sd_global) << " | " << fixed_rate(r.rate_sd_global) << " | " << sci(r.e_eps_omegas)
           << " | " << fixed_rate(r.rate_eps_omegas) << " | " << sci(r.e_sd_omegas) << " | "
           << fixed_rate(r.rate_sd_omegas) << " | " << r.solver_iters << " | " << sci(r.residual);
        if (r.failed) os << " (failed: " << r.failure << ")";
        os << " |\n";
    }
    os << '\n';
}

nlohmann::json number_or_null(double v) {
    return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
}

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json to_json(const TableArtifact& t) {
    nlohmann::json j;
    j["problem"] = t.problem;
    j["eps"] = t.eps;
    j["variant"] = to_string(t.variant);
    j["cstar"] = t.c_star;
    j["solver"] = t.solver;
    j["preconditioner"] = t.preconditioner;
    j["timestamp"] = t.timestamp;
    j["version"] = t.version;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : t.rows) {
        j["rows"].push_back({
            {"N", r.N},
            {"eps", r.eps},
            {"variant", to_string(r.variant)},
            {"cstar", r.c_star},
            {"e_eps_global", number_or_null(r.e_eps_global)},
            {"rate_eps_global", optional_json(r.rate_eps_global)},
            {"e_sd_global", number_or_null(r.e_sd_global)},
            {"rate_sd_global", optional_json(r.rate_sd_global)},
            {"e_eps_omegas", number_or_null(r.e_eps_omegas)},
            {"rate_eps_omegas", optional_json(r.rate_eps_omegas)},
            {"e_sd_omegas", number_or_null(r.e_sd_omegas)},
            {"rate_sd_omegas", optional_json(r.rate_sd_omegas)},
            {"solver_iters", r.solver_iters},
            {"residual", r.residual},
            {"failed", r.failed},
            {"failure", r.failure},
        });
    }
    return j;
}

double number_from(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

std::optional<double> optional_from(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

} // namespace

std::string render_table(const TableArtifact& table, TableFormat format) {
    return render_tables({table}, format);
}

std::string render_tables(const std::vector<TableArtifact>& tables, TableFormat format) {
    std::ostringstream os;
    switch (format) {
    case TableFormat::Csv:
        os << kCsvHeader << '\n';
        for (const auto& t : tables) csv_rows(os, t);
        break;
    case TableFormat::Markdown:
        for (const auto& t : tables) markdown(os, t);
        break;
    case TableFormat::Json:
        if (tables.size() == 1) {
            os << to_json(tables.front()).dump(2) << '\n';
        } else {
            auto arr = nlohmann::json::array();
            for (const auto& t : tables) arr.push_back(to_json(t));
            os << arr.dump(2) << '\n';
        }
        break;
    }
    return os.str();
}

TableArtifact parse_table_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        TableArtifact t;
        t.problem = j.at("problem").get<std::string>();
        t.eps = j.at("eps").get<double>();
        t.variant = parse_delta_variant(j.at("variant").get<std::string>());
        t.c_star = j.at("cstar").get<double>();
        t.solver = j.at("solver").get<std::string>();
        t.preconditioner = j.at("preconditioner").get<std::string>();
        t.timestamp = j.at("timestamp").get<std::string>();
        t.version = j.at("version").get<std::string>();
        for (const auto& jr : j.at("rows")) {
            ConvergenceRecord r;
            r.N = jr.at("N").get<int>();
            r.eps = jr.at("eps").get<double>();
            r.variant = parse_delta_variant(jr.at("variant").get<std::string>());
            r.c_star = jr.at("cstar").get<double>();
            r.e_eps_global = number_from(jr.at("e_eps_global"));
            r.rate_eps_global = optional_from(jr.at("rate_eps_global"));
            r.e_sd_global = number_from(jr.at("e_sd_global"));
            r.rate_sd_global = optional_from(jr.at("rate_sd_global"));
            r.e_eps_omegas = number_from(jr.at("e_eps_omegas"));
            r.rate_eps_omegas = optional_from(jr.at("rate_eps_omegas"));
            r.e_sd_omegas = number_from(jr.at("e_sd_omegas"));
            r.rate_sd_omegas = optional_from(jr.at("rate_sd_omegas"));
            r.solver_iters = jr.at("solver_iters").get<int>();
            r.residual = jr.at("residual").get<double>();
            r.failed = jr.at("failed").get<bool>();
            r.failure = jr.at("failure").get<std::string>();
            t.rows.push_back(std::move(r));
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed table JSON: ") + e.what());
    }
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path + "'");
}

} // namespace

void emit_table(const TableArtifact& table, TableFormat format, const std::string& path) {
    write_file(path, render_table(table, format));
}

std::string render_error_grid(const GridConfig& config) {
    const auto res = run_case(config.problem, config.N, config.eps, config.variant, config.c_star, config.solver);
    if (res.record.failed)
        throw SolverError(SolverError::Kind::MaxIterationsExceeded, "grid case failed: " + res.record.failure);
    const auto u_h = DiscreteFunction::from_interior(res.mesh, res.solve.solution);
    const auto grid = pointwise_error_grid(res.problem, u_h, config.samples_per_cell);

    nlohmann::json j;
    j["N"] = config.N;
    j["eps"] = config.eps;
    j["variant"] = to_string(config.variant);
    j["cstar"] = config.c_star;
    j["samples_per_cell"] = config.samples_per_cell;
    j["columns"] = {"x", "y", "abs_error", "offset_x", "offset_y", "region"};
    auto points = nlohmann::json::array();
    for (const auto& g : grid)
        points.push_back({g.x.value, g.y.value, g.abs_error, g.x.offset, g.y.offset, to_string(g.region)});
    j["points"] = std::move(points);
    return j.dump() + "\n";
}

void emit_error_grid(const GridConfig& config, const std::string& path) {
    write_file(path, render_error_grid(config));
}

void write_mesh_dump(std::ostream& os, const ShishkinMesh2D& mesh) {
    const auto old = os.precision(17);
    auto axis = [&](const char* name, const Axis1D& ax) {
        os << "# axis " << name << " N=" << ax.N() << " lambda=" << ax.lambda() << '\n';
        for (int i = 0; i <= ax.N(); ++i) {
            if (i <= ax.half())
                os << i << " abs " << ax.coarse_points()[i] << '\n';
            else
                os << i << " off " << ax.fine_offsets()[i - ax.half()] << '\n';
        }
    };
    axis("x", mesh.x_axis());
    axis("y", mesh.y_axis());
    os.precision(old);
}

} // namespace sdfem
