#pragma once

#include "sdfem/analysis.hpp"
#include "sdfem/discretization.hpp"
#include "sdfem/solver.hpp"
#include "sdfem/stabilization.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sdfem {

struct ExperimentConfig {
    std::string problem = "paper-benchmark";
    std::vector<int> N_list{8, 16, 32, 64, 128, 256, 512};
    std::vector<double> eps_list{1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14, 1e-16};
    std::vector<DeltaVariant> variants{DeltaVariant::Standard};
    double c_star = 0.5;
    double rho = 2.5;
    SolverConfig solver;
    AssemblyOptions assembly;
    int norm_quad_order = 5;

    /// Throws ConfigError on an invalid sweep.
    void validate() const;
};

struct ConvergenceRecord {
    int N = 0;
    double eps = 0.0;
    DeltaVariant variant = DeltaVariant::Standard;
    double c_star = 0.0;
    double e_eps_global = 0.0;
    double e_sd_global = 0.0;
    double e_eps_omegas = 0.0;
    double e_sd_omegas = 0.0;
    std::optional<double> rate_eps_global;
    std::optional<double> rate_sd_global;
    std::optional<double> rate_eps_omegas;
    std::optional<double> rate_sd_omegas;
    int solver_iters = 0;
    double residual = 0.0;
    bool failed = false;
    std::string failure;

    bool operator==(const ConvergenceRecord&) const = default;
};

struct TableArtifact {
    std::string problem;
    double eps = 0.0;
    DeltaVariant variant = DeltaVariant::Standard;
    double c_star = 0.0;
    std::string solver;
    std::string preconditioner;
    std::string timestamp;
    std::string version;
    std::vector<ConvergenceRecord> rows;

    bool operator==(const TableArtifact&) const = default;
};

/// One assemble -> solve -> analyze pass.
struct CaseResult {
    ShishkinMesh2D mesh;
    ProblemSpec problem;
    DeltaField delta;
    SolveResult solve;
    ConvergenceRecord record;
};

CaseResult run_case(const std::string& problem, int N, double eps, DeltaVariant variant, double c_star,
                    const SolverConfig& solver, const AssemblyOptions& assembly = {},
                    int norm_quad_order = 5, double rho = 2.5);

/// Rate of row k is filled from rows k and k+1 when row k+1 has twice the N
/// and neither solve failed.
void fill_rates(TableArtifact& table);

/// One table per (eps, variant), rows ordered by N.
std::vector<TableArtifact> run_experiment(const ExperimentConfig& config);

enum class TableFormat { Csv, Markdown, Json };
TableFormat parse_table_format(const std::string& s);

std::string render_table(const TableArtifact& table, TableFormat format);
/// Concatenates tables; CSV carries a single header row.
std::string render_tables(const std::vector<TableArtifact>& tables, TableFormat format);
TableArtifact parse_table_json(const std::string& text);
void emit_table(const TableArtifact& table, TableFormat format, const std::string& path);

struct GridConfig {
    std::string problem = "paper-benchmark";
    int N = 64;
    double eps = 1e-8;
    DeltaVariant variant = DeltaVariant::Standard;
    double c_star = 0.5;
    SolverConfig solver;
    int samples_per_cell = 3;
};

std::string render_error_grid(const GridConfig& config);
void emit_error_grid(const GridConfig& config, const std::string& path);

/// Writes the mesh breakpoints as "index kind value" lines, kind being
/// "abs" for coarse nodes and "off" for fine nodes given as offsets.
void write_mesh_dump(std::ostream& os, const ShishkinMesh2D& mesh);

} // namespace sdfem
