#pragma once

#include "sdfem/discretization.hpp"
#include "sdfem/errors.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sdfem {

enum class SolverMethod { GMRESRestarted, DirectLU };
enum class Preconditioner { None, Jacobi, ILU0 };

const char* to_string(SolverMethod m);
const char* to_string(Preconditioner p);
SolverMethod parse_solver_method(const std::string& s);
Preconditioner parse_preconditioner(const std::string& s);

struct SolverConfig {
    SolverMethod method = SolverMethod::GMRESRestarted;
    int restart = 60;
    int max_iterations = 10000;
    double rel_residual_tol = 1e-10;
    Preconditioner preconditioner = Preconditioner::ILU0;

    /// Throws ConfigError when restart < 1 or tol outside (0, 1e-2).
    void validate() const;
};

struct SolveStats {
    SolverMethod method = SolverMethod::GMRESRestarted;
    Preconditioner preconditioner = Preconditioner::None;
    int iterations = 0;
    /// ||F - A u|| / ||F|| from a fresh product after the solve.
    double relative_residual = 0.0;
    double wall_seconds = 0.0;
    bool converged = false;
    std::optional<SolverError::Kind> failure;
    /// Relative Arnoldi residual estimates, one per inner iteration.
    std::vector<double> residual_history;
    /// Index into residual_history at which each restart cycle begins.
    std::vector<int> cycle_starts;
};

struct SolveResult {
    std::vector<double> solution;
    SolveStats stats;
};

/// Solves A u = F from a zero initial guess.
///
/// GMRES runs on the row-equilibrated system and the preconditioner is built
/// from it; convergence requires both the equilibrated and the raw relative
/// residual below tolerance.
/// GMRES that exhausts max_iterations returns its best iterate with
/// stats.converged = false and failure = MaxIterationsExceeded. A singular
/// direct factorization or an unrecoverable Krylov breakdown throws
/// SolverError.
SolveResult solve(const SparseSystem& system, const SolverConfig& config);

/// Incomplete LU with the sparsity of A. Throws SolverError(SingularFactor)
/// on a zero pivot.
class Ilu0 {
public:
    explicit Ilu0(const CsrMatrix& A);
    void apply(std::span<const double> r, std::span<double> z) const;

private:
    CsrMatrix lu_;
    std::vector<int> diag_;
};

/// Banded LU with partial pivoting; bandwidths are taken from the pattern.
class BandedLu {
public:
    explicit BandedLu(const CsrMatrix& A);
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    int n_ = 0, kl_ = 0, ku_ = 0, width_ = 0;
    std::vector<double> band_;
    std::vector<int> pivot_;

    double& at(int i, int j) { return band_[static_cast<std::size_t>(i) * width_ + (j - i + kl_)]; }
    double at(int i, int j) const { return band_[static_cast<std::size_t>(i) * width_ + (j - i + kl_)]; }
};

double relative_residual(const CsrMatrix& A, std::span<const double> u, std::span<const double> F);

} // namespace sdfem
