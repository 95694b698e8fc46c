#include "sdfem/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>

namespace sdfem {

const char* to_string(SolverMethod m) {
    return m == SolverMethod::GMRESRestarted ? "gmres" : "direct";
}

const char* to_string(Preconditioner p) {
    switch (p) {
    case Preconditioner::None: return "none";
    case Preconditioner::Jacobi: return "jacobi";
    case Preconditioner::ILU0: return "ilu0";
    }
    return "?";
}

SolverMethod parse_solver_method(const std::string& s) {
    if (s == "gmres") return SolverMethod::GMRESRestarted;
    if (s == "direct") return SolverMethod::DirectLU;
    throw ConfigError("unknown solver '" + s + "'");
}

Preconditioner parse_preconditioner(const std::string& s) {
    if (s == "none") return Preconditioner::None;
    if (s == "jacobi") return Preconditioner::Jacobi;
    if (s == "ilu0") return Preconditioner::ILU0;
    throw ConfigError("unknown preconditioner '" + s + "'");
}

void SolverConfig::validate() const {
    if (restart < 1) throw ConfigError("restart must be >= 1");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (!(rel_residual_tol > 0.0 && rel_residual_tol < 1e-2))
        throw ConfigError("tolerance must lie in (0, 1e-2)");
}

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

using Apply = std::function<void(std::span<const double>, std::span<double>)>;

} // namespace

double relative_residual(const CsrMatrix& A, std::span<const double> u, std::span<const double> F) {
    auto r = A.multiply(u);
    for (int i = 0; i < A.rows; ++i) r[i] = F[i] - r[i];
    const double nf = norm2(F);
    return nf == 0.0 ? norm2(r) : norm2(r) / nf;
}

Ilu0::Ilu0(const CsrMatrix& A) : lu_(A), diag_(A.rows) {
    const int n = A.rows;
    for (int i = 0; i < n; ++i) {
        const auto b = lu_.col.begin() + lu_.row_ptr[i];
        const auto e = lu_.col.begin() + lu_.row_ptr[i + 1];
        const auto it = std::lower_bound(b, e, i);
        if (it == e || *it != i)
            throw SolverError(SolverError::Kind::SingularFactor, "ILU0: missing diagonal entry");
        diag_[i] = static_cast<int>(it - lu_.col.begin());
    }
    std::vector<int> position(n, -1);
    for (int i = 0; i < n; ++i) {
        for (int p = lu_.row_ptr[i]; p < lu_.row_ptr[i + 1]; ++p) position[lu_.col[p]] = p;
        for (int p = lu_.row_ptr[i]; p < diag_[i]; ++p) {
            const int k = lu_.col[p];
            const double pivot = lu_.val[diag_[k]];
            if (pivot == 0.0)
                throw SolverError(SolverError::Kind::SingularFactor, "ILU0: zero pivot");
            const double l = lu_.val[p] / pivot;
            lu_.val[p] = l;
            for (int q = diag_[k] + 1; q < lu_.row_ptr[k + 1]; ++q) {
                const int pos = position[lu_.col[q]];
                if (pos >= 0) lu_.val[pos] -= l * lu_.val[q];
            }
        }
        if (lu_.val[diag_[i]] == 0.0)
            throw SolverError(SolverError::Kind::SingularFactor, "ILU0: zero pivot");
        for (int p = lu_.row_ptr[i]; p < lu_.row_ptr[i + 1]; ++p) position[lu_.col[p]] = -1;
    }
}

void Ilu0::apply(std::span<const double> r, std::span<double> z) const {
    const int n = lu_.rows;
    for (int i = 0; i < n; ++i) {
        double s = r[i];
        for (int p = lu_.row_ptr[i]; p < diag_[i]; ++p) s -= lu_.val[p] * z[lu_.col[p]];
        z[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = z[i];
        for (int p = diag_[i] + 1; p < lu_.row_ptr[i + 1]; ++p) s -= lu_.val[p] * z[lu_.col[p]];
        z[i] = s / lu_.val[diag_[i]];
    }
}

BandedLu::BandedLu(const CsrMatrix& A) : n_(A.rows) {
    for (int r = 0; r < n_; ++r)
        for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) {
            kl_ = std::max(kl_, r - A.col[p]);
            ku_ = std::max(ku_, A.col[p] - r);
        }
    // Row interchanges widen the upper band by kl.
    width_ = 2 * kl_ + ku_ + 1;
    band_.assign(static_cast<std::size_t>(n_) * width_, 0.0);
    pivot_.resize(n_);
    for (int r = 0; r < n_; ++r)
        for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) at(r, A.col[p]) = A.val[p];

    for (int k = 0; k < n_; ++k) {
        const int last_row = std::min(n_ - 1, k + kl_);
        const int last_col = std::min(n_ - 1, k + kl_ + ku_);
        int p = k;
        for (int i = k + 1; i <= last_row; ++i)
            if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
        pivot_[k] = p;
        if (at(p, k) == 0.0)
            throw SolverError(SolverError::Kind::SingularFactor, "direct LU: zero pivot");
        if (p != k)
            for (int j = k; j <= last_col; ++j) std::swap(at(k, j), at(p, j));
        const double inv = 1.0 / at(k, k);
        for (int i = k + 1; i <= last_row; ++i) {
            const double l = at(i, k) * inv;
            at(i, k) = l;
            if (l == 0.0) continue;
            for (int j = k + 1; j <= last_col; ++j) at(i, j) -= l * at(k, j);
        }
    }
}

std::vector<double> BandedLu::solve(std::span<const double> rhs) const {
    std::vector<double> x(rhs.begin(), rhs.end());
    for (int k = 0; k < n_; ++k) {
        std::swap(x[k], x[pivot_[k]]);
        const int last_row = std::min(n_ - 1, k + kl_);
        for (int i = k + 1; i <= last_row; ++i) x[i] -= at(i, k) * x[k];
    }
    for (int k = n_ - 1; k >= 0; --k) {
        const int last_col = std::min(n_ - 1, k + kl_ + ku_);
        double s = x[k];
        for (int j = k + 1; j <= last_col; ++j) s -= at(k, j) * x[j];
        x[k] = s / at(k, k);
    }
    return x;
}

namespace {

Apply make_preconditioner(const CsrMatrix& A, Preconditioner requested, Preconditioner& used) {
    if (requested == Preconditioner::ILU0) {
        try {
            auto ilu = std::make_shared<Ilu0>(A);
            used = Preconditioner::ILU0;
            return [ilu](std::span<const double> r, std::span<double> z) { ilu->apply(r, z); };
        } catch (const SolverError&) {
            requested = Preconditioner::Jacobi;
        }
    }
    if (requested == Preconditioner::Jacobi) {
        std::vector<double> inv(A.rows);
        bool ok = true;
        for (int i = 0; i < A.rows && ok; ++i) {
            const double d = A.at(i, i);
            ok = d != 0.0;
            inv[i] = ok ? 1.0 / d : 0.0;
        }
        if (ok) {
            used = Preconditioner::Jacobi;
            return [inv = std::move(inv)](std::span<const double> r, std::span<double> z) {
                for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv[i] * r[i];
            };
        }
    }
    used = Preconditioner::None;
    return [](std::span<const double> r, std::span<double> z) { std::copy(r.begin(), r.end(), z.begin()); };
}

// Rows scaled to unit max-norm. Layer rows are O(eps) smaller than coarse
// rows, so the raw residual alone leaves layer unknowns unresolved.
SparseSystem equilibrate(const SparseSystem& system) {
    SparseSystem out = system;
    CsrMatrix& A = out.matrix;
    for (int r = 0; r < A.rows; ++r) {
        double m = 0.0;
        for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) m = std::max(m, std::abs(A.val[k]));
        if (m == 0.0) continue;
        for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) A.val[k] /= m;
        out.rhs[r] /= m;
    }
    return out;
}

// Right-preconditioned restarted GMRES with modified Gram-Schmidt and
// Givens rotations on the equilibrated system. The Arnoldi residual equals
// its true residual in exact arithmetic. Converged once both the
// equilibrated and the raw relative residual are below tolerance.
void gmres(const SparseSystem& raw, const SparseSystem& scaled, const SolverConfig& cfg, const Apply& precond,
           std::vector<double>& x, SolveStats& stats) {
    const CsrMatrix& A = scaled.matrix;
    std::span<const double> F = scaled.rhs;
    const int n = A.rows;
    const int m = cfg.restart;
    const double nf = norm2(F);
    x.assign(n, 0.0);
    if (nf == 0.0) {
        stats.converged = true;
        return;
    }
    double target = cfg.rel_residual_tol;

    std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
    std::vector<double> H(static_cast<std::size_t>(m + 1) * m, 0.0);
    auto h = [&](int i, int j) -> double& { return H[static_cast<std::size_t>(i) * m + j]; };
    std::vector<double> cs(m), sn(m), g(m + 1), y(m), z(n), w(n), r(n);

    double best_residual = std::numeric_limits<double>::infinity();
    while (stats.iterations < cfg.max_iterations) {
        A.multiply(x, r);
        for (int i = 0; i < n; ++i) r[i] = F[i] - r[i];
        const double beta = norm2(r);
        const double rel_scaled = beta / nf;
        const double rel_raw = relative_residual(raw.matrix, x, raw.rhs);
        if (rel_scaled <= cfg.rel_residual_tol && rel_raw <= cfg.rel_residual_tol) {
            stats.converged = true;
            return;
        }
        if (rel_scaled <= target) target = 0.1 * rel_scaled;
        const double rel = std::max(rel_scaled, rel_raw);
        if (!(rel < best_residual)) {
            // A full cycle made no progress; keep the iterate and report.
            stats.failure = SolverError::Kind::Breakdown;
            return;
        }
        best_residual = rel;

        stats.cycle_starts.push_back(static_cast<int>(stats.residual_history.size()));
        for (int i = 0; i < n; ++i) V[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int k = 0;
        for (; k < m && stats.iterations < cfg.max_iterations; ++k) {
            precond(V[k], z);
            A.multiply(z, w);
            for (int i = 0; i <= k; ++i) {
                h(i, k) = dot(w, V[i]);
                for (int t = 0; t < n; ++t) w[t] -= h(i, k) * V[i][t];
            }
            h(k + 1, k) = norm2(w);
            const bool happy = h(k + 1, k) <= 1e-14 * beta;
            if (!happy)
                for (int t = 0; t < n; ++t) V[k + 1][t] = w[t] / h(k + 1, k);

            for (int i = 0; i < k; ++i) {
                const double a = h(i, k), b = h(i + 1, k);
                h(i, k) = cs[i] * a + sn[i] * b;
                h(i + 1, k) = -sn[i] * a + cs[i] * b;
            }
            const double denom = std::hypot(h(k, k), h(k + 1, k));
            if (denom == 0.0)
                throw SolverError(SolverError::Kind::Breakdown, "GMRES: singular Hessenberg matrix");
            cs[k] = h(k, k) / denom;
            sn[k] = h(k + 1, k) / denom;
            h(k, k) = denom;
            h(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];

            ++stats.iterations;
            const double est = std::abs(g[k + 1]) / nf;
            stats.residual_history.push_back(est);
            if (happy || est <= target) {
                ++k;
                break;
            }
        }

        for (int i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < k; ++j) s -= h(i, j) * y[j];
            y[i] = s / h(i, i);
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (int j = 0; j < k; ++j)
            for (int t = 0; t < n; ++t) w[t] += y[j] * V[j][t];
        precond(w, z);
        for (int t = 0; t < n; ++t) x[t] += z[t];
    }

    stats.converged = relative_residual(A, x, F) <= cfg.rel_residual_tol &&
                      relative_residual(raw.matrix, x, raw.rhs) <= cfg.rel_residual_tol;
    if (!stats.converged) stats.failure = SolverError::Kind::MaxIterationsExceeded;
}

} // namespace

SolveResult solve(const SparseSystem& system, const SolverConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto& A = system.matrix;
    if (A.rows < 1 || static_cast<int>(system.rhs.size()) != A.rows)
        throw ConfigError("system must be square with matching right-hand side");

    SolveResult out;
    out.stats.method = config.method;
    if (config.method == SolverMethod::DirectLU) {
        const BandedLu lu(A);
        out.solution = lu.solve(system.rhs);
        out.stats.iterations = 1;
    } else {
        const SparseSystem scaled = equilibrate(system);
        const auto precond = make_preconditioner(scaled.matrix, config.preconditioner, out.stats.preconditioner);
        gmres(system, scaled, config, precond, out.solution, out.stats);
    }
    out.stats.relative_residual = relative_residual(A, out.solution, system.rhs);
    if (config.method == SolverMethod::DirectLU)
        out.stats.converged = out.stats.relative_residual <= config.rel_residual_tol;
    out.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

} // namespace sdfem
