#include "doctest.h"

#include "sdfem/errors.hpp"
#include "sdfem/solver.hpp"

#include <cmath>
#include <vector>

using namespace sdfem;

namespace {

SparseSystem dense_system(const std::vector<std::vector<double>>& rows, std::vector<double> rhs) {
    SparseSystem sys;
    CsrMatrix& A = sys.matrix;
    A.rows = static_cast<int>(rows.size());
    A.row_ptr.push_back(0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            if (row[c] != 0.0) {
                A.col.push_back(static_cast<int>(c));
                A.val.push_back(row[c]);
            }
        A.row_ptr.push_back(static_cast<int>(A.col.size()));
    }
    sys.rhs = std::move(rhs);
    return sys;
}

SparseSystem benchmark_system(int N, double eps, DeltaVariant variant) {
    const auto p = benchmark_problem(eps);
    const auto mesh = build_mesh({N, eps, 2.0, 2.5}, {N, eps, 1.0, 2.5});
    return assemble_system(mesh, p, DeltaField(variant, 0.5, mesh));
}

double max_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::fabs(x));
    return m;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        m = std::max(m, std::fabs(a[k] - b[k]));
    return m;
}

SolverConfig direct() {
    SolverConfig c;
    c.method = SolverMethod::DirectLU;
    return c;
}

} // namespace

TEST_CASE("identity system") {
    const auto sys = dense_system({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {1, 2, 3});
    for (auto pc : {Preconditioner::None, Preconditioner::Jacobi, Preconditioner::ILU0}) {
        SolverConfig cfg;
        cfg.preconditioner = pc;
        const auto r = solve(sys, cfg);
        CHECK(r.stats.converged);
        CHECK(r.stats.iterations == 1);
        CHECK(r.solution == std::vector<double>{1, 2, 3});
    }
}

TEST_CASE("upper triangular 2x2 system") {
    const auto sys = dense_system({{2, 1}, {0, 1}}, {3, 1});
    for (auto cfg : {SolverConfig{}, direct()}) {
        const auto r = solve(sys, cfg);
        CHECK(r.stats.converged);
        CHECK(r.solution[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.solution[1] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.stats.relative_residual <= 1e-14);
    }
}

TEST_CASE("zero right-hand side") {
    const auto sys = dense_system({{2, 1}, {0, 1}}, {0, 0});
    const auto r = solve(sys, SolverConfig{});
    CHECK(r.stats.converged);
    CHECK(r.solution == std::vector<double>{0, 0});
}

TEST_CASE("preconditioner fallback") {
    // ILU0 hits a zero pivot in row 2, Jacobi still works.
    const auto a = dense_system({{1, 1, 0}, {1, 1, 1}, {0, 1, 1}}, {2, 3, 2});
    CHECK_THROWS_AS(Ilu0(a.matrix), SolverError);
    const auto ra = solve(a, SolverConfig{});
    CHECK(ra.stats.preconditioner == Preconditioner::Jacobi);
    CHECK(ra.stats.converged);
    for (double v : ra.solution)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-10));

    // Zero diagonal: neither ILU0 nor Jacobi apply.
    const auto b = dense_system({{0, 1}, {1, 0}}, {5, 7});
    const auto rb = solve(b, SolverConfig{});
    CHECK(rb.stats.preconditioner == Preconditioner::None);
    CHECK(rb.solution[0] == doctest::Approx(7.0));
    CHECK(rb.solution[1] == doctest::Approx(5.0));

    // Partial pivoting handles the zero leading entry.
    const auto rd = solve(b, direct());
    CHECK(rd.solution[0] == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(rd.solution[1] == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("singular direct factorization") {
    const auto sys = dense_system({{1, 1}, {1, 1}}, {1, 2});
    try {
        solve(sys, direct());
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.kind() == SolverError::Kind::SingularFactor);
    }
}

TEST_CASE("iteration cap is reported, not thrown") {
    const auto sys = benchmark_system(32, 1e-8, DeltaVariant::Standard);
    SolverConfig cfg;
    cfg.preconditioner = Preconditioner::None;
    cfg.max_iterations = 5;
    const auto r = solve(sys, cfg);
    CHECK_FALSE(r.stats.converged);
    REQUIRE(r.stats.failure.has_value());
    CHECK(*r.stats.failure == SolverError::Kind::MaxIterationsExceeded);
    CHECK(r.stats.iterations == 5);
    CHECK(r.stats.relative_residual > cfg.rel_residual_tol);
    CHECK(r.solution.size() == static_cast<std::size_t>(sys.dimension()));
}

TEST_CASE("configuration validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.restart = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.rel_residual_tol = 0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.rel_residual_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    CHECK(parse_solver_method("gmres") == SolverMethod::GMRESRestarted);
    CHECK(parse_solver_method("direct") == SolverMethod::DirectLU);
    CHECK(parse_preconditioner("ilu0") == Preconditioner::ILU0);
    CHECK(parse_preconditioner("none") == Preconditioner::None);
    CHECK_THROWS_AS(parse_preconditioner("amg"), ConfigError);
    CHECK_THROWS_AS(parse_solver_method("cg"), ConfigError);
}

TEST_CASE("GMRES agrees with the direct solver") {
    for (int N : {8, 16, 32}) {
        for (auto variant : {DeltaVariant::Standard, DeltaVariant::Modified}) {
            const auto sys = benchmark_system(N, 1e-8, variant);
            const auto ref = solve(sys, direct());
            CHECK(ref.stats.relative_residual <= 1e-12);
            for (auto pc : {Preconditioner::None, Preconditioner::Jacobi, Preconditioner::ILU0}) {
                SolverConfig cfg;
                cfg.preconditioner = pc;
                const auto r = solve(sys, cfg);
                CAPTURE(N);
                CAPTURE(to_string(pc));
                CHECK(r.stats.converged);
                CHECK(r.stats.relative_residual <= 1e-10);
                CHECK(max_diff(r.solution, ref.solution) <= 1e-8 * max_norm(ref.solution));
            }
        }
    }
}

TEST_CASE("benchmark N=64 with ILU0-preconditioned GMRES") {
    const auto sys = benchmark_system(64, 1e-8, DeltaVariant::Standard);
    const auto r = solve(sys, SolverConfig{});
    CHECK(r.stats.converged);
    CHECK(r.stats.preconditioner == Preconditioner::ILU0);
    CHECK(r.stats.relative_residual <= 1e-10);
    CHECK(r.stats.relative_residual == relative_residual(sys.matrix, r.solution, sys.rhs));
    const auto ref = solve(sys, direct());
    CHECK(max_diff(r.solution, ref.solution) <= 1e-8 * max_norm(ref.solution));
}

TEST_CASE("Arnoldi residual is monotone within each restart cycle") {
    const auto sys = benchmark_system(32, 1e-6, DeltaVariant::Modified);
    SolverConfig cfg;
    cfg.restart = 10;
    cfg.preconditioner = Preconditioner::Jacobi;
    const auto r = solve(sys, cfg);
    CHECK(r.stats.converged);
    const auto& hist = r.stats.residual_history;
    const auto& starts = r.stats.cycle_starts;
    REQUIRE(starts.size() > 1);
    CHECK(hist.size() == static_cast<std::size_t>(r.stats.iterations));
    for (std::size_t c = 0; c < starts.size(); ++c) {
        const std::size_t begin = starts[c];
        const std::size_t end = c + 1 < starts.size() ? starts[c + 1] : hist.size();
        CHECK(end - begin <= 10);
        for (std::size_t k = begin + 1; k < end; ++k)
            CHECK(hist[k] <= hist[k - 1]);
    }
}

TEST_CASE("solves are deterministic") {
    const auto sys = benchmark_system(16, 1e-8, DeltaVariant::Standard);
    const auto a = solve(sys, SolverConfig{});
    const auto b = solve(sys, SolverConfig{});
    CHECK(a.solution == b.solution);
    CHECK(a.stats.residual_history == b.stats.residual_history);
}
