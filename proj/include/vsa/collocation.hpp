// Taylor-collocation assembly and solve for first-kind Volterra problems
// with piecewise kernels or an Abel weight.
//
// The collocation grid r_i = a + (b-a) i/n makes the i = 0 row degenerate
// (every integral collapses and f(a) = 0), so the default mode replaces that
// row by its r -> a limit, which pins v(a):
//   regular kernels:  [sum_p k_p(a,a) (rho_p'(a) - rho_{p-1}'(a))] v(a) = f'(a)
//   Abel weight:      (pi/2) k(a,a) v(a) = f(a)
// Strict paper mode keeps the degenerate row and reports the singular pivot.
#pragma once

#include "vsa/expr.hpp"
#include "vsa/quadrature.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vsa {

struct Segment {
    Expr rho_lo;  // in r
    Expr rho_hi;  // in r
    Expr kernel;  // in r, s
};

struct ProblemSpec {
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;  // Taylor center
    std::vector<Segment> segments;
    Expr rhs;  // in r
    QuadConfig::Weight weight = QuadConfig::Weight::None;
    std::optional<Expr> transform;  // in w, applied to the evaluated solution
    std::optional<Expr> exact;      // in r
    std::string label;
    double default_point = 0.5;  // query point r* used when the CLI gets none
};

// Validates the spec invariants by sampling; returns human-readable
// violations, empty when the spec is usable.
std::vector<std::string> validate(const ProblemSpec& p);

enum class GridMode { Default, Paper };

// Row-pivot strategy for the elimination. PartialByMean is the library
// default; NaturalOrder mirrors the reference program, whose elimination
// takes pivots straight down the diagonal.
enum class PivotPolicy { PartialByMean, NaturalOrder };

// Eq-style collocation grid. Default excludes r = a by shifting; paper mode
// is the uniform grid including both endpoints.
std::vector<double> collocation_points(int n, double a, double b, GridMode mode = GridMode::Default);

template <class T>
struct LinearSystem {
    std::vector<std::vector<T>> A;
    std::vector<T> F;
    int size() const { return static_cast<int>(F.size()); }
};

template <class T>
struct TaylorSolution {
    int degree = 0;
    double center = 0.0;
    std::vector<T> coeffs;  // c_j = v^(j)(center)/j!, j = 0..degree
};

struct SingularSystemError : std::runtime_error {
    SingularSystemError(int index, std::string what_)
        : std::runtime_error(std::move(what_)), pivot_index(index) {}
    int pivot_index;
};

namespace detail {

double plain_eval1(const Expr& e, double x);
double plain_eval2(const Expr& e, double x, double y);
// centered difference with analytic continuation just outside [a,b]
double derivative_at(const Expr& e, double x);

// Coefficient D and right-hand value of the limit row at r = a.
// Returns {D, F0} with row entries D*(a-c)^j.
std::array<double, 2> limit_row(const ProblemSpec& p);

int abel_assembly_panels(const QuadConfig& quad, int degree);

}  // namespace detail

// One collocation-row entry: sum over segments of
// integral k_p(r,s) (s-c)^j ds, between rho_{p-1}(r) and rho_p(r).
template <class Backend>
typename Backend::value_type row_entry(const ProblemSpec& p, typename Backend::value_type r,
                                       int j, const QuadConfig& quad, Backend& b,
                                       int abel_panels_override = 0) {
    using V = typename Backend::value_type;
    V cv = b.from_exact(p.c);
    if (p.weight == QuadConfig::Weight::Abel) {
        int panels = abel_panels_override > 0 ? abel_panels_override : quad.panels;
        auto f = [&](V theta) {
            V s = b.mul(r, b.sin(theta));
            std::array<V, 2> rs{r, s};
            V k = p.segments[0].kernel.eval(std::span<const V>(rs), b);
            return b.mul(k, b.pow_int(b.sub(s, cv), j));
        };
        return simpson(f, b.from_exact(0.0), b.from_exact(1.5707963267948966), panels, b);
    }
    V total = b.from_exact(0.0);
    std::array<V, 1> rbind{r};
    for (const Segment& seg : p.segments) {
        V lo = seg.rho_lo.eval(std::span<const V>(rbind), b);
        V hi = seg.rho_hi.eval(std::span<const V>(rbind), b);
        auto f = [&](V s) {
            std::array<V, 2> rs{r, s};
            V k = seg.kernel.eval(std::span<const V>(rs), b);
            return b.mul(k, b.pow_int(b.sub(s, cv), j));
        };
        total = b.add(total, simpson(f, lo, hi, quad.panels, b));
    }
    return total;
}

// Builds the (n+1) x (n+1) system for Taylor degree n. Column j carries the
// 1/j! factor, so the solved unknowns are the derivative values v^(j)(c);
// solve_taylor converts them to power-series coefficients.
template <class Backend>
LinearSystem<typename Backend::value_type> assemble_system(const ProblemSpec& p, int n,
                                                           const QuadConfig& quad, Backend& b,
                                                           GridMode mode = GridMode::Default) {
    if (n < 1) throw std::invalid_argument("assemble_system: degree must be >= 1");
    using V = typename Backend::value_type;
    LinearSystem<V> sys;
    sys.A.reserve(static_cast<std::size_t>(n) + 1);
    sys.F.reserve(static_cast<std::size_t>(n) + 1);

    int abel_panels = p.weight == QuadConfig::Weight::Abel ? detail::abel_assembly_panels(quad, n) : 0;

    std::vector<double> inv_fact(static_cast<std::size_t>(n) + 1, 1.0);
    for (int j = 1; j <= n; ++j)
        inv_fact[static_cast<std::size_t>(j)] = inv_fact[static_cast<std::size_t>(j - 1)] / j;

    std::vector<double> nodes;
    if (mode == GridMode::Paper) {
        nodes = collocation_points(n, p.a, p.b, GridMode::Paper);  // includes r = a
    } else {
        // limit row takes the place of the degenerate r = a row
        auto [d0, f0] = detail::limit_row(p);
        std::vector<V> row;
        row.reserve(static_cast<std::size_t>(n) + 1);
        double base = p.a - p.c;
        double powj = 1.0;
        for (int j = 0; j <= n; ++j) {
            row.push_back(b.from_exact(d0 * powj * inv_fact[static_cast<std::size_t>(j)]));
            powj *= base;
        }
        sys.A.push_back(std::move(row));
        sys.F.push_back(b.from_exact(f0));
        for (int i = 1; i <= n; ++i)
            nodes.push_back(p.a + (p.b - p.a) * static_cast<double>(i) / static_cast<double>(n));
    }

    for (double rv : nodes) {
        V r = b.from_exact(rv);
        std::vector<V> row;
        row.reserve(static_cast<std::size_t>(n) + 1);
        for (int j = 0; j <= n; ++j) {
            V e = row_entry(p, r, j, quad, b, abel_panels);
            if (j > 1) e = b.mul(e, b.from_exact(inv_fact[static_cast<std::size_t>(j)]));
            row.push_back(e);
        }
        sys.A.push_back(std::move(row));
        std::array<V, 1> rbind{r};
        sys.F.push_back(p.rhs.eval(std::span<const V>(rbind), b));
    }
    return sys;
}

// Assemble, solve and rescale: the returned coefficients are the plain
// power-series values c_j = v^(j)(c)/j!.
template <class Backend>
TaylorSolution<typename Backend::value_type> solve_taylor(const ProblemSpec& p, int n,
                                                          const QuadConfig& quad, Backend& b,
                                                          GridMode mode = GridMode::Default,
                                                          PivotPolicy policy = PivotPolicy::PartialByMean) {
    TaylorSolution<typename Backend::value_type> sol;
    sol.degree = n;
    sol.center = p.c;
    auto sys = assemble_system(p, n, quad, b, mode);
    sol.coeffs = gauss_jordan_solve(std::move(sys), b, policy);
    double inv_fact = 1.0;
    for (int j = 2; j <= n; ++j) {
        inv_fact /= j;
        sol.coeffs[static_cast<std::size_t>(j)] =
            b.mul(sol.coeffs[static_cast<std::size_t>(j)], b.from_exact(inv_fact));
    }
    return sol;
}

inline bool pivot_is_singular(double pivot, PlainBackend&) { return std::fabs(pivot) < 1e-30; }
inline bool pivot_is_singular(const StochasticValue& pivot, SaBackend& b) {
    if (b.ctx->is_zero(pivot)) {
        b.ctx->report(InstabilityEvent::Kind::SingularPivot, "elimination pivot is an informatical zero");
        return true;
    }
    return false;
}

// Gauss-Jordan elimination. An informatical-zero pivot (SA) or a vanishing
// pivot (plain) raises SingularSystemError with the pivot index.
template <class Backend>
std::vector<typename Backend::value_type> gauss_jordan_solve(
    LinearSystem<typename Backend::value_type> sys, Backend& b,
    PivotPolicy policy = PivotPolicy::PartialByMean) {
    using V = typename Backend::value_type;
    const int m = sys.size();

    for (int k = 0; k < m; ++k) {
        if (policy == PivotPolicy::PartialByMean) {
            int best = k;
            double best_mag =
                std::fabs(b.mean_of(sys.A[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)]));
            for (int i = k + 1; i < m; ++i) {
                double mag =
                    std::fabs(b.mean_of(sys.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]));
                if (mag > best_mag) {
                    best = i;
                    best_mag = mag;
                }
            }
            if (best != k) {
                std::swap(sys.A[static_cast<std::size_t>(k)], sys.A[static_cast<std::size_t>(best)]);
                std::swap(sys.F[static_cast<std::size_t>(k)], sys.F[static_cast<std::size_t>(best)]);
            }
        }
        V& pivot = sys.A[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
        if (pivot_is_singular(pivot, b))
            throw SingularSystemError(k, "singular or numerically unstable system: pivot " +
                                             std::to_string(k) + " is zero");
        V pv = pivot;
        for (int j = k; j <= m; ++j) {
            V& cell = j < m ? sys.A[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]
                            : sys.F[static_cast<std::size_t>(k)];
            cell = b.div(cell, pv);
        }
        for (int i = 0; i < m; ++i) {
            if (i == k) continue;
            V factor = sys.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            if (b.mean_of(factor) == 0.0) continue;
            for (int j = k; j <= m; ++j) {
                V& cell = j < m ? sys.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                                : sys.F[static_cast<std::size_t>(i)];
                const V& prow = j < m ? sys.A[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]
                                      : sys.F[static_cast<std::size_t>(k)];
                cell = b.sub(cell, b.mul(factor, prow));
            }
        }
    }
    return sys.F;
}

// Horner evaluation of the stored power series; the problem transform, when
// present, is applied to the result.
template <class Backend>
typename Backend::value_type evaluate_solution(const TaylorSolution<typename Backend::value_type>& sol,
                                               typename Backend::value_type s, Backend& b,
                                               const Expr* transform = nullptr) {
    using V = typename Backend::value_type;
    V x = b.sub(s, b.from_exact(sol.center));
    V acc = sol.coeffs.back();
    for (int j = sol.degree - 1; j >= 0; --j)
        acc = b.add(b.mul(acc, x), sol.coeffs[static_cast<std::size_t>(j)]);
    if (transform != nullptr) {
        std::array<V, 1> w{acc};
        acc = transform->eval(std::span<const V>(w), b);
    }
    return acc;
}

// Max-norm residual of a solution against the collocation equations,
// recomputed by quadrature at the given nodes (plain arithmetic).
double collocation_residual(const ProblemSpec& p, const TaylorSolution<double>& sol,
                            const std::vector<double>& nodes, const QuadConfig& quad);

}  // namespace vsa
