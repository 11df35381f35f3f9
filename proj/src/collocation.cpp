#include "vsa/collocation.hpp"

#include <cmath>

namespace vsa {

namespace detail {

double plain_eval1(const Expr& e, double x) {
    PlainBackend b;
    std::array<double, 1> v{x};
    return e.eval(std::span<const double>(v), b);
}

double plain_eval2(const Expr& e, double x, double y) {
    PlainBackend b;
    std::array<double, 2> v{x, y};
    return e.eval(std::span<const double>(v), b);
}

double derivative_at(const Expr& e, double x) {
    // five-point stencil; truncation ~ h^4 f^(5)
    double h = 1e-3 * std::max(1.0, std::fabs(x));
    double f1 = plain_eval1(e, x + h), f2 = plain_eval1(e, x + 2 * h);
    double g1 = plain_eval1(e, x - h), g2 = plain_eval1(e, x - 2 * h);
    return (-f2 + 8.0 * f1 - 8.0 * g1 + g2) / (12.0 * h);
}

std::array<double, 2> limit_row(const ProblemSpec& p) {
    if (p.weight == QuadConfig::Weight::Abel) {
        double k00 = plain_eval2(p.segments[0].kernel, p.a, p.a);
        return {k00 * 1.5707963267948966, plain_eval1(p.rhs, p.a)};
    }
    double d = 0.0;
    for (const Segment& seg : p.segments) {
        double k00 = plain_eval2(seg.kernel, p.a, p.a);
        d += k00 * (derivative_at(seg.rho_hi, p.a) - derivative_at(seg.rho_lo, p.a));
    }
    double f0 = derivative_at(p.rhs, p.a);
    // below the stencil's resolution the compatibility value is genuinely zero
    if (std::fabs(f0) < 1e-10) f0 = 0.0;
    return {d, f0};
}

int abel_assembly_panels(const QuadConfig& quad, int degree) {
    (void)degree;
    if (quad.abel_panels > 0) return quad.abel_panels + (quad.abel_panels % 2);
    return quad.panels;
}

}  // namespace detail

std::vector<double> collocation_points(int n, double a, double b, GridMode mode) {
    if (n < 1) throw std::invalid_argument("collocation_points: n must be >= 1");
    if (!(a < b)) throw std::invalid_argument("collocation_points: need a < b");
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        double t = mode == GridMode::Paper ? static_cast<double>(i) / n
                                           : static_cast<double>(i + 1) / (n + 1);
        pts.push_back(a + (b - a) * t);
    }
    return pts;
}

std::vector<std::string> validate(const ProblemSpec& p) {
    std::vector<std::string> errs;
    if (!(p.a < p.b)) errs.push_back("interval must satisfy a < b");
    if (p.segments.empty()) errs.push_back("at least one segment is required");
    if (p.rhs.empty()) errs.push_back("rhs is required");
    if (!errs.empty()) return errs;

    if (p.weight == QuadConfig::Weight::Abel) {
        if (p.segments.size() != 1) {
            errs.push_back("abel weight requires exactly one segment");
            return errs;
        }
    }

    const int kSamples = 50;
    bool lo_zero_ok = true, hi_r_ok = true, mono_ok = true, chain_ok = true;
    for (int k = 1; k <= kSamples; ++k) {
        double r = p.a + (p.b - p.a) * static_cast<double>(k) / kSamples;
        double prev_hi = 0.0;
        for (std::size_t si = 0; si < p.segments.size(); ++si) {
            double lo = detail::plain_eval1(p.segments[si].rho_lo, r);
            double hi = detail::plain_eval1(p.segments[si].rho_hi, r);
            if (si == 0 && std::fabs(lo - 0.0) > 1e-12) lo_zero_ok = false;
            if (si > 0 && std::fabs(lo - prev_hi) > 1e-12) chain_ok = false;
            if (lo > hi + 1e-12) mono_ok = false;
            if (si + 1 == p.segments.size() && std::fabs(hi - r) > 1e-12) hi_r_ok = false;
            prev_hi = hi;
        }
    }
    if (!lo_zero_ok) errs.push_back("first boundary curve must be rho_0(r) = 0");
    if (!hi_r_ok) errs.push_back("last boundary curve must be rho_m(r) = r");
    if (!mono_ok) errs.push_back("boundary curves must satisfy rho_lo(r) <= rho_hi(r)");
    if (!chain_ok) errs.push_back("consecutive segments must share their boundary curve");

    if (p.weight == QuadConfig::Weight::None && p.a == 0.0) {
        if (std::fabs(detail::plain_eval1(p.rhs, 0.0)) > 1e-12)
            errs.push_back("rhs must vanish at r=0");
    }
    return errs;
}

double collocation_residual(const ProblemSpec& p, const TaylorSolution<double>& sol,
                            const std::vector<double>& nodes, const QuadConfig& quad) {
    PlainBackend b;
    double worst = 0.0;
    for (double rv : nodes) {
        double lhs = 0.0;
        if (p.weight == QuadConfig::Weight::Abel) {
            auto f = [&](double theta) {
                double s = rv * std::sin(theta);
                return detail::plain_eval2(p.segments[0].kernel, rv, s) *
                       evaluate_solution<PlainBackend>(sol, s, b);
            };
            lhs = simpson(f, 0.0, 1.5707963267948966, quad.panels, b);
        } else {
            for (const Segment& seg : p.segments) {
                double lo = detail::plain_eval1(seg.rho_lo, rv);
                double hi = detail::plain_eval1(seg.rho_hi, rv);
                auto f = [&](double s) {
                    return detail::plain_eval2(seg.kernel, rv, s) *
                           evaluate_solution<PlainBackend>(sol, s, b);
                };
                lhs += simpson(f, lo, hi, quad.panels, b);
            }
        }
        double res = std::fabs(lhs - detail::plain_eval1(p.rhs, rv));
        if (res > worst) worst = res;
    }
    return worst;
}

}  // namespace vsa
