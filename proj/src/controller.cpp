#include "vsa/controller.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace vsa {

namespace {

std::string plain_fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.20f", x);
    return buf;
}

std::vector<double> interior_nodes(const ProblemSpec& p, int degree) {
    std::vector<double> nodes;
    nodes.reserve(static_cast<std::size_t>(degree));
    for (int i = 1; i <= degree; ++i)
        nodes.push_back(p.a + (p.b - p.a) * static_cast<double>(i) / degree);
    return nodes;
}

RunReport run_plain(const ProblemSpec& p, double r_star, StoppingRule rule, const RunOptions& opt) {
    RunReport rep;
    PlainBackend b;
    double exact_value = std::numeric_limits<double>::quiet_NaN();
    if (p.exact) exact_value = detail::plain_eval1(*p.exact, r_star);

    double prev_value = 0.0;
    bool have_prev = false;
    for (int d = 1; d <= opt.max_n; ++d) {
        TaylorSolution<double> sol;
        try {
            sol = solve_taylor(p, d, opt.quad, b, opt.grid);
        } catch (const SingularSystemError& e) {
            rep.instability_log.push_back({InstabilityEvent::Kind::SingularPivot, e.what()});
            rep.stop_reason = "unstable system at n=" + std::to_string(d + 1);
            rep.unstable = true;
            return rep;
        }
        double v = evaluate_solution(sol, r_star, b, p.transform ? &*p.transform : nullptr);

        IterationRecord rec;
        rec.n = d + 1;
        rec.value = v;
        rec.value_str = plain_fmt(v);
        rec.ncsd = 15.0;
        if (have_prev) {
            rec.diff = std::fabs(v - prev_value);
            rec.diff_str = plain_fmt(*rec.diff);
        }
        if (p.exact) {
            rec.err = std::fabs(exact_value - v);
            rec.err_str = plain_fmt(*rec.err);
        }
        rep.records.push_back(rec);

        bool stop = false;
        switch (rule.kind) {
            case StoppingRule::Kind::FpaAbsolute:
                stop = rec.err && *rec.err <= rule.epsilon;
                break;
            case StoppingRule::Kind::FpaCorrection:
                stop = rec.diff && *rec.diff <= rule.epsilon;
                break;
            case StoppingRule::Kind::FpaDiscrepancy: {
                double res = collocation_residual(p, sol, interior_nodes(p, d), opt.quad);
                stop = res <= rule.epsilon;
                break;
            }
            case StoppingRule::Kind::SaSuccessive:
                break;  // not valid in plain mode; caller rejects
        }
        if (stop) {
            rep.fired = true;
            rep.optimal_n = rec.n;
            rep.optimal_value = v;
            rep.optimal_value_str = rec.value_str;
            rep.stop_reason = "stopping rule fired at n=" + std::to_string(rec.n);
            return rep;
        }
        prev_value = v;
        have_prev = true;
    }
    rep.stop_reason = "max_n reached";
    if (!rep.records.empty()) {
        rep.optimal_n = rep.records.back().n;
        rep.optimal_value = rep.records.back().value;
        rep.optimal_value_str = rep.records.back().value_str;
    }
    return rep;
}

RunReport run_sa(const ProblemSpec& p, double r_star, StoppingRule rule, const RunOptions& opt) {
    RunReport rep;
    SaContext ctx(opt.sa);
    SaBackend b(ctx);
    StochasticValue exact_sa;
    if (p.exact) exact_sa = ctx.from_exact(detail::plain_eval1(*p.exact, r_star));

    StochasticValue prev;
    bool have_prev = false;
    for (int d = 1; d <= opt.max_n; ++d) {
        TaylorSolution<StochasticValue> sol;
        try {
            // the reference stochastic program eliminates without pivoting
            sol = solve_taylor(p, d, opt.quad, b, opt.grid, PivotPolicy::NaturalOrder);
        } catch (const SingularSystemError& e) {
            rep.stop_reason = "unstable system at n=" + std::to_string(d + 1);
            rep.unstable = true;
            rep.instability_log = ctx.log();
            rep.instability_log.push_back({InstabilityEvent::Kind::SingularPivot, e.what()});
            return rep;
        }
        StochasticValue v = evaluate_solution(sol, ctx.from_exact(r_star), b,
                                              p.transform ? &*p.transform : nullptr);

        IterationRecord rec;
        rec.n = d + 1;
        rec.value = ctx.mean(v);
        rec.value_str = ctx.format(v);
        rec.sigma = ctx.sigma(v);
        rec.ncsd = ctx.ncsd(v);

        bool fire = false;
        if (have_prev) {
            StochasticValue diff = ctx.abs(ctx.sub(v, prev));
            rec.diff = std::fabs(ctx.mean(diff));
            rec.diff_str = ctx.format(diff);
            fire = ctx.is_zero(diff);
        }
        if (p.exact) {
            StochasticValue errv = ctx.abs(ctx.sub(exact_sa, v));
            rec.err = std::fabs(ctx.mean(errv));
            rec.err_str = ctx.format(errv);
        }
        rep.records.push_back(rec);

        if (rule.kind == StoppingRule::Kind::SaSuccessive && fire) {
            rep.fired = true;
            rep.optimal_n = rec.n;
            rep.optimal_value = rec.value;
            rep.optimal_value_str = rec.value_str;
            rep.stop_reason = "successive difference reached the informatical zero (@.0) at n=" +
                              std::to_string(rec.n);
            rep.instability_log = ctx.log();
            return rep;
        }
        prev = v;
        have_prev = true;
    }
    rep.stop_reason = "max_n reached";
    if (!rep.records.empty()) {
        rep.optimal_n = rep.records.back().n;
        rep.optimal_value = rep.records.back().value;
        rep.optimal_value_str = rep.records.back().value_str;
    }
    rep.instability_log = ctx.log();
    return rep;
}

}  // namespace

RunReport run(const ProblemSpec& p, double r_star, StoppingRule rule, const RunOptions& opt) {
    if (rule.kind == StoppingRule::Kind::FpaAbsolute && !p.exact)
        throw std::invalid_argument("FpaAbsolute stopping requires an exact solution");
    if (!(r_star > p.a) || !(r_star <= p.b))
        throw std::invalid_argument("query point must lie in (a, b]");
    if (rule.is_sa()) return run_sa(p, r_star, rule, opt);
    return run_plain(p, r_star, rule, opt);
}

std::vector<DigitAgreementRow> digit_agreement(const RunReport& report, double exact_value) {
    std::vector<DigitAgreementRow> rows;
    if (report.records.size() < 2) return rows;
    for (std::size_t i = 0; i + 1 < report.records.size(); ++i) {
        const IterationRecord& cur = report.records[i];
        const IterationRecord& nxt = report.records[i + 1];
        double ce = common_digits(cur.value, exact_value);
        double cs = common_digits(cur.value, nxt.value);
        DigitAgreementRow row;
        row.n = cur.n;
        bool both_inf = ce > 1e308 && cs > 1e308;
        row.c_exact = ce > 1e308 ? ce : std::max(0.0, ce);  // -inf means no shared digits
        row.c_succ = cs > 1e308 ? cs : std::max(0.0, cs);
        row.gap = both_inf ? 0.0 : row.c_exact - row.c_succ;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace vsa
