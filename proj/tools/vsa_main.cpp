// Command-line front end: run a built-in example or a problem file through
// the degree-raising loop and emit the iteration table.
//
// Exit codes: 0 stopping rule fired, 2 max_n reached, 3 instability stop,
// 64 usage error.
#include "vsa/controller.hpp"
#include "vsa/problem_io.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>

namespace {

using namespace vsa;

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string gshort(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

void emit_table(const RunReport& rep, bool sa_mode, bool have_exact,
                const std::vector<DigitAgreementRow>& diag) {
    const char* rule_line =
        "------------------------------------------------------------------------------";
    std::printf("%s\n", rule_line);
    std::printf("   n     approximate solution     difference of two term     absolute error\n");
    std::printf("%s\n", rule_line);
    for (const IterationRecord& rec : rep.records) {
        std::printf("  %3d    %-24s %-26s %s\n", rec.n, rec.value_str.c_str(),
                    rec.diff ? rec.diff_str.c_str() : "-",
                    rec.err ? rec.err_str.c_str() : "-");
    }
    std::printf("%s\n", rule_line);
    std::printf("stop: %s\n", rep.stop_reason.c_str());
    if (rep.fired)
        std::printf("optimal n = %d, optimal approximation = %s\n", rep.optimal_n,
                    rep.optimal_value_str.c_str());
    for (const InstabilityEvent& ev : rep.instability_log)
        std::printf("instability: %s (%s)\n", to_string(ev.kind), ev.detail.c_str());
    if (sa_mode && have_exact && diag.size() >= 2) {
        std::printf("digit agreement (last rows): n, C(vn,v), C(vn,vn+1), gap\n");
        std::size_t from = diag.size() > 3 ? diag.size() - 3 : 0;
        for (std::size_t i = from; i < diag.size(); ++i)
            std::printf("  %3d   %6.3f   %6.3f   %+6.3f\n", diag[i].n, diag[i].c_exact,
                        diag[i].c_succ, diag[i].gap);
    }
}

void emit_csv(const RunReport& rep) {
    std::printf("n,value,diff,err,sigma,ncsd,value_str,diff_str,err_str\n");
    for (const IterationRecord& rec : rep.records) {
        std::printf("%d,%s,%s,%s,%s,%s,%s,%s,%s\n", rec.n, g17(rec.value).c_str(),
                    rec.diff ? g17(*rec.diff).c_str() : "",
                    rec.err ? g17(*rec.err).c_str() : "", g17(rec.sigma).c_str(),
                    g17(rec.ncsd).c_str(), rec.value_str.c_str(), rec.diff_str.c_str(),
                    rec.err_str.c_str());
    }
    std::printf("# stop_reason,%s,optimal_n,%d,optimal_value,%s\n", rep.stop_reason.c_str(),
                rep.optimal_n, g17(rep.optimal_value).c_str());
}

void emit_jsonl(const RunReport& rep) {
    for (const IterationRecord& rec : rep.records) {
        std::string line = "{\"n\":" + std::to_string(rec.n) + ",\"value\":" + g17(rec.value);
        line += ",\"diff\":" + (rec.diff ? g17(*rec.diff) : "null");
        line += ",\"err\":" + (rec.err ? g17(*rec.err) : "null");
        line += ",\"sigma\":" + g17(rec.sigma) + ",\"ncsd\":" + g17(rec.ncsd);
        line += ",\"value_str\":\"" + json_escape(rec.value_str) + "\"";
        line += ",\"diff_str\":" + (rec.diff ? "\"" + json_escape(rec.diff_str) + "\"" : "null");
        line += ",\"err_str\":" + (rec.err ? "\"" + json_escape(rec.err_str) + "\"" : "null");
        line += "}";
        std::printf("%s\n", line.c_str());
    }
    std::printf("{\"stop_reason\":\"%s\",\"optimal_n\":%d,\"optimal_value\":%s,\"fired\":%s}\n",
                json_escape(rep.stop_reason).c_str(), rep.optimal_n,
                g17(rep.optimal_value).c_str(), rep.fired ? "true" : "false");
}

int exit_code(const RunReport& rep) {
    if (rep.unstable) return 3;
    if (!rep.fired) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Taylor-collocation solver for first-kind Volterra integral equations,\n"
                 "validated by discrete stochastic arithmetic"};
    app.get_formatter()->column_width(30);

    int example_id = 0;
    std::string problem_path;
    std::string mode = "sa";
    double eps = 0.0;
    bool have_eps = false;
    double point = 0.0;
    bool have_point = false;
    int max_n = 25;
    int panels = 500;
    int samples = 3;
    double tau = 4.303;
    std::uint64_t seed = 7;
    std::string format = "table";
    std::string grid = "default";
    double center = 0.0;
    bool have_center = false;
    std::string sweep;

    app.add_option("--example", example_id, "built-in example id (1..5)")->check(CLI::Range(1, 5));
    app.add_option("--problem", problem_path, "problem definition file");
    app.add_option("--mode", mode, "sa | fpa-abs | fpa-corr | fpa-disc (default sa)")
        ->check(CLI::IsMember({"sa", "fpa-abs", "fpa-corr", "fpa-disc"}));
    auto* eps_opt = app.add_option("--eps", eps, "stopping tolerance for FPA modes");
    auto* point_opt = app.add_option("--point", point, "query point r* (overrides the problem file)");
    app.add_option("--max-n", max_n, "iteration cap (default 25)")->check(CLI::PositiveNumber);
    app.add_option("--panels", panels, "Simpson panels (even, default 500)");
    app.add_option("--samples", samples, "SA samples per value (default 3)")->check(CLI::Range(2, 8));
    app.add_option("--tau", tau, "Student-type quantile (default 4.303)")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "RNG seed (default 7)");
    app.add_option("--format", format, "table | csv | jsonl")
        ->check(CLI::IsMember({"table", "csv", "jsonl"}));
    app.add_option("--grid", grid, "default | paper")->check(CLI::IsMember({"default", "paper"}));
    auto* center_opt = app.add_option("--center", center, "Taylor center (default: interval start)");
    app.add_option("--sweep-eps", sweep, "comma list of eps values; emits iterations-vs-eps table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    have_eps = eps_opt->count() > 0;
    have_point = point_opt->count() > 0;
    have_center = center_opt->count() > 0;

    auto usage_error = [&](const std::string& msg) {
        std::fprintf(stderr, "error: %s\n", msg.c_str());
        return 64;
    };

    if ((example_id == 0) == problem_path.empty())
        return usage_error("exactly one of --example or --problem is required");
    if (panels < 2 || panels % 2 != 0) return usage_error("--panels must be even and >= 2");

    ProblemSpec spec;
    try {
        spec = example_id != 0 ? builtin_example(example_id) : load_problem(problem_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 64;
    }
    if (have_center) spec.c = center;
    double r_star = have_point ? point : spec.default_point;

    StoppingRule rule = StoppingRule::sa_successive();
    if (mode != "sa") {
        if (!have_eps && sweep.empty()) return usage_error("FPA modes require --eps (or --sweep-eps)");
        if (mode == "fpa-abs") rule = StoppingRule::fpa_absolute(eps);
        if (mode == "fpa-corr") rule = StoppingRule::fpa_correction(eps);
        if (mode == "fpa-disc") rule = StoppingRule::fpa_discrepancy(eps);
        if (mode == "fpa-abs" && !spec.exact)
            return usage_error("--mode fpa-abs needs a problem with an exact solution");
    } else if (have_eps) {
        return usage_error("--eps applies only to FPA modes");
    }
    if (!sweep.empty() && mode == "sa")
        return usage_error("--sweep-eps applies only to FPA modes");

    RunOptions opt;
    opt.max_n = max_n;
    opt.grid = grid == "paper" ? GridMode::Paper : GridMode::Default;
    opt.quad.panels = panels;
    opt.quad.singular_weight = spec.weight;
    opt.sa.l = samples;
    opt.sa.tau = tau;
    opt.sa.rng_seed = seed;

    try {
        if (!sweep.empty()) {
            // iterations-vs-eps table
            std::vector<double> eps_list;
            std::istringstream ss(sweep);
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    eps_list.push_back(std::stod(item));
                } catch (...) {
                    return usage_error("bad --sweep-eps entry '" + item + "'");
                }
            }
            if (eps_list.empty()) return usage_error("--sweep-eps needs at least one value");
            int worst = 0;
            if (format == "csv") std::printf("eps,n,stop_reason\n");
            if (format == "table") {
                std::printf("  epsilon          n\n");
                std::printf("--------------------\n");
            }
            for (double e : eps_list) {
                StoppingRule r = rule;
                r.epsilon = e;
                RunReport rep = run(spec, r_star, r, opt);
                int rc = exit_code(rep);
                if (rc > worst) worst = rc;
                int n_out = rep.fired ? rep.optimal_n
                                      : (rep.records.empty() ? 0 : rep.records.back().n);
                if (format == "csv")
                    std::printf("%s,%d,%s\n", g17(e).c_str(), n_out, rep.stop_reason.c_str());
                else if (format == "jsonl")
                    std::printf("{\"eps\":%s,\"n\":%d,\"stop_reason\":\"%s\"}\n", g17(e).c_str(),
                                n_out, json_escape(rep.stop_reason).c_str());
                else
                    std::printf("  %-14s %4d\n", gshort(e).c_str(), n_out);
            }
            return worst;
        }

        RunReport rep = run(spec, r_star, rule, opt);
        std::vector<DigitAgreementRow> diag;
        if (spec.exact && rep.records.size() >= 2) {
            PlainBackend pb;
            std::array<double, 1> rv{r_star};
            double exact_value = spec.exact->eval(std::span<const double>(rv), pb);
            diag = digit_agreement(rep, exact_value);
        }
        if (format == "csv") emit_csv(rep);
        else if (format == "jsonl") emit_jsonl(rep);
        else emit_table(rep, rule.is_sa(), spec.exact.has_value(), diag);
        return exit_code(rep);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 64;
    }
}
