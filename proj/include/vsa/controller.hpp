// Degree-raising loop with pluggable stopping rules, iteration records and
// the digit-agreement diagnostic.
#pragma once

#include "vsa/collocation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vsa {

struct StoppingRule {
    enum class Kind {
        SaSuccessive,    // |v_n - v_{n-1}| is an informatical zero
        FpaAbsolute,     // |v(r*) - v_n(r*)| <= eps (needs the exact solution)
        FpaCorrection,   // |v_n - v_{n-1}| <= eps
        FpaDiscrepancy,  // max-norm collocation residual <= eps
    };
    Kind kind = Kind::SaSuccessive;
    double epsilon = 0.0;

    static StoppingRule sa_successive() { return {Kind::SaSuccessive, 0.0}; }
    static StoppingRule fpa_absolute(double eps) { return {Kind::FpaAbsolute, eps}; }
    static StoppingRule fpa_correction(double eps) { return {Kind::FpaCorrection, eps}; }
    static StoppingRule fpa_discrepancy(double eps) { return {Kind::FpaDiscrepancy, eps}; }
    bool is_sa() const { return kind == Kind::SaSuccessive; }
};

// One table row. n is the iteration label as the reference tables print it:
// the degree-(n-1) Taylor solution appears in row n, so rows start at n = 2.
struct IterationRecord {
    int n = 0;
    double value = 0.0;               // v_n(r*): plain value or SA mean
    std::optional<double> diff;       // |v_n - v_{n-1}|, absent on the first row
    std::optional<double> err;        // |v(r*) - v_n(r*)| when exact is known
    std::string value_str, diff_str, err_str;
    double sigma = 0.0;               // SA spread of v_n (0 in plain runs)
    double ncsd = 0.0;                // reliable digits of v_n (display cap in plain runs)
};

struct RunReport {
    std::vector<IterationRecord> records;
    int optimal_n = 0;
    double optimal_value = 0.0;
    std::string optimal_value_str;
    std::string stop_reason;
    bool fired = false;       // a stopping rule fired (vs max_n / instability)
    bool unstable = false;    // stopped on a singular or unstable system
    std::vector<InstabilityEvent> instability_log;
};

enum class ArithmeticMode { Sa, Plain };

struct RunOptions {
    int max_n = 25;  // iteration cap (number of degree-raising steps)
    GridMode grid = GridMode::Default;
    QuadConfig quad{};
    SaConfig sa{};
};

// Algorithm-2 style driver: for degrees 1, 2, ... solve, evaluate at r_star,
// record, and stop when the rule fires (or on max_n / instability).
RunReport run(const ProblemSpec& p, double r_star, StoppingRule rule, const RunOptions& opt);

struct DigitAgreementRow {
    int n;
    double c_exact;  // common digits of v_n and the exact value (clamped at 0)
    double c_succ;   // common digits of v_n and v_{n+1} (clamped at 0)
    double gap;      // c_exact - c_succ; 0 when both are infinite
};

// Runtime check behind the successive-difference stop: the digits shared
// with the exact value should track the digits shared between successive
// approximations.
std::vector<DigitAgreementRow> digit_agreement(const RunReport& report, double exact_value);

}  // namespace vsa
