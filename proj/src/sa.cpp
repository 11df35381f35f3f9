#include "vsa/sa.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

namespace vsa {

const char* to_string(InstabilityEvent::Kind k) {
    switch (k) {
        case InstabilityEvent::Kind::UnstableDivision: return "unstable division";
        case InstabilityEvent::Kind::MathInstability: return "mathematical instability";
        case InstabilityEvent::Kind::SingularPivot: return "informatical-zero pivot";
    }
    return "unknown";
}

StochasticValue StochasticValue::from_samples(std::initializer_list<double> samples) {
    if (samples.size() < 2 || samples.size() > kMaxSamples)
        throw std::invalid_argument("from_samples: need 2..8 samples");
    StochasticValue v;
    v.n_ = static_cast<int>(samples.size());
    int i = 0;
    for (double x : samples) {
        if (!std::isfinite(x)) v.unstable_ = true;
        v.s_[static_cast<std::size_t>(i++)] = x;
    }
    return v;
}

SaContext::SaContext(SaConfig cfg) : cfg_(cfg), rng_(cfg.rng_seed) {
    if (!cfg_.valid()) throw std::invalid_argument("invalid SaConfig");
}

void SaContext::report(InstabilityEvent::Kind kind, std::string detail) {
    log_.push_back({kind, std::move(detail)});
}

StochasticValue SaContext::from_exact(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("sa_from_exact: non-finite");
    StochasticValue v;
    v.n_ = cfg_.l;
    for (int i = 0; i < v.n_; ++i) v.s_[static_cast<std::size_t>(i)] = x;
    return v;
}

namespace {

// Exact (or first-order exact) residual of the rounded result against the
// real-arithmetic one: TwoSum for the additive ops, FMA-extracted error
// terms for mul/div/sqrt. The real result is rn + residual.
inline double residual_add(double a, double b, double s) {
    double bv = s - a;
    double av = s - bv;
    return (a - av) + (b - bv);
}
inline double residual_mul(double a, double b, double p) { return std::fma(a, b, -p); }
inline double residual_div(double a, double b, double q) {
    return -std::fma(q, b, -a) / b;
}
inline double residual_sqrt(double x, double r) {
    return -std::fma(r, r, -x) / (2.0 * r);
}

}  // namespace

// Stochastic rounding around the exact result: the round-to-nearest value
// moves to its neighbour on the residual side with probability
// |residual| / ulp, so the expected result equals the exact one and exactly
// representable results are never perturbed. With precision_bits == 24 the
// result is first narrowed to binary32, emulating a single-precision run.
double SaContext::round_random(double rn, double residual) {
    if (!std::isfinite(rn)) return rn;
    if (cfg_.precision_bits == 24) {
        float f = static_cast<float>(rn);
        double fd = static_cast<double>(f);
        double res = (rn - fd) + residual;  // total residual vs binary32
        if (res == 0.0) return fd;
        float to = res > 0.0 ? std::numeric_limits<float>::infinity()
                             : -std::numeric_limits<float>::infinity();
        double neighbour = static_cast<double>(std::nextafterf(f, to));
        double gap = std::fabs(neighbour - fd);
        double p = std::fabs(res) / gap;
        return rng_.next_unit() < p ? neighbour : fd;
    }
    if (residual == 0.0) return rn;
    double to = residual > 0.0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
    double neighbour = std::nextafter(rn, to);
    double gap = std::fabs(neighbour - rn);
    double p = std::fabs(residual) / gap;
    return rng_.next_unit() < p ? neighbour : rn;
}

// Library functions carry no recoverable residual; they get one terminal
// perturbation of gamma * ulp, gamma uniform on [-1, 1].
double SaContext::jitter(double x) {
    if (!std::isfinite(x)) return x;
    double gamma = 2.0 * rng_.next_unit() - 1.0;
    if (cfg_.precision_bits == 24) {
        float f = static_cast<float>(x);
        float af = std::fabs(f);
        float ulpf = std::nextafterf(af, std::numeric_limits<float>::infinity()) - af;
        return static_cast<double>(f) + gamma * static_cast<double>(ulpf);
    }
    double ax = std::fabs(x);
    double ulp = std::nextafter(ax, std::numeric_limits<double>::infinity()) - ax;
    return x + gamma * ulp;
}

StochasticValue SaContext::unary(const StochasticValue& a, double (*f)(double)) {
    StochasticValue r;
    r.n_ = a.n_;
    r.unstable_ = a.unstable_;
    for (int i = 0; i < r.n_; ++i) {
        double y = jitter(f(a.sample(i)));
        if (!std::isfinite(y)) r.unstable_ = true;
        r.s_[static_cast<std::size_t>(i)] = y;
    }
    return r;
}

StochasticValue SaContext::add(const StochasticValue& a, const StochasticValue& b) {
    StochasticValue r;
    r.n_ = a.n_;
    r.unstable_ = a.unstable_ || b.unstable_;
    for (int i = 0; i < r.n_; ++i) {
        double x = a.sample(i), y = b.sample(i);
        double s = x + y;
        double out = round_random(s, std::isfinite(s) ? residual_add(x, y, s) : 0.0);
        if (!std::isfinite(out)) r.unstable_ = true;
        r.s_[static_cast<std::size_t>(i)] = out;
    }
    return r;
}

StochasticValue SaContext::sub(const StochasticValue& a, const StochasticValue& b) {
    StochasticValue r;
    r.n_ = a.n_;
    r.unstable_ = a.unstable_ || b.unstable_;
    for (int i = 0; i < r.n_; ++i) {
        double x = a.sample(i), y = -b.sample(i);
        double s = x + y;
        double out = round_random(s, std::isfinite(s) ? residual_add(x, y, s) : 0.0);
        if (!std::isfinite(out)) r.unstable_ = true;
        r.s_[static_cast<std::size_t>(i)] = out;
    }
    return r;
}

StochasticValue SaContext::mul(const StochasticValue& a, const StochasticValue& b) {
    StochasticValue r;
    r.n_ = a.n_;
    r.unstable_ = a.unstable_ || b.unstable_;
    for (int i = 0; i < r.n_; ++i) {
        double x = a.sample(i), y = b.sample(i);
        double p = x * y;
        double out = round_random(p, std::isfinite(p) ? residual_mul(x, y, p) : 0.0);
        if (!std::isfinite(out)) r.unstable_ = true;
        r.s_[static_cast<std::size_t>(i)] = out;
    }
    return r;
}

StochasticValue SaContext::div(const StochasticValue& a, const StochasticValue& b) {
    bool flagged = false;
    if (is_zero(b)) {
        report(InstabilityEvent::Kind::UnstableDivision, "divisor is an informatical zero");
        flagged = true;
    }
    StochasticValue r;
    r.n_ = a.n_;
    r.unstable_ = a.unstable_ || b.unstable_ || flagged;
    for (int i = 0; i < r.n_; ++i) {
        double x = a.sample(i), y = b.sample(i);
        double q = x / y;
        double out = round_random(q, std::isfinite(q) ? residual_div(x, y, q) : 0.0);
        if (!std::isfinite(out)) r.unstable_ = true;
        r.s_[static_cast<std::size_t>(i)] = out;
    }
    return r;
}

StochasticValue SaContext::neg(const StochasticValue& a) {
    // Sign flip is exact; no rounding step happened, so no perturbation.
    StochasticValue r = a;
    for (int i = 0; i < r.n_; ++i) r.s_[static_cast<std::size_t>(i)] = -r.s_[static_cast<std::size_t>(i)];
    return r;
}

StochasticValue SaContext::abs(const StochasticValue& a) {
    StochasticValue r = a;
    for (int i = 0; i < r.n_; ++i) r.s_[static_cast<std::size_t>(i)] = std::fabs(r.s_[static_cast<std::size_t>(i)]);
    return r;
}

StochasticValue SaContext::exp(const StochasticValue& a) { return unary(a, +[](double x) { return std::exp(x); }); }
StochasticValue SaContext::sin(const StochasticValue& a) { return unary(a, +[](double x) { return std::sin(x); }); }
StochasticValue SaContext::cos(const StochasticValue& a) { return unary(a, +[](double x) { return std::cos(x); }); }
StochasticValue SaContext::tan(const StochasticValue& a) { return unary(a, +[](double x) { return std::tan(x); }); }

StochasticValue SaContext::asin(const StochasticValue& a) {
    for (int i = 0; i < a.size(); ++i)
        if (std::fabs(a.sample(i)) > 1.0) {
            report(InstabilityEvent::Kind::MathInstability, "asin argument outside [-1,1]");
            break;
        }
    return unary(a, +[](double x) { return std::asin(x); });
}

StochasticValue SaContext::acos(const StochasticValue& a) {
    for (int i = 0; i < a.size(); ++i)
        if (std::fabs(a.sample(i)) > 1.0) {
            report(InstabilityEvent::Kind::MathInstability, "acos argument outside [-1,1]");
            break;
        }
    return unary(a, +[](double x) { return std::acos(x); });
}

StochasticValue SaContext::atan(const StochasticValue& a) { return unary(a, +[](double x) { return std::atan(x); }); }

StochasticValue SaContext::sqrt(const StochasticValue& a) {
    StochasticValue r;
    r.n_ = a.n_;
    r.unstable_ = a.unstable_;
    bool reported = false;
    for (int i = 0; i < r.n_; ++i) {
        double x = a.sample(i);
        if (x < 0.0 && !reported) {
            report(InstabilityEvent::Kind::MathInstability, "sqrt of negative value");
            reported = true;
        }
        double s = std::sqrt(x);
        double out = round_random(s, std::isfinite(s) && s > 0.0 ? residual_sqrt(x, s) : 0.0);
        if (!std::isfinite(out)) r.unstable_ = true;
        r.s_[static_cast<std::size_t>(i)] = out;
    }
    return r;
}

StochasticValue SaContext::log(const StochasticValue& a) {
    for (int i = 0; i < a.size(); ++i)
        if (a.sample(i) <= 0.0) {
            report(InstabilityEvent::Kind::MathInstability, "log of non-positive value");
            break;
        }
    return unary(a, +[](double x) { return std::log(x); });
}

StochasticValue SaContext::pow_int(const StochasticValue& a, long e) {
    if (e == 0) return from_exact(1.0);
    bool inv = e < 0;
    long k = inv ? -e : e;
    if (k <= 8) {
        StochasticValue r = a;
        for (long i = 1; i < k; ++i) r = mul(r, a);
        return inv ? div(from_exact(1.0), r) : r;
    }
    // large exponents: one library call, one terminal perturbation
    StochasticValue out = a;
    for (int i = 0; i < out.size(); ++i) {
        double y = jitter(std::pow(a.sample(i), static_cast<double>(e)));
        if (!std::isfinite(y)) out.unstable_ = true;
        out.s_[static_cast<std::size_t>(i)] = y;
    }
    return out;
}

StochasticValue SaContext::pow(const StochasticValue& a, const StochasticValue& b) {
    StochasticValue r;
    r.n_ = a.n_;
    r.unstable_ = a.unstable_ || b.unstable_;
    bool reported = false;
    for (int i = 0; i < r.n_; ++i) {
        double x = a.sample(i);
        if (x < 0.0 && !reported) {
            report(InstabilityEvent::Kind::MathInstability, "pow with negative base and real exponent");
            reported = true;
        }
        double y = jitter(std::pow(x, b.sample(i)));
        if (!std::isfinite(y)) r.unstable_ = true;
        r.s_[static_cast<std::size_t>(i)] = y;
    }
    return r;
}

double SaContext::mean(const StochasticValue& v) const {
    bool all_equal = true;
    for (int i = 1; i < v.size(); ++i) all_equal = all_equal && v.sample(i) == v.sample(0);
    if (all_equal) return v.sample(0);
    double s = 0.0;
    for (int i = 0; i < v.size(); ++i) s += v.sample(i);
    return s / static_cast<double>(v.size());
}

double SaContext::sigma(const StochasticValue& v) const {
    double m = mean(v);
    double s = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        double d = v.sample(i) - m;
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double SaContext::ncsd(const StochasticValue& v) const {
    if (v.unstable()) return 0.0;
    double m = mean(v);
    double sd = sigma(v);
    double cap = static_cast<double>(cfg_.max_display_digits);
    if (m == 0.0) return 0.0;
    if (sd == 0.0) return cap;
    double c = std::log10(std::sqrt(static_cast<double>(cfg_.l)) * std::fabs(m) / (cfg_.tau * sd));
    if (c < 0.0) return 0.0;
    if (c > cap) return cap;
    return c;
}

bool SaContext::is_zero(const StochasticValue& v) const {
    // unstable values carry zero reliable digits, so ncsd <= 0 holds for them
    return v.unstable() || mean(v) == 0.0 || ncsd(v) <= 0.0;
}

std::string SaContext::format(const StochasticValue& v) const {
    if (v.unstable() || is_zero(v)) return "@.0";
    double m = mean(v);
    int digits = static_cast<int>(std::floor(ncsd(v)));
    if (digits < 1) digits = 1;
    if (digits > cfg_.max_display_digits) digits = cfg_.max_display_digits;

    // normalized scientific form 0.ddd...E[+-]eee
    double am = std::fabs(m);
    int e10 = static_cast<int>(std::floor(std::log10(am))) + 1;
    double mant = am / std::pow(10.0, e10);  // in [0.1, 1)
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, mant);
    std::string mstr(buf);
    if (!mstr.empty() && mstr[0] == '1') {  // rounding carried 0.999.. up to 1.000..
        e10 += 1;
        mant = am / std::pow(10.0, e10);
        std::snprintf(buf, sizeof buf, "%.*f", digits, mant);
        mstr = buf;
    }
    char out[96];
    std::snprintf(out, sizeof out, "%s%sE%+04d", m < 0.0 ? "-" : "", mstr.c_str(), e10);
    return out;
}

double common_digits(double x, double y) {
    if (x == y) return std::numeric_limits<double>::infinity();
    return std::log10(std::fabs((x + y) / (2.0 * (x - y))));
}

}  // namespace vsa
