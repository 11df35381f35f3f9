// Discrete stochastic arithmetic: multi-sample values with random rounding,
// CESTAC-style digit estimation and significant-digit formatting.
#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace vsa {

struct SaConfig {
    int l = 3;                    // samples per value, >= 2
    double tau = 4.303;           // Student-type quantile (l=3, 95%)
    int precision_bits = 53;      // mantissa bits of the working format
    int max_display_digits = 15;  // cap on printed significant digits
    std::uint64_t rng_seed = 1;

    bool valid() const {
        return l >= 2 && l <= 8 && tau > 0.0 &&
               (precision_bits == 24 || precision_bits == 53) &&
               max_display_digits >= 1;
    }
};

// One recorded numerical-instability event. Execution continues; the log is
// attached to run reports.
struct InstabilityEvent {
    enum class Kind { UnstableDivision, MathInstability, SingularPivot };
    Kind kind;
    std::string detail;
};

const char* to_string(InstabilityEvent::Kind k);

// l concurrently rounded samples of one scalar. Immutable after creation;
// all arithmetic goes through SaContext, which owns the RNG stream.
class StochasticValue {
  public:
    StochasticValue() = default;

    // Builds a value from explicit samples (2..8 of them).
    static StochasticValue from_samples(std::initializer_list<double> samples);

    int size() const { return n_; }
    double sample(int i) const { return s_[static_cast<std::size_t>(i)]; }
    bool unstable() const { return unstable_; }

    static constexpr int kMaxSamples = 8;

  private:
    friend class SaContext;
    std::array<double, kMaxSamples> s_{};
    int n_ = 0;
    bool unstable_ = false;
};

// splitmix64; tiny, seedable, reproducible across platforms.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // uniform in [0,1)
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

// A computation context: configuration, one RNG stream, and the instability
// log. One context per run; a single context is not thread-safe.
class SaContext {
  public:
    explicit SaContext(SaConfig cfg);

    const SaConfig& config() const { return cfg_; }
    const std::vector<InstabilityEvent>& log() const { return log_; }
    void clear_log() { log_.clear(); }

    StochasticValue from_exact(double x);

    StochasticValue add(const StochasticValue& a, const StochasticValue& b);
    StochasticValue sub(const StochasticValue& a, const StochasticValue& b);
    StochasticValue mul(const StochasticValue& a, const StochasticValue& b);
    StochasticValue div(const StochasticValue& a, const StochasticValue& b);
    StochasticValue neg(const StochasticValue& a);
    StochasticValue abs(const StochasticValue& a);

    StochasticValue exp(const StochasticValue& a);
    StochasticValue sin(const StochasticValue& a);
    StochasticValue cos(const StochasticValue& a);
    StochasticValue tan(const StochasticValue& a);
    StochasticValue asin(const StochasticValue& a);
    StochasticValue acos(const StochasticValue& a);
    StochasticValue atan(const StochasticValue& a);
    StochasticValue sqrt(const StochasticValue& a);
    StochasticValue log(const StochasticValue& a);
    // Integer power; small exponents are expanded into repeated products so
    // the rounding behaviour matches an explicitly written s*s*s.
    StochasticValue pow_int(const StochasticValue& a, long e);
    StochasticValue pow(const StochasticValue& a, const StochasticValue& b);

    double mean(const StochasticValue& v) const;
    double sigma(const StochasticValue& v) const;
    // Number of common significant digits of the sample set, clamped to
    // [0, max_display_digits]. sigma == 0 with nonzero mean reports the cap.
    double ncsd(const StochasticValue& v) const;
    // Informatical-zero predicate: ncsd <= 0 or mean == 0.
    bool is_zero(const StochasticValue& v) const;
    // "@.0" or normalized scientific form with exactly the reliable digits.
    std::string format(const StochasticValue& v) const;

    void report(InstabilityEvent::Kind kind, std::string detail);

  private:
    StochasticValue unary(const StochasticValue& a, double (*f)(double));
    double round_random(double rn, double residual);
    double jitter(double x);

    SaConfig cfg_;
    RngStream rng_;
    std::vector<InstabilityEvent> log_;
};

// NCSDs between two reals: log10 |(x+y)/(2(x-y))|; +inf when x == y.
// Negative results are returned raw; reporting layers clamp at zero.
double common_digits(double x, double y);

}  // namespace vsa
