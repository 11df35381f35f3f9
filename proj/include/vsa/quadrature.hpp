// Composite Simpson quadrature over a generic arithmetic backend, plus the
// substitution rule for Abel-type weakly singular integrals.
#pragma once

#include "vsa/expr.hpp"

#include <stdexcept>

namespace vsa {

struct QuadConfig {
    int panels = 500;  // even, >= 2
    enum class Weight { None, Abel } singular_weight = Weight::None;
    // Panel count for Abel system assembly. 0 ties the resolution to the
    // collocation degree (see assemble_system); > 0 forces a fixed count.
    int abel_panels = 0;

    bool valid() const { return panels >= 2 && panels % 2 == 0; }
};

// Composite Simpson with weights h/3 * (1,4,2,...,4,1). Endpoints and nodes
// are formed in the backend's arithmetic so SA runs perturb every step.
template <class Backend, class F>
typename Backend::value_type simpson(F&& f, typename Backend::value_type lo,
                                     typename Backend::value_type hi, int panels, Backend& b) {
    if (panels < 2 || panels % 2 != 0) throw std::invalid_argument("simpson: panels must be even and >= 2");
    double mlo = b.mean_of(lo), mhi = b.mean_of(hi);
    if (mlo > mhi) throw std::invalid_argument("simpson: lo > hi");
    if (mlo == mhi) return b.from_exact(0.0);

    using V = typename Backend::value_type;
    V h = b.div(b.sub(hi, lo), b.from_exact(static_cast<double>(panels)));
    V sum = b.add(f(lo), f(hi));
    V four = b.from_exact(4.0);
    V two = b.from_exact(2.0);
    for (int k = 1; k < panels; ++k) {
        V s = b.add(lo, b.mul(b.from_exact(static_cast<double>(k)), h));
        V fs = f(s);
        sum = b.add(sum, b.mul(k % 2 == 1 ? four : two, fs));
    }
    return b.div(b.mul(sum, h), b.from_exact(3.0));
}

// integral_0^r (s-c)^j / sqrt(r^2-s^2) ds via s = r sin(theta), which turns
// the integrand into the polynomial (r sin(theta) - c)^j on [0, pi/2].
template <class Backend>
typename Backend::value_type abel_basis_integral(typename Backend::value_type r, double c, int j,
                                                 int panels, Backend& b) {
    if (b.mean_of(r) <= 0.0) throw std::invalid_argument("abel_basis_integral: r must be positive");
    if (j < 0) throw std::invalid_argument("abel_basis_integral: j must be >= 0");
    using V = typename Backend::value_type;
    V cv = b.from_exact(c);
    auto f = [&](V theta) {
        V s = b.mul(r, b.sin(theta));
        return b.pow_int(b.sub(s, cv), j);
    };
    return simpson(f, b.from_exact(0.0), b.from_exact(1.5707963267948966), panels, b);
}

}  // namespace vsa
