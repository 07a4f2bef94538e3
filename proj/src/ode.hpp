#pragma once

#include <functional>
#include <vector>

#include <boost/numeric/odeint.hpp>

namespace floquet::detail {

using State = std::vector<double>;
using Rhs = std::function<void(const State&, State&, double)>;

// Adaptive Runge-Kutta-Fehlberg 7(8); returns the state at each requested time
// (times must be increasing and start at the initial time).
inline std::vector<State> integrate_samples(const Rhs& f, State x0, const std::vector<double>& times,
                                            double tol = 1e-12) {
    namespace odeint = boost::numeric::odeint;
    std::vector<State> out;
    out.reserve(times.size());
    auto stepper = odeint::make_controlled(tol * 1e-2, tol, odeint::runge_kutta_fehlberg78<State>());
    double dt = times.size() > 1 ? (times[1] - times[0]) * 0.1 : 1e-3;
    odeint::integrate_times(stepper, [&](const State& x, State& dx, double t) { f(x, dx, t); }, x0,
                            times.begin(), times.end(), dt,
                            [&](const State& x, double) { out.push_back(x); });
    return out;
}

}  // namespace floquet::detail
