#ifndef VARODE_NUM_IVP_HPP
#define VARODE_NUM_IVP_HPP

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace varode {

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double x0{0.0};
  double x1{1.0};
  int samples{64};  // number of intervals; grid has samples+1 points

  std::vector<double> points() const {
    if (!(x1 > x0)) throw IntegrationError("grid requires x1 > x0");
    if (samples < 16) throw IntegrationError("grid requires at least 16 samples");
    std::vector<double> xs(samples + 1);
    for (int i = 0; i <= samples; ++i)
      xs[i] = x0 + (x1 - x0) * static_cast<double>(i) / samples;
    xs.back() = x1;
    return xs;
  }
};

using State = std::vector<double>;
using Rhs = std::function<void(const State&, State&, double)>;

// Adaptive dopri5 with dense output, sampled on `xs` (ascending, starting at
// the initial time). `extra` points are interpolated as well (for off-grid
// residual probes); both sets must lie in [xs.front(), xs.back()].
struct DenseResult {
  std::vector<State> at_grid;
  std::vector<State> at_extra;
};

inline DenseResult integrate_dense(const Rhs& rhs, const State& y0,
                                   const std::vector<double>& xs,
                                   const std::vector<double>& extra,
                                   double rtol = 1e-10, double atol = 1e-12) {
  namespace od = boost::numeric::odeint;
  if (xs.empty()) throw IntegrationError("empty grid");
  auto checked_rhs = [&rhs](const State& y, State& dy, double x) {
    rhs(y, dy, x);
    for (double v : dy)
      if (!std::isfinite(v)) throw IntegrationError("singularity encountered");
  };
  auto stepper = od::make_dense_output(atol, rtol, od::runge_kutta_dopri5<State>());
  double x0 = xs.front(), x1 = xs.back();
  stepper.initialize(y0, x0, (x1 - x0) / 100.0);

  DenseResult res;
  res.at_grid.resize(xs.size());
  res.at_extra.resize(extra.size());
  res.at_grid[0] = y0;
  std::size_t gi = 1, ei = 0;
  // skip extra points before the start
  while (ei < extra.size() && extra[ei] < x0) ++ei;
  std::size_t max_steps = 2000000;
  std::size_t steps = 0;
  while (stepper.current_time() < x1) {
    if (++steps > max_steps) throw IntegrationError("step limit exceeded");
    double told = stepper.current_time();
    try {
      stepper.do_step(checked_rhs);
    } catch (const IntegrationError&) {
      throw;
    } catch (const std::exception& e) {
      throw IntegrationError(std::string("integration failed: ") + e.what());
    }
    double tnew = stepper.current_time();
    if (!(tnew > told)) throw IntegrationError("step-size underflow");
    for (double v : stepper.current_state())
      if (!std::isfinite(v)) throw IntegrationError("state became non-finite");
    State tmp(y0.size());
    while (gi < xs.size() && xs[gi] <= tnew + 1e-15) {
      stepper.calc_state(std::min(xs[gi], tnew), tmp);
      res.at_grid[gi] = tmp;
      ++gi;
    }
    while (ei < extra.size() && extra[ei] <= tnew + 1e-15) {
      stepper.calc_state(std::min(extra[ei], tnew), tmp);
      res.at_extra[ei] = tmp;
      ++ei;
    }
  }
  if (gi < xs.size()) throw IntegrationError("integration stopped before grid end");
  return res;
}

}  // namespace varode

#endif
