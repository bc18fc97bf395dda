#pragma once

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "svcharme/errors.hpp"

namespace svcharme {

struct QuadratureSpec {
  double relative_tolerance = 1e-8;
  double absolute_tolerance = 1e-12;
  /// Cap on the number of panels after bisection.
  std::size_t max_subdivisions = 2000;
  /// Infinite end panels use x = c +/- tail_scale * t / (1 - t), t in [0, 1).
  double tail_scale = 1.0;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;

  [[nodiscard]] bool converged(const QuadratureSpec& spec) const noexcept {
    return std::isfinite(value) &&
           error <= std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(value));
  }
};

namespace detail {

enum class PanelKind { finite, upper_tail, lower_tail };

struct Panel {
  double a = 0.0;
  double b = 0.0;
  PanelKind kind = PanelKind::finite;
  double origin = 0.0;
  double value = 0.0;
  double error = 0.0;

  friend bool operator<(const Panel& lhs, const Panel& rhs) noexcept { return lhs.error < rhs.error; }
};

template <typename F>
void evaluate_panel(F& f, Panel& panel, double tail_scale) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  double error = 0.0;
  switch (panel.kind) {
    case PanelKind::finite:
      panel.value = Rule::integrate(f, panel.a, panel.b, 0, 0.0, &error);
      break;
    case PanelKind::upper_tail: {
      const double origin = panel.origin;
      auto mapped = [&](double t) {
        const double w = 1.0 - t;
        return f(origin + tail_scale * t / w) * tail_scale / (w * w);
      };
      panel.value = Rule::integrate(mapped, panel.a, panel.b, 0, 0.0, &error);
      break;
    }
    case PanelKind::lower_tail: {
      const double origin = panel.origin;
      auto mapped = [&](double t) {
        const double w = 1.0 - t;
        return f(origin - tail_scale * t / w) * tail_scale / (w * w);
      };
      panel.value = Rule::integrate(mapped, panel.a, panel.b, 0, 0.0, &error);
      break;
    }
  }
  panel.error = std::isfinite(panel.value) ? error : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Globally adaptive 15/31-point Gauss-Kronrod over consecutive
/// breakpoints, which must be ascending; the first may be -inf and the last
/// +inf. The panel with the largest error estimate is bisected until the
/// summed error meets max(absolute, relative * |value|) or the panel cap is
/// hit. Never throws; check converged().
template <typename F>
[[nodiscard]] QuadratureResult integrate_unchecked(F&& f, std::span<const double> breakpoints,
                                                   const QuadratureSpec& spec) {
  using detail::Panel;
  using detail::PanelKind;
  std::priority_queue<Panel> panels;
  QuadratureResult total;
  const auto push = [&](Panel panel) {
    detail::evaluate_panel(f, panel, spec.tail_scale);
    total.value += panel.value;
    total.error += panel.error;
    panels.push(panel);
  };
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    if (std::isinf(a) && std::isinf(b)) {
      push(Panel{0.0, 1.0, PanelKind::lower_tail, 0.0});
      push(Panel{0.0, 1.0, PanelKind::upper_tail, 0.0});
    } else if (std::isinf(b)) {
      push(Panel{0.0, 1.0, PanelKind::upper_tail, a});
    } else if (std::isinf(a)) {
      push(Panel{0.0, 1.0, PanelKind::lower_tail, b});
    } else {
      push(Panel{a, b, PanelKind::finite, 0.0});
    }
  }
  while (!panels.empty() && panels.size() < spec.max_subdivisions && !total.converged(spec)) {
    const Panel worst = panels.top();
    panels.pop();
    total.value -= worst.value;
    total.error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel at floating-point resolution; keep its estimate.
      total.value += worst.value;
      total.error += worst.error;
      break;
    }
    push(Panel{worst.a, mid, worst.kind, worst.origin});
    push(Panel{mid, worst.b, worst.kind, worst.origin});
  }
  // Re-sum to shed the drift of incremental updates.
  QuadratureResult exact;
  while (!panels.empty()) {
    exact.value += panels.top().value;
    exact.error += panels.top().error;
    panels.pop();
  }
  return exact;
}

/// As integrate_unchecked, throwing QuadratureNonConvergence on failure.
template <typename F>
[[nodiscard]] QuadratureResult integrate(F&& f, std::span<const double> breakpoints, const QuadratureSpec& spec) {
  const QuadratureResult r = integrate_unchecked(f, breakpoints, spec);
  if (!r.converged(spec)) throw QuadratureNonConvergence(r.value, r.error);
  return r;
}

/// Integral over [a, b]; either bound may be infinite.
template <typename F>
[[nodiscard]] QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec) {
  const double bounds[] = {a, b};
  return integrate(f, std::span<const double>(bounds), spec);
}

}  // namespace svcharme
