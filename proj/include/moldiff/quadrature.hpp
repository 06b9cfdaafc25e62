#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

// Gauss-Kronrod 7-15 panel quadrature with deterministic worst-first
// refinement, plus a Gauss-Legendre node generator for fixed-order rules.
// Node tables follow Piessens et al., QUADPACK (1983), routine QK15.

namespace moldiff::quad {

inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kGK15Weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kG7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename T>
struct Estimate {
  T value{};
  double error = 0.0;
  bool converged = true;
  int subdivisions = 0;
};

inline double norm_of(double v) { return std::abs(v); }
inline double norm_of(const std::complex<double>& v) { return std::abs(v); }

// One 15-point Kronrod panel on [a, b]; error = |GK15 - G7|.
template <typename F>
auto gk15(F&& f, double a, double b) {
  using T = decltype(f(0.0));
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  T kronrod{};
  T gauss{};
  for (int i = 0; i < 8; ++i) {
    const double off = half * kGK15Nodes[i];
    T pair = (i < 7) ? f(mid - off) + f(mid + off) : f(mid);
    kronrod += kGK15Weights[i] * pair;
    if (i % 2 == 1) gauss += kG7Weights[i / 2] * pair;
  }
  Estimate<T> out;
  out.value = half * kronrod;
  out.error = norm_of(half * (kronrod - gauss));
  return out;
}

// Adaptive refinement over an initial panel list. Panels are bisected
// worst-error-first (first maximum wins, so the result is deterministic)
// until the summed error meets max(abs_tol, rel_tol*|value|) or the
// subdivision budget runs out.
template <typename F>
auto adaptive(F&& f, const std::vector<double>& breaks, double abs_tol,
              double rel_tol, int max_subdivisions) {
  using T = decltype(f(0.0));
  struct Panel {
    double a, b;
    Estimate<T> est;
  };
  std::vector<Panel> panels;
  panels.reserve(breaks.size() + 16);
  for (size_t i = 0; i + 1 < breaks.size(); ++i)
    panels.push_back({breaks[i], breaks[i + 1], gk15(f, breaks[i], breaks[i + 1])});

  Estimate<T> out;
  for (;;) {
    T total{};
    double err = 0.0;
    for (const auto& p : panels) {
      total += p.est.value;
      err += p.est.error;
    }
    out.value = total;
    out.error = err;
    const double tol = std::max(abs_tol, rel_tol * norm_of(total));
    if (err <= tol) return out;
    if (out.subdivisions >= max_subdivisions) {
      out.converged = false;
      return out;
    }
    size_t worst = 0;
    for (size_t i = 1; i < panels.size(); ++i)
      if (panels[i].est.error > panels[worst].est.error) worst = i;
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    panels[worst] = {p.a, mid, gk15(f, p.a, mid)};
    panels.push_back({mid, p.b, gk15(f, mid, p.b)});
    ++out.subdivisions;
  }
}

template <typename F>
auto adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
              int max_subdivisions) {
  return adaptive(f, std::vector<double>{a, b}, abs_tol, rel_tol,
                  max_subdivisions);
}

// Evenly spaced breakpoints, at least one panel.
inline std::vector<double> uniform_breaks(double a, double b, int panels) {
  if (panels < 1) panels = 1;
  std::vector<double> breaks(panels + 1);
  for (int i = 0; i <= panels; ++i)
    breaks[i] = a + (b - a) * (static_cast<double>(i) / panels);
  breaks.back() = b;
  return breaks;
}

struct GLNode {
  double x;
  double w;
};

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
inline std::vector<GLNode> gauss_legendre(int n) {
  std::vector<GLNode> nodes(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = {x, w};
    nodes[n - 1 - i] = {-x, w};
  }
  if (n % 2 == 1) nodes[n / 2].x = 0.0;
  return nodes;
}

inline const std::vector<GLNode>& gauss_legendre_32() {
  static const std::vector<GLNode> table = gauss_legendre(32);
  return table;
}

}  // namespace moldiff::quad
