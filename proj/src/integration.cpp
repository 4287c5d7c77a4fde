#include "ote/integration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <numeric>

#include <fmt/format.h>

#include "ote/errors.hpp"

namespace ote {

namespace {

// Kronrod abscissae on [0, 1]; odd indices are the embedded Gauss points.
constexpr std::array<double, 8> kXk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                       0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  cplx kronrod;
  double error;      // |K - G|
  double inner;      // propagated inner errors
  double abs_value;  // Kronrod estimate of int |f|
  std::size_t evaluations;
};

std::array<double, 15> nodes(double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::array<double, 15> x{};
  for (int i = 0; i < 7; ++i) {
    x[i] = c - h * kXk[i];
    x[14 - i] = c + h * kXk[i];
  }
  x[7] = c;
  return x;
}

Panel combine(double a, double b, const Estimate* v) {
  const double h = 0.5 * (b - a);
  cplx k = kWk[7] * v[7].value, g = kWg[3] * v[7].value;
  double absk = kWk[7] * std::abs(v[7].value);
  double inner = kWk[7] * v[7].error;
  std::size_t evals = v[7].evaluations;
  for (int i = 0; i < 7; ++i) {
    const cplx s = v[i].value + v[14 - i].value;
    k += kWk[i] * s;
    absk += kWk[i] * (std::abs(v[i].value) + std::abs(v[14 - i].value));
    inner += kWk[i] * (v[i].error + v[14 - i].error);
    evals += v[i].evaluations + v[14 - i].evaluations;
    if (i % 2 == 1) g += kWg[i / 2] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h), inner * std::abs(h), absk * std::abs(h), evals};
}

// Evaluates all 15 nodes of every panel in `spans`, possibly concurrently.
std::vector<Panel> evaluate(const Integrand1D& f, const std::vector<std::pair<double, double>>& spans,
                            int workers) {
  const std::size_t n = spans.size() * 15;
  std::vector<Estimate> values(n);
  std::vector<double> xs(n);
  for (std::size_t p = 0; p < spans.size(); ++p) {
    const auto x = nodes(spans[p].first, spans[p].second);
    std::copy(x.begin(), x.end(), xs.begin() + static_cast<long>(p * 15));
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1 && n > 1)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      values[i] = f(xs[i]);
    } catch (...) {
#pragma omp critical(ote_integration_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<Panel> out;
  out.reserve(spans.size());
  for (std::size_t p = 0; p < spans.size(); ++p)
    out.push_back(combine(spans[p].first, spans[p].second, values.data() + p * 15));
  return out;
}

}  // namespace

Estimate integrate_adaptive(const Integrand1D& f, const std::vector<double>& breaks,
                            const AdaptiveOptions& options) {
  if (breaks.size() < 2) throw ContractViolation("integration needs at least one interval");
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    if (breaks[i + 1] > breaks[i]) spans.emplace_back(breaks[i], breaks[i + 1]);
  if (spans.empty()) return {};
  std::vector<Panel> panels = evaluate(f, spans, options.workers);

  for (;;) {
    cplx total = 0.0;
    double err = 0.0, inner = 0.0, abs_total = 0.0;
    std::size_t evals = 0;
    for (const auto& p : panels) {
      total += p.kronrod;
      err += p.error;
      inner += p.inner;
      abs_total += p.abs_value;
      evals += p.evaluations;
    }
    const double tol = std::max(options.abs_tol, options.rel_tol * std::max(std::abs(total), 0.1 * abs_total));
    if (err <= tol) return {total, err + inner, evals};
    if (static_cast<int>(panels.size()) >= options.max_panels) {
      if (options.throw_on_failure)
        throw QuadratureError(fmt::format("adaptive quadrature did not converge within {} panels "
                                          "(estimate {:.6g}, error {:.3g}, target {:.3g})",
                                          options.max_panels, total.real(), err, tol),
                              total.real(), err + inner);
      return {total, err + inner, evals};
    }
    // Split the worst panels until the untouched ones fit within half the target.
    std::vector<std::size_t> order(panels.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return panels[i].error > panels[j].error; });
    std::vector<bool> split(panels.size(), false);
    double remaining = err;
    int budget = options.max_panels - static_cast<int>(panels.size());
    for (std::size_t k = 0; k < order.size() && budget > 0; ++k) {
      if (k > 0 && remaining <= 0.5 * tol) break;
      split[order[k]] = true;
      remaining -= panels[order[k]].error;
      --budget;
    }
    std::vector<std::pair<double, double>> halves;
    for (std::size_t i = 0; i < panels.size(); ++i)
      if (split[i]) {
        const double m = 0.5 * (panels[i].a + panels[i].b);
        halves.emplace_back(panels[i].a, m);
        halves.emplace_back(m, panels[i].b);
      }
    const auto fresh = evaluate(f, halves, options.workers);
    std::vector<Panel> next;
    next.reserve(panels.size() + halves.size() / 2);
    std::size_t h = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      if (split[i]) {
        next.push_back(fresh[h++]);
        next.push_back(fresh[h++]);
      } else {
        next.push_back(panels[i]);
      }
    }
    panels = std::move(next);
  }
}

Estimate integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                            const AdaptiveOptions& options) {
  return integrate_adaptive([&](double x) { return Estimate{f(x), 0.0, 1}; }, std::vector<double>{a, b}, options);
}

}  // namespace ote
