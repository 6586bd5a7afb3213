#include "fracq/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include "fracq/params.hpp"

namespace fracq::quad {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSingularRadius = 1e-8;

// 15-point Kronrod abscissae; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

// Wraps the evaluator with singular-point limits and a finiteness check.
class Sampler {
 public:
  explicit Sampler(const Integrand& f) : f_(f) {
    for (const auto& s : f.singular_points) {
      limits_.push_back(s.limit ? *s.limit : estimate_limit(s.location));
    }
  }

  double operator()(double p) {
    for (std::size_t i = 0; i < limits_.size(); ++i) {
      const double s = f_.singular_points[i].location;
      if (std::abs(p - s) < kSingularRadius * std::max(1.0, std::abs(s))) return limits_[i];
    }
    ++evaluations_;
    const double v = f_.evaluator(p);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "integrand returned a non-finite value at p=" << p;
      throw ConvergenceError(os.str());
    }
    return v;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  // Symmetric means m(h) = (f(s+h) + f(s-h))/2 have O(h^2) error; one
  // Richardson step removes it.
  double estimate_limit(double s) {
    const double h = 1e-3 * std::max(1.0, std::abs(s));
    auto mean = [&](double step) {
      evaluations_ += 2;
      return 0.5 * (f_.evaluator(s + step) + f_.evaluator(s - step));
    };
    const double coarse = mean(h);
    const double fine = mean(0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
  }

  const Integrand& f_;
  std::vector<double> limits_;
  std::size_t evaluations_ = 0;
};

// One Gauss-Kronrod panel of g over [a, b].
template <class G>
Segment kronrod(G& g, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = g(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double abs_sum = std::abs(kronrod);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = g(center - dx);
    const double f2 = g(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    abs_sum += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const double value = kronrod * half;
  const double err = std::max(std::abs((kronrod - gauss) * half), 50.0 * kEps * abs_sum * std::abs(half));
  return {a, b, value, err};
}

// Globally adaptive bisection over a set of initial panels of g.
template <class G>
QuadResult adapt(G& g, const std::vector<std::pair<double, double>>& panels, double tol,
                 std::size_t budget, const std::function<std::size_t()>& evaluations) {
  std::priority_queue<Segment> heap;
  std::vector<Segment> frozen;
  double value = 0.0;
  double err = 0.0;
  for (const auto& [a, b] : panels) {
    if (b <= a) continue;
    Segment s = kronrod(g, a, b);
    value += s.value;
    err += s.err;
    heap.push(s);
  }
  while (err > tol && !heap.empty() && evaluations() + 30 <= budget) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        worst.b - worst.a < 1e3 * kEps * std::max(std::abs(worst.a), std::abs(worst.b))) {
      frozen.push_back(worst);
      continue;
    }
    Segment left = kronrod(g, worst.a, mid);
    Segment right = kronrod(g, mid, worst.b);
    value += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the incremental updates.
  value = 0.0;
  err = 0.0;
  for (const auto& s : frozen) {
    value += s.value;
    err += s.err;
  }
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().err;
    heap.pop();
  }
  QuadResult r;
  r.value = value;
  r.abs_err_estimate = err;
  r.converged = err <= tol;
  r.evaluations = evaluations();
  return r;
}

double map_exponent(double power) {
  // p = P u^(-1/s) turns P^... p^power dp into a constant multiple of du.
  return -(power + 1.0);
}

}  // namespace

QuadResult integrate_finite(const Integrand& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw DomainError("integrate_finite requires lo < hi");
  if (!(tol > 0.0)) throw DomainError("integrate_finite requires tol > 0");
  if (!f.evaluator) throw DomainError("integrand has no evaluator");

  Sampler sample(f);
  std::vector<double> cuts{lo};
  for (const auto& s : f.singular_points) {
    if (s.location > lo && s.location < hi) cuts.push_back(s.location);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());

  const bool left_power = f.endpoint && f.endpoint->exponent != 0.0 && f.endpoint->at == lo;
  const bool right_power = f.endpoint && f.endpoint->exponent != 0.0 && f.endpoint->at == hi;
  const double q = f.endpoint ? 1.0 / (1.0 + f.endpoint->exponent) : 1.0;
  if (f.endpoint && !(f.endpoint->exponent > -1.0)) {
    throw DomainError("endpoint exponent must exceed -1 for an integrable singularity");
  }
  if (f.endpoint && f.endpoint->log_power != 0 && f.endpoint->log_power != 1) {
    throw DomainError("endpoint log power must be 0 or 1");
  }
  const bool endpoint_log = f.endpoint && f.endpoint->log_power == 1;

  // Composite integrand on a panel index space: panel k maps u in [k, k+1]
  // onto [cuts[k], cuts[k+1]], with the power substitution on end panels.
  const std::size_t n_panels = cuts.size() - 1;
  // The substituted integrand tends to a constant (times ln(w u^q) with a log factor) at
  // the endpoint, up to O(u^q); below this floor u^q would underflow toward the singular
  // point itself, so the leading behaviour is continued from the floor.
  const double u_floor = std::pow(1e-250, 1.0 / q);
  auto substituted = [&](double u, double w, auto&& at) {
    const double ue = std::max(u, u_floor);
    if (!(ue > 0.0)) return 0.0;
    const double s = std::pow(ue, q);
    double value = at(w * s) * w * q * s / ue;
    if (endpoint_log && u < ue) value *= (std::log(w) + q * std::log(u)) / (std::log(w) + q * std::log(ue));
    return value;
  };
  auto g = [&](double t) {
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max(t, 0.0)), n_panels - 1);
    const double u = t - static_cast<double>(k);
    const double a = cuts[k];
    const double b = cuts[k + 1];
    const double w = b - a;
    if (k == 0 && left_power) return substituted(u, w, [&](double d) { return sample(a + d); });
    if (k + 1 == n_panels && right_power) return substituted(1.0 - u, w, [&](double d) { return sample(b - d); });
    return sample(a + w * u) * w;
  };
  std::vector<std::pair<double, double>> panels;
  for (std::size_t k = 0; k < n_panels; ++k) {
    panels.emplace_back(static_cast<double>(k), static_cast<double>(k + 1));
  }
  return adapt(g, panels, tol, kEvaluationBudget, [&] { return sample.evaluations(); });
}

std::pair<double, double> euler_limit(const std::vector<double>& partial_sums) {
  if (partial_sums.empty()) return {0.0, 0.0};
  auto collapse = [](std::vector<double> row) {
    while (row.size() > 1) {
      for (std::size_t i = 0; i + 1 < row.size(); ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
      row.pop_back();
    }
    return row.front();
  };
  const double full = collapse(partial_sums);
  if (partial_sums.size() < 2) return {full, std::abs(full)};
  std::vector<double> shorter(partial_sums.begin(), partial_sums.end() - 1);
  const double prev = collapse(std::move(shorter));
  return {full, std::abs(full - prev)};
}

namespace {

constexpr std::size_t kMaxCells = 600;
constexpr std::size_t kMinCells = 12;

// Sums cells [edge(k), edge(k+1)] of h with Euler acceleration.
QuadResult accelerated_cells(const Integrand& h, const std::function<double(std::size_t)>& edge,
                             double tol, bool require_alternation) {
  QuadResult total;
  std::vector<double> partial;
  double running = 0.0;
  double previous_cell = 0.0;
  int calm = 0;
  const double cell_tol = tol / 64.0;
  for (std::size_t k = 0; k < kMaxCells; ++k) {
    QuadResult cell = integrate_finite(h, edge(k), edge(k + 1), cell_tol);
    total.evaluations += cell.evaluations;
    total.converged = total.converged && cell.converged;
    if (require_alternation && k > 0 && cell.value * previous_cell > 0.0 &&
        std::abs(cell.value) > cell_tol && std::abs(previous_cell) > cell_tol) {
      throw DomainError("half-period cells do not alternate in sign; supply a tail decomposition");
    }
    previous_cell = cell.value;
    running += cell.value;
    partial.push_back(running);
    if (partial.size() < kMinCells) continue;
    const auto [estimate, change] = euler_limit(partial);
    calm = change < 0.25 * tol ? calm + 1 : 0;
    if (calm >= 2) {
      total.value = estimate;
      // Cell quadrature errors enter the averaged sum with weights that sum to one.
      total.abs_err_estimate = change + cell_tol;
      return total;
    }
  }
  const auto [estimate, change] = euler_limit(partial);
  total.value = estimate;
  total.abs_err_estimate = change + cell_tol;
  total.converged = false;
  return total;
}

// Integral of p^power ln^log_power(p) envelope(p) over [from, inf) by p = from * u^(-1/s).
QuadResult mapped_power_tail(const Function& envelope, double power, double from, double tol, int log_power = 0) {
  const double s = map_exponent(power);
  if (!(s > 0.0)) throw DomainError("power-law tail with exponent >= -1 does not converge");
  if (!(from > 0.0)) throw DomainError("power-law tail must start at a positive abscissa");
  const double log_from = std::log(from);
  const double scale = std::pow(from, -s) / s;
  Integrand mapped = make_integrand([&envelope, log_from, s, scale, log_power](double u) {
    if (u <= 0.0) return 0.0;
    const double log_p = log_from - std::log(u) / s;
    const double value = envelope(std::exp(std::min(log_p, 690.0))) * scale;
    return log_power == 1 ? value * log_p : value;
  });
  return integrate_finite(mapped, 0.0, 1.0, tol);
}

}  // namespace

QuadResult integrate_tail_term(const TailTerm& term, double from, double tol) {
  if (term.log_power != 0 && term.log_power != 1) throw DomainError("tail log power must be 0 or 1");
  if (term.frequency == 0.0) {
    const double c = std::cos(term.phase);
    if (c == 0.0) return {};
    QuadResult r = mapped_power_tail(term.envelope, term.power, from, tol / std::abs(c), term.log_power);
    r.value *= c;
    r.abs_err_estimate *= std::abs(c);
    return r;
  }
  const double omega = std::abs(term.frequency);
  const double phase = term.frequency > 0.0 ? term.phase : -term.phase;
  Integrand h = make_integrand([&term, omega, phase](double p) {
    const double v = std::pow(p, term.power) * term.envelope(p) * std::cos(omega * p + phase);
    return term.log_power == 1 ? v * std::log(p) : v;
  });
  // Cells run between consecutive zeros of the cosine.
  const double pi = std::numbers::pi;
  const double j0 = std::ceil((omega * from + phase - 0.5 * pi) / pi);
  auto zero = [=](double j) { return (0.5 * pi + j * pi - phase) / omega; };
  const double first = std::max(zero(j0), from);
  QuadResult r;
  if (first > from) r += integrate_finite(h, from, first, tol / 4.0);
  r += accelerated_cells(h, [&](std::size_t k) { return zero(j0 + static_cast<double>(k)); },
                         tol / 2.0, false);
  return r;
}

QuadResult integrate_semi_infinite(const Integrand& f, double lo, double tol) {
  if (!(tol > 0.0)) throw DomainError("integrate_semi_infinite requires tol > 0");
  if (!f.tail.empty()) {
    const double start = std::max(lo, f.tail_start);
    const double share = tol / static_cast<double>(f.tail.size() + 1);
    QuadResult r;
    if (start > lo) r = integrate_finite(f, lo, start, share);
    for (const auto& term : f.tail) r += integrate_tail_term(term, start, share);
    return r;
  }

  // Head up to a point past every declared feature of the integrand.
  double start = std::max(lo + 1.0, 1.0);
  for (const auto& s : f.singular_points) start = std::max(start, s.location + 1.0);
  if (f.endpoint) start = std::max(start, f.endpoint->at + 1.0);

  if (f.period) {
    const double half = 0.5 * std::abs(*f.period);
    if (!(half > 0.0)) throw DomainError("oscillation period must be nonzero");
    QuadResult r = integrate_finite(f, lo, start, tol / 2.0);
    r += accelerated_cells(f, [&](std::size_t k) { return start + half * static_cast<double>(k); },
                           tol / 2.0, true);
    return r;
  }
  if (f.decay_exponent < -1.0) {
    QuadResult r = integrate_finite(f, lo, start, tol / 2.0);
    const double d = f.decay_exponent;
    Function envelope = [&f, d](double p) {
      const double v = f.evaluator(p);
      return v == 0.0 ? 0.0 : v * std::exp(-d * std::log(p));
    };
    r += mapped_power_tail(envelope, d, start, tol / 2.0);
    return r;
  }
  throw DomainError(
      "semi-infinite integrand needs decay_exponent < -1, an oscillation period, or a tail "
      "decomposition");
}

}  // namespace fracq::quad
