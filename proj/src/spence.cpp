#include "cursedsig/spence.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <vector>

namespace cursedsig {

namespace {

// ---------------------------------------------------------------------------
// Tiny arithmetic expression parser for user-supplied costs. Variables: e,
// theta. Operators: + - * / ^ with parentheses; unary minus allowed.
// ---------------------------------------------------------------------------

struct ExprParser {
  const std::string& text;
  std::size_t pos = 0;

  using Node = std::function<double(double, double)>;

  explicit ExprParser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("cost expression '" + text + "': " + msg + " at position " +
                     std::to_string(pos));
  }

  Node parse() {
    Node n = expr();
    skip_ws();
    if (pos != text.size()) fail("unexpected trailing input");
    return n;
  }

  Node expr() {
    Node left = term();
    while (true) {
      if (eat('+')) {
        Node right = term();
        left = [left, right](double e, double th) { return left(e, th) + right(e, th); };
      } else if (eat('-')) {
        Node right = term();
        left = [left, right](double e, double th) { return left(e, th) - right(e, th); };
      } else {
        return left;
      }
    }
  }

  Node term() {
    Node left = factor();
    while (true) {
      if (eat('*')) {
        Node right = factor();
        left = [left, right](double e, double th) { return left(e, th) * right(e, th); };
      } else if (eat('/')) {
        Node right = factor();
        left = [left, right](double e, double th) { return left(e, th) / right(e, th); };
      } else {
        return left;
      }
    }
  }

  Node factor() {
    Node base = unary();
    if (eat('^')) {
      Node expo = factor();  // right associative
      return [base, expo](double e, double th) { return std::pow(base(e, th), expo(e, th)); };
    }
    return base;
  }

  Node unary() {
    if (eat('-')) {
      Node inner = unary();
      return [inner](double e, double th) { return -inner(e, th); };
    }
    return primary();
  }

  Node primary() {
    skip_ws();
    if (eat('(')) {
      Node inner = expr();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    if (pos < text.size() &&
        (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) {
      std::size_t end = pos;
      while (end < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '.'))
        ++end;
      const double v = std::strtod(text.substr(pos, end - pos).c_str(), nullptr);
      pos = end;
      return [v](double, double) { return v; };
    }
    if (text.compare(pos, 5, "theta") == 0) {
      pos += 5;
      return [](double, double th) { return th; };
    }
    if (pos < text.size() && text[pos] == 'e') {
      pos += 1;
      return [](double e, double) { return e; };
    }
    fail("expected a number, 'e', 'theta' or '('");
  }
};

}  // namespace

CostFunction make_cost(const std::string& spec) {
  CostFunction c;
  c.spec = spec;
  if (spec == "linear") {
    c.value = [](double e, double th) { return e / th; };
    c.inverse = [](double v, double th) { return v * th; };
    return c;
  }
  if (spec == "quadratic") {
    c.value = [](double e, double th) { return e * e / th; };
    c.inverse = [](double v, double th) { return std::sqrt(v * th); };
    return c;
  }
  if (spec.rfind("power:", 0) == 0) {
    const double k = std::strtod(spec.substr(6).c_str(), nullptr);
    if (!(k > 0.0)) throw InputError("cost spec 'power:k' needs k > 0");
    c.value = [k](double e, double th) { return std::pow(e, k) / th; };
    c.inverse = [k](double v, double th) { return std::pow(v * th, 1.0 / k); };
    return c;
  }
  ExprParser parser(spec);
  auto node = parser.parse();
  c.value = node;
  return c;
}

SpenceModel SpenceModel::create(double theta_l, double theta_h, double p, CostFunction cost) {
  if (!(theta_l > 0.0 && theta_h > theta_l))
    throw InputError("spence model: need theta_h > theta_l > 0");
  if (!(p > 0.0 && p < 1.0)) throw InputError("spence model: need p in (0, 1)");
  if (!cost.value) throw InputError("spence model: missing cost function");
  SpenceModel m;
  m.theta_l = theta_l;
  m.theta_h = theta_h;
  m.p = p;
  m.cost = std::move(cost);

  for (double th : {theta_l, theta_h}) {
    const double c0 = m.cost.value(0.0, th);
    if (!std::isfinite(c0) || std::abs(c0) > 1e-12)
      throw InputError("spence model: cost must vanish at e = 0");
  }
  // Spot checks over the working range: strictly increasing in e, and the
  // high type pays less for any positive education.
  const double e_work = 4.0 * std::max(1.0, (theta_h - theta_l) * theta_h);
  bool convex_l = true, convex_h = true;
  for (int i = 0; i <= 64; ++i) {
    const double e = e_work * i / 64.0;
    for (double th : {theta_l, theta_h}) {
      const double c = m.cost.value(e, th);
      const double c_up = m.cost.value(e + 1e-6, th);
      if (!std::isfinite(c) || !std::isfinite(c_up))
        throw InputError("spence model: cost is not finite on the working range");
      if (c_up <= c) throw InputError("spence model: cost must be strictly increasing in e");
    }
    if (e > 0.0 && m.cost.value(e, theta_h) >= m.cost.value(e, theta_l))
      throw InputError("spence model: the high type must have the cheaper signal");
    const double h = e_work / 64.0;
    if (i >= 1 && i < 64) {
      const double em = e - h, ep = e + h;
      if (m.cost.value(ep, theta_l) - 2 * m.cost.value(e, theta_l) + m.cost.value(em, theta_l) <
          -1e-9)
        convex_l = false;
      if (m.cost.value(ep, theta_h) - 2 * m.cost.value(e, theta_h) + m.cost.value(em, theta_h) <
          -1e-9)
        convex_h = false;
    }
  }
  if (!convex_l || !convex_h)
    m.warning = "cost appears non-convex on the checked range; region formulas only need "
                "monotonicity, proceed with care";
  return m;
}

double cost_inverse(const SpenceModel& model, double value, bool high_type) {
  if (value < 0.0) throw InputError("cost_inverse: value must be nonnegative");
  if (value == 0.0) return 0.0;
  const double th = model.theta(high_type);
  if (model.cost.inverse) return model.cost.inverse(value, th);

  double e_max = 10.0 * std::max(1e-6, model.delta() * model.theta_l);
  for (int i = 0; i < 200 && model.cost.value(e_max, th) < value; ++i) {
    e_max *= 2.0;
    if (!std::isfinite(model.cost.value(e_max, th)))
      throw InputError("cost_inverse: cost became non-finite while bracketing");
  }
  if (model.cost.value(e_max, th) < value)
    throw InputError("cost_inverse: could not bracket the requested value");
  double lo = 0.0, hi = e_max;
  while (hi - lo > 1e-15 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (model.cost.value(mid, th) < value)
      lo = mid;
    else
      hi = mid;
  }
  const double e = 0.5 * (lo + hi);
  if (std::abs(model.cost.value(e, th) - value) > 1e-10 * std::max(1.0, value))
    throw InputError("cost_inverse: bisection failed to reach the cost tolerance");
  return e;
}

Interval separating_region(const SpenceModel& model, double chi) {
  require_chi(chi);
  if (chi >= 1.0) return Interval{0.0, 0.0, true};
  const double target = (1.0 - chi) * model.delta();
  return Interval{cost_inverse(model, target, false), cost_inverse(model, target, true), false};
}

Interval pooling_region(const SpenceModel& model, double chi) {
  require_chi(chi);
  const double target = (1.0 - chi) * model.p * model.delta();
  return Interval{0.0, cost_inverse(model, target, false), false};
}

double hybrid_locus(const SpenceModel& model, double chi, double q) {
  require_chi(chi);
  if (!(q > 0.0 && q < 1.0)) throw InputError("hybrid_locus: q must lie in (0, 1)");
  const double weight = model.p / (model.p + (1.0 - model.p) * q);
  return cost_inverse(model, (1.0 - chi) * weight * model.delta(), false);
}

std::pair<double, double> riley_outcome(const SpenceModel& model, double chi) {
  require_chi(chi);
  if (chi >= 1.0) return {0.0, 0.0};
  return {cost_inverse(model, (1.0 - chi) * model.delta(), false), 0.0};
}

WagePair equilibrium_wages(const SpenceModel& model, double chi) {
  require_chi(chi);
  WagePair w;
  w.w_h = model.theta_h - (1.0 - model.p) * chi * model.delta();
  w.w_l = model.theta_l + model.p * chi * model.delta();
  return w;
}

bool weak_set_dominates(const Interval& a, const Interval& b) {
  if (a.empty || b.empty)
    throw InputError("weak_set_dominates: comparison with an empty interval is undefined");
  return a.hi >= b.hi && a.lo >= b.lo;
}

}  // namespace cursedsig
