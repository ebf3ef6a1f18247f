#include "sgspec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sgspec {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr unsigned max_depth = 15;

// Bisect until the Kronrod error meets this piece's share of the tolerance. Rounding noise
// near a vanishing integral is accepted once it sits at the level of ∫|f|.
void refine(const std::function<double(double)>& f, double a, double b, double tol, unsigned depth,
            QuadratureResult& out) {
  double err = 0.0, l1 = 0.0;
  const double v = Rule::integrate(f, a, b, 0, 0.0, &err, &l1);
  err *= 0.5 * (b - a);  // boost reports the error of the rule on [-1, 1]
  const double noise = 256.0 * std::numeric_limits<double>::epsilon() * l1;
  if (depth == 0 || err <= tol || err <= noise) {
    out.value += v;
    out.error += err;
    out.l1 += l1;
    return;
  }
  const double m = 0.5 * (a + b);
  refine(f, a, m, 0.5 * tol, depth - 1, out);
  refine(f, m, b, 0.5 * tol, depth - 1, out);
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const std::vector<double>& breakpoints, double abs_tol) {
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  QuadratureResult out;
  const double span = b - a;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    const double share = span > 0.0 ? abs_tol * (cuts[i + 1] - cuts[i]) / span : abs_tol;
    refine(f, cuts[i], cuts[i + 1], share, max_depth, out);
  }
  out.value *= sign;
  return out;
}

}  // namespace sgspec
