#include "pattern_gauge/semilinear/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pattern_gauge/error.hpp"

namespace pattern_gauge::semilinear {

Nonlinearity Nonlinearity::linear(double q) {
  if (!std::isfinite(q)) throw ParameterError("linear: q must be finite");
  Nonlinearity n;
  n.kind_ = Kind::linear;
  n.id_ = "linear";
  n.params_ = {{"q", q}};
  n.c1_ = q;
  n.roots_ = {0.0};
  return n;
}

Nonlinearity Nonlinearity::allen_cahn(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("allen_cahn: eps must be > 0");
  Nonlinearity n;
  n.kind_ = Kind::allen_cahn;
  n.id_ = "allen_cahn";
  n.params_ = {{"eps", eps}};
  const double s = 1.0 / (eps * eps);
  n.c3_ = -s;
  n.c1_ = s;
  n.roots_ = {-1.0, 0.0, 1.0};
  return n;
}

Nonlinearity Nonlinearity::bistable(double p, double q, double r) {
  if (!(p < q && q < r)) throw ParameterError("bistable: requires p < q < r");
  Nonlinearity n;
  n.kind_ = Kind::bistable;
  n.id_ = "bistable";
  n.params_ = {{"p", p}, {"q", q}, {"r", r}};
  // -(u-p)(u-q)(u-r) = -u^3 + (p+q+r) u^2 - (pq+qr+rp) u + pqr
  n.c3_ = -1.0;
  n.c2_ = p + q + r;
  n.c1_ = -(p * q + q * r + r * p);
  n.c0_ = p * q * r;
  n.roots_ = {p, q, r};
  return n;
}

double Nonlinearity::f(double u) const { return ((c3_ * u + c2_) * u + c1_) * u + c0_; }
double Nonlinearity::fprime(double u) const { return (3.0 * c3_ * u + 2.0 * c2_) * u + c1_; }
double Nonlinearity::fsecond(double u) const { return 6.0 * c3_ * u + 2.0 * c2_; }
double Nonlinearity::F(double u) const {
  return (((0.25 * c3_ * u + c2_ / 3.0) * u + 0.5 * c1_) * u + c0_) * u;
}

double Nonlinearity::root_span() const {
  if (roots_.size() < 2) return 1.0;
  return roots_.back() - roots_.front();
}

std::optional<double> Nonlinearity::sup_fprime_global() const {
  if (c3_ < 0.0) {
    // f' is a downward parabola with vertex at u* = -c2 / (3 c3).
    const double u = -c2_ / (3.0 * c3_);
    return fprime(u);
  }
  if (c3_ == 0.0 && c2_ == 0.0) return c1_;
  return std::nullopt;
}

double Nonlinearity::magnitude_scale() const {
  double lo = -1.0, hi = 1.0;
  if (roots_.size() >= 2) {
    lo = roots_.front();
    hi = roots_.back();
  }
  double m = 0.0;
  const int N = 256;
  for (int i = 0; i <= N; ++i) m = std::max(m, std::abs(f(lo + (hi - lo) * i / N)));
  return m > 0.0 ? m : 1.0;
}

Nonlinearity make_nonlinearity(const std::string& id, const std::map<std::string, double>& params) {
  auto need = [&](const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw ParameterError("nonlinearity '" + id + "' needs parameter '" + key + "'");
    return it->second;
  };
  auto only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : params) {
      (void)v;
      if (std::none_of(keys.begin(), keys.end(), [&](const char* s) { return k == s; }))
        throw ParameterError("nonlinearity '" + id + "' has unknown parameter '" + k + "'");
    }
  };
  if (id == "linear") {
    only({"q"});
    return Nonlinearity::linear(need("q"));
  }
  if (id == "allen_cahn") {
    only({"eps"});
    return Nonlinearity::allen_cahn(need("eps"));
  }
  if (id == "bistable") {
    only({"p", "q", "r"});
    return Nonlinearity::bistable(need("p"), need("q"), need("r"));
  }
  throw ParameterError("unknown nonlinearity '" + id + "' (known: linear, allen_cahn, bistable)");
}

SupValue sup_fprime(const Nonlinearity& f, std::optional<std::pair<double, double>> interval) {
  if (auto g = f.sup_fprime_global()) return {*g, false};
  if (!interval) throw UnboundedSupremumError("sup f' is +infinity for '" + f.id() + "' and no interval was given");
  auto [lo, hi] = *interval;
  if (!(lo <= hi)) throw ParameterError("sup_fprime: interval must satisfy lo <= hi");
  double best = -std::numeric_limits<double>::infinity();
  const int N = 10000;
  for (int i = 0; i <= N; ++i) best = std::max(best, f.fprime(lo + (hi - lo) * i / N));
  // Critical points of f' solve f'' = 0, which is linear for cubic f.
  const double a = f.fsecond(1.0) - f.fsecond(0.0), b = f.fsecond(0.0);
  if (a != 0.0) {
    const double u = -b / a;
    if (u >= lo && u <= hi) best = std::max(best, f.fprime(u));
  }
  return {best, true};
}

}  // namespace pattern_gauge::semilinear
