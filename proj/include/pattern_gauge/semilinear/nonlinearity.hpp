#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pattern_gauge::semilinear {

// Autonomous nonlinearity f(u) with derivative and antiderivative (F' = f, F(0) = 0).
class Nonlinearity {
 public:
  enum class Kind { linear, allen_cahn, bistable };

  static Nonlinearity linear(double q);
  static Nonlinearity allen_cahn(double eps);
  static Nonlinearity bistable(double p, double q, double r);

  double f(double u) const;
  double fprime(double u) const;
  double fsecond(double u) const;
  double F(double u) const;

  Kind kind() const { return kind_; }
  const std::string& id() const { return id_; }
  const std::map<std::string, double>& params() const { return params_; }
  // Real roots in increasing order.
  const std::vector<double>& roots() const { return roots_; }
  // max root - min root, or 1 when there is a single root.
  double root_span() const;
  // Analytic global supremum of f', when finite.
  std::optional<double> sup_fprime_global() const;
  // Largest |f| over the root interval (or [-1, 1] for a single root); used as a residual floor scale.
  double magnitude_scale() const;

 private:
  Kind kind_ = Kind::linear;
  std::string id_;
  std::map<std::string, double> params_;
  // f(u) = c3 u^3 + c2 u^2 + c1 u + c0
  double c3_ = 0, c2_ = 0, c1_ = 0, c0_ = 0;
  std::vector<double> roots_;
};

Nonlinearity make_nonlinearity(const std::string& id, const std::map<std::string, double>& params);

struct SupValue {
  double value = 0.0;
  bool restricted = false;  // true when taken over an interval instead of globally
};

// Global analytic sup f' when finite; otherwise the sup over the interval. Throws
// UnboundedSupremumError when neither is available.
SupValue sup_fprime(const Nonlinearity& f, std::optional<std::pair<double, double>> interval = std::nullopt);

}  // namespace pattern_gauge::semilinear
