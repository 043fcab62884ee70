#include "cmap/grad.hpp"

#include <algorithm>
#include <cmath>

#include "cmap/error.hpp"

namespace cmap {

GradTable::GradTable(std::size_t outputs, std::vector<std::string> params)
    : outputs_(outputs), names_(std::move(params)), data_(outputs_ * names_.size(), 0.0) {}

std::optional<std::size_t> GradTable::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

double GradTable::get(std::size_t row, const std::string& name) const {
  const auto col = index_of(name);
  if (!col) throw InvalidArgument("gradient table has no parameter '" + name + "'");
  return at(row, *col);
}

template <typename T>
DualResult<T> straight_through(T forward, T backward, GradTable grads) {
  const std::size_t n = component_count(forward);
  if (component_count(backward) != n) {
    throw ShapeMismatch("straight_through: forward and backward values differ in shape");
  }
  if (grads.outputs() != n) {
    throw ShapeMismatch("straight_through: gradient table has " + std::to_string(grads.outputs()) +
                        " output rows for a value with " + std::to_string(n) + " components");
  }
  return DualResult<T>{std::move(forward), std::move(backward), std::move(grads)};
}

template DualResult<double> straight_through(double, double, GradTable);
template DualResult<ComplexPoint> straight_through(ComplexPoint, ComplexPoint, GradTable);
template DualResult<std::vector<double>> straight_through(std::vector<double>, std::vector<double>, GradTable);

template <typename Real>
FiniteDifferenceReport finite_difference_check(const ScalarFunction<Real>& f, std::span<const Real> at,
                                               std::span<const double> analytic, Real h) {
  if (!(h > Real(0))) throw InvalidArgument("finite_difference_check: step must be > 0");
  if (analytic.size() != at.size()) {
    throw ShapeMismatch("finite_difference_check: analytic gradient length differs from parameter count");
  }
  FiniteDifferenceReport report;
  report.numeric.resize(at.size());
  report.relative_error.resize(at.size());
  std::vector<Real> theta(at.begin(), at.end());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const Real saved = theta[i];
    theta[i] = saved + h;
    const Real plus = f(theta);
    theta[i] = saved - h;
    const Real minus = f(theta);
    theta[i] = saved;

    const Real numeric = (plus - minus) / (Real(2) * h);
    const Real a = static_cast<Real>(analytic[i]);
    const Real denom = std::max({std::abs(a), std::abs(numeric), Real(1e-8)});
    report.numeric[i] = static_cast<double>(numeric);
    report.relative_error[i] = static_cast<double>(std::abs(a - numeric) / denom);
    report.max_relative_error = std::max(report.max_relative_error, report.relative_error[i]);
  }
  return report;
}

template FiniteDifferenceReport finite_difference_check(const ScalarFunction<double>&, std::span<const double>,
                                                        std::span<const double>, double);
template FiniteDifferenceReport finite_difference_check(const ScalarFunction<long double>&,
                                                        std::span<const long double>, std::span<const double>,
                                                        long double);

}  // namespace cmap
