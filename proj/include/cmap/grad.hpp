#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmap/core.hpp"

namespace cmap {

/// Dense Jacobian with named columns: entry (row, col) is the partial
/// derivative of output component `row` with respect to parameter `col`.
class GradTable {
 public:
  GradTable() = default;
  GradTable(std::size_t outputs, std::vector<std::string> params);

  std::size_t outputs() const noexcept { return outputs_; }
  std::size_t params() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  double& at(std::size_t row, std::size_t col) { return data_[row * names_.size() + col]; }
  double at(std::size_t row, std::size_t col) const { return data_[row * names_.size() + col]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * names_.size(), names_.size()}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * names_.size(), names_.size()}; }

  std::optional<std::size_t> index_of(const std::string& name) const;
  /// Entry by parameter name; throws InvalidArgument if the name is unknown.
  double get(std::size_t row, const std::string& name) const;

 private:
  std::size_t outputs_ = 0;
  std::vector<std::string> names_;
  std::vector<double> data_;
};

/// Number of real components of a value type.
inline std::size_t component_count(double) noexcept { return 1; }
inline std::size_t component_count(const ComplexPoint&) noexcept { return 2; }
inline std::size_t component_count(const std::vector<double>& v) noexcept { return v.size(); }

/// Hard forward value glued to a soft surrogate. Consumers take the value
/// from `value` and all derivative information from `grads`, which are the
/// derivatives of `backward_value`.
template <typename T>
struct DualResult {
  T value;
  T backward_value;
  GradTable grads;
};

/// Throws ShapeMismatch if forward/backward/grads disagree on the number of
/// output components.
template <typename T>
DualResult<T> straight_through(T forward, T backward, GradTable grads);

struct FiniteDifferenceReport {
  std::vector<double> numeric;
  std::vector<double> relative_error;
  double max_relative_error = 0.0;
};

template <typename Real>
using ScalarFunction = std::function<Real(std::span<const Real>)>;

/// Compares `analytic` to central differences (f(t + h e_i) - f(t - h e_i)) / 2h.
/// Relative error uses the denominator max(|analytic|, |numeric|, 1e-8).
/// `Real` is double or long double; the extended type lets the check resolve
/// gradient components far below the rounding noise of double evaluations.
/// Exceptions from `f` propagate.
template <typename Real>
FiniteDifferenceReport finite_difference_check(const ScalarFunction<Real>& f, std::span<const Real> at,
                                               std::span<const double> analytic, Real h);

}  // namespace cmap
