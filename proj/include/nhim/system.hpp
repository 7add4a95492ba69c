#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nhim/expr.hpp"
#include "nhim/linalg.hpp"

namespace nhim {

inline constexpr int kMaxAxisDim = 9;  // expression keys use one digit per index

/// Split vector field on a flat periodic box X times R^dy:
///
///   base   dx/dt = vx(x, y)
///   fiber  dy/dt = A(x) y + f(x, y)
///
/// Expressions are immutable after construction; all eval_* methods are pure
/// and thread-safe. Slot layout for evaluation is [x | y | params].
class SystemSpec {
 public:
  SystemSpec(int dim_x, int dim_y, std::vector<double> periods,
             std::vector<Expr> vx, std::vector<Expr> a, std::vector<Expr> f,
             std::vector<std::string> param_names,
             std::vector<double> param_values);

  int dim_x() const { return dx_; }
  int dim_y() const { return dy_; }
  int dim() const { return dx_ + dy_; }
  const std::vector<double>& periods() const { return periods_; }

  void eval_horizontal(std::span<const double> x, std::span<const double> y,
                       std::span<double> out) const;
  void eval_linear(std::span<const double> x, Mat& out) const;
  void eval_nonlinear(std::span<const double> x, std::span<const double> y,
                      std::span<double> out) const;

  std::vector<double> eval_horizontal(std::span<const double> x,
                                      std::span<const double> y) const;
  Mat eval_linear(std::span<const double> x) const;
  std::vector<double> eval_nonlinear(std::span<const double> x,
                                     std::span<const double> y) const;

  /// Full field at z = (x, y): (vx, A y + f).
  void eval_field(std::span<const double> z, std::span<double> out) const;

  /// Same base dynamics with f removed; the zero section is exactly
  /// invariant for the returned field.
  SystemSpec without_inhomogeneity() const;

  const std::vector<Expr>& vx_exprs() const { return vx_; }
  const std::vector<Expr>& a_exprs() const { return a_; }
  const std::vector<Expr>& f_exprs() const { return f_; }
  const std::vector<std::string>& param_names() const { return param_names_; }
  const std::vector<double>& param_values() const { return param_values_; }

 private:
  friend SystemSpec apply_perturbation(const SystemSpec&,
                                       const struct PerturbationSpec&);
  void fill_params(std::span<double> slots) const;

  int dx_;
  int dy_;
  std::vector<double> periods_;
  std::vector<Expr> vx_;  // dx entries
  std::vector<Expr> a_;   // dy*dy entries, row-major
  std::vector<Expr> f_;   // dy entries
  std::vector<std::string> param_names_;
  std::vector<double> param_values_;
};

/// Additive field perturbation: vx_i += delta * dvx_i, f_i += delta * df_i.
struct PerturbationSpec {
  double delta = 0.0;
  std::map<int, Expr> dvx;  // 0-based axis -> expression in (x, y, params)
  std::map<int, Expr> df;
  int dim_x = 0;
  int dim_y = 0;
};

/// Parses the line-oriented config format (key = value, '#' comments):
/// dim_x/dx, dim_y/dy, period_<i>, vx<i>, A<i><j>, f<i>, param <name>.
/// Omitted A entries default to 0; omitted periods default to 2*pi.
/// Runs validate_system before returning.
SystemSpec parse_system(std::string_view config_text, std::uint64_t seed = 0);

/// Perturbation file: keys dvx<i>, df<i>, delta. Symbols are resolved
/// against the base system's dimensions and parameters.
PerturbationSpec parse_perturbation(std::string_view text,
                                    const SystemSpec& base);

/// delta = 0 returns the spec unchanged, bit for bit.
SystemSpec apply_perturbation(const SystemSpec& spec,
                              const PerturbationSpec& pert);

/// Sampled load-time checks: every expression is finite on the working box
/// (x in the periodic box, y in [-1,1]^dy), and every expression is periodic
/// across each axis boundary (100 samples per axis, tolerance 1e-12).
void validate_system(const SystemSpec& spec, std::uint64_t seed = 0);

}  // namespace nhim
