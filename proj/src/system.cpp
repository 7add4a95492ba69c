#include "nhim/system.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "nhim/random.hpp"

namespace nhim {

namespace {

constexpr int kMaxSlots = 64;
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string point_string(std::span<const double> x, std::span<const double> y) {
  std::ostringstream os;
  os << "(x =";
  for (double v : x) os << ' ' << v;
  if (!y.empty()) {
    os << "; y =";
    for (double v : y) os << ' ' << v;
  }
  os << ')';
  return os.str();
}

}  // namespace

SystemSpec::SystemSpec(int dim_x, int dim_y, std::vector<double> periods,
                       std::vector<Expr> vx, std::vector<Expr> a,
                       std::vector<Expr> f,
                       std::vector<std::string> param_names,
                       std::vector<double> param_values)
    : dx_(dim_x),
      dy_(dim_y),
      periods_(std::move(periods)),
      vx_(std::move(vx)),
      a_(std::move(a)),
      f_(std::move(f)),
      param_names_(std::move(param_names)),
      param_values_(std::move(param_values)) {
  if (dx_ < 1 || dx_ > kMaxAxisDim || dy_ < 1 || dy_ > kMaxAxisDim)
    throw Error("dimensions must be between 1 and 9");
  if (static_cast<int>(periods_.size()) != dx_)
    throw Error("periods must have one entry per base axis");
  for (double p : periods_)
    if (!(p > 0.0)) throw Error("periods must be positive");
  if (static_cast<int>(vx_.size()) != dx_ ||
      static_cast<int>(a_.size()) != dy_ * dy_ ||
      static_cast<int>(f_.size()) != dy_)
    throw Error("dimension mismatch between declared sizes and expressions");
  if (param_names_.size() != param_values_.size())
    throw Error("parameter names and values differ in length");
  const int slots = dx_ + dy_ + static_cast<int>(param_names_.size());
  if (slots > kMaxSlots) throw Error("too many variables and parameters");
  auto check_slots = [&](const std::vector<Expr>& es) {
    for (const Expr& e : es)
      if (e.max_slot() >= slots) throw Error("expression references an unbound slot");
  };
  check_slots(vx_);
  check_slots(a_);
  check_slots(f_);
}

void SystemSpec::fill_params(std::span<double> slots) const {
  for (std::size_t k = 0; k < param_values_.size(); ++k)
    slots[dx_ + dy_ + k] = param_values_[k];
}

void SystemSpec::eval_horizontal(std::span<const double> x,
                                 std::span<const double> y,
                                 std::span<double> out) const {
  double slots[kMaxSlots];
  for (int i = 0; i < dx_; ++i) slots[i] = x[i];
  for (int i = 0; i < dy_; ++i) slots[dx_ + i] = y[i];
  fill_params(slots);
  try {
    for (int i = 0; i < dx_; ++i) out[i] = vx_[i].eval({slots, slots + kMaxSlots});
  } catch (const EvalError& e) {
    throw EvalError(std::string(e.what()) + " in vx at " + point_string(x, y));
  }
}

void SystemSpec::eval_linear(std::span<const double> x, Mat& out) const {
  double slots[kMaxSlots];
  for (int i = 0; i < dx_; ++i) slots[i] = x[i];
  for (int i = 0; i < dy_; ++i) slots[dx_ + i] = 0.0;
  fill_params(slots);
  if (out.size() != dy_) out = Mat(dy_);
  try {
    for (int i = 0; i < dy_; ++i)
      for (int j = 0; j < dy_; ++j)
        out(i, j) = a_[i * dy_ + j].eval({slots, slots + kMaxSlots});
  } catch (const EvalError& e) {
    throw EvalError(std::string(e.what()) + " in A at " + point_string(x, {}));
  }
}

void SystemSpec::eval_nonlinear(std::span<const double> x,
                                std::span<const double> y,
                                std::span<double> out) const {
  double slots[kMaxSlots];
  for (int i = 0; i < dx_; ++i) slots[i] = x[i];
  for (int i = 0; i < dy_; ++i) slots[dx_ + i] = y[i];
  fill_params(slots);
  try {
    for (int i = 0; i < dy_; ++i) out[i] = f_[i].eval({slots, slots + kMaxSlots});
  } catch (const EvalError& e) {
    throw EvalError(std::string(e.what()) + " in f at " + point_string(x, y));
  }
}

std::vector<double> SystemSpec::eval_horizontal(std::span<const double> x,
                                                std::span<const double> y) const {
  std::vector<double> out(dx_);
  eval_horizontal(x, y, out);
  return out;
}

Mat SystemSpec::eval_linear(std::span<const double> x) const {
  Mat out(dy_);
  eval_linear(x, out);
  return out;
}

std::vector<double> SystemSpec::eval_nonlinear(std::span<const double> x,
                                               std::span<const double> y) const {
  std::vector<double> out(dy_);
  eval_nonlinear(x, y, out);
  return out;
}

void SystemSpec::eval_field(std::span<const double> z,
                            std::span<double> out) const {
  double slots[kMaxSlots];
  for (int i = 0; i < dx_ + dy_; ++i) slots[i] = z[i];
  fill_params(slots);
  const std::span<const double> s{slots, slots + kMaxSlots};
  try {
    for (int i = 0; i < dx_; ++i) out[i] = vx_[i].eval(s);
    for (int i = 0; i < dy_; ++i) {
      double v = f_[i].eval(s);
      for (int j = 0; j < dy_; ++j)
        v += a_[i * dy_ + j].eval(s) * z[dx_ + j];
      out[dx_ + i] = v;
    }
  } catch (const EvalError& e) {
    throw EvalError(std::string(e.what()) + " at " +
                    point_string(z.subspan(0, dx_), z.subspan(dx_)));
  }
}

SystemSpec SystemSpec::without_inhomogeneity() const {
  std::vector<Expr> zero(dy_, Expr::constant(0.0));
  return SystemSpec(dx_, dy_, periods_, vx_, a_, std::move(zero), param_names_,
                    param_values_);
}

// ---------------------------------------------------------------------------
// Config parsing.

namespace {

struct ConfigLine {
  int number;
  std::string key;
  std::string value;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<ConfigLine> split_lines(std::string_view text) {
  std::vector<ConfigLine> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    ++number;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected 'key = value'", number, 1);
    ConfigLine cl;
    cl.number = number;
    cl.key = trim(line.substr(0, eq));
    cl.value = trim(line.substr(eq + 1));
    if (cl.key.empty()) throw ParseError("empty key", number, 1);
    if (cl.value.empty()) throw ParseError("empty value", number, 1);
    out.push_back(std::move(cl));
  }
  return out;
}

double parse_number_value(const ConfigLine& line) {
  double v = 0.0;
  const char* b = line.value.data();
  const char* e = b + line.value.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e)
    throw ParseError("expected a number, got '" + line.value + "'",
                     line.number, 1);
  return v;
}

int parse_int_value(const ConfigLine& line) {
  const double v = parse_number_value(line);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ParseError("expected an integer", line.number, 1);
  return i;
}

// Index digits for keys like vx2, A13, period_1 (1-based in the file).
std::optional<int> key_index(std::string_view key, std::string_view prefix) {
  if (key.size() != prefix.size() + 1 || key.substr(0, prefix.size()) != prefix)
    return std::nullopt;
  const char c = key[prefix.size()];
  if (c < '1' || c > '9') return std::nullopt;
  return c - '1';
}

std::optional<std::pair<int, int>> matrix_index(std::string_view key,
                                                std::string_view prefix) {
  if (key.size() != prefix.size() + 2 || key.substr(0, prefix.size()) != prefix)
    return std::nullopt;
  const char r = key[prefix.size()], c = key[prefix.size() + 1];
  if (r < '1' || r > '9' || c < '1' || c > '9') return std::nullopt;
  return std::make_pair(r - '1', c - '1');
}

bool is_reserved_name(const std::string& name) {
  static const std::set<std::string> reserved = {
      "pi", "sin", "cos", "tan", "exp", "log", "tanh", "sqrt", "abs"};
  if (reserved.count(name)) return true;
  if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'y')) {
    bool digits = true;
    for (std::size_t i = 1; i < name.size(); ++i)
      digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
    if (digits) return true;
  }
  return false;
}

bool is_identifier(const std::string& name) {
  if (name.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_')
    return false;
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

struct SymbolTables {
  std::vector<Symbol> full;    // x, y, params
  std::vector<Symbol> base_only;  // x, params (for A entries)
};

SymbolTables make_symbols(int dx, int dy,
                          const std::vector<std::string>& params) {
  SymbolTables t;
  for (int i = 0; i < dx; ++i) {
    Symbol s{"x" + std::to_string(i + 1), i};
    t.full.push_back(s);
    t.base_only.push_back(s);
  }
  for (int i = 0; i < dy; ++i)
    t.full.push_back({"y" + std::to_string(i + 1), dx + i});
  for (std::size_t k = 0; k < params.size(); ++k) {
    Symbol s{params[k], dx + dy + static_cast<int>(k)};
    t.full.push_back(s);
    t.base_only.push_back(s);
  }
  return t;
}

}  // namespace

SystemSpec parse_system(std::string_view config_text, std::uint64_t seed) {
  const std::vector<ConfigLine> lines = split_lines(config_text);

  // First pass: dimensions, periods, parameters.
  std::optional<int> dx, dy;
  std::map<int, std::pair<double, int>> periods;  // axis -> (value, line)
  std::vector<std::string> param_names;
  std::vector<double> param_values;

  for (const ConfigLine& l : lines) {
    if (l.key == "dim_x" || l.key == "dx") {
      if (dx) throw ParseError("duplicate dim_x", l.number, 1);
      dx = parse_int_value(l);
    } else if (l.key == "dim_y" || l.key == "dy") {
      if (dy) throw ParseError("duplicate dim_y", l.number, 1);
      dy = parse_int_value(l);
    } else if (auto idx = key_index(l.key, "period_")) {
      if (periods.count(*idx))
        throw ParseError("duplicate " + l.key, l.number, 1);
      const double p = parse_number_value(l);
      if (!(p > 0.0)) throw ParseError("period must be positive", l.number, 1);
      periods[*idx] = {p, l.number};
    } else if (l.key.rfind("param ", 0) == 0) {
      const std::string name = trim(l.key.substr(6));
      if (!is_identifier(name))
        throw ParseError("bad parameter name '" + name + "'", l.number, 1);
      if (is_reserved_name(name))
        throw ParseError("parameter name '" + name + "' is reserved",
                         l.number, 1);
      for (const std::string& existing : param_names)
        if (existing == name)
          throw ParseError("duplicate parameter '" + name + "'", l.number, 1);
      param_names.push_back(name);
      param_values.push_back(parse_number_value(l));
    }
  }

  if (!dx) throw ParseError("missing dim_x", 0, 0);
  if (!dy) throw ParseError("missing dim_y", 0, 0);
  if (*dx < 1 || *dx > kMaxAxisDim || *dy < 1 || *dy > kMaxAxisDim)
    throw ParseError("dimensions must be between 1 and 9", 0, 0);

  for (const auto& [axis, pv] : periods)
    if (axis >= *dx)
      throw ParseError("period axis out of range", pv.second, 1);

  const SymbolTables syms = make_symbols(*dx, *dy, param_names);

  // Second pass: expressions.
  std::map<int, Expr> vx_map, f_map;
  std::map<std::pair<int, int>, Expr> a_map;
  for (const ConfigLine& l : lines) {
    if (l.key == "dim_x" || l.key == "dx" || l.key == "dim_y" ||
        l.key == "dy" || key_index(l.key, "period_") ||
        l.key.rfind("param ", 0) == 0)
      continue;
    if (auto idx = key_index(l.key, "vx")) {
      if (*idx >= *dx)
        throw ParseError(l.key + " exceeds dim_x", l.number, 1);
      if (vx_map.count(*idx)) throw ParseError("duplicate " + l.key, l.number, 1);
      vx_map.emplace(*idx, parse_expression(l.value, syms.full, l.number));
    } else if (auto idx2 = key_index(l.key, "f")) {
      if (*idx2 >= *dy) throw ParseError(l.key + " exceeds dim_y", l.number, 1);
      if (f_map.count(*idx2)) throw ParseError("duplicate " + l.key, l.number, 1);
      f_map.emplace(*idx2, parse_expression(l.value, syms.full, l.number));
    } else if (auto ij = matrix_index(l.key, "A")) {
      if (ij->first >= *dy || ij->second >= *dy)
        throw ParseError(l.key + " exceeds dim_y", l.number, 1);
      if (a_map.count(*ij)) throw ParseError("duplicate " + l.key, l.number, 1);
      a_map.emplace(*ij, parse_expression(l.value, syms.base_only, l.number));
    } else {
      throw ParseError("unknown key '" + l.key + "'", l.number, 1);
    }
  }

  std::vector<Expr> vx, a, f;
  for (int i = 0; i < *dx; ++i) {
    auto it = vx_map.find(i);
    if (it == vx_map.end())
      throw ParseError("dimension mismatch: missing vx" + std::to_string(i + 1),
                       0, 0);
    vx.push_back(std::move(it->second));
  }
  for (int i = 0; i < *dy; ++i)
    for (int j = 0; j < *dy; ++j) {
      auto it = a_map.find({i, j});
      a.push_back(it == a_map.end() ? Expr::constant(0.0)
                                    : std::move(it->second));
    }
  for (int i = 0; i < *dy; ++i) {
    auto it = f_map.find(i);
    if (it == f_map.end())
      throw ParseError("dimension mismatch: missing f" + std::to_string(i + 1),
                       0, 0);
    f.push_back(std::move(it->second));
  }

  std::vector<double> period_vec(*dx, kTwoPi);
  for (const auto& [axis, pv] : periods) period_vec[axis] = pv.first;

  SystemSpec spec(*dx, *dy, std::move(period_vec), std::move(vx), std::move(a),
                  std::move(f), std::move(param_names),
                  std::move(param_values));
  validate_system(spec, seed);
  return spec;
}

PerturbationSpec parse_perturbation(std::string_view text,
                                    const SystemSpec& base) {
  const std::vector<ConfigLine> lines = split_lines(text);
  const SymbolTables syms =
      make_symbols(base.dim_x(), base.dim_y(), base.param_names());

  PerturbationSpec pert;
  pert.dim_x = base.dim_x();
  pert.dim_y = base.dim_y();
  bool have_delta = false;

  for (const ConfigLine& l : lines) {
    if (l.key == "delta") {
      if (have_delta) throw ParseError("duplicate delta", l.number, 1);
      pert.delta = parse_number_value(l);
      if (pert.delta < 0.0)
        throw ParseError("delta must be nonnegative", l.number, 1);
      have_delta = true;
    } else if (auto idx = key_index(l.key, "dvx")) {
      if (*idx >= base.dim_x())
        throw ParseError(l.key + " exceeds dim_x", l.number, 1);
      if (pert.dvx.count(*idx))
        throw ParseError("duplicate " + l.key, l.number, 1);
      pert.dvx.emplace(*idx, parse_expression(l.value, syms.full, l.number));
    } else if (auto idx2 = key_index(l.key, "df")) {
      if (*idx2 >= base.dim_y())
        throw ParseError(l.key + " exceeds dim_y", l.number, 1);
      if (pert.df.count(*idx2))
        throw ParseError("duplicate " + l.key, l.number, 1);
      pert.df.emplace(*idx2, parse_expression(l.value, syms.full, l.number));
    } else {
      throw ParseError("unknown key '" + l.key + "'", l.number, 1);
    }
  }
  return pert;
}

SystemSpec apply_perturbation(const SystemSpec& spec,
                              const PerturbationSpec& pert) {
  if (pert.dim_x != spec.dim_x() || pert.dim_y != spec.dim_y())
    throw Error("perturbation dimensions do not match the system");
  if (pert.delta == 0.0) return spec;

  std::vector<Expr> vx = spec.vx_exprs();
  std::vector<Expr> f = spec.f_exprs();
  for (const auto& [i, d] : pert.dvx)
    vx[i] = Expr::add_scaled(vx[i], pert.delta, d);
  for (const auto& [i, d] : pert.df)
    f[i] = Expr::add_scaled(f[i], pert.delta, d);
  return SystemSpec(spec.dim_x(), spec.dim_y(), spec.periods(), std::move(vx),
                    spec.a_exprs(), std::move(f), spec.param_names(),
                    spec.param_values());
}

void validate_system(const SystemSpec& spec, std::uint64_t seed) {
  const int dx = spec.dim_x(), dy = spec.dim_y();
  Rng rng(seed ^ 0x6e68696d5f76616cULL);

  auto label = [](const char* base, int i, int j = -1) {
    std::string s = base + std::to_string(i + 1);
    if (j >= 0) s += std::to_string(j + 1);
    return s;
  };

  std::vector<double> x(dx), y(dy), out(std::max(dx, dy));
  Mat a(dy);

  auto eval_all = [&](const char* what) {
    try {
      spec.eval_horizontal(x, y, std::span<double>(out).subspan(0, dx));
      spec.eval_linear(x, a);
      spec.eval_nonlinear(x, y, std::span<double>(out).subspan(0, dy));
    } catch (const EvalError& e) {
      throw Error(std::string(what) + ": " + e.what());
    }
  };

  for (int s = 0; s < 100; ++s) {
    for (int i = 0; i < dx; ++i) x[i] = rng.uniform(0.0, spec.periods()[i]);
    for (int i = 0; i < dy; ++i) y[i] = rng.uniform(-1.0, 1.0);
    eval_all("expression not finite on the working box");
  }

  // Periodicity across each axis boundary, sampled.
  std::vector<double> lo(std::max(dx, dy)), hi(std::max(dx, dy));
  auto compare = [&](const std::string& key, double a_val, double b_val,
                     int axis) {
    if (std::abs(a_val - b_val) >
        1e-12 * std::max(1.0, std::abs(a_val)))
      throw Error("expression " + key + " is not periodic across axis " +
                  std::to_string(axis + 1) + " (|" + std::to_string(a_val) +
                  " - " + std::to_string(b_val) + "| too large)");
  };
  for (int axis = 0; axis < dx; ++axis) {
    for (int s = 0; s < 100; ++s) {
      for (int i = 0; i < dx; ++i) x[i] = rng.uniform(0.0, spec.periods()[i]);
      for (int i = 0; i < dy; ++i) y[i] = rng.uniform(-1.0, 1.0);
      std::vector<double> x2 = x;
      x[axis] = 0.0;
      x2[axis] = spec.periods()[axis];
      spec.eval_horizontal(x, y, std::span<double>(lo).subspan(0, dx));
      spec.eval_horizontal(x2, y, std::span<double>(hi).subspan(0, dx));
      for (int i = 0; i < dx; ++i) compare(label("vx", i), lo[i], hi[i], axis);
      Mat a2(dy);
      spec.eval_linear(x, a);
      spec.eval_linear(x2, a2);
      for (int i = 0; i < dy; ++i)
        for (int j = 0; j < dy; ++j)
          compare(label("A", i, j), a(i, j), a2(i, j), axis);
      spec.eval_nonlinear(x, y, std::span<double>(lo).subspan(0, dy));
      spec.eval_nonlinear(x2, y, std::span<double>(hi).subspan(0, dy));
      for (int i = 0; i < dy; ++i) compare(label("f", i), lo[i], hi[i], axis);
    }
  }
}

}  // namespace nhim
