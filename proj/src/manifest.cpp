#include "nhim/manifest.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nhim {

PerronConfig RunManifest::perron_config() const {
  PerronConfig cfg;
  cfg.horizon = horizon;
  cfg.step = step;
  cfg.eta = eta;
  cfg.tol = tol;
  cfg.max_iterations = max_iterations;
  return cfg;
}

GridShape RunManifest::grid_shape(int dim_x) const {
  GridShape shape;
  if (static_cast<int>(grid.size()) == dim_x)
    shape.nodes_per_axis = grid;
  else if (grid.size() == 1)
    shape.nodes_per_axis.assign(dim_x, grid[0]);
  else
    throw Error("grid must list one node count, or one per base axis");
  return shape;
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["config"] = config_path;
  if (perturb_path)
    j["perturb"] = *perturb_path;
  else
    j["perturb"] = nullptr;
  j["horizon"] = horizon;
  j["step"] = step;
  j["eta"] = eta;
  j["tol"] = tol;
  j["max_iterations"] = max_iterations;
  j["grid"] = grid;
  j["out"] = out_dir;
  j["seed"] = seed;
  j["gap_r"] = gap_r;
  j["deltas"] = deltas;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
  }
  RunManifest m;
  try {
    m.config_path = j.value("config", m.config_path);
    if (j.contains("perturb") && !j["perturb"].is_null())
      m.perturb_path = j["perturb"].get<std::string>();
    m.horizon = j.value("horizon", m.horizon);
    m.step = j.value("step", m.step);
    m.eta = j.value("eta", m.eta);
    m.tol = j.value("tol", m.tol);
    m.max_iterations = j.value("max_iterations", m.max_iterations);
    if (j.contains("grid")) m.grid = j["grid"].get<std::vector<int>>();
    m.out_dir = j.value("out", m.out_dir);
    m.seed = j.value("seed", m.seed);
    m.gap_r = j.value("gap_r", m.gap_r);
    if (j.contains("deltas")) m.deltas = j["deltas"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest field has the wrong type: ") +
                     e.what());
  }
  return m;
}

void RunManifest::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << to_json();
  if (!out) throw Error("failed writing " + path);
}

RunManifest RunManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  return out;
}

double parse_field(const std::string& field, const std::string& path,
                   int line) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e)
    throw ParseError("bad number '" + field + "' in " + path, line);
  return v;
}

}  // namespace

void write_manifold_csv(const std::string& path, const GraphManifold& m) {
  std::ofstream out = open_out(path);
  for (int a = 0; a < m.dim_x(); ++a) out << 'x' << (a + 1) << ',';
  for (int c = 0; c < m.dim_y(); ++c)
    out << 'h' << (c + 1) << (c + 1 < m.dim_y() ? "," : "\n");
  const int nodes = m.shape().total();
  for (int flat = 0; flat < nodes; ++flat) {
    const std::vector<double> x = m.node_point(flat);
    auto v = m.value_at(flat);
    for (double c : x) out << format_double(c) << ',';
    for (int c = 0; c < m.dim_y(); ++c)
      out << format_double(v[c]) << (c + 1 < m.dim_y() ? "," : "\n");
  }
  if (!out) throw Error("failed writing " + path);
}

GraphManifold read_manifold_csv(const std::string& path,
                                const SystemSpec& spec,
                                const GridShape& grid) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path);

  const int nodes = grid.total();
  const int cols = spec.dim_x() + spec.dim_y();
  std::vector<double> values(static_cast<std::size_t>(nodes) * spec.dim_y());
  int row = 0, lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (row >= nodes)
      throw ParseError("too many rows in " + path + "; expected " +
                       std::to_string(nodes));
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (static_cast<int>(fields.size()) != cols)
      throw ParseError("expected " + std::to_string(cols) + " columns in " +
                       path, lineno);
    for (int c = 0; c < spec.dim_y(); ++c)
      values[static_cast<std::size_t>(row) * spec.dim_y() + c] =
          parse_field(fields[spec.dim_x() + c], path, lineno);
    ++row;
  }
  if (row != nodes)
    throw ParseError("expected " + std::to_string(nodes) + " rows in " + path +
                     ", found " + std::to_string(row));
  return GraphManifold(grid, spec.periods(), spec.dim_y(), std::move(values));
}

void write_rates_csv(const std::string& path, const RateEstimate& rates,
                     const GapReport& gap) {
  std::ofstream out = open_out(path);
  out << "quantity,value\n";
  out << "rho_tangential," << format_double(rates.rho_tangential) << '\n';
  out << "rho_stable," << format_double(rates.rho_stable) << '\n';
  out << "c_tangential," << format_double(rates.c_tangential) << '\n';
  out << "c_stable," << format_double(rates.c_stable) << '\n';
  out << "base_points," << rates.base_point_count << '\n';
  out << "window," << format_double(rates.window) << '\n';
  out << "step," << format_double(rates.step) << '\n';
  out << "gap_r," << format_double(gap.r) << '\n';
  out << "gap_margin," << format_double(gap.margin) << '\n';
  out << "gap_pass," << (gap.pass ? 1 : 0) << '\n';
  out << "r_max," << format_double(gap.r_max) << '\n';
  if (!out) throw Error("failed writing " + path);
}

void write_rate_samples_csv(const std::string& path,
                            const RateSampleSeries& samples) {
  std::ofstream out = open_out(path);
  out << "time,bundle,point,log_norm\n";
  for (std::size_t p = 0; p < samples.tangential.size(); ++p)
    for (std::size_t i = 0; i < samples.times.size(); ++i)
      out << format_double(samples.times[i]) << ",tangential," << p << ','
          << format_double(samples.tangential[p][i]) << '\n';
  for (std::size_t p = 0; p < samples.stable.size(); ++p)
    for (std::size_t k = 0; k < samples.stable[p].size(); ++k)
      out << format_double(samples.times[samples.forward_offset + k])
          << ",stable," << p << ',' << format_double(samples.stable[p][k])
          << '\n';
  if (!out) throw Error("failed writing " + path);
}

void write_residual_csv(const std::string& path, const GraphManifold& m,
                        const ResidualReport& report) {
  std::ofstream out = open_out(path);
  for (int a = 0; a < m.dim_x(); ++a) out << 'x' << (a + 1) << ',';
  for (int c = 0; c < m.dim_y(); ++c) out << 'h' << (c + 1) << ',';
  out << "residual\n";
  for (int flat = 0; flat < m.shape().total(); ++flat) {
    for (double c : m.node_point(flat)) out << format_double(c) << ',';
    for (double v : m.value_at(flat)) out << format_double(v) << ',';
    out << format_double(report.node_residuals[flat]) << '\n';
  }
  if (!out) throw Error("failed writing " + path);
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out = open_out(path);
  out << "# fitted_slope," << format_double(result.fitted_slope) << '\n';
  out << "delta,dist0,dist1,ok,error\n";
  for (const SweepEntry& e : result.entries)
    out << format_double(e.delta) << ',' << format_double(e.dist0) << ','
        << format_double(e.dist1) << ',' << (e.ok ? 1 : 0) << ','
        << csv_quote(e.error) << '\n';
  if (!out) throw Error("failed writing " + path);
}

}  // namespace nhim
