#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>
#include <variant>
#include <vector>

#include "json.hpp"
#include "occtime/error.hpp"
#include "occtime/experiments.hpp"
#include "occtime/paths.hpp"
#include "occtime/stable_law.hpp"
#include "occtime/theory.hpp"

namespace occtime {

namespace {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

// Rows of cells rendered as CSV or as a JSON array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string render(const std::string& format) const
  {
    if (format == "json") {
      nlohmann::json out = nlohmann::json::array();
      for (const auto& row : rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < columns.size(); ++i) {
          std::visit(
              [&](const auto& v) {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, std::monostate>) {
                  obj[columns[i]] = nullptr;
                } else if constexpr (std::is_same_v<V, double>) {
                  if (std::isfinite(v)) obj[columns[i]] = v;
                  else obj[columns[i]] = v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
                } else {
                  obj[columns[i]] = v;
                }
              },
              row[i]);
        }
        out.push_back(obj);
      }
      return out.dump(2) + "\n";
    }
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        std::visit(
            [&](const auto& v) {
              using V = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<V, double>) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out += buf;
              } else if constexpr (std::is_same_v<V, std::int64_t>) {
                out += std::to_string(v);
              } else if constexpr (std::is_same_v<V, std::string>) {
                out += v;
              }
            },
            row[i]);
      }
      out += '\n';
    }
    return out;
  }
};

Cell optional_cell(const std::optional<double>& v) { return v ? Cell(*v) : Cell(); }

std::string fixed(double v, int digits = 6)
{
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

const std::set<std::string> kKnownOptions{"alpha", "T", "n", "reps", "refine", "seed", "y", "a", "b",
                                          "bandwidth", "format", "threads", "x", "t", "stream", "tolerance"};

class Options {
 public:
  explicit Options(const CommandOptions& raw) : raw_(raw)
  {
    for (const auto& [key, value] : raw_) require(kKnownOptions.count(key) == 1, "unknown option --" + key);
  }

  bool has(const std::string& key) const { return raw_.count(key) == 1; }

  double number(const std::string& key, double fallback) const
  {
    if (!has(key)) return fallback;
    return parse_number(key, raw_.at(key));
  }

  std::int64_t count(const std::string& key, std::int64_t fallback) const
  {
    if (!has(key)) return fallback;
    return parse_count(key, raw_.at(key));
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const
  {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& item : split(raw_.at(key))) out.push_back(parse_number(key, item));
    return out;
  }

  std::vector<std::int64_t> counts(const std::string& key, std::vector<std::int64_t> fallback) const
  {
    if (!has(key)) return fallback;
    std::vector<std::int64_t> out;
    for (const auto& item : split(raw_.at(key))) out.push_back(parse_count(key, item));
    return out;
  }

  std::string text(const std::string& key, const std::string& fallback) const
  {
    return has(key) ? raw_.at(key) : fallback;
  }

 private:
  static std::vector<std::string> split(const std::string& s)
  {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');) out.push_back(item);
    return out;
  }

  static double parse_number(const std::string& key, const std::string& s)
  {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == s.size() && !s.empty(), "--" + key + " expects a number, got '" + s + "'");
    return v;
  }

  static std::int64_t parse_count(const std::string& key, const std::string& s)
  {
    const double v = parse_number(key, s);
    require(v == std::floor(v) && v >= 0.0 && v < 9.2e18, "--" + key + " expects a nonnegative integer, got '" + s + "'");
    return static_cast<std::int64_t>(v);
  }

  const CommandOptions& raw_;
};

std::string options_manifest(const std::string& command, const CommandOptions& raw)
{
  nlohmann::json j = {{"library", "occtime"}, {"version", OCCTIME_VERSION}, {"command", command}};
  nlohmann::json opts = nlohmann::json::object();
  for (const auto& [k, v] : raw) {
    if (k != "threads") opts[k] = v;
  }
  j["options"] = opts;
  return j.dump(2);
}

StudyConfig study_config(const Options& o, std::vector<std::int64_t> default_n)
{
  StudyConfig cfg;
  cfg.alpha = o.number("alpha", 2.0);
  cfg.T = o.number("T", 1.0);
  cfg.n_grid = o.counts("n", std::move(default_n));
  cfg.reps = o.count("reps", 1000);
  cfg.refine = o.count("refine", 256);
  cfg.seed = static_cast<std::uint64_t>(o.count("seed", 1));
  cfg.threads = static_cast<unsigned>(o.count("threads", 0));
  cfg.bandwidth_scale = o.number("bandwidth", 1.0);
  if (o.has("y")) {
    cfg.y = o.number("y", 0.0);
    cfg.a = cfg.y;
  }
  if (o.has("a") || o.has("b")) {
    cfg.a = o.number("a", -INFINITY);
    cfg.b = o.number("b", INFINITY);
  }
  return cfg;
}

std::vector<std::int64_t> dyadic(int lo, int hi)
{
  std::vector<std::int64_t> out;
  for (int k = lo; k <= hi; ++k) out.push_back(std::int64_t{1} << k);
  return out;
}

Table study_table(const ConvergenceResult& r)
{
  Table t{{"alpha", "T", "n", "delta", "estimator", "mse", "se", "normalized_mse", "theory_constant", "z_score"}, {}};
  for (const auto& p : r.points) {
    t.rows.push_back({r.config.alpha, r.config.T, p.n, p.delta, std::string(to_string(p.estimator)), p.mse, p.se,
                      p.normalized_mse, optional_cell(p.theory_constant), optional_cell(p.z_score)});
  }
  return t;
}

CommandOutput density_command(const Options& o, const CommandOptions& raw, const std::string& format)
{
  const StableLaw law(o.number("alpha", 2.0));
  const double t = o.number("t", 1.0);
  Table table{{"x", "t", "density", "tail_prob"}, {}};
  for (double x : o.numbers("x", {0.0})) table.rows.push_back({x, t, law.density(x, t), law.tail_prob(x, t)});
  return {table.render(format), options_manifest("density", raw), "", true};
}

CommandOutput sample_command(const Options& o, const CommandOptions& raw, const std::string& format)
{
  const StableLaw law(o.number("alpha", 2.0));
  const GridSpec grid{o.number("T", 1.0), o.counts("n", {100}).front(), o.count("refine", 1)};
  grid.validate();
  RngStream rng(static_cast<std::uint64_t>(o.count("seed", 1)), static_cast<std::uint64_t>(o.count("stream", 0)));
  const SamplePath path = simulate_path(law, grid, rng);
  Table table{{"t", "X_t"}, {}};
  for (std::size_t i = 0; i < path.values.size(); ++i) table.rows.push_back({path.time(i), path.values[i]});
  return {table.render(format), options_manifest("sample", raw), "", true};
}

CommandOutput constants_command(const Options& o, const CommandOptions& raw, const std::string& format)
{
  const double alpha = o.number("alpha", 2.0);
  const double T = o.number("T", 1.0);
  const StableLaw law(alpha);
  const std::string regime = to_string(regime_of(alpha));
  Table table{{"name", "alpha", "regime", "value", "normalization"}, {}};
  auto row = [&](const std::string& name, double value, const std::string& norm) {
    table.rows.push_back({name, alpha, regime, value, norm});
  };
  const TheoryConstant limit = theorem1_limit(law, T);
  row(limit.name, limit.value, limit.normalization);
  if (alpha <= 1.0) row("optimal_occupation_limit", limit.value, limit.normalization);
  row("density_at_zero", law.density_at_zero(), "");
  if (alpha > 1.0) {
    row("abs_moment_1", law.abs_moment(1.0), "");
    row("psi_integral", psi_integral(alpha), "");
    row("tilde_C", tilde_C(alpha), "");
    row("C_alpha", C_of_alpha(alpha), "");
    row("mean_local_time_at_0", mean_local_time(law, T, 0.0), "");
  }
  if (alpha < 1.0) row("abs_moment_minus_alpha", law.abs_moment(-alpha), "");
  if (alpha < 2.0) row("h_alpha_inf", law.h_alpha_inf(), "");
  return {table.render(format), options_manifest("constants", raw), "", true};
}

CommandOutput rate_study(const Options& o, const std::string& name, Estimator estimator, const std::string& format)
{
  StudyConfig cfg = study_config(o, dyadic(6, 12));
  cfg.estimators = {estimator};
  const double tolerance = o.number("tolerance", 0.1);
  const ConvergenceResult r = run_error_study(cfg);
  CommandOutput out{study_table(r).render(format), study_manifest(name, cfg), "", true};
  for (const auto& f : r.fits) {
    out.summary += std::string("fit ") + to_string(f.estimator) + ": slope " + fixed(f.fit.slope) + " +/- " +
                   fixed(f.fit.ci_half_width, 3);
    if (f.theory_slope) {
      const bool ok = std::abs(f.fit.slope - *f.theory_slope) <= tolerance;
      out.passed = out.passed && ok;
      out.summary += ", theory " + fixed(*f.theory_slope) + (ok ? " [ok]" : " [outside tolerance]");
    }
    out.summary += "\n";
  }
  return out;
}

CommandOutput optimal_study(const Options& o, const std::string& format)
{
  StudyConfig cfg = study_config(o, {16, 64});
  const OptimalReport r = run_optimal_study(cfg);
  CommandOutput out{study_table(r.errors).render(format), study_manifest("optimal", r.errors.config), "", r.passed()};
  for (const auto& row : r.rows) {
    out.summary += "n=" + std::to_string(row.n) + ": riemann/optimal mse ratio " + fixed(row.ratio) + " (se " +
                   fixed(row.ratio_se, 3) + ", 99% lower bound " + fixed(row.ratio_lower_99) + ")";
    if (r.tilde_C) out.summary += ", tilde_C " + fixed(*r.tilde_C);
    if (row.variance_integral) out.summary += ", variance integral estimate " + fixed(*row.variance_integral);
    out.summary += "\n";
  }
  return out;
}

CommandOutput logregime_study(const Options& o, const CommandOptions& raw, const std::string& format)
{
  const LogRegimeReport r = run_logregime_study(o.number("alpha", 1.0), o.number("T", 1.0),
                                                o.counts("n", {10000, 1000000, 100000000}));
  Table table{{"alpha", "T", "n", "normalized_error", "limit", "deviation"}, {}};
  for (const auto& row : r.rows) table.rows.push_back({r.alpha, r.T, row.n, row.normalized, row.limit, row.deviation});
  CommandOutput out{table.render(format), options_manifest("study logregime", raw), "", r.passed()};
  out.summary = "final deviation " + fixed(r.rows.back().deviation) + " (tolerance " + fixed(r.tolerance) + "), " +
                (r.decreasing() ? "decreasing" : "not decreasing") + "\n";
  return out;
}

CommandOutput identity_study(const Options& o, const std::string& format)
{
  StudyConfig cfg = study_config(o, {8});
  const IdentityReport r = run_exact_identity_check(cfg);
  Table table{{"alpha", "T", "n", "reps", "check", "estimate", "se", "target", "z"}, {}};
  for (const auto& c : r.checks) {
    table.rows.push_back({r.alpha, r.T, r.n, r.reps, c.name, c.estimate, c.se, c.target, c.z()});
  }
  cfg.n_grid.resize(1);
  CommandOutput out{table.render(format), study_manifest("identity", cfg), "", r.passed()};
  for (const auto& c : r.checks) out.summary += c.name + ": z = " + fixed(c.z(), 3) + "\n";
  return out;
}

CommandOutput consistency_study(const Options& o, const std::string& format)
{
  StudyConfig cfg = study_config(o, {16, 64, 256, 1024, 4096});
  if (!o.has("a") && !o.has("b") && !o.has("y")) {
    cfg.a = -1.0;
    cfg.b = 1.0;
  }
  const ConsistencyReport r = run_consistency_check(cfg);
  Table table{{"alpha", "T", "n", "mean_abs_error", "se"}, {}};
  for (const auto& row : r.rows) table.rows.push_back({cfg.alpha, cfg.T, row.n, row.mean_abs_error, row.se});
  CommandOutput out{table.render(format), study_manifest("consistency", r.config), "", r.passed()};
  out.summary = "final mean absolute error " + fixed(r.rows.back().mean_abs_error) + " (tolerance " +
                fixed(r.tolerance) + "), " + (r.decreasing() ? "decreasing" : "not decreasing") + "\n";
  return out;
}

CommandOutput figure1_study(const CommandOptions& raw, const std::string& format)
{
  const auto grid = figure1_grid();
  const auto rows = figure1_table(grid);
  Table table{{"alpha", "tilde_C"}, {}};
  bool increasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.rows.push_back({rows[i].first, rows[i].second});
    if (i > 0 && !(rows[i].second > rows[i - 1].second)) increasing = false;
  }
  CommandOutput out{table.render(format), options_manifest("study figure1", raw), "", increasing};
  out.summary = std::string("tilde_C ") + (increasing ? "strictly increasing" : "not increasing") +
                " on the grid; tilde_C(2) = " + fixed(rows.back().second) + "\n";
  return out;
}

}  // namespace

CommandOutput run_command(const std::string& command, const CommandOptions& raw)
{
  const Options o(raw);
  const std::string format = o.text("format", "csv");
  require(format == "csv" || format == "json", "--format must be csv or json");
  if (command == "density") return density_command(o, raw, format);
  if (command == "sample") return sample_command(o, raw, format);
  if (command == "constants") return constants_command(o, raw, format);
  if (command == "study/occupation") return rate_study(o, "occupation", Estimator::riemann_occupation, format);
  if (command == "study/localtime") return rate_study(o, "localtime", Estimator::riemann_local_time, format);
  if (command == "study/optimal") return optimal_study(o, format);
  if (command == "study/logregime") return logregime_study(o, raw, format);
  if (command == "study/identity") return identity_study(o, format);
  if (command == "study/consistency") return consistency_study(o, format);
  if (command == "study/figure1") return figure1_study(raw, format);
  throw DomainError("unknown command '" + command + "'");
}

}  // namespace occtime
