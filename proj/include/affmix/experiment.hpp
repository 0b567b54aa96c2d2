#ifndef AFFMIX_EXPERIMENT_HPP
#define AFFMIX_EXPERIMENT_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "affmix/algebra.hpp"
#include "affmix/digitlab.hpp"
#include "affmix/errors.hpp"
#include "affmix/evolution.hpp"
#include "affmix/fourier.hpp"
#include "affmix/increments.hpp"

namespace affmix {

enum class Task { Classify, Evolve, Bounds, MixingSweep, DigitCensus, VerifyIdentities };

inline std::string_view to_string(Task t) {
  switch (t) {
    case Task::Classify: return "classify";
    case Task::Evolve: return "evolve";
    case Task::Bounds: return "bounds";
    case Task::MixingSweep: return "mixing-sweep";
    case Task::DigitCensus: return "digit-census";
    case Task::VerifyIdentities: return "verify-identities";
  }
  return "";
}

inline std::optional<Task> parse_task(std::string_view s) {
  for (Task t : {Task::Classify, Task::Evolve, Task::Bounds, Task::MixingSweep, Task::DigitCensus,
                 Task::VerifyIdentities}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

/// Parsed experiment. Keys of the JSON config:
///   task, matrix, increments, x0, p, p_list, n, eps, n_cap, l_max,
///   sigma, t, r, seed, trials, j_max, model
struct ExperimentConfig {
  Task task = Task::Classify;
  std::optional<IntMatrix> matrix;
  std::optional<IncrementDistribution> increments;
  ResidueVector x0;
  std::optional<std::uint64_t> p;
  std::vector<std::uint64_t> p_list;
  std::uint64_t n = 0;
  double eps = 0.25;
  std::uint64_t n_cap = 1'000'000;
  std::uint64_t l_max = kDefaultLMax;
  std::uint64_t sigma = 2;
  std::optional<std::size_t> t;
  std::size_t r = 1;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t j_max = 10;
  std::optional<std::string> model;
  std::size_t state_cap = kDefaultStateCap;

  ChainSpec chain(std::uint64_t modulus) const { return ChainSpec{*matrix, *increments, modulus, x0}; }
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); }

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& ex) {
    config_error(std::string(key) + ": " + ex.what());
  }
}

inline IntMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) config_error("matrix must be a nonempty array of rows");
  IntMatrix m(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != j.size()) config_error("matrix must be square");
    for (std::size_t c = 0; c < j.size(); ++c) {
      if (!j[i][c].is_number_integer()) config_error("matrix entries must be integers");
      m(i, c) = BigInt(j[i][c].get<long long>());
    }
  }
  return m;
}

inline nlohmann::json bigint_json(const BigInt& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max()) {
    return static_cast<long long>(v);
  }
  return v.str();
}

inline nlohmann::json poly_json(const IntPolynomial& f) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : f.coeffs()) out.push_back(bigint_json(c));
  return out;
}

}  // namespace detail

/// Validates the config against the needs of `task` (ConfigInvalid on any
/// schema violation).
inline ExperimentConfig parse_config(const nlohmann::json& j, std::optional<Task> task_override = std::nullopt) {
  using detail::config_error;
  using detail::get_or;
  if (!j.is_object()) config_error("config must be a JSON object");
  ExperimentConfig c;
  if (task_override) {
    c.task = *task_override;
    if (j.contains("task") && parse_task(get_or<std::string>(j, "task", "")) != task_override) {
      config_error("config task does not match the requested subcommand");
    }
  } else {
    const auto name = get_or<std::string>(j, "task", "");
    const auto t = parse_task(name);
    if (!t) config_error("unknown or missing task '" + name + "'");
    c.task = *t;
  }
  if (j.contains("matrix")) c.matrix = detail::matrix_from_json(j.at("matrix"));
  if (j.contains("increments")) c.increments = increments_from_json(j.at("increments"));
  c.x0 = get_or<ResidueVector>(j, "x0", {});
  if (j.contains("p")) c.p = get_or<std::uint64_t>(j, "p", 0);
  c.p_list = get_or<std::vector<std::uint64_t>>(j, "p_list", {});
  c.n = get_or<std::uint64_t>(j, "n", c.n);
  c.eps = get_or<double>(j, "eps", c.eps);
  c.n_cap = get_or<std::uint64_t>(j, "n_cap", c.n_cap);
  c.l_max = get_or<std::uint64_t>(j, "l_max", c.l_max);
  c.sigma = get_or<std::uint64_t>(j, "sigma", c.sigma);
  if (j.contains("t")) c.t = get_or<std::size_t>(j, "t", 0);
  c.r = get_or<std::size_t>(j, "r", c.r);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.trials = get_or<std::uint64_t>(j, "trials", c.trials);
  c.j_max = get_or<std::uint64_t>(j, "j_max", c.j_max);
  if (j.contains("model")) c.model = get_or<std::string>(j, "model", "");

  const bool needs_matrix = c.task != Task::DigitCensus;
  const bool needs_chain = c.task == Task::Evolve || c.task == Task::Bounds || c.task == Task::MixingSweep;
  if (needs_matrix && !c.matrix) config_error("task requires 'matrix'");
  if (needs_chain && !c.increments) config_error("task requires 'increments'");
  if (needs_chain && c.increments->dim() != c.matrix->dim()) config_error("increments dimension differs from matrix");
  if ((c.task == Task::Evolve || c.task == Task::Bounds || c.task == Task::DigitCensus) && !c.p) {
    config_error("task requires 'p'");
  }
  if (c.task == Task::MixingSweep && c.p_list.empty()) config_error("mixing-sweep requires a nonempty 'p_list'");
  if (c.p && *c.p < 2) config_error("p must be at least 2");
  for (auto q : c.p_list)
    if (q < 2) config_error("every p in p_list must be at least 2");
  if (!(c.eps > 0.0 && c.eps < 1.0)) config_error("eps must lie in (0, 1)");
  if (c.sigma < 2) config_error("sigma must be at least 2");
  if (c.r == 0 || (c.t && *c.t == 0)) config_error("t and r must be positive");
  if (c.model && c.model != "pow_p" && c.model != "log" && c.model != "log2" && c.model != "loglog") {
    config_error("model must be one of pow_p, log, log2, loglog");
  }
  if (!c.x0.empty() && c.matrix && c.x0.size() != c.matrix->dim()) config_error("x0 has wrong dimension");
  return c;
}

/// One mixing-sweep row; `reason` carries the failing gcd condition for an
/// inadmissible p, or the error raised while evolving.
struct SweepRow {
  std::uint64_t p = 0;
  Regime regime = Regime::Unknown;
  bool admissible = false;
  std::string reason;
  std::optional<std::uint64_t> n_mix;

  double ln_p() const { return std::log(static_cast<double>(p)); }
  double ln_p_lnln_p() const { return ln_p() * std::log(ln_p()); }
  double p_sq() const { return static_cast<double>(p) * static_cast<double>(p); }
};

inline std::vector<SweepRow> mixing_sweep(const ExperimentConfig& c) {
  if (!c.matrix || !c.increments) detail::config_error("mixing-sweep requires 'matrix' and 'increments'");
  if (c.p_list.empty()) detail::config_error("mixing-sweep requires a nonempty 'p_list'");
  const auto profile = classify_regime(*c.matrix, c.l_max);
  const auto basis = support_basis(*c.increments, *c.matrix);
  std::vector<SweepRow> rows;
  bool any = false;
  for (auto q : c.p_list) {
    SweepRow row;
    row.p = q;
    row.regime = profile.regime;
    const auto adm = admissibility(profile.det, basis, q);
    row.admissible = adm.ok();
    row.reason = adm.reason();
    any = any || row.admissible;
    rows.push_back(std::move(row));
  }
  if (!any) detail::config_error("no admissible modulus in p_list");
  for (auto& row : rows) {
    if (!row.admissible) continue;
    try {
      row.n_mix = mixing_time(c.chain(row.p), c.eps, c.n_cap, c.state_cap);
      if (!row.n_mix) row.reason = "Unmixed";
    } catch (const Error& ex) {
      row.reason = ex.what();
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "p,regime,admissible,reason,n_mix,ln_p,ln_p_lnln_p,p_sq\n";
  const auto flags = os.flags();
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.p << ',' << to_string(r.regime) << ',' << (r.admissible ? 1 : 0) << ",\"" << r.reason << "\",";
    if (r.n_mix) os << *r.n_mix;
    os << ',' << r.ln_p() << ',' << r.ln_p_lnln_p() << ',' << r.p_sq() << '\n';
  }
  os.flags(flags);
}

enum class FitModel { PowP, Log, LogSquared, LogLogLog };

inline FitModel parse_fit_model(std::string_view s) {
  if (s == "pow_p") return FitModel::PowP;
  if (s == "log") return FitModel::Log;
  if (s == "log2") return FitModel::LogSquared;
  if (s == "loglog") return FitModel::LogLogLog;
  throw Error(ErrorCode::InvalidArgument, "unknown fit model");
}

struct FitResult {
  double coefficient = 0.0;  ///< slope (pow_p) or proportionality constant
  double intercept = 0.0;    ///< pow_p only
  double rms_residual = 0.0;
  std::size_t points = 0;
};

/// A fit input: modulus and (possibly non-integral) step count.
struct FitPoint {
  double p = 0.0;
  double n = 0.0;
};

/// pow_p: least squares of ln n = a + b ln p, coefficient b, residual in log
/// space. log / log2 / loglog: n = c g(p) through the origin with g = ln p,
/// (ln p)^2, ln p ln ln p; residual in steps. Needs at least 3 points.
inline FitResult fit_exponent(const std::vector<FitPoint>& points, FitModel model) {
  if (points.size() < 3) {
    throw Error(ErrorCode::InsufficientData, "need at least 3 mixed rows, have " + std::to_string(points.size()));
  }
  std::vector<double> xs, ys;
  for (const auto& pt : points) {
    const double lp = std::log(pt.p);
    switch (model) {
      case FitModel::PowP: xs.push_back(lp); ys.push_back(std::log(pt.n)); break;
      case FitModel::Log: xs.push_back(lp); ys.push_back(pt.n); break;
      case FitModel::LogSquared: xs.push_back(lp * lp); ys.push_back(pt.n); break;
      case FitModel::LogLogLog: xs.push_back(lp * std::log(lp)); ys.push_back(pt.n); break;
    }
  }
  FitResult fit;
  fit.points = xs.size();
  const double m = static_cast<double>(xs.size());
  if (model == FitModel::PowP) {
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i];
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0) throw Error(ErrorCode::InsufficientData, "all rows share one p");
    fit.coefficient = sxy / sxx;
    fit.intercept = my - fit.coefficient * mx;
  } else {
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxx += xs[i] * xs[i], sxy += xs[i] * ys[i];
    if (sxx == 0) throw Error(ErrorCode::InsufficientData, "regressor vanishes on every row");
    fit.coefficient = sxy / sxx;
  }
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.coefficient * xs[i]);
    ss += e * e;
  }
  fit.rms_residual = std::sqrt(ss / m);
  return fit;
}

/// Same, over the sweep rows that mixed (rows without n_mix are skipped).
inline FitResult fit_exponent(const std::vector<SweepRow>& rows, FitModel model) {
  std::vector<FitPoint> pts;
  for (const auto& r : rows)
    if (r.n_mix && *r.n_mix >= 1) pts.push_back({static_cast<double>(r.p), static_cast<double>(*r.n_mix)});
  return fit_exponent(pts, model);
}

inline nlohmann::json profile_json(const SpectralProfile& prof) {
  nlohmann::json eig = nlohmann::json::array();
  for (const auto& z : prof.eigenvalues) eig.push_back({z.real(), z.imag()});
  nlohmann::json factors = nlohmann::json::array();
  for (const auto& f : prof.factors) {
    nlohmann::json fj = {{"poly", detail::poly_json(f.poly)},
                         {"multiplicity", f.multiplicity},
                         {"irreducible", f.irreducible}};
    if (f.order) {
      fj["root_order"] = {{"l", f.order->l}, {"m", detail::bigint_json(f.order->m)}};
    } else {
      fj["root_order"] = nullptr;
    }
    factors.push_back(fj);
  }
  return {{"regime", std::string(to_string(prof.regime))},
          {"det", detail::bigint_json(prof.det)},
          {"char_poly", detail::poly_json(prof.char_poly)},
          {"min_poly", detail::poly_json(prof.min_poly)},
          {"d", prof.d},
          {"eigenvalues", eig},
          {"factors", factors},
          {"factorization_complete", prof.factorization_complete}};
}

/// Writes `contents` to `path` through a temporary file and a rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::InvalidArgument, "cannot open " + tmp);
    os << contents;
    if (!os) throw Error(ErrorCode::InvalidArgument, "failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

/// Executes the configured task, writing its reports under `out_dir`, and
/// returns the JSON summary (also written as `<task>.json`).
inline nlohmann::json run(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json summary = {{"task", std::string(to_string(c.task))}};
  std::ostringstream csv;

  switch (c.task) {
    case Task::Classify: {
      summary["profile"] = profile_json(classify_regime(*c.matrix, c.l_max));
      break;
    }
    case Task::Evolve: {
      const ChainSpec chain = c.chain(*c.p);
      const StateDistribution d = evolve(chain, c.n, c.state_cap);
      write_csv(csv, d);
      write_file_atomic(out_dir / "distribution.csv", csv.str());
      summary["n"] = c.n;
      summary["p"] = *c.p;
      summary["tv"] = tv_distance(d);
      if (c.trials > 0) {
        const StateDistribution emp = simulate(chain, c.n, c.trials, c.seed, c.state_cap);
        std::ostringstream ecsv;
        write_csv(ecsv, emp);
        write_file_atomic(out_dir / "empirical.csv", ecsv.str());
        summary["trials"] = c.trials;
        summary["seed"] = c.seed;
        summary["tv_empirical_vs_exact"] = tv_between(emp, d);
      }
      break;
    }
    case Task::Bounds: {
      const auto rows = bounds_table(c.chain(*c.p), c.n, c.l_max, c.state_cap);
      write_bounds_csv(csv, rows);
      write_file_atomic(out_dir / "bounds.csv", csv.str());
      summary["rows"] = rows.size();
      break;
    }
    case Task::MixingSweep: {
      const auto rows = mixing_sweep(c);
      write_sweep_csv(csv, rows);
      write_file_atomic(out_dir / "sweep.csv", csv.str());
      summary["eps"] = c.eps;
      summary["rows"] = rows.size();
      if (c.model) {
        try {
          const auto fit = fit_exponent(rows, parse_fit_model(*c.model));
          summary["fit"] = {{"model", *c.model},
                            {"coefficient", fit.coefficient},
                            {"intercept", fit.intercept},
                            {"rms_residual", fit.rms_residual},
                            {"points", fit.points}};
        } catch (const Error& ex) {
          summary["fit"] = {{"model", *c.model}, {"error", std::string(to_string(ex.code()))}};
        }
      }
      break;
    }
    case Task::DigitCensus: {
      const std::size_t t = c.t.value_or(digits_needed(*c.p, c.sigma));
      const auto rep = block_census(*c.p, c.sigma, t, c.r);
      write_census_csv(csv, rep);
      write_file_atomic(out_dir / "census.csv", csv.str());
      nlohmann::json blocks = nlohmann::json::array();
      for (const auto& b : rep.per_block) {
        nlohmann::json hist = nlohmann::json::object();
        for (const auto& [alt, count] : b.histogram) hist[std::to_string(alt)] = count;
        blocks.push_back({{"block_index", b.block_index},
                          {"all_distinct", b.all_distinct},
                          {"min_alternations", b.min_alternations},
                          {"histogram", hist}});
      }
      summary["p"] = *c.p;
      summary["sigma"] = c.sigma;
      summary["t"] = t;
      summary["r"] = c.r;
      summary["blocks"] = blocks;
      break;
    }
    case Task::VerifyIdentities: {
      const IntMatrix& a = *c.matrix;
      const auto d = static_cast<std::size_t>(minimal_poly(a).degree());
      std::vector<std::size_t> order(a.dim());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      nlohmann::json checks = nlohmann::json::array();
      bool all = true;
      for (std::size_t e = 0; e <= d; ++e) {
        for (std::uint64_t jj = 0; jj <= c.j_max; ++jj) {
          for (auto which : {TelescopingIdentity::PowerExpansion, TelescopingIdentity::ProductRecursion}) {
            const auto res = verify_identity(a, order, e, jj, which);
            all = all && res.holds;
            checks.push_back({{"e", e},
                              {"j", jj},
                              {"identity", which == TelescopingIdentity::PowerExpansion ? 1 : 2},
                              {"holds", res.holds},
                              {"residual", res.residual},
                              {"exact", res.exact}});
          }
        }
      }
      summary["d"] = d;
      summary["all_hold"] = all;
      summary["checks"] = checks;
      break;
    }
  }
  write_file_atomic(out_dir / (std::string(to_string(c.task)) + ".json"), summary.dump(2) + "\n");
  return summary;
}

}  // namespace affmix

#endif  // AFFMIX_EXPERIMENT_HPP
