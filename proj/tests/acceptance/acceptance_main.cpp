// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values are recomputed here by the oracles in
// tests/oracles.hpp rather than trusted from the library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "affmix/experiment.hpp"
#include "oracles.hpp"
#include "suite.hpp"

using namespace affmix;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

// Every TV trajectory produced by criteria 1-7, for criterion 11.
struct RunLog {
  std::string label;
  std::vector<double> tv;
  std::vector<double> total;
};
std::vector<RunLog> g_runs;

/// Evolves n_max steps, recording the run, and hands each P_n to `visit`.
void trajectory(const std::string& label, const ChainSpec& chain, std::uint64_t n_max,
                const std::function<void(std::uint64_t, const StateDistribution&)>& visit) {
  const ExactStepper stepper(chain);
  StateDistribution d = StateDistribution::delta(chain.p, chain.start());
  RunLog log{label, {}, {}};
  for (std::uint64_t n = 0;; ++n) {
    log.tv.push_back(tv_distance(d));
    log.total.push_back(d.total());
    visit(n, d);
    if (n == n_max) break;
    d = stepper.step(d);
  }
  g_runs.push_back(std::move(log));
}

/// First n with tv <= eps, logging the trajectory.
std::optional<std::uint64_t> logged_mixing_time(const std::string& label, const ChainSpec& chain, double eps,
                                                std::uint64_t n_cap) {
  const ExactStepper stepper(chain);
  StateDistribution d = StateDistribution::delta(chain.p, chain.start());
  RunLog log{label, {}, {}};
  std::optional<std::uint64_t> hit;
  for (std::uint64_t n = 0; n <= n_cap; ++n) {
    const double tv = tv_distance(d);
    log.tv.push_back(tv);
    log.total.push_back(d.total());
    if (tv <= eps) {
      hit = n;
      break;
    }
    d = stepper.step(d);
  }
  g_runs.push_back(std::move(log));
  return hit;
}

/// |DFT(P)(alpha)|^2 with a phase table, for every alpha in lexicographic
/// order (matching all_frequencies(p, k, false)).
std::vector<double> dft_all(const StateDistribution& d) {
  const std::uint64_t p = d.modulus();
  const std::size_t k = d.dim();
  std::vector<std::complex<double>> phase(p);
  for (std::uint64_t r = 0; r < p; ++r)
    phase[r] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(p));
  std::vector<double> out;
  for (const auto& a : all_frequencies(p, k, false)) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] == 0.0) continue;
      const auto x = d.decode(i);
      std::uint64_t dot = 0;
      for (std::size_t c = 0; c < k; ++c) dot = (dot + x[c] * a.components[c]) % p;
      acc += d[i] * phase[dot];
    }
    out.push_back(std::norm(acc));
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int g_failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s -- %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool coprime(const ChainSpec& c) { return gcd(det_int(c.A), BigInt(c.p)) == 1; }

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int chains = 0;
  for (const auto& c : suite::cases()) {
    for (auto p : suite::primes()) {
      const auto chain = c.chain(p);
      if (!coprime(chain)) continue;
      ++chains;
      const auto freqs = all_frequencies(p, chain.dim(), false);
      std::vector<std::vector<double>> series;
      for (const auto& a : freqs) series.push_back(pn_hat_sq_series(chain, a, 50));
      trajectory("c1 " + c.name + " p=" + std::to_string(p), chain, 50,
                 [&](std::uint64_t n, const StateDistribution& d) {
                   const auto ref = dft_all(d);
                   for (std::size_t i = 0; i < freqs.size(); ++i) worst = std::max(worst, std::abs(series[i][n] - ref[i]));
                 });
    }
  }
  const double secs = seconds_since(t0);
  report(1, worst <= 1e-9 && secs <= 60.0, "product formula equals |DFT(P_n)|^2",
         std::to_string(chains) + " chains, n<=50, max err " + fmt("%.3e", worst) + ", " + fmt("%.2f s", secs));
}

void criterion2() {
  double worst_upper = -1e300, worst_lower = -1e300;
  for (const auto& c : suite::cases()) {
    for (auto p : suite::primes()) {
      const auto chain = c.chain(p);
      if (!coprime(chain)) continue;
      const auto freqs = all_frequencies(p, chain.dim(), true);
      trajectory("c2 " + c.name + " p=" + std::to_string(p), chain, 50,
                 [&](std::uint64_t n, const StateDistribution& d) {
                   const double tv = tv_distance(d);
                   worst_upper = std::max(worst_upper, tv * tv - upper_bound(chain, n));
                   for (const auto& a : freqs) worst_lower = std::max(worst_lower, lower_bound_at(chain, a, n) - tv);
                 });
    }
  }
  report(2, worst_upper <= 1e-9 && worst_lower <= 1e-9, "tv^2 <= upper and tv >= lower(alpha)",
         "max(tv^2-upper) " + fmt("%.3e", worst_upper) + ", max(lower-tv) " + fmt("%.3e", worst_lower));
}

void criterion3() {
  const ChainSpec chain{IntMatrix{{2}}, IncrementDistribution::fair_two_point({BigInt(1)}), 3, {}};
  // Hand convolution: delta_0 -> (1/2, 1/2, 0) -> (1/2, 1/4, 1/4).
  const auto ref = oracle::evolve_all({{2}}, {{0}, {1}}, {0.5, 0.5}, 3, {0}, 2);
  const std::vector<double> hand{0.5, 0.25, 0.25};
  double err = 0.0;
  StateDistribution p2;
  trajectory("c3", chain, 2, [&](std::uint64_t n, const StateDistribution& d) {
    if (n == 2) p2 = d;
  });
  for (std::size_t i = 0; i < 3; ++i) {
    err = std::max(err, std::abs(p2[i] - hand[i]));
    err = std::max(err, std::abs(ref[2][i] - hand[i]));
  }
  err = std::max(err, std::abs(tv_distance(p2) - 1.0 / 6));
  err = std::max(err, std::abs(oracle::tv(ref[2]) - 1.0 / 6));
  err = std::max(err, std::abs(upper_bound(chain, 2) - 1.0 / 32));
  err = std::max(err, std::abs(lower_bound_at(chain, {{1}, 3}, 2) - 1.0 / 8));
  report(3, err <= 1e-12, "hand checkpoint P_2=(1/2,1/4,1/4), tv=1/6, upper=1/32, lower=1/8",
         "max err " + fmt("%.3e", err));
}

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SweepRow> rows;
  bool all_mixed = true;
  for (std::uint64_t p = 5; p <= 101; p += 2) {
    const ChainSpec chain{IntMatrix{{1}}, IncrementDistribution::fair_two_point({BigInt(1)}), p, {}};
    SweepRow row;
    row.p = p;
    row.admissible = true;
    row.n_mix = logged_mixing_time("c4 p=" + std::to_string(p), chain, 0.25, 1'000'000);
    all_mixed = all_mixed && row.n_mix.has_value();
    rows.push_back(row);
  }
  const auto fit = fit_exponent(rows, FitModel::PowP);
  const double secs = seconds_since(t0);
  const bool ok = all_mixed && fit.coefficient >= 1.8 && fit.coefficient <= 2.2 && fit.rms_residual < 0.1 &&
                  secs <= 300.0;
  report(4, ok, "A=[1] slow regime, pow_p slope in [1.8, 2.2]",
         "slope " + fmt("%.4f", fit.coefficient) + ", rms " + fmt("%.4f", fit.rms_residual) + ", n_mix(101)=" +
             std::to_string(rows.back().n_mix.value_or(0)) + ", " + fmt("%.2f s", secs));
}

void criterion5() {
  // 64 odd moduli, geometrically spaced over [11, 4999].
  std::vector<std::uint64_t> ps;
  const int count = 64;
  for (int i = 0; i < count; ++i) {
    const double v = 11.0 * std::pow(4999.0 / 11.0, static_cast<double>(i) / (count - 1));
    auto p = static_cast<std::uint64_t>(std::llround(v)) | 1u;
    if (p > 4999) p = 4999;
    if (ps.empty() || p > ps.back()) ps.push_back(p);
  }
  std::vector<SweepRow> rows;
  std::vector<double> ratio;
  bool all_mixed = true;
  for (auto p : ps) {
    const ChainSpec chain{IntMatrix{{2}}, IncrementDistribution::fair_two_point({BigInt(1)}), p, {}};
    SweepRow row;
    row.p = p;
    row.admissible = true;
    row.n_mix = logged_mixing_time("c5 p=" + std::to_string(p), chain, 0.25, 100'000);
    if (!row.n_mix) {
      all_mixed = false;
      continue;
    }
    ratio.push_back(static_cast<double>(*row.n_mix) / row.ln_p_lnln_p());
    rows.push_back(row);
  }
  const std::size_t q = ratio.size() / 4;
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    first += ratio[i];
    last += ratio[ratio.size() - 1 - i];
  }
  first /= static_cast<double>(q);
  last /= static_cast<double>(q);
  const auto fit = fit_exponent(rows, FitModel::LogLogLog);
  const double max_ratio = *std::max_element(ratio.begin(), ratio.end());
  report(5, all_mixed && q > 0 && last <= 1.3 * first, "A=[2] fast regime, n_mix/(ln p ln ln p) has no upward trend",
         std::to_string(ratio.size()) + " odd p in [11, 4999], fitted c " + fmt("%.4f", fit.coefficient) +
             ", max ratio " + fmt("%.3f", max_ratio) + ", quartile means " + fmt("%.3f", first) + " -> " +
             fmt("%.3f", last));
}

void criterion6() {
  bool ok = true;
  double worst = -1e300;
  double gamma_err = 0.0;
  for (std::uint64_t p : {11u, 13u}) {
    const ChainSpec chain{IntMatrix{{0, -1}, {1, 0}}, IncrementDistribution::fair_two_point(to_int_vector({1, 0})), p,
                          {}};
    const auto cert = certificate_gamma(chain, kDefaultLMax, 0);
    // gamma by the closed formula: 2 pi^2 k^2 ||alpha||^2 * max_i ||tA||^{2i} * (1/2).
    gamma_err = std::max(gamma_err, std::abs(cert.gamma - 2.0 * kPi2 * 4.0 * 1.0 * 1.0 * 0.5));
    trajectory("c6 p=" + std::to_string(p), chain, 200, [&](std::uint64_t n, const StateDistribution& d) {
      const double bound = certificate_gamma(chain, kDefaultLMax, n).bound;
      worst = std::max(worst, bound - tv_distance(d));
    });
  }
  ok = worst <= 1e-9 && gamma_err <= 1e-12;
  report(6, ok, "rotation torsion bound tv >= 1/2 (1 - gamma/p^2)^{n/2}, gamma = 4 pi^2",
         "p in {11,13}, n<=200, max(bound-tv) " + fmt("%.3e", worst) + ", |gamma-4pi^2| " + fmt("%.1e", gamma_err));
}

void criterion7() {
  const ChainSpec chain{IntMatrix{{2}}, IncrementDistribution::fair_two_point({BigInt(1)}), 101, {}};
  const FrequencyVector alpha{{1}, 101};
  std::uint64_t valid = 0;
  double worst = -1e300;
  double rho_err = 0.0;
  trajectory("c7", chain, 12, [&](std::uint64_t n, const StateDistribution& d) {
    try {
      const auto cert = certificate_rho(chain, alpha, n);
      rho_err = std::max(rho_err, std::abs(cert.rho - kPi2));
      worst = std::max(worst, cert.bound - tv_distance(d));
      valid = n;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::FactorNonpositive) throw;
    }
  });
  report(7, worst <= 1e-9 && rho_err <= 1e-12 && valid >= 1, "A=[2], p=101 rho certificate below tv, rho = pi^2",
         "valid n<=" + std::to_string(valid) + ", max(bound-tv) " + fmt("%.3e", worst));
}

void criterion8() {
  double worst = 0.0;
  bool ok = true;
  int checks = 0;
  for (const auto& c : suite::cases()) {
    const IntMatrix a = c.matrix();
    const auto d = static_cast<std::size_t>(minimal_poly(a).degree());
    std::vector<std::size_t> order(a.dim());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    do {
      for (std::size_t e = 0; e <= d; ++e)
        for (std::uint64_t j = 0; j <= 10; ++j)
          for (auto which : {TelescopingIdentity::PowerExpansion, TelescopingIdentity::ProductRecursion}) {
            const auto r = verify_identity(a, order, e, j, which);
            ok = ok && r.holds && r.residual <= 1e-8;
            worst = std::max(worst, r.residual);
            ++checks;
          }
    } while (std::next_permutation(order.begin(), order.end()));
  }
  report(8, ok, "telescoping identities on the suite, e<=d, j<=10",
         std::to_string(checks) + " checks, max residual " + fmt("%.3e", worst));
}

void criterion9() {
  bool ok = true;
  std::size_t checked = 0;
  for (const auto& c : suite::cases()) {
    const IntMatrix a = c.matrix();
    const auto b = support_basis(c.mu(), a);
    const BigInt det_a = det_int(a);
    for (std::uint64_t p = 2; p <= 13; ++p) {
      if (!admissible_modulus(det_a, b.det, p)) continue;
      const std::size_t k = a.dim();
      for (std::size_t idx = 1; idx < oracle::states(k, static_cast<long long>(p)); ++idx) {
        const auto alpha = oracle::decode(idx, k, static_cast<long long>(p));
        bool hit = false;
        for (std::size_t m = 0; m < k && !hit; ++m) {
          BigInt dot = 0;
          for (std::size_t i = 0; i < k; ++i) dot += b.matrix(i, m) * alpha[i];
          hit = mod_floor(dot, BigInt(p)) != 0;
        }
        ok = ok && hit;
        ++checked;
      }
    }
  }
  report(9, ok, "every alpha != 0 meets some basis column, admissible p <= 13",
         std::to_string(checked) + " (chain, p, alpha) triples");
}

void criterion10() {
  bool ok = true;
  std::uint64_t bad = 0;
  for (std::uint64_t p = 3; p <= 999; p += 2) {
    const auto rep = block_census(p, 2, digits_needed(p, 2), 1);
    if (!rep.all_distinct() || rep.min_alternations() < 1) {
      ok = false;
      if (bad == 0) bad = p;
    }
  }
  report(10, ok, "sigma=2 first blocks distinct with >= 1 alternation, odd p <= 1000",
         ok ? "all odd p in [3, 999]" : "first failure p=" + std::to_string(bad));
}

void criterion11() {
  double worst_rise = 0.0, worst_mass = 0.0;
  std::size_t steps = 0;
  std::string where;
  for (const auto& run : g_runs) {
    for (std::size_t n = 0; n < run.tv.size(); ++n) {
      ++steps;
      if (std::abs(run.total[n] - 1.0) > worst_mass) worst_mass = std::abs(run.total[n] - 1.0);
      if (n > 0 && run.tv[n] - run.tv[n - 1] > worst_rise) {
        worst_rise = run.tv[n] - run.tv[n - 1];
        where = run.label;
      }
    }
  }
  report(11, worst_rise <= 1e-12 && worst_mass <= 1e-10, "tv non-increasing and mass 1 on every run above",
         std::to_string(g_runs.size()) + " runs, " + std::to_string(steps) + " states; max tv rise " +
             fmt("%.3e", worst_rise) + ", max |mass-1| " + fmt("%.3e", worst_mass));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8,
                                                       criterion9, criterion10, criterion11};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& ex) {
      report(static_cast<int>(i + 1), false, "raised", ex.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", g_failures, criteria.size());
  return g_failures == 0 ? 0 : 1;
}
