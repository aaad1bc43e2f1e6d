// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
// Pass --only N[,M...] to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rectconv/edge.hpp"
#include "rectconv/experiments.hpp"
#include "rectconv/freeconv.hpp"
#include "rectconv/quantiles.hpp"
#include "rectconv/stats.hpp"

using namespace rectconv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  double time_limit = 0.0;  // seconds; 0 means no limit
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double t_sixth(std::size_t n) { return std::pow(static_cast<double>(n), -1.0 / 6.0); }

ExperimentConfig base_config(Spectrum spec, std::size_t p, std::size_t n, double t, std::size_t trials) {
  ExperimentConfig cfg;
  cfg.spec = std::move(spec);
  cfg.params = make_params(p, n, t);
  cfg.trials = trials;
  return cfg;
}

Outcome mp_edge() {
  auto e = find_right_edge(zero_spectrum(100), make_params(100, 200, 0.25));
  const double exact = 0.25 * std::pow(1.0 + std::sqrt(0.5), 2);
  const double err = std::abs(e.lambda_plus - exact);
  return {err <= 1e-8, fmt("lambda_+=%.12f err=%.2e", e.lambda_plus, err), 1.0};
}

Outcome self_consistency() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_res = 0.0, worst_route = 0.0;
  int herglotz_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 1 + static_cast<std::size_t>(u(rng) * 80);
    std::vector<double> v(p);
    for (auto& x : v) x = 3.0 * u(rng);
    const Spectrum s = make_spectrum(v);
    const double c = 0.1 + 0.9 * u(rng);
    const auto n = static_cast<std::size_t>(std::ceil(static_cast<double>(p) / c));
    const auto pr = make_params(p, n, std::pow(10.0, -2.0 + 2.3 * u(rng)));
    const ComplexPoint z{-0.5 + (s.top() + 2.0 * pr.t + 4.0) * u(rng), std::pow(10.0, -4.0 + 5.0 * u(rng))};
    const auto a = solve_point(s, pr, z);
    const auto b = solve_point_fixed_point(s, pr, z);
    worst_res = std::max(worst_res, std::abs(phi(s, pr, a.zeta) - z.value()));
    worst_route = std::max(worst_route, std::abs(a.m - b.m) / std::max(1.0, std::abs(a.m)));
    const bool ok = a.m.imag() > 0.0 && (z.value() * a.m).imag() > 0.0 && a.zeta.imag() > 0.0;
    herglotz_bad += ok ? 0 : 1;
  }
  return {worst_res <= 1e-10 && worst_route <= 1e-8 && herglotz_bad == 0,
          fmt("max residual=%.2e max route gap=%.2e herglotz violations=%d", worst_res, worst_route,
              herglotz_bad),
          30.0};
}

Outcome velocity() {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t p = 5 + static_cast<std::size_t>(u(rng) * 200);
    std::vector<double> v(p);
    for (auto& x : v) x = 2.0 * u(rng);
    const Spectrum s = make_spectrum(v);
    const auto n = p + static_cast<std::size_t>(u(rng) * 2 * p);
    const double t = 0.02 + u(rng);
    const double h = 1e-4 * t;
    const double vel = find_right_edge(s, make_params(p, n, t)).velocity;
    const double up = find_right_edge(s, make_params(p, n, t + h)).lambda_plus;
    const double dn = find_right_edge(s, make_params(p, n, t - h)).lambda_plus;
    worst = std::max(worst, std::abs((up - dn) / (2 * h) - vel) / std::abs(vel));
  }
  return {worst < 1e-4, fmt("max relative error=%.2e over 20 configurations", worst), 30.0};
}

Outcome sqrt_edge() {
  const Spectrum s = canonical_sqrt_spectrum(500, 1.0);
  const auto pr = make_params(500, 1000, 0.1);
  const auto e = find_right_edge(s, pr);
  const double t2 = pr.t * pr.t;
  std::vector<double> lx, lr;
  double log_pref = 0.0;
  const int N = 21;
  for (int i = 0; i < N; ++i) {
    const double x = 1e-4 * t2 * std::pow(100.0, i / (N - 1.0));
    const double rho = density(s, pr, e.lambda_plus - x);
    lx.push_back(std::log(x));
    lr.push_back(std::log(rho));
    log_pref += std::log(rho / std::sqrt(x)) / N;
  }
  const double slope = fit_line(lx, lr).slope;
  const double ratio = std::exp(log_pref) / e.sqrt_coeff;
  return {std::abs(slope - 0.5) <= 0.05 && std::abs(ratio - 1.0) <= 0.1,
          fmt("exponent=%.4f prefactor/coefficient=%.4f over x in [1e-4, 1e-2] t^2", slope, ratio), 120.0};
}

Outcome xi_scaling() {
  const Spectrum s = canonical_sqrt_spectrum(500, 1.0);
  double lo = INFINITY, hi = 0.0;
  for (double t : {0.05, 0.1, 0.2, 0.4}) {
    const double r = find_right_edge(s, make_params(500, 1000, t)).xi_plus / (t * t);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo >= 0.05 && hi <= 20.0, fmt("xi_+/t^2 in [%.4f, %.4f]", lo, hi)};
}

// Square MP law: with E = 2 + 2 cos(phi) the mass above E is (phi - sin phi) / pi.
double mp_square_quantile(double mass) {
  double lo = 0.0, hi = std::numbers::pi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((mid - std::sin(mid)) / std::numbers::pi < mass ? lo : hi) = mid;
  }
  return 2.0 + 2.0 * std::cos(0.5 * (lo + hi));
}

Outcome quantiles() {
  const Spectrum zero = zero_spectrum(1);
  const auto pr = make_params(1000, 1000, 1.0);
  const auto e = find_right_edge(zero, pr);
  const auto q = classical_locations(zero, pr, 500, e);
  double mp_err = 0.0;
  for (std::size_t j = 2; j <= 500; ++j)
    mp_err = std::max(mp_err, std::abs(q.gamma[j - 1] - mp_square_quantile((j - 1) / 1000.0)));
  const bool top_exact = q.gamma[0] == e.lambda_plus;

  const Spectrum s = canonical_sqrt_spectrum(200, 1.0);
  const auto pc = make_params(200, 400, t_sixth(400));
  const auto ec = find_right_edge(s, pc);
  const auto qc = classical_locations(s, pc, 20, ec);
  double lo = INFINITY, hi = 0.0;
  for (std::size_t j = 2; j <= 20; ++j) {
    const double r = (ec.lambda_plus - qc.gamma[j - 1]) / (std::pow(j, 2.0 / 3.0) * std::pow(400.0, -2.0 / 3.0));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const bool top_c = qc.gamma[0] == ec.lambda_plus;
  return {mp_err <= 1e-6 && top_exact && top_c && lo >= 0.1 && hi <= 10.0,
          fmt("MP max err=%.2e (j<=500, p=n=1000) gamma_1 exact=%s kappa ratio in [%.3f, %.3f]", mp_err,
              top_exact && top_c ? "yes" : "no", lo, hi)};
}

Outcome rigidity() {
  auto cfg = base_config(canonical_sqrt_spectrum(200, 1.0), 200, 400, t_sixth(400), 200);
  const auto r = rigidity_experiment(cfg);
  return {r.pass,
          fmt("p95 max_k r_k=%.3f (budget %.1f) median=%.3f k used=%.0f", r.summary.at("max_r_tail"),
              cfg.thresholds.c_rigid, r.summary.at("max_r_median"), r.summary.at("k_used")),
          600.0};
}

Outcome universality() {
  auto cfg = base_config(canonical_sqrt_spectrum(150, 1.0), 150, 300, t_sixth(300), 2000);
  cfg.kinds = {NoiseKind::gaussian, NoiseKind::trinary};
  const auto r = edge_universality_experiment(cfg);
  cfg.kinds = {NoiseKind::gaussian, NoiseKind::gaussian};
  const auto ctrl = edge_universality_experiment(cfg);
  const double ks = r.summary.at("ks"), ks0 = ctrl.summary.at("ks");
  return {ks <= 0.08 && ks0 <= 0.05,
          fmt("KS gaussian/trinary=%.4f (<=0.08) control=%.4f (<=0.05) mean T=%.3f", ks, ks0,
              r.summary.at("mean_a")),
          1800.0};
}

Outcome local_law() {
  auto cfg = base_config(canonical_sqrt_spectrum(200, 1.0), 200, 400, t_sixth(400), 100);
  cfg.vartheta = 0.1;
  const auto r = local_law_experiment(cfg);
  const double avg = r.summary.at("avg_tail");
  return {avg <= 10.0,
          fmt("p95 averaged residual=%.3f (<=10) on %.0f points, anisotropic p95=%.3f", avg,
              r.summary.at("grid_points"), r.summary.at("aniso_tail")),
          600.0};
}

Outcome delocalization() {
  auto cfg = base_config(canonical_sqrt_spectrum(150, 1.0), 150, 300, t_sixth(300), 100);
  cfg.k_max = 10;
  const auto r = delocalization_experiment(cfg);
  return {r.pass, fmt("p95 ratio=%.3f (<=10) max=%.3f", r.summary.at("ratio_tail"), r.summary.at("ratio_max"))};
}

Outcome bbp() {
  auto cfg = base_config(zero_spectrum(400), 400, 400, 1.0, 200);
  const auto sup = bbp_experiment(cfg, 2.0);
  const auto sub = bbp_experiment(cfg, 0.5);
  const double b_sup = 5.0 * std::pow(400.0, -0.4), b_sub = 5.0 * std::pow(400.0, -0.567);
  const double e_sup = sup.summary.at("median_error"), e_sub = sub.summary.at("median_error");
  return {e_sup <= b_sup && e_sub <= b_sub && sup.summary.at("prediction") == 4.5,
          fmt("d=2: median |mu_1-%.4f|=%.4f (<=%.4f); d=0.5: median |mu_1-edge|=%.4f (<=%.4f)",
              sup.summary.at("prediction"), e_sup, b_sup, e_sub, b_sub)};
}

Outcome rank() {
  auto cfg = base_config(zero_spectrum(200), 200, 400, 1.0, 200);
  cfg.spikes = {3.0, 2.5};
  const auto two = rank_sweep_experiment(cfg);
  cfg.spikes.clear();
  const auto none = rank_sweep_experiment(cfg);
  const double f2 = two.summary.at("frequency"), f0 = none.summary.at("frequency");
  std::ostringstream sweep;
  for (const auto& [k, v] : two.summary)
    if (k.rfind("frequency_omega_", 0) == 0) sweep << " " << k.substr(16) << ":" << v;
  return {f2 >= 0.9 && f0 >= 0.9,
          fmt("rank 2 found in %.3f (>=0.9), null flagged/1 in %.3f (>=0.9) at omega=%.2f; omega sweep%s", f2, f0,
              cfg.omega, sweep.str().c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"MP edge closed form", mp_edge},
      {"self-consistency battery", self_consistency},
      {"edge velocity", velocity},
      {"square-root edge", sqrt_edge},
      {"xi_+ ~ t^2", xi_scaling},
      {"classical locations", quantiles},
      {"rigidity", rigidity},
      {"edge universality", universality},
      {"averaged local law", local_law},
      {"delocalization", delocalization},
      {"BBP outlier", bbp},
      {"rank estimator", rank},
  };
  std::set<std::size_t> only;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) != "--only") continue;
    std::stringstream ss(argv[i + 1]);
    for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoul(tok));
  }

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = o.time_limit <= 0.0 || secs < o.time_limit;
    const bool ok = o.pass && in_time;
    failures += ok ? 0 : 1;
    std::printf("[%s] %2zu %-26s %s (%.2f s%s)\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs, in_time ? "" : fmt(", over %.0f s limit", o.time_limit).c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
