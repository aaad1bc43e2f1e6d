#include "rectconv/ensemble.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rectconv/rng.hpp"

namespace rectconv {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::rademacher: return "rademacher";
    case NoiseKind::trinary: return "trinary";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "rademacher") return NoiseKind::rademacher;
  if (name == "trinary") return NoiseKind::trinary;
  throw std::invalid_argument("unknown noise kind '" + std::string(name) + "'");
}

Eigen::MatrixXd sample_noise(std::size_t p, std::size_t n, NoiseKind kind, std::uint64_t seed) {
  if (p == 0 || n == 0) throw std::invalid_argument("sample_noise: empty shape");
  Eigen::MatrixXd x(p, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double tri = std::sqrt(3.0) * scale;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < p; ++i) {
      const auto u = uniform_pair(seed, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      double v = 0.0;
      switch (kind) {
        case NoiseKind::gaussian:
          v = std::sqrt(-2.0 * std::log(u[0])) * std::cos(2.0 * std::numbers::pi * u[1]) * scale;
          break;
        case NoiseKind::rademacher:
          v = u[0] < 0.5 ? -scale : scale;
          break;
        case NoiseKind::trinary:
          v = u[0] < 1.0 / 6.0 ? -tri : (u[0] < 2.0 / 6.0 ? tri : 0.0);
          break;
      }
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return x;
}

Eigen::MatrixXd assemble_wt(const Spectrum& spec, const ModelParams& params, const Eigen::MatrixXd& noise) {
  if (static_cast<std::size_t>(noise.rows()) != params.p || static_cast<std::size_t>(noise.cols()) != params.n)
    throw std::invalid_argument("assemble_wt: noise shape does not match (p, n)");
  if (spec.size() != params.p) throw std::invalid_argument("assemble_wt: spectrum size must equal p");
  Eigen::MatrixXd y = std::sqrt(params.t) * noise;
  for (std::size_t i = 0; i < params.p; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    y(k, k) += std::sqrt(spec[i]);
  }
  return y;
}

std::vector<double> singular_values_sq(const Eigen::MatrixXd& y) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(y);
  const auto& s = svd.singularValues();
  std::vector<double> out(static_cast<std::size_t>(s.size()));
  for (Eigen::Index k = 0; k < s.size(); ++k) out[static_cast<std::size_t>(k)] = s(k) * s(k);
  return out;
}

SvdFactors thin_svd(const Eigen::MatrixXd& y) {
  if (y.rows() > y.cols()) throw std::invalid_argument("thin_svd: require p <= n");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

TrialRecord run_trial(const Spectrum& spec, const ModelParams& params, NoiseKind kind,
                      std::uint64_t seed, bool with_vectors) {
  const Eigen::MatrixXd y = assemble_wt(spec, params, sample_noise(params.p, params.n, kind, seed));
  TrialRecord r;
  r.seed = seed;
  if (!with_vectors) {
    r.singular_values_sq = singular_values_sq(y);
    return r;
  }
  SvdFactors f = thin_svd(y);
  r.singular_values_sq.resize(static_cast<std::size_t>(f.sigma.size()));
  for (Eigen::Index k = 0; k < f.sigma.size(); ++k)
    r.singular_values_sq[static_cast<std::size_t>(k)] = f.sigma(k) * f.sigma(k);
  r.left = std::move(f.u);
  r.right = std::move(f.v);
  return r;
}

cplx empirical_stieltjes(const TrialRecord& trial, ComplexPoint z) {
  if (trial.singular_values_sq.empty()) throw std::invalid_argument("empirical_stieltjes: empty trial");
  cplx s = 0.0;
  for (double l : trial.singular_values_sq) s += 1.0 / (l - z.value());
  return s / static_cast<double>(trial.singular_values_sq.size());
}

Eigen::VectorXcd pi_apply(const Spectrum& spec, const ModelParams& params, const ConvolutionPoint& cp,
                          const Eigen::VectorXd& v) {
  const auto p = static_cast<Eigen::Index>(params.p);
  const auto n = static_cast<Eigen::Index>(params.n);
  if (v.size() != p + n) throw std::invalid_argument("pi_apply: vector length must be p + n");
  if (spec.size() != params.p) throw std::invalid_argument("pi_apply: spectrum size must equal p");
  const cplx z = cp.z.value();
  const cplx upper = cp.b;
  const cplx lower = 1.0 + params.t * cp.m_under;
  const cplx inv_sqrt_z = 1.0 / std::sqrt(z);
  Eigen::VectorXcd out(p + n);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double d = spec[static_cast<std::size_t>(i)];
    const cplx r = 1.0 / (cp.zeta - d);
    const cplx off = -inv_sqrt_z * std::sqrt(d) * r;
    out(i) = -upper * r * v(i) + off * v(p + i);
    out(p + i) = off * v(i) - lower * r * v(p + i);
  }
  const cplx r0 = -lower / cp.zeta;
  for (Eigen::Index mu = 2 * p; mu < p + n; ++mu) out(mu) = r0 * v(mu);
  return out;
}

namespace {
void require_unit(const Eigen::VectorXd& v, const char* what) {
  if (std::abs(v.norm() - 1.0) > 1e-8) throw std::invalid_argument(std::string(what) + ": vectors must have unit norm");
}
}  // namespace

cplx pi_quadratic_form(const Spectrum& spec, const ModelParams& params, const ConvolutionPoint& cp,
                       const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  require_unit(u, "pi_quadratic_form");
  require_unit(v, "pi_quadratic_form");
  const Eigen::VectorXcd pv = pi_apply(spec, params, cp, v);
  return u.cast<cplx>().dot(pv);
}

cplx resolvent_quadratic_form(const SvdFactors& svd, ComplexPoint z, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& v) {
  const Eigen::Index p = svd.u.rows();
  const Eigen::Index n = svd.v.rows();
  if (u.size() != p + n || v.size() != p + n)
    throw std::invalid_argument("resolvent_quadratic_form: vector length must be p + n");
  const cplx zz = z.value();
  const Eigen::VectorXd a1 = svd.u.transpose() * u.head(p);
  const Eigen::VectorXd b1 = svd.u.transpose() * v.head(p);
  const Eigen::VectorXd a2 = svd.v.transpose() * u.tail(n);
  const Eigen::VectorXd b2 = svd.v.transpose() * v.tail(n);
  cplx diag = 0.0, off = 0.0;
  for (Eigen::Index k = 0; k < svd.sigma.size(); ++k) {
    const double s = svd.sigma(k);
    const cplx r = 1.0 / (s * s - zz);
    diag += r * (a1(k) * b1(k) + a2(k) * b2(k));
    off += s * r * (a1(k) * b2(k) + a2(k) * b1(k));
  }
  // Directions of R^n orthogonal to the right singular vectors see -1/z.
  const double kernel = u.tail(n).dot(v.tail(n)) - a2.dot(b2);
  return diag + off / std::sqrt(zz) - kernel / zz;
}

cplx resolvent_quadratic_form(const Eigen::MatrixXd& y, ComplexPoint z, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& v) {
  return resolvent_quadratic_form(thin_svd(y), z, u, v);
}

void save_trial(const std::string& stem, const TrialRecord& trial, const ModelParams& params, NoiseKind kind) {
  std::ofstream csv(stem + ".csv");
  if (!csv) throw std::runtime_error("save_trial: cannot write " + stem + ".csv");
  csv << std::setprecision(17);
  for (double l : trial.singular_values_sq) csv << l << '\n';
  nlohmann::json meta = {{"seed", trial.seed}, {"p", params.p}, {"n", params.n}, {"t", params.t},
                         {"kind", std::string(to_string(kind))}};
  std::ofstream js(stem + ".json");
  if (!js) throw std::runtime_error("save_trial: cannot write " + stem + ".json");
  js << meta.dump(2) << '\n';
}

TrialRecord load_trial(const std::string& stem) {
  std::ifstream js(stem + ".json");
  if (!js) throw std::runtime_error("load_trial: cannot read " + stem + ".json");
  const auto meta = nlohmann::json::parse(js);
  TrialRecord r;
  r.seed = meta.at("seed").get<std::uint64_t>();
  std::ifstream csv(stem + ".csv");
  if (!csv) throw std::runtime_error("load_trial: cannot read " + stem + ".csv");
  std::string line;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    r.singular_values_sq.push_back(std::stod(line));
  }
  if (r.singular_values_sq.size() != meta.at("p").get<std::size_t>())
    throw std::runtime_error("load_trial: eigenvalue count does not match p in " + stem + ".json");
  return r;
}

}  // namespace rectconv
