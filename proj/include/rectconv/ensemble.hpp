#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rectconv/freeconv.hpp"

namespace rectconv {

/// Entry law of the noise matrix; all have mean 0 and variance 1/n.
enum class NoiseKind { gaussian, rademacher, trinary };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

/// i.i.d. p x n noise. gaussian: N(0, 1/n); rademacher: +-n^{-1/2};
/// trinary: {-sqrt(3/n), 0, sqrt(3/n)} with probabilities {1/6, 2/3, 1/6}.
/// Entry (i, j) is a function of (seed, i, j) only.
Eigen::MatrixXd sample_noise(std::size_t p, std::size_t n, NoiseKind kind, std::uint64_t seed);

/// W + sqrt(t) X with W the p x n rectangular diagonal, W_ii = sqrt(d_i).
Eigen::MatrixXd assemble_wt(const Spectrum& spec, const ModelParams& params,
                            const Eigen::MatrixXd& noise);

/// Eigenvalues of Y Y^T in decreasing order, as squared singular values of Y.
std::vector<double> singular_values_sq(const Eigen::MatrixXd& y);

/// Thin SVD of a p x n matrix (p <= n), singular values descending.
struct SvdFactors {
  Eigen::VectorXd sigma;  // length p
  Eigen::MatrixXd u;      // p x p
  Eigen::MatrixXd v;      // n x p
};
SvdFactors thin_svd(const Eigen::MatrixXd& y);

/// One Monte-Carlo draw of the eigenvalues lambda_1 >= ... >= lambda_p of Q_t.
struct TrialRecord {
  std::uint64_t seed = 0;
  std::vector<double> singular_values_sq;
  std::optional<Eigen::MatrixXd> left;   // p x p, columns xi_k
  std::optional<Eigen::MatrixXd> right;  // n x p, columns zeta_k
};

/// Sample noise, assemble W_t and decompose. Vectors only when requested.
TrialRecord run_trial(const Spectrum& spec, const ModelParams& params, NoiseKind kind,
                      std::uint64_t seed, bool with_vectors = false);

/// (1/p) sum_k 1 / (lambda_k - z).
cplx empirical_stieltjes(const TrialRecord& trial, ComplexPoint z);

/// Pi(z) v for the diagonal signal W, evaluated through its 2x2 block
/// structure in O(p + n). Vectors have length p + n.
Eigen::VectorXcd pi_apply(const Spectrum& spec, const ModelParams& params,
                          const ConvolutionPoint& cp, const Eigen::VectorXd& v);

/// u^T Pi(z) v. u and v must be unit vectors (tolerance 1e-8).
cplx pi_quadratic_form(const Spectrum& spec, const ModelParams& params,
                       const ConvolutionPoint& cp, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& v);

/// u^T G(z) v with G = (z^{1/2} H - z)^{-1}, H the linearization of Y, from
/// the SVD of Y without forming the (p+n)^2 inverse.
cplx resolvent_quadratic_form(const SvdFactors& svd, ComplexPoint z, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& v);
cplx resolvent_quadratic_form(const Eigen::MatrixXd& y, ComplexPoint z,
                              const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Persist a trial as <stem>.csv (one eigenvalue per line) and <stem>.json
/// ({"seed", "p", "n", "t", "kind"}).
void save_trial(const std::string& stem, const TrialRecord& trial, const ModelParams& params,
                NoiseKind kind);
TrialRecord load_trial(const std::string& stem);

}  // namespace rectconv
