#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace bregman {

// Counter-based generator: the i-th draw is a keyed hash of i, so a stream
// is fully determined by (seed, substream names, draw index).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  // Independent stream keyed by this stream's key and a name.
  Rng substream(std::string_view name) const;

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
  double uniform();  // [0, 1) with 53 random bits
  double normal();   // Box-Muller, one variate per call
  std::uint64_t key() const { return key_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  Rng(std::uint64_t key, int) : key_(key) {}
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Piecewise-constant densities on [lo, hi]. breakpoints are the interior
// boundaries; piece i is [edge_i, edge_{i+1}) with the last piece closed.
struct PiecewisePairSpec {
  double lo = -1.0;
  double hi = 1.0;
  std::vector<double> breakpoints;
  std::vector<double> p_levels;
  std::vector<double> q_levels;

  std::vector<double> edges() const;
  std::size_t piece(double x) const;
  void validate() const;

  // Rescales raw nonnegative levels to densities.
  static PiecewisePairSpec normalized(double lo, double hi, std::vector<double> breakpoints,
                                      std::vector<double> p_raw, std::vector<double> q_raw);
};

// Five pieces on [-1, 1], uniform Q, ratio levels proportional to
// (8, 0.3, 0.05, 0.3, 9): large values at both ends, the largest on [0.9, 1].
PiecewisePairSpec default_piecewise_pair();

enum class Which { P, Q };

double piecewise_beta(const PiecewisePairSpec& spec, double x);
double piecewise_density(const PiecewisePairSpec& spec, Which which, double x);
std::vector<double> sample_piecewise(const PiecewisePairSpec& spec, Which which, int n, Rng& rng);

struct GaussianPair {
  double mu_p = 1.0, sigma_p = 0.5, mu_q = 0.0, sigma_q = 1.0;

  void validate() const;
  double density(Which which, double x) const;
  double beta(double x) const;
  std::vector<double> sample(Which which, int n, Rng& rng) const;
};

GaussianPair gaussian_pair(double mu_p, double sigma_p, double mu_q, double sigma_q);

double regression_target(double x);  // sin(3 x^4)

struct RegressionTask {
  std::vector<double> src_xs, src_ys, tgt_xs;
};

// Source points from Q with noisy labels, unlabeled target points from P.
RegressionTask regression_task(const PiecewisePairSpec& spec, int n_src, int n_tgt,
                               double noise_sigma, const Rng& rng);

}  // namespace bregman
