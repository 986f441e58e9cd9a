#include "bregman/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bregman/errors.hpp"

namespace bregman {

std::uint64_t Rng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng Rng::substream(std::string_view name) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Rng(mix(key_ ^ mix(h)), 0);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = 1.0 - uniform();  // (0, 1]
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> PiecewisePairSpec::edges() const {
  std::vector<double> e;
  e.reserve(breakpoints.size() + 2);
  e.push_back(lo);
  e.insert(e.end(), breakpoints.begin(), breakpoints.end());
  e.push_back(hi);
  return e;
}

std::size_t PiecewisePairSpec::piece(double x) const {
  if (!(x >= lo && x <= hi)) throw UsageError("piecewise pair: x outside the interval");
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return static_cast<std::size_t>(it - breakpoints.begin());
}

void PiecewisePairSpec::validate() const {
  if (!(lo < hi)) throw UsageError("piecewise pair: empty interval");
  std::vector<double> e = edges();
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    if (!(e[i] < e[i + 1])) throw UsageError("piecewise pair: breakpoints must be sorted inside the interval");
  }
  std::size_t n = e.size() - 1;
  if (p_levels.size() != n || q_levels.size() != n) {
    throw UsageError("piecewise pair: need one level per piece");
  }
  double mp = 0.0, mq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(p_levels[i] >= 0.0)) throw UsageError("piecewise pair: negative P level");
    if (!(q_levels[i] > 0.0)) throw UsageError("piecewise pair: Q levels must be positive");
    mp += p_levels[i] * (e[i + 1] - e[i]);
    mq += q_levels[i] * (e[i + 1] - e[i]);
  }
  if (std::abs(mp - 1.0) > 1e-12 || std::abs(mq - 1.0) > 1e-12) {
    throw UsageError("piecewise pair: densities must integrate to one");
  }
}

PiecewisePairSpec PiecewisePairSpec::normalized(double lo, double hi,
                                                std::vector<double> breakpoints,
                                                std::vector<double> p_raw,
                                                std::vector<double> q_raw) {
  PiecewisePairSpec s;
  s.lo = lo;
  s.hi = hi;
  s.breakpoints = std::move(breakpoints);
  std::vector<double> e = s.edges();
  if (p_raw.size() + 1 != e.size() || q_raw.size() + 1 != e.size()) {
    throw UsageError("piecewise pair: need one level per piece");
  }
  double mp = 0.0, mq = 0.0;
  for (std::size_t i = 0; i < p_raw.size(); ++i) {
    mp += p_raw[i] * (e[i + 1] - e[i]);
    mq += q_raw[i] * (e[i + 1] - e[i]);
  }
  if (!(mp > 0.0) || !(mq > 0.0)) throw UsageError("piecewise pair: zero total mass");
  for (double& v : p_raw) v /= mp;
  for (double& v : q_raw) v /= mq;
  s.p_levels = std::move(p_raw);
  s.q_levels = std::move(q_raw);
  s.validate();
  return s;
}

PiecewisePairSpec default_piecewise_pair() {
  return PiecewisePairSpec::normalized(-1.0, 1.0, {-0.9, -0.5, 0.5, 0.9},
                                       {8.0, 0.3, 0.05, 0.3, 9.0}, {1.0, 1.0, 1.0, 1.0, 1.0});
}

double piecewise_beta(const PiecewisePairSpec& spec, double x) {
  std::size_t i = spec.piece(x);
  return spec.p_levels[i] / spec.q_levels[i];
}

double piecewise_density(const PiecewisePairSpec& spec, Which which, double x) {
  std::size_t i = spec.piece(x);
  return which == Which::P ? spec.p_levels[i] : spec.q_levels[i];
}

std::vector<double> sample_piecewise(const PiecewisePairSpec& spec, Which which, int n, Rng& rng) {
  if (n < 1) throw UsageError("sample_piecewise: n must be positive");
  const std::vector<double>& lv = which == Which::P ? spec.p_levels : spec.q_levels;
  std::vector<double> e = spec.edges();
  std::vector<double> cdf(lv.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    acc += lv[i] * (e[i + 1] - e[i]);
    cdf[i] = acc;
  }
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) {
    double u = rng.uniform() * acc;
    std::size_t i = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    i = std::min(i, lv.size() - 1);
    while (lv[i] == 0.0 && i + 1 < lv.size()) ++i;
    double start = i == 0 ? 0.0 : cdf[i - 1];
    double frac = (u - start) / (lv[i] * (e[i + 1] - e[i]));
    out[k] = e[i] + std::clamp(frac, 0.0, 1.0) * (e[i + 1] - e[i]);
  }
  return out;
}

void GaussianPair::validate() const {
  if (!(sigma_p > 0.0) || !(sigma_q > 0.0)) throw UsageError("gaussian pair: sigmas must be positive");
}

double GaussianPair::density(Which which, double x) const {
  double mu = which == Which::P ? mu_p : mu_q;
  double s = which == Which::P ? sigma_p : sigma_q;
  double z = (x - mu) / s;
  return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
}

double GaussianPair::beta(double x) const {
  double zp = (x - mu_p) / sigma_p, zq = (x - mu_q) / sigma_q;
  return (sigma_q / sigma_p) * std::exp(-0.5 * zp * zp + 0.5 * zq * zq);
}

std::vector<double> GaussianPair::sample(Which which, int n, Rng& rng) const {
  if (n < 1) throw UsageError("gaussian pair: n must be positive");
  double mu = which == Which::P ? mu_p : mu_q;
  double s = which == Which::P ? sigma_p : sigma_q;
  std::vector<double> out(n);
  for (double& v : out) v = mu + s * rng.normal();
  return out;
}

GaussianPair gaussian_pair(double mu_p, double sigma_p, double mu_q, double sigma_q) {
  GaussianPair g{mu_p, sigma_p, mu_q, sigma_q};
  g.validate();
  return g;
}

double regression_target(double x) { return std::sin(3.0 * x * x * x * x); }

RegressionTask regression_task(const PiecewisePairSpec& spec, int n_src, int n_tgt,
                               double noise_sigma, const Rng& rng) {
  if (n_src < 1 || n_tgt < 1) throw UsageError("regression_task: counts must be positive");
  if (!(noise_sigma >= 0.0)) throw UsageError("regression_task: negative noise");
  Rng src = rng.substream("source");
  Rng noise = rng.substream("noise");
  Rng tgt = rng.substream("target");
  RegressionTask t;
  t.src_xs = sample_piecewise(spec, Which::Q, n_src, src);
  t.src_ys.resize(n_src);
  for (int i = 0; i < n_src; ++i) {
    t.src_ys[i] = regression_target(t.src_xs[i]);
    if (noise_sigma > 0.0) t.src_ys[i] += noise_sigma * noise.normal();
  }
  t.tgt_xs = sample_piecewise(spec, Which::P, n_tgt, tgt);
  return t;
}

}  // namespace bregman
