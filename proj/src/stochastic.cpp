#include "platoon/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "parallel.hpp"
#include "platoon/error.hpp"
#include "platoon/philox.hpp"

namespace platoon {

void validate(std::span<const double> values, std::span<const double> probs) {
  if (values.empty()) throw DistributionError("decel support is empty");
  if (values.size() != probs.size()) {
    std::ostringstream os;
    os << "decel values/probs length mismatch (" << values.size() << " vs "
       << probs.size() << ")";
    throw DistributionError(os.str());
  }
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!(values[j] > 0.0) || !std::isfinite(values[j])) {
      std::ostringstream os;
      os << "decel value[" << j << "] = " << values[j]
         << " must be a positive finite deceleration";
      throw DistributionError(os.str());
    }
    if (j > 0 && !(values[j] > values[j - 1])) {
      std::ostringstream os;
      os << "decel support not strictly increasing at index " << j << " ("
         << values[j - 1] << " then " << values[j] << ")";
      throw DistributionError(os.str());
    }
    if (!(probs[j] >= 0.0) || !std::isfinite(probs[j])) {
      std::ostringstream os;
      os << "decel prob[" << j << "] = " << probs[j] << " is negative";
      throw DistributionError(os.str());
    }
  }
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "decel probs sum to " << sum << ", not 1";
    throw DistributionError(os.str());
  }
}

DecelDistribution::DecelDistribution(std::vector<double> values,
                                     std::vector<double> weights)
    : values_(std::move(values)), weights_(std::move(weights)) {
  total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  probs_.resize(weights_.size());
  for (std::size_t j = 0; j < weights_.size(); ++j)
    probs_[j] = weights_[j] / total_;
  cdf_.resize(probs_.size());
  std::partial_sum(probs_.begin(), probs_.end(), cdf_.begin());
}

DecelDistribution DecelDistribution::from_probs(std::vector<double> values,
                                                std::vector<double> probs) {
  validate(values, probs);
  return DecelDistribution(std::move(values), std::move(probs));
}

DecelDistribution DecelDistribution::from_weights(std::vector<double> values,
                                                  std::vector<double> weights) {
  if (values.size() != weights.size())
    throw DistributionError("decel values/weights length mismatch");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw DistributionError("decel weights must be nonnegative and finite");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw DistributionError("decel weights sum to zero");
  DecelDistribution d(std::move(values), std::move(weights));
  validate(d.values_, d.probs_);
  return d;
}

DecelDistribution DecelDistribution::uniform(std::vector<double> values) {
  std::vector<double> w(values.size(), 1.0);
  return from_weights(std::move(values), std::move(w));
}

DecelDistribution DecelDistribution::standin(std::vector<double> values) {
  // Flat plateau with the two extreme capabilities at 4/5 weight.
  const std::size_t m = values.size();
  std::vector<double> w(m, 5.0);
  if (m >= 3) w.front() = w.back() = 4.0;
  return from_weights(std::move(values), std::move(w));
}

std::vector<double> DecelDistribution::arithmetic_support(double lower,
                                                          double upper,
                                                          std::size_t count) {
  if (count == 0) throw DistributionError("support count must be >= 1");
  if (count == 1) return {lower};
  std::vector<double> v(count);
  const double step = (upper - lower) / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) v[j] = lower + step * j;
  v.back() = upper;
  return v;
}

std::vector<double> DecelDistribution::default_support() {
  return arithmetic_support(4.75, 9.75, 11);
}

double DecelDistribution::prob_of(double value) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), value);
  if (it == values_.end() || *it != value) return 0.0;
  return probs_[static_cast<std::size_t>(it - values_.begin())];
}

bool DecelDistribution::contains(double value) const {
  return std::binary_search(values_.begin(), values_.end(), value);
}

std::size_t DecelDistribution::inverse_cdf_index(double u) const {
  if (!(u >= 0.0 && u < 1.0)) {
    std::ostringstream os;
    os << "uniform variate " << u << " outside [0, 1)";
    throw DistributionError(os.str());
  }
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it != cdf_.end()) return static_cast<std::size_t>(it - cdf_.begin());
  // Rounding left the final cumulative sum at or below u.
  std::size_t j = weights_.size() - 1;
  while (j > 0 && weights_[j] == 0.0) --j;
  return j;
}

double DecelDistribution::inverse_cdf(double u) const {
  return values_[inverse_cdf_index(u)];
}

DecelMatrix generate_matrix(const DecelDistribution& dist, std::size_t n,
                            std::size_t followers, std::uint64_t seed,
                            std::uint32_t stream, int threads) {
  DecelMatrix m(n, followers, seed, stream);
  const int nthreads = detail::team_size(threads);
  const auto rows = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(nthreads) if (nthreads != 1)
  for (long long i = 0; i < rows; ++i) {
    for (std::size_t l = 0; l < followers; ++l) {
      const double u = uniform_at(seed, stream, static_cast<std::uint64_t>(i),
                                  static_cast<std::uint32_t>(l));
      m.at(static_cast<std::size_t>(i), l) = dist.inverse_cdf(u);
    }
  }
  return m;
}

AvoidanceProbability no_coord_avoidance_prob(const DecelDistribution& dist,
                                             std::size_t chain_length) {
  const std::size_t k = chain_length + 1;
  const std::size_t m = dist.size();
  AvoidanceProbability out;
  if (k > m) return out;

  // Strictly increasing k-tuples are the k-subsets of the support, so the
  // probability is the elementary symmetric polynomial e_k of the weights
  // divided by total^k.
  const auto w = dist.weights();
  std::vector<long double> e(k + 1, 0.0L);
  e[0] = 1.0L;
  for (double wj : w) {
    for (std::size_t j = k; j >= 1; --j) e[j] += e[j - 1] * wj;
  }
  long double scale = 1.0L;
  const long double total = dist.total_weight();
  for (std::size_t j = 0; j < k; ++j) scale *= total;

  long double single = 1.0L;
  for (std::size_t j = 0; j < k; ++j) single *= w[j];

  out.exact = static_cast<double>(e[k] / scale);
  out.single_assignment = static_cast<double>(single / scale);
  return out;
}

}  // namespace platoon
