#pragma once

// Discrete maximum-deceleration model and reproducible capability draws.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace platoon {

// Throws DistributionError naming the first violated invariant: nonempty,
// equal lengths, strictly increasing positive support, nonnegative
// probabilities summing to 1 within 1e-12.
void validate(std::span<const double> values, std::span<const double> probs);

// Finite pmf over maximum decelerations (m/s^2). Probabilities are kept as
// the caller's nonnegative weights plus their total, so integer weights
// survive exactly into the combinatorial formulas.
class DecelDistribution {
 public:
  static DecelDistribution from_probs(std::vector<double> values,
                                      std::vector<double> probs);
  static DecelDistribution from_weights(std::vector<double> values,
                                        std::vector<double> weights);
  static DecelDistribution uniform(std::vector<double> values);
  // Symmetric, weakly unimodal stand-in for the published (but numerically
  // illegible) capability histogram. Not authoritative.
  static DecelDistribution standin(std::vector<double> values);

  // lower, lower + step, ..., upper with `count` points.
  static std::vector<double> arithmetic_support(double lower, double upper,
                                                std::size_t count);
  // 4.75, 5.25, ..., 9.75 m/s^2.
  static std::vector<double> default_support();

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<const double> probs() const { return probs_; }
  std::span<const double> weights() const { return weights_; }
  double total_weight() const { return total_; }
  double lower() const { return values_.front(); }
  double upper() const { return values_.back(); }

  double prob_of(double value) const;
  bool contains(double value) const;

  // Smallest support value whose cumulative probability exceeds u.
  // Throws DistributionError unless 0 <= u < 1.
  double inverse_cdf(double u) const;
  std::size_t inverse_cdf_index(double u) const;

  bool operator==(const DecelDistribution& o) const {
    return values_ == o.values_ && probs_ == o.probs_;
  }

 private:
  DecelDistribution(std::vector<double> values, std::vector<double> weights);

  std::vector<double> values_;
  std::vector<double> weights_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  double total_ = 0.0;
};

// n x N matrix of follower capabilities; row = iteration, column = follower.
class DecelMatrix {
 public:
  DecelMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
              std::uint32_t stream)
      : rows_(rows), cols_(cols), seed_(seed), stream_(stream),
        data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t seed() const { return seed_; }
  std::uint32_t stream() const { return stream_; }

  double& at(std::size_t i, std::size_t l) { return data_[i * cols_ + l]; }
  double at(std::size_t i, std::size_t l) const {
    return data_[i * cols_ + l];
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_, cols_;
  std::uint64_t seed_;
  std::uint32_t stream_;
  std::vector<double> data_;
};

// Entry (i, l) = inverse_cdf(uniform_at(seed, stream, i, l)). Filled in
// parallel; the result does not depend on the thread count.
DecelMatrix generate_matrix(const DecelDistribution& dist, std::size_t n,
                            std::size_t followers, std::uint64_t seed,
                            std::uint32_t stream = 0, int threads = 0);

struct AvoidanceProbability {
  // P{k i.i.d. draws are strictly increasing}, k = chain_length + 1.
  double exact = 0.0;
  // prod_{j=1..k} p_j: probability of the single assignment
  // D_{j-1} = value_j, which is the closed form quoted for the baseline.
  double single_assignment = 0.0;
};

AvoidanceProbability no_coord_avoidance_prob(const DecelDistribution& dist,
                                             std::size_t chain_length);

}  // namespace platoon
