#pragma once

#include "tl1mc/core.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace tl1mc {

/// Row/column sampling schemes. S1 is uniform; S2 and S3 up-weight the
/// first fifth of the indices with piecewise-constant shares.
enum class Scheme { S1 = 1, S2 = 2, S3 = 3 };

Scheme scheme_from_int(int s);

struct ScenarioSpec {
    Index m1 = 100;
    Index m2 = 100;
    Index rank = 5;
    Scheme scheme = Scheme::S1;
    double sampling_ratio = 0.1;
    std::optional<double> snr_db;  // absent: noiseless
    std::uint64_t seed = 0;

    void validate() const;
    /// n = round(SR * m1 * m2)
    std::size_t sample_count() const;
};

/// Independent RNG streams derived from one scenario seed.
enum class Stream : std::uint64_t { Truth = 1, Mask = 2, Noise = 3, Split = 4 };

std::uint64_t derive_seed(std::uint64_t seed, Stream stream);

/// A0 = U V^T.
DenseMatrix ground_truth_from_factors(const DenseMatrix& u, const DenseMatrix& v);

/// A0 = U V^T with U (m1 x r) and V (m2 x r) filled with i.i.d. N(0,1)
/// draws, U first then V, each column-major.
DenseMatrix generate_ground_truth(const ScenarioSpec& spec);

/// Marginal probabilities for one axis of length m.
std::vector<double> scheme_marginals(Index m, Scheme scheme);

SamplingDistribution sampling_distribution(const ScenarioSpec& spec);

/// n distinct index pairs drawn sequentially from pi_kl with removal.
std::vector<IndexPair> sample_mask(const ScenarioSpec& spec, const SamplingDistribution& dist);

/// Same, with an explicit count and generator.
std::vector<IndexPair> sample_without_replacement(const SamplingDistribution& dist, std::size_t n,
                                                  std::mt19937_64& rng);

/// Noise standard deviation for the realized observed signal:
/// sigma^2 = sum_i A0_i^2 / (n 10^(snr/10)).
double noise_sigma(const DenseMatrix& truth, const std::vector<IndexPair>& indices, double snr_db);

/// Y_i = A0(k_i, l_i) + sigma xi_i at the given indices only.
ObservationSet apply_noise(const DenseMatrix& truth, const std::vector<IndexPair>& indices,
                           std::optional<double> snr_db, std::uint64_t seed);

struct SyntheticInstance {
    DenseMatrix truth;
    ObservationSet obs;
    double sigma = 0.0;
};

/// Ground truth, mask and noise for a scenario, each from its own stream.
SyntheticInstance make_instance(const ScenarioSpec& spec);

} // namespace tl1mc
