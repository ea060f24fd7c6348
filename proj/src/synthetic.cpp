#include "tl1mc/synthetic.hpp"

#include "tl1mc/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace tl1mc {

Scheme scheme_from_int(int s)
{
    if (s < 1 || s > 3) {
        throw InvalidArgument("scheme must be 1, 2 or 3 (got " + std::to_string(s) + ")");
    }
    return static_cast<Scheme>(s);
}

void ScenarioSpec::validate() const
{
    if (m1 <= 0 || m2 <= 0) {
        throw InvalidArgument("scenario: dimensions must be positive");
    }
    if (rank <= 0 || rank > std::min(m1, m2)) {
        throw InvalidArgument("scenario: rank must lie in [1, min(m1, m2)]");
    }
    if (!(sampling_ratio > 0.0 && sampling_ratio <= 1.0)) {
        throw InvalidArgument("scenario: sampling ratio must lie in (0, 1]");
    }
    if (snr_db && !std::isfinite(*snr_db)) {
        throw InvalidArgument("scenario: SNR must be finite");
    }
    if (scheme != Scheme::S1 && (m1 < 10 || m2 < 10)) {
        throw InvalidArgument("scenario: schemes 2 and 3 need m1, m2 >= 10");
    }
    if (sample_count() < 1) {
        throw InvalidArgument("scenario: sampling ratio yields no observations");
    }
}

std::size_t ScenarioSpec::sample_count() const
{
    return static_cast<std::size_t>(std::llround(sampling_ratio * static_cast<double>(m1) * static_cast<double>(m2)));
}

std::uint64_t derive_seed(std::uint64_t seed, Stream stream)
{
    // splitmix64 finalizer over (seed, stream)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(stream) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

DenseMatrix ground_truth_from_factors(const DenseMatrix& u, const DenseMatrix& v)
{
    if (u.cols() != v.cols()) {
        throw InvalidArgument("ground truth: factor ranks differ");
    }
    return u * v.transpose();
}

DenseMatrix generate_ground_truth(const ScenarioSpec& spec)
{
    spec.validate();
    std::mt19937_64 rng(derive_seed(spec.seed, Stream::Truth));
    std::normal_distribution<double> normal(0.0, 1.0);
    DenseMatrix u(spec.m1, spec.rank);
    DenseMatrix v(spec.m2, spec.rank);
    for (Index i = 0; i < u.size(); ++i) {
        u.data()[i] = normal(rng);
    }
    for (Index i = 0; i < v.size(); ++i) {
        v.data()[i] = normal(rng);
    }
    return ground_truth_from_factors(u, v);
}

std::vector<double> scheme_marginals(Index m, Scheme scheme)
{
    if (m <= 0) {
        throw InvalidArgument("scheme_marginals: m must be positive");
    }
    const auto size = static_cast<std::size_t>(m);
    if (scheme == Scheme::S1) {
        return std::vector<double>(size, 1.0 / static_cast<double>(m));
    }
    if (m < 10) {
        throw InvalidArgument("scheme_marginals: schemes 2 and 3 need m >= 10");
    }
    const double first = scheme == Scheme::S2 ? 2.0 : 3.0;
    const double second = scheme == Scheme::S2 ? 4.0 : 9.0;
    const auto b1 = static_cast<std::size_t>(m / 10);
    const auto b2 = static_cast<std::size_t>(m / 5);
    std::vector<double> shares(size, 1.0);
    for (std::size_t k = 0; k < b1; ++k) {
        shares[k] = first;
    }
    for (std::size_t k = b1; k < b2; ++k) {
        shares[k] = second;
    }
    // p0 = 1 / total shares
    const double total = first * static_cast<double>(b1) + second * static_cast<double>(b2 - b1) +
                         static_cast<double>(size - b2);
    for (auto& s : shares) {
        s /= total;
    }
    return shares;
}

SamplingDistribution sampling_distribution(const ScenarioSpec& spec)
{
    spec.validate();
    return SamplingDistribution(scheme_marginals(spec.m1, spec.scheme), scheme_marginals(spec.m2, spec.scheme));
}

namespace {

// Fenwick tree over non-negative weights supporting removal and
// inverse-CDF lookup in O(log N).
class WeightTree {
  public:
    explicit WeightTree(const std::vector<double>& weights) : tree_(weights.size() + 1, 0.0), weights_(weights)
    {
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const std::size_t j = i + 1;
            tree_[j] += weights[i];
            const std::size_t parent = j + (j & (~j + 1));
            if (parent < tree_.size()) {
                tree_[parent] += tree_[j];
            }
        }
        step_ = 1;
        while (step_ * 2 <= weights.size()) {
            step_ *= 2;
        }
    }

    double total() const
    {
        double s = 0.0;
        for (std::size_t j = weights_.size(); j > 0; j -= j & (~j + 1)) {
            s += tree_[j];
        }
        return s;
    }

    // Smallest index whose inclusive prefix sum exceeds target.
    std::size_t find(double target) const
    {
        std::size_t pos = 0;
        for (std::size_t step = step_; step > 0; step /= 2) {
            const std::size_t next = pos + step;
            if (next < tree_.size() && tree_[next] <= target) {
                target -= tree_[next];
                pos = next;
            }
        }
        return pos;  // 0-based index of the element
    }

    double weight(std::size_t i) const { return weights_[i]; }

    void remove(std::size_t i)
    {
        const double w = weights_[i];
        weights_[i] = 0.0;
        for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) {
            tree_[j] -= w;
        }
    }

  private:
    std::vector<double> tree_;
    std::vector<double> weights_;
    std::size_t step_ = 1;
};

} // namespace

std::vector<IndexPair> sample_without_replacement(const SamplingDistribution& dist, std::size_t n,
                                                  std::mt19937_64& rng)
{
    const auto rows = dist.row_probs().size();
    const auto cols = dist.col_probs().size();
    const std::size_t total = rows * cols;
    if (n > total) {
        throw InvalidArgument("sample_mask: more samples requested than entries");
    }
    std::vector<double> weights(total);
    std::size_t positive = 0;
    for (std::size_t k = 0; k < rows; ++k) {
        for (std::size_t l = 0; l < cols; ++l) {
            weights[k * cols + l] = dist.row_probs()[k] * dist.col_probs()[l];
            positive += weights[k * cols + l] > 0.0 ? 1 : 0;
        }
    }
    if (n > positive) {
        throw InvalidArgument("sample_mask: not enough entries with positive probability");
    }
    WeightTree tree(weights);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<IndexPair> out;
    out.reserve(n);
    for (std::size_t drawn = 0; drawn < n; ++drawn) {
        std::size_t idx = tree.find(unit(rng) * tree.total());
        // Rounding can land on a removed slot or run off the end; take the
        // nearest remaining entry.
        if (idx >= total || tree.weight(idx) <= 0.0) {
            std::size_t probe = std::min(idx, total - 1);
            while (probe > 0 && tree.weight(probe) <= 0.0) {
                --probe;
            }
            while (tree.weight(probe) <= 0.0) {
                ++probe;
            }
            idx = probe;
        }
        tree.remove(idx);
        out.push_back({static_cast<Index>(idx / cols), static_cast<Index>(idx % cols)});
    }
    return out;
}

std::vector<IndexPair> sample_mask(const ScenarioSpec& spec, const SamplingDistribution& dist)
{
    spec.validate();
    if (static_cast<Index>(dist.row_probs().size()) != spec.m1 ||
        static_cast<Index>(dist.col_probs().size()) != spec.m2) {
        throw InvalidArgument("sample_mask: distribution does not match scenario dimensions");
    }
    std::mt19937_64 rng(derive_seed(spec.seed, Stream::Mask));
    return sample_without_replacement(dist, spec.sample_count(), rng);
}

double noise_sigma(const DenseMatrix& truth, const std::vector<IndexPair>& indices, double snr_db)
{
    if (indices.empty()) {
        throw InvalidArgument("noise_sigma: no observed indices");
    }
    double energy = 0.0;
    for (const auto& p : indices) {
        const double v = truth(p.row, p.col);
        energy += v * v;
    }
    if (energy == 0.0) {
        throw InvalidArgument("noise_sigma: observed signal is identically zero, SNR undefined");
    }
    return std::sqrt(energy / (static_cast<double>(indices.size()) * std::pow(10.0, snr_db / 10.0)));
}

ObservationSet apply_noise(const DenseMatrix& truth, const std::vector<IndexPair>& indices,
                           std::optional<double> snr_db, std::uint64_t seed)
{
    if (indices.empty()) {
        throw InvalidArgument("apply_noise: no observed indices");
    }
    const double sigma = snr_db ? noise_sigma(truth, indices, *snr_db) : 0.0;
    std::mt19937_64 rng(derive_seed(seed, Stream::Noise));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Entry> samples;
    samples.reserve(indices.size());
    for (const auto& p : indices) {
        if (p.row < 0 || p.row >= truth.rows() || p.col < 0 || p.col >= truth.cols()) {
            throw InvalidArgument("apply_noise: index out of bounds");
        }
        double value = truth(p.row, p.col);
        if (sigma > 0.0) {
            value += sigma * normal(rng);
        }
        samples.push_back({p.row, p.col, value});
    }
    return ObservationSet(truth.rows(), truth.cols(), std::move(samples));
}

SyntheticInstance make_instance(const ScenarioSpec& spec)
{
    spec.validate();
    DenseMatrix truth = generate_ground_truth(spec);
    const auto indices = sample_mask(spec, sampling_distribution(spec));
    const double sigma = spec.snr_db ? noise_sigma(truth, indices, *spec.snr_db) : 0.0;
    ObservationSet obs = apply_noise(truth, indices, spec.snr_db, spec.seed);
    return {std::move(truth), std::move(obs), sigma};
}

} // namespace tl1mc
