// Numeric kernel of the potential-reliability law: divergence evaluation,
// failure-intensity bounds, relevance scoring, the exact small-system
// operating probability, and the required-coverage solver.
//
// All functions here are pure; they share no mutable state and are safe to
// call from any number of threads.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace relq {

/// Per-element operating/occurrence probabilities. Every value must lie
/// strictly inside (0,1); the list must be non-empty.
class ElementProbabilities {
public:
    explicit ElementProbabilities(std::vector<double> values);

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    double minimum() const noexcept { return min_; }   // p_min over elements
    double maximum() const noexcept { return max_; }   // p_max over elements
    double sum() const noexcept { return sum_; }

    /// mid_probability(minimum(), maximum()); requires maximum() < 0.5.
    double mid() const;

    /// sum()/divisor; the result must land in (0,1).
    double mean(std::uint64_t divisor) const;

private:
    std::vector<double> values_;
    double min_ = 0.0;
    double max_ = 0.0;
    double sum_ = 0.0;
};

/// A system that operates iff more than `operating_degree` of its
/// `total_elements` elements operate.
struct SymmetricSystemSpec {
    std::uint64_t total_elements = 0;
    std::uint64_t operating_degree = 0;

    SymmetricSystemSpec(std::uint64_t total, std::uint64_t degree);

    double coverage() const noexcept {
        return static_cast<double>(operating_degree) / static_cast<double>(total_elements);
    }
};

/// Failure-intensity interval and the reliability interval it induces.
struct BoundsReport {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double reliability_min = 1.0;  // exp(-lambda_max)
    double reliability_max = 1.0;  // exp(-lambda_min)
};

struct LifetimeBounds {
    double lower = 1.0;  // 1 - sum(1 - P_v); may be negative
    double upper = 1.0;  // exp(-sum(1 - P_v))
};

/// Binary KL divergence between Bernoulli(coverage) and Bernoulli(reference).
/// Non-negative, zero iff coverage == reference. Keeps at least 1e-6 relative
/// accuracy even when |coverage - reference| is as small as 1e-8 * reference,
/// where naive evaluation cancels to noise.
/// Throws std::domain_error unless both arguments are strictly inside (0,1).
double bernoulli_kl(double coverage, double reference);

/// Reference probability for the lower intensity bound:
/// p_min / (1 + p_min - p_max). Requires 0 < p_min <= p_max < 0.5.
double mid_probability(double p_min, double p_max);

/// Mean occurrence probability: probs.sum() / divisor. The divisor is the
/// element count in the whole-system reading and the sensitive-site count in
/// the specification-time reading; callers choose.
double mean_probability(const ElementProbabilities& probs, std::uint64_t divisor);

/// Upper failure-intensity bound -ln(1 - exp(-k*n)) with
/// k = kl(coverage, semantic_mean). Returns nullopt while coverage has not
/// passed the semantic mean (the intensity is not yet a decreasing bound
/// there); callers must branch on it. Coverage may sit on the closed
/// interval [0,1]; the boundary divergences use the continuous limits.
std::optional<double> max_failure_intensity(double total_sites, double coverage,
                                            double semantic_mean);

/// Lower failure-intensity bound -ln(1 - exp(-k*n) + big_o_constant) with
/// k = kl(coverage, mid_prob). The big-O-of-ln-n term of the law is exposed
/// as a caller-supplied constant, default 0. Throws std::domain_error when
/// the logarithm argument falls outside (0,1].
double min_failure_intensity(double total_sites, double coverage, double mid_prob,
                             double big_o_constant = 0.0);

/// Both bounds plus the induced reliability interval; nullopt while the
/// upper bound is not growing. A meaningful interval needs
/// mid_prob <= semantic_mean; pass mid_prob == semantic_mean and
/// big_o_constant == 0 to collapse it to a point.
std::optional<BoundsReport> evaluate_bounds(double total_sites, double coverage,
                                            double semantic_mean, double mid_prob,
                                            double big_o_constant = 0.0);

/// R = exp(-lambda), for finite lambda >= 0.
double reliability(double failure_intensity);

/// Content relevance R = 1 - exp(-k*n) with k = kl(coverage, semantic_mean).
/// Exactly zero iff coverage == semantic_mean; coverage may be 0 (discovery
/// floor) or 1.
double relevance(double total_queries, double coverage, double semantic_mean);

/// P(more than `degree` elements operate) for independent, non-identical
/// elements: the Poisson-binomial upper tail, computed by dynamic
/// programming over the count distribution. Handles sizes up to ~1e4.
double operating_probability(const ElementProbabilities& probs, std::uint64_t degree);

/// Same tail by full 2^n state enumeration. Kept as an independent
/// cross-check of the dynamic program; refuses sizes above 24.
double operating_probability_bruteforce(const ElementProbabilities& probs,
                                        std::uint64_t degree);

/// Product of per-instant operating probabilities (empty product = 1).
/// Entries must lie in [0,1].
double lifetime_reliability(std::span<const double> instant_probabilities);

/// The sandwich 1 - sum(1-P) <= product(P) <= exp(-sum(1-P)).
LifetimeBounds lifetime_bounds(std::span<const double> instant_probabilities);

/// Minimal integer count s such that max_failure_intensity(n, s/n,
/// semantic_mean) is finite and at most lambda_target; nullopt when even
/// s == n misses the target. Binary search over the integer counts; exact
/// for any n representable in 64 bits.
std::optional<std::uint64_t> required_tests(std::uint64_t total_sites,
                                            double semantic_mean,
                                            double lambda_target);

}  // namespace relq
