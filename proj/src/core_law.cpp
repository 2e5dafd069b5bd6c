#include "relq/core_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace relq {

namespace {

constexpr double kLnTwo = 0.6931471805599453;

bool is_probability_open(double x) {
    return std::isfinite(x) && x > 0.0 && x < 1.0;
}

bool is_probability_closed(double x) {
    return std::isfinite(x) && x >= 0.0 && x <= 1.0;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw std::domain_error(message);
}

// Bernoulli KL divergence with the coverage argument allowed on the closed
// interval [0,1] (the c -> 0 and c -> 1 limits of c*ln(c/p)).
//
// Near c == p the two log terms are each O(c-p) and cancel to O((c-p)^2);
// direct double evaluation is noise once |c-p| ~ 1e-8 * p. Inside
// |c/p - 1| < 1e-4 (and |c-p| < 1e-4 * (1-p), so the expansion stays valid
// when p is near 1) the quadratic term with its cubic correction carries
// relative error below ~2e-9, and c - p is exact there. Outside, the log
// terms go through log1p whenever the corresponding ratio is within a
// factor of two of 1.
double kl_closed(double c, double p) {
    if (c == p) return 0.0;
    if (c <= 0.0) return -std::log1p(-p);
    if (c >= 1.0) return -std::log(p);

    const double diff = c - p;
    const double q = 1.0 - p;
    if (std::abs(diff) < 1e-4 * p && std::abs(diff) < 1e-4 * q) {
        const double quad = diff * diff / (2.0 * p * q);
        const double cubic = diff * diff * diff * (2.0 * p - 1.0) / (6.0 * p * p * q * q);
        return std::max(0.0, quad + cubic);
    }

    const double ratio = c / p;
    const double first =
        (ratio > 0.5 && ratio < 2.0) ? c * std::log1p(diff / p) : c * std::log(ratio);

    const double x = -diff / q;  // (1-c)/(1-p) = 1 + x
    const double second =
        (x > -0.5 && x < 1.0) ? (1.0 - c) * std::log1p(x)
                              : (1.0 - c) * std::log((1.0 - c) / q);

    return std::max(0.0, first + second);
}

// -ln(1 - exp(-kn)) for kn > 0, accurate on both ends: expm1 keeps the small
// kn regime (argument near 0), log1p keeps the large-kn regime (argument
// near 1).
double intensity_from_exponent(double kn) {
    if (kn >= kLnTwo) return -std::log1p(-std::exp(-kn));
    return -std::log(-std::expm1(-kn));
}

}  // namespace

ElementProbabilities::ElementProbabilities(std::vector<double> values)
    : values_(std::move(values)) {
    require(!values_.empty(), "element probabilities: list must be non-empty");
    min_ = 1.0;
    max_ = 0.0;
    sum_ = 0.0;
    for (double v : values_) {
        require(is_probability_open(v),
                "element probabilities: every value must lie strictly in (0,1)");
        min_ = std::min(min_, v);
        max_ = std::max(max_, v);
        sum_ += v;
    }
}

double ElementProbabilities::mid() const { return mid_probability(min_, max_); }

double ElementProbabilities::mean(std::uint64_t divisor) const {
    return mean_probability(*this, divisor);
}

SymmetricSystemSpec::SymmetricSystemSpec(std::uint64_t total, std::uint64_t degree)
    : total_elements(total), operating_degree(degree) {
    require(total >= 1, "symmetric system: total element count must be positive");
    require(degree < total, "symmetric system: operating degree must be below the element count");
}

double bernoulli_kl(double coverage, double reference) {
    require(is_probability_open(coverage), "divergence: coverage must lie strictly in (0,1)");
    require(is_probability_open(reference), "divergence: reference must lie strictly in (0,1)");
    return kl_closed(coverage, reference);
}

double mid_probability(double p_min, double p_max) {
    require(is_probability_open(p_min) && is_probability_open(p_max),
            "mid probability: bounds must lie strictly in (0,1)");
    require(p_min <= p_max, "mid probability: lower bound exceeds upper bound");
    require(p_max < 0.5, "mid probability: upper bound must stay below 0.5");
    return p_min / (1.0 + p_min - p_max);
}

double mean_probability(const ElementProbabilities& probs, std::uint64_t divisor) {
    require(divisor >= 1, "mean probability: divisor must be positive");
    const double mean = probs.sum() / static_cast<double>(divisor);
    require(mean > 0.0 && mean < 1.0, "mean probability: result falls outside (0,1)");
    return mean;
}

std::optional<double> max_failure_intensity(double total_sites, double coverage,
                                            double semantic_mean) {
    require(std::isfinite(total_sites) && total_sites >= 1.0,
            "failure intensity: site count must be at least 1");
    require(is_probability_closed(coverage), "failure intensity: coverage must lie in [0,1]");
    require(is_probability_open(semantic_mean),
            "failure intensity: semantic mean must lie strictly in (0,1)");
    if (coverage <= semantic_mean) return std::nullopt;
    const double kn = kl_closed(coverage, semantic_mean) * total_sites;
    if (kn <= 0.0) return std::nullopt;  // divergence rounded away entirely
    return intensity_from_exponent(kn);
}

double min_failure_intensity(double total_sites, double coverage, double mid_prob,
                             double big_o_constant) {
    require(std::isfinite(total_sites) && total_sites >= 1.0,
            "failure intensity: site count must be at least 1");
    require(is_probability_closed(coverage), "failure intensity: coverage must lie in [0,1]");
    require(is_probability_open(mid_prob),
            "failure intensity: mid probability must lie strictly in (0,1)");
    require(std::isfinite(big_o_constant) && big_o_constant >= 0.0,
            "failure intensity: the O(ln n) constant must be non-negative");
    const double kn = kl_closed(coverage, mid_prob) * total_sites;
    const double argument = -std::expm1(-kn) + big_o_constant;
    require(argument > 0.0 && argument <= 1.0,
            "failure intensity: logarithm argument falls outside (0,1]");
    if (big_o_constant == 0.0) return intensity_from_exponent(kn);
    return -std::log(argument);
}

std::optional<BoundsReport> evaluate_bounds(double total_sites, double coverage,
                                            double semantic_mean, double mid_prob,
                                            double big_o_constant) {
    const auto lambda_max = max_failure_intensity(total_sites, coverage, semantic_mean);
    if (!lambda_max) return std::nullopt;
    BoundsReport report;
    report.lambda_max = *lambda_max;
    report.lambda_min = min_failure_intensity(total_sites, coverage, mid_prob, big_o_constant);
    report.reliability_min = std::exp(-report.lambda_max);
    report.reliability_max = std::exp(-report.lambda_min);
    return report;
}

double reliability(double failure_intensity) {
    require(std::isfinite(failure_intensity) && failure_intensity >= 0.0,
            "reliability: failure intensity must be finite and non-negative");
    return std::exp(-failure_intensity);
}

double relevance(double total_queries, double coverage, double semantic_mean) {
    require(std::isfinite(total_queries) && total_queries >= 1.0,
            "relevance: query count must be at least 1");
    require(is_probability_closed(coverage), "relevance: coverage must lie in [0,1]");
    require(is_probability_open(semantic_mean),
            "relevance: semantic mean must lie strictly in (0,1)");
    const double kn = kl_closed(coverage, semantic_mean) * total_queries;
    return -std::expm1(-kn);
}

double operating_probability(const ElementProbabilities& probs, std::uint64_t degree) {
    const auto& p = probs.values();
    const std::size_t n = p.size();
    require(degree < n, "operating probability: degree must be below the element count");

    // dist[k] = P(exactly k of the elements seen so far operate); counts
    // above `degree` are dropped, the tail is recovered as 1 - cdf.
    std::vector<double> dist(static_cast<std::size_t>(degree) + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pi = p[i];
        const std::size_t top = std::min(i + 1, static_cast<std::size_t>(degree));
        for (std::size_t k = top; k >= 1; --k) {
            dist[k] = dist[k] * (1.0 - pi) + dist[k - 1] * pi;
        }
        dist[0] *= 1.0 - pi;
    }
    double cdf = 0.0;
    for (double v : dist) cdf += v;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
}

namespace {

double enumerate_tail(std::span<const double> p, std::size_t index,
                      std::uint64_t operating, std::uint64_t degree, double product) {
    if (index == p.size()) {
        return operating > degree ? product : 0.0;
    }
    return enumerate_tail(p, index + 1, operating + 1, degree, product * p[index]) +
           enumerate_tail(p, index + 1, operating, degree, product * (1.0 - p[index]));
}

}  // namespace

double operating_probability_bruteforce(const ElementProbabilities& probs,
                                        std::uint64_t degree) {
    const std::size_t n = probs.size();
    require(degree < n, "operating probability: degree must be below the element count");
    require(n <= 24, "operating probability: enumeration path only supports up to 24 elements");
    return enumerate_tail(probs.values(), 0, 0, degree, 1.0);
}

double lifetime_reliability(std::span<const double> instant_probabilities) {
    double product = 1.0;
    for (double v : instant_probabilities) {
        require(is_probability_closed(v), "lifetime reliability: entries must lie in [0,1]");
        product *= v;
    }
    return product;
}

LifetimeBounds lifetime_bounds(std::span<const double> instant_probabilities) {
    double failure_sum = 0.0;
    for (double v : instant_probabilities) {
        require(is_probability_closed(v), "lifetime bounds: entries must lie in [0,1]");
        failure_sum += 1.0 - v;
    }
    return LifetimeBounds{1.0 - failure_sum, std::exp(-failure_sum)};
}

std::optional<std::uint64_t> required_tests(std::uint64_t total_sites, double semantic_mean,
                                            double lambda_target) {
    require(total_sites >= 1, "required tests: site count must be positive");
    require(is_probability_open(semantic_mean),
            "required tests: semantic mean must lie strictly in (0,1)");
    require(std::isfinite(lambda_target) && lambda_target > 0.0,
            "required tests: target intensity must be positive");

    const double n = static_cast<double>(total_sites);
    const auto meets = [&](std::uint64_t s) {
        const double c = static_cast<double>(s) / n;
        if (!(c > semantic_mean)) return false;
        const auto lambda = max_failure_intensity(n, std::min(c, 1.0), semantic_mean);
        return lambda.has_value() && *lambda <= lambda_target;
    };

    if (!meets(total_sites)) return std::nullopt;
    std::uint64_t lo = 1;
    std::uint64_t hi = total_sites;
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (meets(mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

}  // namespace relq
