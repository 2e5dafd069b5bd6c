// The sensitive-site semantics matrix: parameters x semantic types x value
// counts, with the counting rules that derive total sites, sensitive sites,
// the initial semantic mean, the math-time unit, the black-box square-root
// fallback, and the extrapolated coverage estimate.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace relq {

struct SemanticType {
    std::string name;
    std::uint64_t value_count = 0;  // must be >= 1
};

struct SiteParameter {
    std::string name;
    std::vector<SemanticType> types;  // must be non-empty

    std::uint64_t value_count() const;                      // sum of type value counts
    std::uint64_t type_count() const { return types.size(); }
};

struct SiteMatrix {
    std::vector<SiteParameter> parameters;  // must be non-empty
};

/// Occurrence probabilities of the sensitive sites, against a total count
/// that may come from the matrix or from a literal override.
struct SiteProbabilityProfile {
    std::vector<double> probabilities;
    std::uint64_t total_sites = 0;
};

/// Product of per-parameter value counts. Throws std::overflow_error when
/// the count leaves the 64-bit range (reported as an unbounded count).
std::uint64_t total_sites(const SiteMatrix& matrix);

/// Product of per-parameter type counts.
std::uint64_t sensitive_sites(const SiteMatrix& matrix);

/// 1 / sensitive-site count. The count must be at least 3 so the mean stays
/// strictly below 0.5, the constraint the law needs.
double initial_semantic_mean(std::uint64_t sensitive_count);
double initial_semantic_mean(const SiteMatrix& matrix);

/// Black-box fallback when no matrix exists: round(sqrt(n)), half up.
/// Requires n >= 4.
std::uint64_t blackbox_sensitive_sites(std::uint64_t total);

/// The math-time unit 1/n.
double tau_unit(std::uint64_t total);

/// Sum of (p_v - 1/n) over the profile. Every probability must exceed 1/n
/// and the sum must land in (0,1).
double extrapolated_coverage(const SiteProbabilityProfile& profile);

/// A parsed site-specification document: the matrix plus the optional
/// literal overrides that let the flat "n sites, these probabilities" usage
/// bypass the product rule.
struct SiteSpec {
    std::optional<SiteMatrix> matrix;
    std::optional<std::uint64_t> override_total_sites;
    std::vector<double> site_probabilities;

    std::uint64_t effective_total_sites() const;
    std::uint64_t effective_sensitive_sites() const;
    SiteProbabilityProfile profile() const;
};

/// Reads the JSON site-specification format. Validation failures name the
/// offending parameter/type by path, e.g. "parameters[1].types[0].values".
SiteSpec load_site_spec(std::istream& in, const std::string& source_name = "site spec");
SiteSpec parse_site_spec(const std::string& text, const std::string& source_name = "site spec");

}  // namespace relq
