#include "relq/site_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <stdexcept>

#include "json.hpp"

#include "relq/errors.hpp"

namespace relq {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::domain_error(message);
}

std::uint64_t checked_product(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw std::overflow_error("site count is unbounded: product exceeds the 64-bit range");
    }
    return out;
}

void validate_matrix(const SiteMatrix& matrix) {
    require(!matrix.parameters.empty(), "site matrix: parameter list must be non-empty");
    for (const auto& parameter : matrix.parameters) {
        require(!parameter.types.empty(),
                "site matrix: parameter '" + parameter.name + "' has no semantic types");
        for (const auto& type : parameter.types) {
            require(type.value_count >= 1,
                    "site matrix: type '" + type.name + "' of parameter '" + parameter.name +
                        "' must have at least one value");
        }
    }
}

}  // namespace

std::uint64_t SiteParameter::value_count() const {
    std::uint64_t sum = 0;
    for (const auto& type : types) sum += type.value_count;
    return sum;
}

std::uint64_t total_sites(const SiteMatrix& matrix) {
    validate_matrix(matrix);
    std::uint64_t product = 1;
    for (const auto& parameter : matrix.parameters) {
        product = checked_product(product, parameter.value_count());
    }
    return product;
}

std::uint64_t sensitive_sites(const SiteMatrix& matrix) {
    validate_matrix(matrix);
    std::uint64_t product = 1;
    for (const auto& parameter : matrix.parameters) {
        product = checked_product(product, parameter.type_count());
    }
    return product;
}

double initial_semantic_mean(std::uint64_t sensitive_count) {
    require(sensitive_count >= 2, "semantic mean: sensitive-site count must be at least 2");
    require(sensitive_count > 2,
            "semantic mean: a count of 2 puts the mean at 0.5, outside the law's p < 0.5 range");
    return 1.0 / static_cast<double>(sensitive_count);
}

double initial_semantic_mean(const SiteMatrix& matrix) {
    return initial_semantic_mean(sensitive_sites(matrix));
}

std::uint64_t blackbox_sensitive_sites(std::uint64_t total) {
    require(total >= 4, "black-box sensitive sites: total count must be at least 4");
    constexpr std::uint64_t kMaxRoot = 4294967295ULL;  // floor(sqrt(2^64 - 1))
    auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(total)));
    root = std::min(root, kMaxRoot);
    while (root > 0 && root * root > total) --root;
    while (root < kMaxRoot && (root + 1) * (root + 1) <= total) ++root;
    // root = floor(sqrt(total)); round half up
    return (total - root * root > root) ? root + 1 : root;
}

double tau_unit(std::uint64_t total) {
    require(total >= 1, "tau unit: total count must be positive");
    return 1.0 / static_cast<double>(total);
}

double extrapolated_coverage(const SiteProbabilityProfile& profile) {
    require(profile.total_sites >= 1, "extrapolated coverage: total count must be positive");
    require(!profile.probabilities.empty(), "extrapolated coverage: profile must be non-empty");
    const double unit = 1.0 / static_cast<double>(profile.total_sites);
    double sum = 0.0;
    for (double p : profile.probabilities) {
        // a probability exactly at 1/n contributes zero, as in the worked example
        require(p >= unit, "extrapolated coverage: every probability must reach at least 1/n");
        require(p < 1.0, "extrapolated coverage: probabilities must stay below 1");
        sum += p - unit;
    }
    require(sum > 0.0 && sum < 1.0, "extrapolated coverage: result falls outside (0,1)");
    return sum;
}

std::uint64_t SiteSpec::effective_total_sites() const {
    if (override_total_sites) return *override_total_sites;
    if (matrix) return total_sites(*matrix);
    throw std::domain_error("site spec: no matrix and no total-site override");
}

std::uint64_t SiteSpec::effective_sensitive_sites() const {
    if (matrix) return sensitive_sites(*matrix);
    if (!site_probabilities.empty()) return site_probabilities.size();
    throw std::domain_error("site spec: no matrix and no site probabilities");
}

SiteProbabilityProfile SiteSpec::profile() const {
    require(!site_probabilities.empty(), "site spec: no site probabilities");
    return SiteProbabilityProfile{site_probabilities, effective_total_sites()};
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& path,
                       const std::string& what) {
    throw parse_error(source + ": " + path + ": " + what);
}

SiteSpec spec_from_json(const json& doc, const std::string& source) {
    if (!doc.is_object()) fail(source, "$", "document must be a JSON object");

    SiteSpec spec;
    if (doc.contains("parameters")) {
        const auto& params = doc.at("parameters");
        if (!params.is_array()) fail(source, "parameters", "must be an array");
        SiteMatrix matrix;
        for (std::size_t i = 0; i < params.size(); ++i) {
            const std::string ppath = "parameters[" + std::to_string(i) + "]";
            const auto& p = params.at(i);
            if (!p.is_object()) fail(source, ppath, "must be an object");
            SiteParameter parameter;
            parameter.name = p.value("name", "x" + std::to_string(i + 1));
            if (!p.contains("types") || !p.at("types").is_array() || p.at("types").empty()) {
                fail(source, ppath + ".types", "must be a non-empty array");
            }
            const auto& types = p.at("types");
            for (std::size_t j = 0; j < types.size(); ++j) {
                const std::string tpath = ppath + ".types[" + std::to_string(j) + "]";
                const auto& t = types.at(j);
                if (!t.is_object()) fail(source, tpath, "must be an object");
                SemanticType type;
                type.name = t.value("name", "t" + std::to_string(j + 1));
                if (!t.contains("values") || !t.at("values").is_number_unsigned() ||
                    t.at("values").get<std::uint64_t>() < 1) {
                    fail(source, tpath + ".values", "must be a positive integer");
                }
                type.value_count = t.at("values").get<std::uint64_t>();
                parameter.types.push_back(std::move(type));
            }
            matrix.parameters.push_back(std::move(parameter));
        }
        if (!matrix.parameters.empty()) spec.matrix = std::move(matrix);
    }

    if (doc.contains("override_total_sites")) {
        const auto& n = doc.at("override_total_sites");
        if (!n.is_number_unsigned() || n.get<std::uint64_t>() < 1) {
            fail(source, "override_total_sites", "must be a positive integer");
        }
        spec.override_total_sites = n.get<std::uint64_t>();
    }

    if (doc.contains("site_probabilities")) {
        const auto& probs = doc.at("site_probabilities");
        if (!probs.is_array()) fail(source, "site_probabilities", "must be an array");
        for (std::size_t i = 0; i < probs.size(); ++i) {
            const std::string path = "site_probabilities[" + std::to_string(i) + "]";
            if (!probs.at(i).is_number()) fail(source, path, "must be a number");
            const double v = probs.at(i).get<double>();
            if (!(v > 0.0 && v < 1.0)) fail(source, path, "must lie strictly in (0,1)");
            spec.site_probabilities.push_back(v);
        }
    }

    if (!spec.matrix && !spec.override_total_sites) {
        fail(source, "$", "either parameters or override_total_sites is required");
    }
    if (spec.matrix && !spec.site_probabilities.empty()) {
        const std::uint64_t count = sensitive_sites(*spec.matrix);
        if (spec.site_probabilities.size() != count) {
            fail(source, "site_probabilities",
                 "expected one probability per sensitive site (" + std::to_string(count) +
                     "), got " + std::to_string(spec.site_probabilities.size()));
        }
    }
    return spec;
}

}  // namespace

SiteSpec parse_site_spec(const std::string& text, const std::string& source_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(source_name + ": " + e.what());
    }
    return spec_from_json(doc, source_name);
}

SiteSpec load_site_spec(std::istream& in, const std::string& source_name) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw parse_error(source_name + ": " + e.what());
    }
    return spec_from_json(doc, source_name);
}

}  // namespace relq
