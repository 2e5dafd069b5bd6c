// Event-driven reliability monitoring session: tracks tested/total/sensitive
// site counts, math time, the semantic mean and its shift, and the achieved
// failure-intensity bound against a sigma target. Sessions replay
// deterministically from their JSON Lines event log.
//
// A session is a single-writer value: apply events sequentially; status()
// and plan() are read-only.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relq/core_law.hpp"

namespace relq {

inline constexpr double kFourSigmaIntensity = 0.00621;  // faults per site
inline constexpr double kSixSigmaIntensity = 2.0e-9;    // faults per site

struct SigmaTarget {
    enum class Level { four, six, enough, custom };

    Level level = Level::enough;
    double custom_lambda = 0.0;

    static SigmaTarget four_sigma() { return {Level::four, 0.0}; }
    static SigmaTarget six_sigma() { return {Level::six, 0.0}; }
    static SigmaTarget enough_sigma() { return {Level::enough, 0.0}; }
    static SigmaTarget custom(double lambda_rq);

    /// Required intensity for a session of `total_sites` sites; the
    /// enough-sigma target is 1/n and follows the current count.
    double lambda_for(std::uint64_t total_sites) const;

    std::string_view name() const;

    bool operator==(const SigmaTarget&) const = default;
};

/// Parses "four" | "six" | "enough" | "custom"; custom requires lambda_rq.
SigmaTarget sigma_target_from_name(std::string_view name, std::optional<double> lambda_rq);

struct TestEvent {
    enum class Kind { pass, fault };

    Kind kind = Kind::pass;
    std::int64_t delta_total_sites = 0;  // fault events only

    bool operator==(const TestEvent&) const = default;
};

struct StatusReport {
    double coverage = 0.0;
    double tau = 0.0;
    std::optional<BoundsReport> bounds;  // nullopt: intensity bound not yet growing
    double semantic_shift = 0.0;
    double target_lambda = 0.0;
    bool target_met = false;
    std::optional<std::uint64_t> tests_remaining;  // nullopt: target unreachable
};

class MonitorSession {
public:
    MonitorSession(std::uint64_t total_sites, std::uint64_t sensitive_sites, SigmaTarget target);

    /// A fault-free tested site: tested count +1, tau advances one unit.
    /// Throws std::domain_error once every site is tested (session complete).
    void record_pass();

    /// A detected-and-corrected fault: sensitive count +1, total count
    /// adjusted by delta, tau and the time unit recomputed. The tested count
    /// does not move; the corrected site is counted by its later retest pass.
    void record_fault(std::int64_t delta_total_sites);

    void apply(const TestEvent& event);

    StatusReport status() const;

    std::uint64_t total_sites() const noexcept { return total_sites_; }
    std::uint64_t tested_sites() const noexcept { return tested_sites_; }
    std::uint64_t sensitive_sites() const noexcept { return sensitive_sites_; }
    double coverage() const noexcept;
    double tau() const noexcept;
    double initial_semantic_mean() const noexcept { return initial_mean_; }
    double current_semantic_mean() const noexcept;
    double semantic_shift() const noexcept;
    const SigmaTarget& target() const noexcept { return target_; }
    const std::vector<TestEvent>& events() const noexcept { return events_; }

    bool operator==(const MonitorSession&) const = default;

private:
    std::uint64_t total_sites_ = 0;
    std::uint64_t tested_sites_ = 0;
    std::uint64_t sensitive_sites_ = 0;
    double initial_mean_ = 0.0;
    SigmaTarget target_;
    std::vector<TestEvent> events_;
};

struct PlanRow {
    std::string label;
    double lambda_rq = 0.0;
    std::optional<std::uint64_t> tests;  // nullopt: unreachable
    std::optional<double> coverage;
};

struct PlanTable {
    std::uint64_t total_sites = 0;
    std::uint64_t sensitive_sites = 0;
    double semantic_mean = 0.0;
    PlanRow four;
    PlanRow six;
    PlanRow enough;
    std::optional<double> six_over_four;
    std::optional<double> enough_over_four;
    std::optional<double> enough_over_six;
};

/// Required test counts for the three sigma levels plus pairwise effort
/// ratios.
PlanTable plan(std::uint64_t total_sites, std::uint64_t sensitive_sites);

/// Required count for one specific target.
PlanRow plan_row(std::uint64_t total_sites, std::uint64_t sensitive_sites, SigmaTarget target);

// --- event log wire format (JSON Lines) ---------------------------------
//
// line 1:  {"n":<int>,"s0":<int>,"target":"four|six|enough|custom","lambda_rq":<real, custom only>}
// line 2+: {"event":"pass"} | {"event":"fault","delta_total_sites":<int>}

struct SessionHeader {
    std::optional<std::uint64_t> total_sites;
    std::optional<std::uint64_t> sensitive_sites;
    SigmaTarget target;
};

/// Parse failures throw parse_error naming `line_number`.
SessionHeader parse_header_line(std::string_view line, std::size_t line_number = 1);
TestEvent parse_event_line(std::string_view line, std::size_t line_number);

std::string serialize_header(const MonitorSession& session);
std::string serialize_event(const TestEvent& event);
void write_event_log(std::ostream& out, const MonitorSession& session);

/// Applies the event lines of `in` (no header) to a fresh session.
MonitorSession replay_events(std::istream& in, std::uint64_t total_sites,
                             std::uint64_t sensitive_sites, SigmaTarget target,
                             std::size_t first_line_number = 1);

/// Full log: header line then events.
MonitorSession replay_log(std::istream& in);

/// Single-line JSON rendering of a status report; byte-identical for equal
/// reports, which is what the determinism checks compare.
std::string status_to_json(const StatusReport& report);

std::string plan_to_json(const PlanTable& table);

}  // namespace relq
