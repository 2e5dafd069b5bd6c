#include "relq/monitor.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

#include "relq/errors.hpp"
#include "relq/site_model.hpp"

namespace relq {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& message) {
    if (!ok) throw std::domain_error(message);
}

json bounds_to_json(const std::optional<BoundsReport>& bounds) {
    if (!bounds) return nullptr;
    return json{{"lambda_min", bounds->lambda_min},
                {"lambda_max", bounds->lambda_max},
                {"reliability_min", bounds->reliability_min},
                {"reliability_max", bounds->reliability_max}};
}

}  // namespace

SigmaTarget SigmaTarget::custom(double lambda_rq) {
    require(std::isfinite(lambda_rq) && lambda_rq > 0.0,
            "sigma target: custom intensity must be positive");
    return {Level::custom, lambda_rq};
}

double SigmaTarget::lambda_for(std::uint64_t total_sites) const {
    switch (level) {
        case Level::four: return kFourSigmaIntensity;
        case Level::six: return kSixSigmaIntensity;
        case Level::enough: return 1.0 / static_cast<double>(total_sites);
        case Level::custom: return custom_lambda;
    }
    throw std::logic_error("sigma target: unknown level");
}

std::string_view SigmaTarget::name() const {
    switch (level) {
        case Level::four: return "four";
        case Level::six: return "six";
        case Level::enough: return "enough";
        case Level::custom: return "custom";
    }
    return "unknown";
}

SigmaTarget sigma_target_from_name(std::string_view name, std::optional<double> lambda_rq) {
    if (name == "four") return SigmaTarget::four_sigma();
    if (name == "six") return SigmaTarget::six_sigma();
    if (name == "enough") return SigmaTarget::enough_sigma();
    if (name == "custom") {
        require(lambda_rq.has_value(), "sigma target: custom requires lambda_rq");
        return SigmaTarget::custom(*lambda_rq);
    }
    throw std::domain_error("sigma target: unknown name '" + std::string(name) + "'");
}

MonitorSession::MonitorSession(std::uint64_t total_sites, std::uint64_t sensitive_sites,
                               SigmaTarget target)
    : total_sites_(total_sites), sensitive_sites_(sensitive_sites), target_(target) {
    require(total_sites >= 1, "monitor session: total site count must be positive");
    require(sensitive_sites <= total_sites,
            "monitor session: sensitive count exceeds total count");
    initial_mean_ = ::relq::initial_semantic_mean(sensitive_sites);
    if (target.level == SigmaTarget::Level::custom) {
        (void)SigmaTarget::custom(target.custom_lambda);  // re-validate
    }
}

double MonitorSession::coverage() const noexcept {
    return static_cast<double>(tested_sites_) / static_cast<double>(total_sites_);
}

double MonitorSession::tau() const noexcept {
    // tau = tested * tau_unit = tested / total, recomputed whenever n moves
    return coverage();
}

double MonitorSession::current_semantic_mean() const noexcept {
    return 1.0 / static_cast<double>(sensitive_sites_);
}

double MonitorSession::semantic_shift() const noexcept {
    return initial_mean_ - current_semantic_mean();
}

void MonitorSession::record_pass() {
    require(tested_sites_ < total_sites_,
            "monitor session: session complete, every site is already tested");
    ++tested_sites_;
    events_.push_back(TestEvent{TestEvent::Kind::pass, 0});
}

void MonitorSession::record_fault(std::int64_t delta_total_sites) {
    std::uint64_t new_total = total_sites_;
    if (delta_total_sites >= 0) {
        const auto delta = static_cast<std::uint64_t>(delta_total_sites);
        require(new_total + delta >= new_total, "monitor session: total site count overflow");
        new_total += delta;
    } else {
        const auto drop = static_cast<std::uint64_t>(-delta_total_sites);
        require(drop < new_total, "monitor session: fault would drop the total count to zero");
        new_total -= drop;
    }
    const std::uint64_t new_sensitive = sensitive_sites_ + 1;
    require(new_sensitive <= new_total,
            "monitor session: sensitive count would exceed total count");
    require(new_total >= tested_sites_,
            "monitor session: total count would fall below the tested count");
    total_sites_ = new_total;
    sensitive_sites_ = new_sensitive;
    events_.push_back(TestEvent{TestEvent::Kind::fault, delta_total_sites});
}

void MonitorSession::apply(const TestEvent& event) {
    if (event.kind == TestEvent::Kind::pass) {
        record_pass();
    } else {
        record_fault(event.delta_total_sites);
    }
}

StatusReport MonitorSession::status() const {
    StatusReport report;
    report.coverage = coverage();
    report.tau = tau();
    report.semantic_shift = semantic_shift();
    report.target_lambda = target_.lambda_for(total_sites_);
    report.bounds = evaluate_bounds(static_cast<double>(total_sites_), report.coverage,
                                    initial_mean_, initial_mean_, 0.0);
    report.target_met = report.bounds && report.bounds->lambda_max <= report.target_lambda;
    const auto needed = required_tests(total_sites_, initial_mean_, report.target_lambda);
    if (needed) {
        report.tests_remaining = *needed > tested_sites_ ? *needed - tested_sites_ : 0;
    }
    return report;
}

PlanRow plan_row(std::uint64_t total_sites, std::uint64_t sensitive_sites, SigmaTarget target) {
    const double mean = ::relq::initial_semantic_mean(sensitive_sites);
    PlanRow row;
    row.label = std::string(target.name());
    row.lambda_rq = target.lambda_for(total_sites);
    row.tests = required_tests(total_sites, mean, row.lambda_rq);
    if (row.tests) {
        row.coverage = static_cast<double>(*row.tests) / static_cast<double>(total_sites);
    }
    return row;
}

PlanTable plan(std::uint64_t total_sites, std::uint64_t sensitive_sites) {
    PlanTable table;
    table.total_sites = total_sites;
    table.sensitive_sites = sensitive_sites;
    table.semantic_mean = initial_semantic_mean(sensitive_sites);
    table.four = plan_row(total_sites, sensitive_sites, SigmaTarget::four_sigma());
    table.six = plan_row(total_sites, sensitive_sites, SigmaTarget::six_sigma());
    table.enough = plan_row(total_sites, sensitive_sites, SigmaTarget::enough_sigma());
    const auto ratio = [](const PlanRow& a, const PlanRow& b) -> std::optional<double> {
        if (a.tests && b.tests && *b.tests > 0) {
            return static_cast<double>(*a.tests) / static_cast<double>(*b.tests);
        }
        return std::nullopt;
    };
    table.six_over_four = ratio(table.six, table.four);
    table.enough_over_four = ratio(table.enough, table.four);
    table.enough_over_six = ratio(table.enough, table.six);
    return table;
}

namespace {

json parse_line_json(std::string_view line, std::size_t line_number) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw parse_error("event log line " + std::to_string(line_number) + ": " + e.what());
    }
}

[[noreturn]] void fail_line(std::size_t line_number, const std::string& what) {
    throw parse_error("event log line " + std::to_string(line_number) + ": " + what);
}

}  // namespace

SessionHeader parse_header_line(std::string_view line, std::size_t line_number) {
    const json doc = parse_line_json(line, line_number);
    if (!doc.is_object()) fail_line(line_number, "header must be a JSON object");
    SessionHeader header;
    if (doc.contains("n")) {
        if (!doc.at("n").is_number_unsigned()) fail_line(line_number, "'n' must be a positive integer");
        header.total_sites = doc.at("n").get<std::uint64_t>();
    }
    if (doc.contains("s0")) {
        if (!doc.at("s0").is_number_unsigned()) fail_line(line_number, "'s0' must be a positive integer");
        header.sensitive_sites = doc.at("s0").get<std::uint64_t>();
    }
    if (!doc.contains("target") || !doc.at("target").is_string()) {
        fail_line(line_number, "'target' must be one of four|six|enough|custom");
    }
    std::optional<double> lambda_rq;
    if (doc.contains("lambda_rq")) {
        if (!doc.at("lambda_rq").is_number()) fail_line(line_number, "'lambda_rq' must be a number");
        lambda_rq = doc.at("lambda_rq").get<double>();
    }
    try {
        header.target = sigma_target_from_name(doc.at("target").get<std::string>(), lambda_rq);
    } catch (const std::domain_error& e) {
        fail_line(line_number, e.what());
    }
    return header;
}

TestEvent parse_event_line(std::string_view line, std::size_t line_number) {
    const json doc = parse_line_json(line, line_number);
    if (!doc.is_object() || !doc.contains("event") || !doc.at("event").is_string()) {
        fail_line(line_number, "expected {\"event\":\"pass\"} or {\"event\":\"fault\",...}");
    }
    const auto kind = doc.at("event").get<std::string>();
    if (kind == "pass") {
        return TestEvent{TestEvent::Kind::pass, 0};
    }
    if (kind == "fault") {
        TestEvent event{TestEvent::Kind::fault, 0};
        if (doc.contains("delta_total_sites")) {
            if (!doc.at("delta_total_sites").is_number_integer()) {
                fail_line(line_number, "'delta_total_sites' must be an integer");
            }
            event.delta_total_sites = doc.at("delta_total_sites").get<std::int64_t>();
        }
        return event;
    }
    fail_line(line_number, "unknown event kind '" + kind + "'");
}

std::string serialize_header(const MonitorSession& session) {
    json doc{{"n", session.total_sites()},
             {"s0", session.sensitive_sites()},
             {"target", std::string(session.target().name())}};
    if (session.target().level == SigmaTarget::Level::custom) {
        doc["lambda_rq"] = session.target().custom_lambda;
    }
    return doc.dump();
}

std::string serialize_event(const TestEvent& event) {
    if (event.kind == TestEvent::Kind::pass) {
        return json{{"event", "pass"}}.dump();
    }
    return json{{"event", "fault"}, {"delta_total_sites", event.delta_total_sites}}.dump();
}

void write_event_log(std::ostream& out, const MonitorSession& session) {
    // Header describes the session at creation time: walk the deltas back.
    std::uint64_t total = session.total_sites();
    std::uint64_t sensitive = session.sensitive_sites();
    for (const auto& event : session.events()) {
        if (event.kind == TestEvent::Kind::fault) {
            total = static_cast<std::uint64_t>(static_cast<std::int64_t>(total) -
                                               event.delta_total_sites);
            --sensitive;
        }
    }
    json header{{"n", total}, {"s0", sensitive}, {"target", std::string(session.target().name())}};
    if (session.target().level == SigmaTarget::Level::custom) {
        header["lambda_rq"] = session.target().custom_lambda;
    }
    out << header.dump() << '\n';
    for (const auto& event : session.events()) {
        out << serialize_event(event) << '\n';
    }
}

MonitorSession replay_events(std::istream& in, std::uint64_t total_sites,
                             std::uint64_t sensitive_sites, SigmaTarget target,
                             std::size_t first_line_number) {
    MonitorSession session(total_sites, sensitive_sites, target);
    std::string line;
    std::size_t line_number = first_line_number;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) {
            session.apply(parse_event_line(line, line_number));
        }
        ++line_number;
    }
    return session;
}

MonitorSession replay_log(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw parse_error("event log line 1: missing session header");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const SessionHeader header = parse_header_line(line, 1);
    if (!header.total_sites || !header.sensitive_sites) {
        throw parse_error("event log line 1: header requires both 'n' and 's0'");
    }
    return replay_events(in, *header.total_sites, *header.sensitive_sites, header.target, 2);
}

std::string status_to_json(const StatusReport& report) {
    json doc{{"coverage", report.coverage},
             {"tau", report.tau},
             {"bounds", bounds_to_json(report.bounds)},
             {"semantic_shift", report.semantic_shift},
             {"target_lambda", report.target_lambda},
             {"target_met", report.target_met},
             {"tests_remaining",
              report.tests_remaining ? json(*report.tests_remaining) : json(nullptr)}};
    return doc.dump();
}

namespace {

json row_to_json(const PlanRow& row) {
    return json{{"target", row.label},
                {"lambda_rq", row.lambda_rq},
                {"tests", row.tests ? json(*row.tests) : json(nullptr)},
                {"coverage", row.coverage ? json(*row.coverage) : json(nullptr)}};
}

}  // namespace

std::string plan_to_json(const PlanTable& table) {
    json doc{{"n", table.total_sites},
             {"s0", table.sensitive_sites},
             {"semantic_mean", table.semantic_mean},
             {"rows", json::array({row_to_json(table.four), row_to_json(table.six),
                                   row_to_json(table.enough)})},
             {"six_over_four", table.six_over_four ? json(*table.six_over_four) : json(nullptr)},
             {"enough_over_four",
              table.enough_over_four ? json(*table.enough_over_four) : json(nullptr)},
             {"enough_over_six",
              table.enough_over_six ? json(*table.enough_over_six) : json(nullptr)}};
    return doc.dump();
}

}  // namespace relq
