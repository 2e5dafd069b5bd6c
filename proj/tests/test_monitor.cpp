#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "relq/errors.hpp"
#include "relq/monitor.hpp"

using namespace relq;

namespace {

MonitorSession example_session() {
    return MonitorSession(20, 4, SigmaTarget::enough_sigma());
}

std::string thrown_message(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("sigma targets resolve their required intensities") {
    CHECK(SigmaTarget::four_sigma().lambda_for(20) == 0.00621);
    CHECK(SigmaTarget::six_sigma().lambda_for(20) == 2.0e-9);
    CHECK(SigmaTarget::enough_sigma().lambda_for(20) == 0.05);
    CHECK(SigmaTarget::enough_sigma().lambda_for(1000000000000ULL) == 1e-12);
    CHECK(SigmaTarget::custom(0.1).lambda_for(20) == 0.1);
    CHECK_THROWS_AS(SigmaTarget::custom(0.0), std::domain_error);
    CHECK_THROWS_AS(SigmaTarget::custom(-1.0), std::domain_error);

    CHECK(sigma_target_from_name("four", std::nullopt).level == SigmaTarget::Level::four);
    CHECK(sigma_target_from_name("custom", 0.2).custom_lambda == 0.2);
    CHECK_THROWS_AS(sigma_target_from_name("custom", std::nullopt), std::domain_error);
    CHECK_THROWS_AS(sigma_target_from_name("five", std::nullopt), std::domain_error);
}

TEST_CASE("new sessions start at time zero with the sensitive-count mean") {
    const auto session = example_session();
    CHECK(session.tested_sites() == 0);
    CHECK(session.tau() == 0.0);
    CHECK(session.initial_semantic_mean() == 0.25);
    CHECK(session.target().lambda_for(session.total_sites()) == 0.05);

    const MonitorSession big(1000000000000ULL, 1000000, SigmaTarget::four_sigma());
    CHECK(big.initial_semantic_mean() == 1e-6);
    CHECK(big.target().lambda_for(big.total_sites()) == 0.00621);

    // sensitive count of 2 puts the mean at 0.5, outside the law's range
    CHECK_THROWS_AS(MonitorSession(10, 2, SigmaTarget::custom(0.1)), std::domain_error);
    CHECK_THROWS_AS(MonitorSession(3, 4, SigmaTarget::enough_sigma()), std::domain_error);
}

TEST_CASE("pass events advance the tested count and math time") {
    auto session = example_session();
    for (int i = 0; i < 10; ++i) session.record_pass();
    CHECK(session.tested_sites() == 10);
    CHECK(session.tau() == doctest::Approx(0.5).epsilon(1e-15));

    session.record_pass();
    CHECK(session.tested_sites() == 11);
    CHECK(session.tau() == doctest::Approx(0.55).epsilon(1e-15));

    for (int i = 0; i < 9; ++i) session.record_pass();
    CHECK(session.tau() == 1.0);
    CHECK_THROWS_AS(session.record_pass(), std::domain_error);
}

TEST_CASE("fault events move the sensitive count, not the tested count") {
    auto session = example_session();
    session.record_fault(0);
    CHECK(session.sensitive_sites() == 5);
    CHECK(session.tested_sites() == 0);
    CHECK(session.current_semantic_mean() == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(session.semantic_shift() == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(session.initial_semantic_mean() == 0.25);  // bound evaluation keeps the initial mean

    auto grown = example_session();
    for (int i = 0; i < 10; ++i) grown.record_pass();
    CHECK(grown.tau() == doctest::Approx(0.5).epsilon(1e-15));
    grown.record_fault(+5);
    CHECK(grown.total_sites() == 25);
    CHECK(grown.tested_sites() == 10);
    CHECK(grown.tau() == doctest::Approx(0.4).epsilon(1e-15));  // 10/25 on the new unit

    MonitorSession tight(5, 4, SigmaTarget::custom(0.5));
    CHECK_THROWS_AS(tight.record_fault(-1), std::domain_error);  // s0 would exceed n

    auto shrunk = example_session();
    CHECK_THROWS_AS(shrunk.record_fault(-20), std::domain_error);
}

TEST_CASE("status: threshold, flip at eleven passes, and remaining counts") {
    auto session = example_session();

    const auto fresh = session.status();
    CHECK(fresh.coverage == 0.0);
    CHECK_FALSE(fresh.bounds.has_value());
    CHECK_FALSE(fresh.target_met);
    REQUIRE(fresh.tests_remaining.has_value());
    CHECK(*fresh.tests_remaining == 11);

    for (int i = 0; i < 5; ++i) session.record_pass();
    CHECK_FALSE(session.status().bounds.has_value());  // c = 0.25 = semantic mean

    session.record_pass();  // 6th: first finite bound
    const auto six = session.status();
    REQUIRE(six.bounds.has_value());
    CHECK_FALSE(six.target_met);

    for (int i = 6; i < 11; ++i) {
        CHECK_FALSE(session.status().target_met);
        session.record_pass();
    }
    const auto eleventh = session.status();
    CHECK(session.tested_sites() == 11);
    REQUIRE(eleventh.bounds.has_value());
    CHECK(eleventh.bounds->lambda_max ==
          doctest::Approx(0.0171278644555417440).epsilon(1e-12));
    CHECK(eleventh.bounds->lambda_min == eleventh.bounds->lambda_max);
    CHECK(eleventh.target_met);
    CHECK(*eleventh.tests_remaining == 0);
}

TEST_CASE("status: intensity bound strictly decreases under pass-only progress") {
    auto session = example_session();
    double previous = std::numeric_limits<double>::infinity();
    bool seen_finite = false;
    for (int i = 0; i < 19; ++i) {
        session.record_pass();
        const auto report = session.status();
        CHECK(report.coverage == doctest::Approx((i + 1) / 20.0).epsilon(1e-15));
        if (report.bounds) {
            CHECK(report.bounds->lambda_max < previous);
            previous = report.bounds->lambda_max;
            seen_finite = true;
        } else {
            CHECK_FALSE(seen_finite);  // once finite, it stays finite
        }
    }
    CHECK(seen_finite);
}

TEST_CASE("plan reproduces the big example counts and effort ratios") {
    const PlanTable table = plan(1000000000000ULL, 1000000);
    REQUIRE(table.four.tests.has_value());
    CHECK(*table.four.tests >= 1003100);
    CHECK(*table.four.tests <= 1003300);
    CHECK(table.enough.lambda_rq == 1e-12);
    REQUIRE(table.six_over_four.has_value());
    REQUIRE(table.enough_over_four.has_value());
    CHECK(std::abs(*table.six_over_four - 1.003) < 0.0005);
    CHECK(std::abs(*table.enough_over_four - 1.0042) < 0.0005);

    const PlanTable small = plan(20, 4);
    REQUIRE(small.enough.tests.has_value());
    CHECK(*small.enough.tests == 11);

    // plan/status consistency: a fresh session's remaining count is the plan's
    const auto fresh = example_session().status();
    CHECK(*fresh.tests_remaining == *small.enough.tests);

    const PlanRow unreachable = plan_row(20, 4, SigmaTarget::custom(1e-30));
    CHECK_FALSE(unreachable.tests.has_value());
}

TEST_CASE("event lines parse and serialize to the wire format") {
    const TestEvent pass = parse_event_line(R"({"event":"pass"})", 2);
    CHECK(pass.kind == TestEvent::Kind::pass);
    CHECK(serialize_event(pass) == R"({"event":"pass"})");

    const TestEvent fault = parse_event_line(R"({"event":"fault","delta_total_sites":-3})", 5);
    CHECK(fault.kind == TestEvent::Kind::fault);
    CHECK(fault.delta_total_sites == -3);
    CHECK(serialize_event(fault) == R"({"delta_total_sites":-3,"event":"fault"})");

    CHECK(thrown_message([] { parse_event_line("not json", 3); }).find("line 3") !=
          std::string::npos);
    CHECK(thrown_message([] { parse_event_line(R"({"event":"boom"})", 7); }).find("line 7") !=
          std::string::npos);
    CHECK_THROWS_AS(parse_event_line(R"({"event":"boom"})", 7), parse_error);

    const SessionHeader header =
        parse_header_line(R"({"n":20,"s0":4,"target":"enough"})");
    CHECK(header.total_sites == 20);
    CHECK(header.sensitive_sites == 4);
    CHECK(header.target.level == SigmaTarget::Level::enough);

    const SessionHeader custom =
        parse_header_line(R"({"n":10,"s0":3,"target":"custom","lambda_rq":0.25})");
    CHECK(custom.target.custom_lambda == 0.25);

    CHECK_THROWS_AS(parse_header_line(R"({"n":20,"s0":4})"), parse_error);
}

TEST_CASE("replay applies events one by one") {
    std::istringstream eleven(
        R"({"event":"pass"})"
        "\n"
        R"({"event":"pass"})"
        "\n"
        R"({"event":"pass"})"
        "\n"
        R"({"event":"pass"})"
        "\n"
        R"({"event":"pass"})"
        "\n"
        R"({"event":"pass"})"
        "\n"
        R"({"event":"pass"})"
        "\n"
        R"({"event":"pass"})"
        "\n"
        R"({"event":"pass"})"
        "\n"
        R"({"event":"pass"})"
        "\n"
        R"({"event":"pass"})"
        "\n");
    const auto session = replay_events(eleven, 20, 4, SigmaTarget::enough_sigma());
    CHECK(session.tested_sites() == 11);
    CHECK(session.status().target_met);

    std::istringstream empty("");
    const auto fresh = replay_events(empty, 20, 4, SigmaTarget::enough_sigma());
    CHECK(fresh == example_session());

    std::istringstream mixed(
        R"({"event":"fault","delta_total_sites":0})"
        "\n"
        R"({"event":"pass"})"
        "\n");
    const auto after = replay_events(mixed, 20, 4, SigmaTarget::enough_sigma());
    CHECK(after.sensitive_sites() == 5);
    CHECK(after.tested_sites() == 1);
}

TEST_CASE("replay of a serialized log reproduces the session exactly") {
    auto session = example_session();
    for (int i = 0; i < 7; ++i) session.record_pass();
    session.record_fault(+2);
    for (int i = 0; i < 3; ++i) session.record_pass();
    session.record_fault(-1);

    std::ostringstream log;
    write_event_log(log, session);
    std::istringstream in(log.str());
    const auto replayed = replay_log(in);

    CHECK(replayed == session);
    CHECK(status_to_json(replayed.status()) == status_to_json(session.status()));
}

TEST_CASE("replay determinism over randomized event logs") {
    std::mt19937_64 rng(20250808);
    std::uniform_int_distribution<std::uint64_t> totals(30, 500);
    std::uniform_int_distribution<std::uint64_t> sensitive(3, 12);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint64_t n = totals(rng);
        const std::uint64_t s0 = std::min(sensitive(rng), n - 1);
        MonitorSession session(n, s0, SigmaTarget::enough_sigma());
        const int steps = 1 + static_cast<int>(coin(rng) * 40);
        for (int step = 0; step < steps; ++step) {
            if (coin(rng) < 0.15) {
                const auto delta = static_cast<std::int64_t>(coin(rng) * 4);
                try {
                    session.record_fault(delta);
                } catch (const std::domain_error&) {
                }
            } else if (session.tested_sites() < session.total_sites()) {
                session.record_pass();
            }
        }
        std::ostringstream log;
        write_event_log(log, session);
        std::istringstream in(log.str());
        const auto replayed = replay_log(in);
        CHECK(replayed == session);
        CHECK(status_to_json(replayed.status()) == status_to_json(session.status()));
    }
}

TEST_CASE("replay accepts CRLF line endings") {
    std::istringstream crlf(
        "{\"n\":20,\"s0\":4,\"target\":\"enough\"}\r\n"
        "{\"event\":\"pass\"}\r\n"
        "{\"event\":\"fault\",\"delta_total_sites\":1}\r\n");
    const auto session = replay_log(crlf);
    CHECK(session.tested_sites() == 1);
    CHECK(session.sensitive_sites() == 5);
    CHECK(session.total_sites() == 21);
}

TEST_CASE("replay_log reports malformed lines by number") {
    std::istringstream bad(
        R"({"n":20,"s0":4,"target":"enough"})"
        "\n"
        R"({"event":"pass"})"
        "\n"
        "garbage\n");
    CHECK(thrown_message([&] { replay_log(bad); }).find("line 3") != std::string::npos);

    std::istringstream empty("");
    CHECK_THROWS_AS(replay_log(empty), parse_error);
}
