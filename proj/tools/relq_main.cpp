// relq: reliability / relevance quantification CLI.
//
// Subcommands: bounds, plan, monitor, curve, index, query.
// Exit codes: 0 success, 1 usage, 2 domain error, 3 I/O or format error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "relq/core_law.hpp"
#include "relq/errors.hpp"
#include "relq/monitor.hpp"
#include "relq/relevance.hpp"
#include "relq/site_model.hpp"

namespace {

using nlohmann::json;

struct GlobalOptions {
    bool json_output = false;
    bool quiet = false;
};

std::string fmt4(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.4g", value);
    return buffer;
}

std::string fmt_full(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::uint64_t to_count(double value, const std::string& what) {
    if (!(value >= 1.0) || value > 9.0e18 || std::floor(value) != value) {
        throw std::domain_error(what + " must be a positive integer count (scientific notation accepted)");
    }
    return static_cast<std::uint64_t>(value);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

// ---- bounds -------------------------------------------------------------

void run_bounds(const GlobalOptions& global, double n, double coverage, double semantic_mean,
                double o_constant) {
    const auto report = relq::evaluate_bounds(n, coverage, semantic_mean, semantic_mean, o_constant);
    if (global.json_output) {
        json doc{{"n", n},
                 {"coverage", coverage},
                 {"semantic_mean", semantic_mean},
                 {"not_growing", !report.has_value()}};
        if (report) {
            doc["lambda_min"] = report->lambda_min;
            doc["lambda_max"] = report->lambda_max;
            doc["reliability_min"] = report->reliability_min;
            doc["reliability_max"] = report->reliability_max;
        }
        std::cout << doc.dump() << '\n';
        return;
    }
    if (!report) {
        std::cout << "NOT_GROWING: coverage " << fmt4(coverage)
                  << " has not passed the semantic mean " << fmt4(semantic_mean)
                  << "; the intensity bound is not decreasing yet\n";
        return;
    }
    std::cout << "lambda_min   " << fmt4(report->lambda_min) << '\n'
              << "lambda_max   " << fmt4(report->lambda_max) << '\n'
              << "reliability  [" << fmt4(report->reliability_min) << ", "
              << fmt4(report->reliability_max) << "]\n";
}

// ---- plan ---------------------------------------------------------------

json plan_row_json(const relq::PlanRow& row) {
    return json{{"target", row.label},
                {"lambda_rq", row.lambda_rq},
                {"tests", row.tests ? json(*row.tests) : json(nullptr)},
                {"coverage", row.coverage ? json(*row.coverage) : json(nullptr)}};
}

void print_plan_row(const relq::PlanRow& row, std::optional<double> ratio_vs_four) {
    std::cout << std::left << std::setw(8) << row.label << std::setw(12) << fmt4(row.lambda_rq);
    if (row.tests) {
        std::cout << std::setw(16) << *row.tests << std::setw(14) << fmt4(*row.coverage);
    } else {
        std::cout << std::setw(16) << "NO_SOLUTION" << std::setw(14) << "-";
    }
    std::cout << (ratio_vs_four ? fmt4(*ratio_vs_four) : std::string("-")) << '\n';
}

void run_plan(const GlobalOptions& global, double n_value, std::optional<double> sensitive,
              bool blackbox, const std::string& target_text) {
    const std::uint64_t n = to_count(n_value, "--n");
    const std::uint64_t s0 =
        blackbox ? relq::blackbox_sensitive_sites(n) : to_count(*sensitive, "--sensitive");

    relq::SigmaTarget requested = relq::SigmaTarget::enough_sigma();
    if (target_text.rfind("lambda=", 0) == 0) {
        try {
            requested = relq::SigmaTarget::custom(std::stod(target_text.substr(7)));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--target", "expected lambda=<positive intensity>");
        }
    } else {
        try {
            requested = relq::sigma_target_from_name(target_text, std::nullopt);
        } catch (const std::domain_error&) {
            throw CLI::ValidationError("--target", "expected four|six|enough|lambda=<intensity>");
        }
    }

    const relq::PlanTable table = relq::plan(n, s0);
    const relq::PlanRow requested_row =
        requested.level == relq::SigmaTarget::Level::four    ? table.four
        : requested.level == relq::SigmaTarget::Level::six   ? table.six
        : requested.level == relq::SigmaTarget::Level::enough ? table.enough
                                                              : relq::plan_row(n, s0, requested);

    if (global.json_output) {
        json doc{{"n", table.total_sites},
                 {"s0", table.sensitive_sites},
                 {"semantic_mean", table.semantic_mean},
                 {"rows", json::array({plan_row_json(table.four), plan_row_json(table.six),
                                       plan_row_json(table.enough)})},
                 {"six_over_four",
                  table.six_over_four ? json(*table.six_over_four) : json(nullptr)},
                 {"enough_over_four",
                  table.enough_over_four ? json(*table.enough_over_four) : json(nullptr)},
                 {"enough_over_six",
                  table.enough_over_six ? json(*table.enough_over_six) : json(nullptr)},
                 {"requested", plan_row_json(requested_row)}};
        std::cout << doc.dump() << '\n';
    } else {
        std::cout << "n " << n << "  s0 " << s0 << "  semantic mean "
                  << fmt4(table.semantic_mean) << '\n';
        std::cout << std::left << std::setw(8) << "target" << std::setw(12) << "lambda_rq"
                  << std::setw(16) << "tests" << std::setw(14) << "coverage"
                  << "vs_four" << '\n';
        print_plan_row(table.four, table.four.tests ? std::optional<double>(1.0) : std::nullopt);
        print_plan_row(table.six, table.six_over_four);
        print_plan_row(table.enough, table.enough_over_four);
        if (requested.level == relq::SigmaTarget::Level::custom) {
            std::optional<double> ratio;
            if (requested_row.tests && table.four.tests) {
                ratio = static_cast<double>(*requested_row.tests) /
                        static_cast<double>(*table.four.tests);
            }
            print_plan_row(requested_row, ratio);
        }
    }

    if (!requested_row.tests) {
        throw std::domain_error("no solution: even full coverage misses the '" +
                                requested_row.label + "' target for n=" + std::to_string(n));
    }
}

// ---- monitor ------------------------------------------------------------

std::string human_status(std::size_t event_number, const relq::TestEvent& event,
                         const relq::StatusReport& report) {
    std::ostringstream out;
    out << "event " << event_number << ' '
        << (event.kind == relq::TestEvent::Kind::pass ? "pass " : "fault")
        << "  coverage=" << fmt4(report.coverage) << "  tau=" << fmt4(report.tau);
    if (report.bounds) {
        out << "  lambda_max=" << fmt4(report.bounds->lambda_max);
    } else {
        out << "  lambda_max=NOT_GROWING";
    }
    out << "  target_met=" << (report.target_met ? "yes" : "no");
    if (report.tests_remaining) {
        out << "  remaining=" << *report.tests_remaining;
    } else {
        out << "  remaining=NO_SOLUTION";
    }
    return out.str();
}

void run_monitor(const GlobalOptions& global, const std::string& events_path,
                 const std::string& spec_path) {
    auto events = open_input(events_path);

    std::string line;
    if (!std::getline(events, line)) {
        throw relq::parse_error("event log line 1: missing session header");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const relq::SessionHeader header = relq::parse_header_line(line, 1);

    std::uint64_t n = 0;
    std::uint64_t s0 = 0;
    if (!spec_path.empty()) {
        auto spec_in = open_input(spec_path);
        const relq::SiteSpec spec = relq::load_site_spec(spec_in, spec_path);
        n = spec.effective_total_sites();
        s0 = spec.effective_sensitive_sites();
    } else {
        if (!header.total_sites || !header.sensitive_sites) {
            throw relq::parse_error(
                "event log line 1: header requires 'n' and 's0' unless --spec is given");
        }
        n = *header.total_sites;
        s0 = *header.sensitive_sites;
    }

    relq::MonitorSession session(n, s0, header.target);
    std::size_t line_number = 2;
    std::size_t event_number = 0;
    while (std::getline(events, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) {
            const relq::TestEvent event = relq::parse_event_line(line, line_number);
            session.apply(event);
            ++event_number;
            if (!global.quiet) {
                const auto report = session.status();
                if (global.json_output) {
                    std::cout << relq::status_to_json(report) << '\n';
                } else {
                    std::cout << human_status(event_number, event, report) << '\n';
                }
            }
        }
        ++line_number;
    }
    std::cout << relq::status_to_json(session.status()) << '\n';
}

// ---- curve --------------------------------------------------------------

void run_curve(const GlobalOptions& global, double n, double semantic_mean, std::uint64_t resolution,
               const std::string& out_path) {
    auto out = open_output(out_path);
    out << "c,lambda_max,reliability,relevance\n";
    // Uniform grid strictly inside (semantic_mean, 1): one step in from the
    // singular left endpoint, one step short of full coverage.
    const double step = (1.0 - semantic_mean) / static_cast<double>(resolution + 1);
    for (std::uint64_t i = 1; i <= resolution; ++i) {
        const double c = semantic_mean + static_cast<double>(i) * step;
        const auto lambda = relq::max_failure_intensity(n, c, semantic_mean);
        if (!lambda) {
            throw std::domain_error("curve: sample at coverage " + fmt4(c) +
                                    " is inside the non-growing region; lower the resolution");
        }
        out << fmt_full(c) << ',' << fmt_full(*lambda) << ',' << fmt_full(relq::reliability(*lambda))
            << ',' << fmt_full(relq::relevance(n, c, semantic_mean)) << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing '" + out_path + "'");
    if (!global.quiet) {
        if (global.json_output) {
            std::cout << json{{"rows", resolution}, {"path", out_path}}.dump() << '\n';
        } else {
            std::cout << "wrote " << resolution << " rows to " << out_path << '\n';
        }
    }
}

// ---- index / query ------------------------------------------------------

void run_index(const GlobalOptions& global, const std::vector<std::string>& inputs,
               const std::string& out_path, bool lowercase, bool split_punct) {
    relq::TokenizerConfig config;
    config.lowercase = lowercase;
    config.delimiters = split_punct ? relq::TokenizerConfig::Delimiters::whitespace_and_punct
                                    : relq::TokenizerConfig::Delimiters::whitespace;
    std::vector<std::pair<std::string, std::string>> docs;
    docs.reserve(inputs.size());
    for (const auto& path : inputs) {
        auto in = open_input(path);
        std::ostringstream text;
        text << in.rdbuf();
        docs.emplace_back(path, text.str());
    }
    const relq::ContentIndex index = relq::build_index(docs, config);
    auto out = open_output(out_path);
    relq::save_index(index, out);
    if (!out) throw std::runtime_error("failed while writing '" + out_path + "'");
    if (!global.quiet) {
        if (global.json_output) {
            std::cout << json{{"documents", index.documents.size()}, {"path", out_path}}.dump()
                      << '\n';
        } else {
            std::cout << "indexed " << index.documents.size() << " document(s) into " << out_path
                      << '\n';
        }
    }
}

void run_query(const GlobalOptions& global, const std::string& index_path,
               const std::string& query_text) {
    auto in = open_input(index_path);
    const relq::ContentIndex index = relq::load_index(in, index_path);
    const auto ranked = relq::rank(index, query_text);
    if (global.json_output) {
        json rows = json::array();
        for (const auto& [doc_id, score] : ranked) {
            rows.push_back(json{{"doc_id", doc_id},
                                {"relevance", score.relevance},
                                {"coverage", score.coverage},
                                {"mode", std::string(relq::relevance_mode_name(score.mode))}});
        }
        std::cout << rows.dump() << '\n';
        return;
    }
    std::cout << "doc_id\trelevance\tcoverage\tmode\n";
    for (const auto& [doc_id, score] : ranked) {
        std::cout << doc_id << '\t' << fmt4(score.relevance) << '\t' << fmt4(score.coverage)
                  << '\t' << relq::relevance_mode_name(score.mode) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relq: failure-intensity bounds, test planning, reliability monitoring,"
                 " and content relevance scoring"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_flag("--json", global.json_output, "machine-readable JSON output");
    app.add_flag("--quiet", global.quiet, "suppress per-event and progress output");

    // bounds
    double b_n = 0, b_coverage = 0, b_mean = 0, b_o = 0.0;
    auto* bounds = app.add_subcommand("bounds", "evaluate the failure-intensity bounds");
    bounds->fallthrough();
    bounds->add_option("--n", b_n, "total site count")->required()->check(CLI::Range(1.0, 1e18));
    bounds->add_option("--coverage", b_coverage, "test coverage in [0,1]")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    bounds->add_option("--semantic-mean", b_mean, "semantic mean in (0,1)")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    bounds->add_option("--o-constant", b_o, "stand-in for the O(ln n) term (default 0)")
        ->check(CLI::Range(0.0, 1.0));
    bounds->callback([&] { run_bounds(global, b_n, b_coverage, b_mean, b_o); });

    // plan
    double p_n = 0;
    std::optional<double> p_sensitive;
    bool p_blackbox = false;
    std::string p_target = "enough";
    auto* plancmd = app.add_subcommand("plan", "required tests per sigma target");
    plancmd->fallthrough();
    plancmd->add_option("--n", p_n, "total site count")->required()->check(CLI::Range(1.0, 9e18));
    auto* sens = plancmd->add_option("--sensitive", p_sensitive, "sensitive-site count");
    auto* bb = plancmd->add_flag("--blackbox", p_blackbox, "sensitive count = round(sqrt(n))");
    sens->excludes(bb);
    bb->excludes(sens);
    plancmd->add_option("--target", p_target, "four|six|enough|lambda=<intensity>");
    plancmd->callback([&] {
        if (!p_blackbox && !p_sensitive) {
            throw CLI::RequiredError("plan: exactly one of --sensitive/--blackbox");
        }
        run_plan(global, p_n, p_sensitive, p_blackbox, p_target);
    });

    // monitor
    std::string m_events, m_spec;
    auto* monitorcmd = app.add_subcommand("monitor", "replay an event log and report status");
    monitorcmd->fallthrough();
    monitorcmd->add_option("--events", m_events, "JSON Lines event log")->required();
    monitorcmd->add_option("--spec", m_spec, "site-spec JSON supplying n and s0");
    monitorcmd->callback([&] { run_monitor(global, m_events, m_spec); });

    // curve
    double c_n = 0, c_mean = 0;
    std::uint64_t c_resolution = 0;
    std::string c_out;
    auto* curvecmd = app.add_subcommand("curve", "emit the coverage -> intensity/relevance curve as CSV");
    curvecmd->fallthrough();
    curvecmd->add_option("--n", c_n, "total site count")->required()->check(CLI::Range(1.0, 1e18));
    curvecmd->add_option("--semantic-mean", c_mean, "semantic mean in (0,1)")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    curvecmd->add_option("--resolution", c_resolution, "number of coverage samples (>= 2)")
        ->required()
        ->check(CLI::Range(static_cast<std::uint64_t>(2), static_cast<std::uint64_t>(100000000)));
    curvecmd->add_option("--out", c_out, "CSV output path")->required();
    curvecmd->callback([&] { run_curve(global, c_n, c_mean, c_resolution, c_out); });

    // index
    std::vector<std::string> i_inputs;
    std::string i_out;
    bool i_lowercase = false, i_punct = false;
    auto* indexcmd = app.add_subcommand("index", "build a content index from document files");
    indexcmd->fallthrough();
    indexcmd->add_option("--out", i_out, "index JSON output path")->required();
    indexcmd->add_flag("--lowercase", i_lowercase, "fold ASCII case while tokenizing");
    indexcmd->add_flag("--split-punct", i_punct, "treat ASCII punctuation as delimiters");
    indexcmd->add_option("inputs", i_inputs, "document files (doc id = path)")->required();
    indexcmd->callback([&] { run_index(global, i_inputs, i_out, i_lowercase, i_punct); });

    // query
    std::string q_index, q_text, q_file;
    auto* querycmd = app.add_subcommand("query", "rank indexed documents against a query");
    querycmd->fallthrough();
    querycmd->add_option("--index", q_index, "index JSON path")->required();
    auto* q_text_opt = querycmd->add_option("text", q_text, "query text");
    querycmd->add_option("--query-file", q_file, "read the query text from a file");
    querycmd->callback([&] {
        std::string text = q_text;
        if (!q_file.empty()) {
            auto in = open_input(q_file);
            std::ostringstream buffer;
            buffer << in.rdbuf();
            text = buffer.str();
        } else if (q_text_opt->count() == 0) {
            throw CLI::RequiredError("query: provide query text or --query-file");
        }
        run_query(global, q_index, text);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const relq::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::overflow_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
