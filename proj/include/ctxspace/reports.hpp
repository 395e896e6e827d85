// Human-readable and machine renderings of analysis results. Each report is
// computed once into a plain struct and rendered twice, so the two forms
// always agree on every numeric value. JSON output carries full double
// precision; text output is rounded for reading.

#pragma once

#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ctxspace/context_tables.hpp"
#include "ctxspace/correlation_analysis.hpp"
#include "ctxspace/kolmogorov_space.hpp"
#include "ctxspace/trial_simulator.hpp"

namespace ctxspace {

namespace detail {

inline std::string round_str(double v, int digits = 10) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

inline const char* pass_str(bool pass) { return pass ? "pass" : "FAIL"; }

}  // namespace detail

inline nlohmann::json chsh_to_json(const ChshStatistic& statistic) {
    return {{"pattern", statistic.pattern.str()},
            {"conditional", statistic.conditional},
            {"absolute", statistic.absolute}};
}

inline nlohmann::json bounds_to_json(const BoundReport& report, bool include_uniform_flag) {
    auto check = [](const BoundCheck& c) {
        return nlohmann::json{{"value", c.value}, {"limit", c.limit}, {"pass", c.pass}};
    };
    nlohmann::json bounds = {{"b2", check(report.absolute_bound2)},
                             {"b1", check(report.absolute_bound1)},
                             {"b4", check(report.conditional_bound4)},
                             {"b8", check(report.conditional_bound8)}};
    if (include_uniform_flag) bounds["uniform_weights"] = report.uniform_weights;
    return bounds;
}

inline std::string bounds_to_text(const BoundReport& report) {
    std::ostringstream os;
    auto line = [&](const char* name, const BoundCheck& c) {
        os << "  " << name << " = " << detail::round_str(c.value) << "  <= "
           << detail::round_str(c.limit, 3) << "  " << detail::pass_str(c.pass) << "\n";
    };
    os << "bounds (max over odd-minus sign patterns):\n";
    line("|CHSH absolute|   ", report.absolute_bound2);
    line("|CHSH absolute|   ", report.absolute_bound1);
    line("|CHSH conditional|", report.conditional_bound4);
    line("|CHSH conditional|", report.conditional_bound8);
    return os.str();
}

// --- exact correlation report (analyze) --------------------------------------

struct CorrelationReport {
    int m = 0, n = 0;
    std::vector<CorrelationPair> pairs;
    std::optional<ChshStatistic> chsh;  // present iff the grid is 2x2
    std::optional<BoundReport> bounds;
};

inline CorrelationReport make_correlation_report(const KolmogorovSpace& space) {
    CorrelationReport report;
    report.m = space.m();
    report.n = space.n();
    report.pairs = correlation_table(space);
    if (space.m() == 2 && space.n() == 2) {
        report.chsh = max_chsh(space);
        report.bounds = bound_report(space);
    }
    return report;
}

inline nlohmann::json correlation_report_json(const CorrelationReport& report) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const CorrelationPair& pair : report.pairs)
        pairs.push_back({{"i", pair.i},
                         {"j", pair.j},
                         {"conditional", pair.conditional},
                         {"absolute", pair.absolute}});
    nlohmann::json doc = {{"pairs", std::move(pairs)}};
    doc["chsh"] = report.chsh ? chsh_to_json(*report.chsh) : nlohmann::json(nullptr);
    doc["bounds"] =
        report.bounds ? bounds_to_json(*report.bounds, true) : nlohmann::json(nullptr);
    return doc;
}

inline std::string correlation_report_text(const CorrelationReport& report) {
    std::ostringstream os;
    os << "context grid: " << report.m << "x" << report.n << "\n";
    os << "correlations (conditional C, absolute E):\n";
    for (const CorrelationPair& pair : report.pairs)
        os << "  (" << pair.i << "," << pair.j << ")  C = " << detail::round_str(pair.conditional)
           << "  E = " << detail::round_str(pair.absolute) << "\n";
    if (!report.chsh) {
        os << "CHSH: not applicable (grid is " << report.m << "x" << report.n << ")\n";
        return os.str();
    }
    os << "CHSH (pattern " << report.chsh->pattern.str()
       << "): conditional = " << detail::round_str(report.chsh->conditional)
       << ", absolute = " << detail::round_str(report.chsh->absolute) << "\n";
    os << bounds_to_text(*report.bounds);
    if (report.bounds->uniform_weights) os << "  weights: uniform\n";
    return os.str();
}

// --- validity / no-signaling / independence report (check) -------------------

struct CheckReport {
    int m = 0, n = 0;
    NoSignalingReport no_signaling;
    IndependenceReport independence;
};

inline CheckReport make_check_report(const KolmogorovSpace& space) {
    return CheckReport{space.m(), space.n(), no_signaling_report(space.family()),
                       space.independence_check_eta()};
}

inline nlohmann::json check_report_json(const CheckReport& report) {
    auto side = [](const std::vector<NoSignalingReport::SettingCheck>& checks) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : checks)
            arr.push_back(
                {{"setting", c.setting.index}, {"max_deviation", c.max_deviation}});
        return arr;
    };
    return {{"valid", true},  // reaching a report implies the tables validated
            {"m", report.m},
            {"n", report.n},
            {"no_signaling",
             {{"a_side", side(report.no_signaling.a_side)},
              {"b_side", side(report.no_signaling.b_side)},
              {"max_deviation", report.no_signaling.max_deviation},
              {"signaling", report.no_signaling.signaling}}},
            {"eta_independence",
             {{"max_deviation", report.independence.max_deviation},
              {"independent", report.independence.independent}}}};
}

inline std::string check_report_text(const CheckReport& report) {
    std::ostringstream os;
    os << "tables: valid (" << report.m << "x" << report.n << " grid)\n";
    os << "no-signaling: "
       << (report.no_signaling.signaling ? "SIGNALING" : "pass")
       << " (max marginal deviation " << detail::round_str(report.no_signaling.max_deviation)
       << ")\n";
    for (const auto& c : report.no_signaling.a_side)
        os << "  A setting " << c.setting.index << ": deviation "
           << detail::round_str(c.max_deviation) << "\n";
    for (const auto& c : report.no_signaling.b_side)
        os << "  B setting " << c.setting.index << ": deviation "
           << detail::round_str(c.max_deviation) << "\n";
    os << "eta independence: " << (report.independence.independent ? "pass" : "FAIL")
       << " (max deviation " << detail::round_str(report.independence.max_deviation) << ")\n";
    return os.str();
}

// --- empirical report (simulate / ingest) -------------------------------------

struct EmpiricalReport {
    struct Context {
        int i = 0, j = 0;
        std::uint64_t count = 0;
        std::optional<std::array<double, 4>> p_hat;
        std::optional<double> conditional;
        std::optional<double> conditional_stderr;
        double absolute = 0.0;
    };
    int m = 0, n = 0;
    std::uint64_t trials = 0;
    std::vector<Context> contexts;
    std::vector<std::pair<int, int>> empty_contexts;
    std::optional<ChshStatistic> chsh;  // 2x2 with every context populated
    std::optional<BoundReport> bounds;
};

inline EmpiricalReport make_empirical_report(const EmpiricalEstimate& estimate) {
    EmpiricalReport report;
    report.m = estimate.m();
    report.n = estimate.n();
    report.trials = estimate.total_trials();
    report.empty_contexts = estimate.empty_contexts();
    for (int i = 1; i <= estimate.m(); ++i) {
        for (int j = 1; j <= estimate.n(); ++j) {
            EmpiricalReport::Context ctx;
            ctx.i = i;
            ctx.j = j;
            ctx.count = estimate.count(i, j);
            ctx.absolute = estimate.absolute_correlation(i, j);
            if (estimate.has_context(i, j)) {
                ctx.p_hat = estimate.p_hat(i, j);
                ctx.conditional = estimate.conditional_correlation(i, j);
                ctx.conditional_stderr = estimate.conditional_stderr(i, j);
            }
            report.contexts.push_back(ctx);
        }
    }
    if (estimate.m() == 2 && estimate.n() == 2 && report.empty_contexts.empty()) {
        std::array<double, 4> conditional{};
        std::array<double, 4> absolute{};
        for (std::size_t k = 0; k < 4; ++k) {
            conditional[k] = *report.contexts[k].conditional;
            absolute[k] = report.contexts[k].absolute;
        }
        report.chsh = max_chsh_values(conditional, absolute);
        report.bounds = bound_report_from_values(conditional, absolute, false);
    }
    return report;
}

inline nlohmann::json empirical_report_json(const EmpiricalReport& report) {
    nlohmann::json contexts = nlohmann::json::array();
    for (const auto& ctx : report.contexts) {
        nlohmann::json entry = {{"i", ctx.i}, {"j", ctx.j}, {"count", ctx.count},
                                {"absolute", ctx.absolute}};
        entry["p_hat"] = ctx.p_hat ? nlohmann::json(*ctx.p_hat) : nlohmann::json(nullptr);
        entry["conditional"] =
            ctx.conditional ? nlohmann::json(*ctx.conditional) : nlohmann::json(nullptr);
        entry["conditional_stderr"] = ctx.conditional_stderr
                                          ? nlohmann::json(*ctx.conditional_stderr)
                                          : nlohmann::json(nullptr);
        contexts.push_back(std::move(entry));
    }
    nlohmann::json empty = nlohmann::json::array();
    for (const auto& [i, j] : report.empty_contexts) empty.push_back({i, j});
    nlohmann::json doc = {{"trials", report.trials},
                          {"m", report.m},
                          {"n", report.n},
                          {"contexts", std::move(contexts)},
                          {"empty_contexts", std::move(empty)}};
    doc["chsh"] = report.chsh ? chsh_to_json(*report.chsh) : nlohmann::json(nullptr);
    doc["bounds"] =
        report.bounds ? bounds_to_json(*report.bounds, false) : nlohmann::json(nullptr);
    return doc;
}

inline std::string empirical_report_text(const EmpiricalReport& report) {
    std::ostringstream os;
    os << "trials: " << report.trials << " over " << report.m << "x" << report.n << " contexts\n";
    for (const auto& ctx : report.contexts) {
        os << "context (" << ctx.i << "," << ctx.j << "): " << ctx.count << " trials";
        if (!ctx.p_hat) {
            os << "  [empty context: conditional estimates undefined]\n";
            continue;
        }
        os << "\n  p_hat =";
        for (std::size_t k = 0; k < 4; ++k)
            os << " " << outcome_label(k) << " " << detail::round_str((*ctx.p_hat)[k], 6);
        os << "\n  C_hat = " << detail::round_str(*ctx.conditional, 6) << " +- "
           << detail::round_str(*ctx.conditional_stderr, 3)
           << ", E_hat = " << detail::round_str(ctx.absolute, 6) << "\n";
    }
    if (report.chsh) {
        os << "empirical CHSH (pattern " << report.chsh->pattern.str()
           << "): conditional = " << detail::round_str(report.chsh->conditional, 6)
           << ", absolute = " << detail::round_str(report.chsh->absolute, 6) << "\n";
        os << bounds_to_text(*report.bounds);
    } else if (report.m == 2 && report.n == 2) {
        os << "empirical CHSH: not available (empty contexts)\n";
    } else {
        os << "empirical CHSH: not applicable (grid is " << report.m << "x" << report.n << ")\n";
    }
    return os.str();
}

// --- convergence report (simulate) --------------------------------------------

inline nlohmann::json convergence_to_json(const ConvergenceCheck& check, double tolerance) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& item : check.items) {
        nlohmann::json entry = {{"quantity", item.quantity},
                                {"allowance", item.allowance},
                                {"pass", item.pass},
                                {"empty_context", item.empty_context}};
        if (item.empty_context) {
            entry["exact"] = nullptr;
            entry["estimate"] = nullptr;
            entry["deviation"] = nullptr;
        } else {
            entry["exact"] = item.exact;
            entry["estimate"] = item.estimate;
            entry["deviation"] = item.deviation;
        }
        items.push_back(std::move(entry));
    }
    return {{"tolerance", tolerance}, {"all_pass", check.all_pass}, {"items", std::move(items)}};
}

inline std::string convergence_text(const ConvergenceCheck& check, double tolerance) {
    std::ostringstream os;
    os << "convergence vs exact space (tolerance " << detail::round_str(tolerance, 6) << "):\n";
    for (const auto& item : check.items) {
        os << "  " << detail::pass_str(item.pass) << "  " << item.quantity;
        if (item.empty_context) {
            os << "  [empty context]\n";
            continue;
        }
        os << "  exact " << detail::round_str(item.exact, 6) << "  estimate "
           << detail::round_str(item.estimate, 6) << "  deviation "
           << detail::round_str(item.deviation, 3) << "  allowance "
           << detail::round_str(item.allowance, 3) << "\n";
    }
    os << (check.all_pass ? "all quantities within allowance\n"
                          : "some quantities outside allowance\n");
    return os.str();
}

}  // namespace ctxspace
