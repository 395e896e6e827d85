// ctxspace: build, query, and simulate one classical probability space
// covering incompatible measurement contexts.
//
// Subcommands:
//   build     family.json -> canonical atom dump (stdout or --out)
//   analyze   family.json -> correlations, CHSH, bound verdicts
//   simulate  family.json -> trial records CSV + convergence report
//   ingest    records.csv -> empirical tables, correlations, CHSH, bounds
//   check     family.json -> validation, no-signaling, independence verdicts
//
// Exit codes: 0 success, 1 input or validation error, 2 internal invariant
// violation.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxspace/ctxspace.hpp"

namespace {

struct WeightFlags {
    std::string a;
    std::string b;
};

std::vector<double> parse_weight_list(const std::string& csv, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(field, &used));
            if (used != field.size()) throw std::invalid_argument(field);
        } catch (const std::exception&) {
            throw ctxspace::Error(std::string(flag) + ": \"" + field + "\" is not a number");
        }
    }
    if (out.empty()) throw ctxspace::Error(std::string(flag) + ": empty list");
    return out;
}

ctxspace::ContextWeights resolve_weights(const WeightFlags& flags,
                                         const ctxspace::ContextFamily& family) {
    if (flags.a.empty() && flags.b.empty())
        return ctxspace::ContextWeights::uniform(family.m(), family.n());
    std::vector<double> u = flags.a.empty()
                                ? std::vector<double>(family.m(), 1.0 / family.m())
                                : parse_weight_list(flags.a, "--weights-a");
    std::vector<double> v = flags.b.empty()
                                ? std::vector<double>(family.n(), 1.0 / family.n())
                                : parse_weight_list(flags.b, "--weights-b");
    return ctxspace::ContextWeights(std::move(u), std::move(v));
}

void write_text_or_file(const std::string& out_path, const std::string& payload) {
    if (out_path.empty() || out_path == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ctxspace::Error("cannot open output file: " + out_path);
    out << payload;
    if (!out) throw ctxspace::Error("write failed: " + out_path);
}

int run_build(const std::string& family_path, const WeightFlags& weights,
              const std::string& out_path) {
    const ctxspace::ContextFamily family = ctxspace::load_family(family_path);
    const ctxspace::KolmogorovSpace space(family, resolve_weights(weights, family));
    write_text_or_file(out_path, ctxspace::space_dump(space).dump(2) + "\n");
    return 0;
}

int run_analyze(const std::string& family_path, const WeightFlags& weights, bool as_json) {
    const ctxspace::ContextFamily family = ctxspace::load_family(family_path);
    const ctxspace::KolmogorovSpace space(family, resolve_weights(weights, family));
    const ctxspace::CorrelationReport report = ctxspace::make_correlation_report(space);
    if (as_json)
        std::cout << ctxspace::correlation_report_json(report).dump(2) << "\n";
    else
        std::cout << ctxspace::correlation_report_text(report);
    return 0;
}

int run_check(const std::string& family_path, const WeightFlags& weights, bool as_json) {
    const ctxspace::ContextFamily family = ctxspace::load_family(family_path);
    const ctxspace::KolmogorovSpace space(family, resolve_weights(weights, family));
    const ctxspace::CheckReport report = ctxspace::make_check_report(space);
    if (as_json)
        std::cout << ctxspace::check_report_json(report).dump(2) << "\n";
    else
        std::cout << ctxspace::check_report_text(report);
    return 0;
}

int run_simulate(const std::string& family_path, const WeightFlags& weights,
                 std::uint64_t trials, std::uint64_t seed, const std::string& out_path,
                 double tolerance, bool as_json) {
    const ctxspace::ContextFamily family = ctxspace::load_family(family_path);
    ctxspace::ContextWeights context_weights = resolve_weights(weights, family);
    const ctxspace::KolmogorovSpace space(family, context_weights);
    const ctxspace::SimulationConfig config{family, std::move(context_weights), trials, seed};
    const std::vector<ctxspace::TrialRecord> records = ctxspace::simulate(config);

    {
        std::ofstream out(out_path);
        if (!out) throw ctxspace::Error("cannot open output file: " + out_path);
        ctxspace::write_records_csv(out, records);
        if (!out) throw ctxspace::Error("write failed: " + out_path);
    }

    const auto estimate =
        ctxspace::EmpiricalEstimate::from_records(records, family.m(), family.n());
    const ctxspace::ConvergenceCheck convergence =
        ctxspace::convergence_check(estimate, space, tolerance);
    const ctxspace::EmpiricalReport empirical = ctxspace::make_empirical_report(estimate);
    if (as_json) {
        nlohmann::json doc = {{"records", out_path},
                              {"convergence", ctxspace::convergence_to_json(convergence, tolerance)},
                              {"empirical", ctxspace::empirical_report_json(empirical)}};
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "wrote " << records.size() << " records to " << out_path << "\n";
        std::cout << ctxspace::empirical_report_text(empirical);
        std::cout << ctxspace::convergence_text(convergence, tolerance);
    }
    return 0;
}

int run_ingest(const std::string& csv_path, int m, int n, bool as_json) {
    const std::vector<ctxspace::TrialRecord> records = ctxspace::load_records_csv(csv_path);
    ctxspace::EmpiricalEstimate estimate = [&] {
        try {
            return ctxspace::EmpiricalEstimate::from_records(records, m, n);
        } catch (const ctxspace::BadRecordError& e) {
            // header is line 1, records follow
            throw ctxspace::Error(csv_path + " line " + std::to_string(e.record_index() + 2) +
                                  ": " + e.what());
        }
    }();
    const ctxspace::EmpiricalReport report = ctxspace::make_empirical_report(estimate);
    if (as_json)
        std::cout << ctxspace::empirical_report_json(report).dump(2) << "\n";
    else
        std::cout << ctxspace::empirical_report_text(report);
    for (const auto& [i, j] : report.empty_contexts)
        std::cerr << "warning: no trials for context (" << i << "," << j << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"classical probability spaces for incompatible measurement contexts"};
    app.require_subcommand(1);

    WeightFlags weights;
    std::string family_path;
    std::string out_path;
    std::string csv_path;
    bool as_json = false;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 0;
    double tolerance = 0.01;
    int m = 0, n = 0;

    auto add_weight_flags = [&](CLI::App* cmd) {
        cmd->add_option("--weights-a", weights.a, "A-side gate probabilities, comma separated");
        cmd->add_option("--weights-b", weights.b, "B-side gate probabilities, comma separated");
    };

    CLI::App* build = app.add_subcommand("build", "build the space and dump its atoms");
    build->add_option("family", family_path, "context family JSON")->required();
    build->add_option("--out", out_path, "dump path (default stdout)");
    add_weight_flags(build);

    CLI::App* analyze = app.add_subcommand("analyze", "correlations, CHSH, bound verdicts");
    analyze->add_option("family", family_path, "context family JSON")->required();
    analyze->add_flag("--json", as_json, "machine report to stdout");
    add_weight_flags(analyze);

    CLI::App* simulate = app.add_subcommand("simulate", "run trials and compare to the space");
    simulate->add_option("family", family_path, "context family JSON")->required();
    simulate->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "64-bit generator seed");
    simulate->add_option("--out", out_path, "records CSV path")->required();
    simulate->add_option("--tolerance", tolerance, "convergence tolerance");
    simulate->add_flag("--json", as_json, "machine report to stdout");
    add_weight_flags(simulate);

    CLI::App* ingest = app.add_subcommand("ingest", "estimate from an external records CSV");
    ingest->add_option("records", csv_path, "trial records CSV")->required();
    ingest->add_option("--m", m, "number of A-side settings")->required();
    ingest->add_option("--n", n, "number of B-side settings")->required();
    ingest->add_flag("--json", as_json, "machine report to stdout");

    CLI::App* check = app.add_subcommand("check", "validate and run diagnostics");
    check->add_option("family", family_path, "context family JSON")->required();
    check->add_flag("--json", as_json, "machine report to stdout");
    add_weight_flags(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (build->parsed()) return run_build(family_path, weights, out_path);
        if (analyze->parsed()) return run_analyze(family_path, weights, as_json);
        if (simulate->parsed())
            return run_simulate(family_path, weights, trials, seed, out_path, tolerance, as_json);
        if (ingest->parsed()) return run_ingest(csv_path, m, n, as_json);
        if (check->parsed()) return run_check(family_path, weights, as_json);
    } catch (const ctxspace::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const ctxspace::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
