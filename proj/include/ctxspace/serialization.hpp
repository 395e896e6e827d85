// File formats.
//
// Context-family JSON:
//   { "m": int, "n": int, "model": "explicit" | "singlet",
//     "angles_a": [radians...], "angles_b": [radians...],   (singlet only)
//     "tables": { "i,j": [p_pp, p_pm, p_mp, p_mm], ... } }  (explicit only)
//
// Space dump: JSON array of { "i", "eps", "j", "eps_prime", "p" } in
// canonical atom order (lexicographic by (i, eps, j, eps_prime), -1 first).
//
// Trial records CSV: header "trial_id,eta_a,eta_b,a,b", one integer row per
// trial, LF line endings.

#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ctxspace/context_tables.hpp"
#include "ctxspace/errors.hpp"
#include "ctxspace/kolmogorov_space.hpp"
#include "ctxspace/trial_simulator.hpp"

namespace ctxspace {

inline constexpr const char* kRecordsCsvHeader = "trial_id,eta_a,eta_b,a,b";

namespace detail {

inline std::pair<int, int> parse_context_key(const std::string& key) {
    const auto comma = key.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 >= key.size())
        throw ParseError("table key \"" + key + "\" is not of the form \"i,j\"");
    try {
        std::size_t used_i = 0;
        std::size_t used_j = 0;
        const int i = std::stoi(key.substr(0, comma), &used_i);
        const std::string j_part = key.substr(comma + 1);
        const int j = std::stoi(j_part, &used_j);
        if (used_i != comma || used_j != j_part.size())
            throw ParseError("table key \"" + key + "\" is not of the form \"i,j\"");
        return {i, j};
    } catch (const std::invalid_argument&) {
        throw ParseError("table key \"" + key + "\" is not of the form \"i,j\"");
    } catch (const std::out_of_range&) {
        throw ParseError("table key \"" + key + "\" is out of integer range");
    }
}

inline std::string context_key(int i, int j) {
    return std::to_string(i) + "," + std::to_string(j);
}

}  // namespace detail

inline ContextFamily family_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("family document must be a JSON object");
    for (const char* field : {"m", "n", "model"})
        if (!doc.contains(field))
            throw ParseError(std::string("family document missing \"") + field + "\"");
    if (!doc["m"].is_number_integer() || !doc["n"].is_number_integer())
        throw ParseError("\"m\" and \"n\" must be integers");
    const int m = doc["m"].get<int>();
    const int n = doc["n"].get<int>();
    const std::string model = doc["model"].get<std::string>();

    if (model == "singlet") {
        if (doc.contains("tables"))
            throw ParseError("singlet model takes angle lists, not \"tables\"");
        for (const char* field : {"angles_a", "angles_b"})
            if (!doc.contains(field) || !doc[field].is_array())
                throw ParseError(std::string("singlet model needs array \"") + field + "\"");
        auto read_angles = [](const nlohmann::json& arr, const char* name, int expected) {
            if (static_cast<int>(arr.size()) != expected)
                throw ParseError(std::string("\"") + name + "\" has " +
                                 std::to_string(arr.size()) + " entries, expected " +
                                 std::to_string(expected));
            std::vector<Angle> angles;
            angles.reserve(arr.size());
            for (const auto& x : arr) {
                if (!x.is_number()) throw ParseError(std::string(name) + " entries must be numbers");
                angles.emplace_back(x.get<double>());
            }
            return angles;
        };
        return ContextFamily::singlet(read_angles(doc["angles_a"], "angles_a", m),
                                      read_angles(doc["angles_b"], "angles_b", n));
    }

    if (model == "explicit") {
        if (doc.contains("angles_a") || doc.contains("angles_b"))
            throw ParseError("explicit model takes \"tables\", not angle lists");
        if (!doc.contains("tables") || !doc["tables"].is_object())
            throw ParseError("explicit model needs object \"tables\"");
        std::map<std::pair<int, int>, OutcomeTable> tables;
        for (const auto& [key, value] : doc["tables"].items()) {
            const auto [i, j] = detail::parse_context_key(key);
            if (!value.is_array() || value.size() != 4)
                throw ParseError("table \"" + key + "\" must be an array of 4 probabilities");
            std::array<double, 4> entries{};
            for (std::size_t k = 0; k < 4; ++k) {
                if (!value[k].is_number())
                    throw ParseError("table \"" + key + "\" entries must be numbers");
                entries[k] = value[k].get<double>();
            }
            tables.emplace(std::pair<int, int>{i, j}, OutcomeTable::validated(entries));
        }
        return ContextFamily::from_tables(m, n, tables);
    }

    throw ParseError("model must be \"explicit\" or \"singlet\", got \"" + model + "\"");
}

inline nlohmann::json family_to_json(const ContextFamily& family) {
    nlohmann::json doc;
    doc["m"] = family.m();
    doc["n"] = family.n();
    if (family.has_angles()) {
        doc["model"] = "singlet";
        auto radians = [](const std::vector<Angle>& angles) {
            std::vector<double> out;
            out.reserve(angles.size());
            for (const Angle& a : angles) out.push_back(a.radians());
            return out;
        };
        doc["angles_a"] = radians(family.angles_a());
        doc["angles_b"] = radians(family.angles_b());
    } else {
        doc["model"] = "explicit";
        nlohmann::json tables = nlohmann::json::object();
        for (int i = 1; i <= family.m(); ++i)
            for (int j = 1; j <= family.n(); ++j)
                tables[detail::context_key(i, j)] = family.table(i, j).entries();
        doc["tables"] = std::move(tables);
    }
    return doc;
}

inline ContextFamily load_family(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open family file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return family_from_json(doc);
}

inline nlohmann::json space_dump(const KolmogorovSpace& space) {
    nlohmann::json atoms = nlohmann::json::array();
    for (std::size_t k = 0; k < space.atoms().size(); ++k) {
        const Atom& atom = space.atoms()[k];
        atoms.push_back({{"i", atom.i},
                         {"eps", atom.eps},
                         {"j", atom.j},
                         {"eps_prime", atom.eps_prime},
                         {"p", space.masses()[k]}});
    }
    return atoms;
}

// --- trial records CSV -------------------------------------------------------

inline void write_records_csv(std::ostream& out, std::span<const TrialRecord> records) {
    out << kRecordsCsvHeader << "\n";
    for (const TrialRecord& r : records)
        out << r.trial_id << "," << r.eta_a << "," << r.eta_b << "," << r.a << "," << r.b << "\n";
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline long long parse_int_field(const std::string& field, std::size_t line_no,
                                 const char* name) {
    try {
        std::size_t used = 0;
        const long long value = std::stoll(field, &used);
        if (used != field.size())
            throw ParseError("line " + std::to_string(line_no) + ": field " + name + " \"" +
                             field + "\" is not an integer");
        return value;
    } catch (const std::invalid_argument&) {
        throw ParseError("line " + std::to_string(line_no) + ": field " + name + " \"" + field +
                         "\" is not an integer");
    } catch (const std::out_of_range&) {
        throw ParseError("line " + std::to_string(line_no) + ": field " + name +
                         " is out of range");
    }
}

}  // namespace detail

// Reads the full record stream. Accepts CRLF input; validation of channel
// ranges and outcome values happens downstream where (m, n) are known.
inline std::vector<TrialRecord> read_records_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };
    if (!next_line()) throw ParseError("empty records file, expected header");
    if (line != kRecordsCsvHeader)
        throw ParseError("line 1: header must be \"" + std::string(kRecordsCsvHeader) +
                         "\", got \"" + line + "\"");
    std::vector<TrialRecord> records;
    while (next_line()) {
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 5)
            throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                             std::to_string(fields.size()));
        TrialRecord r;
        const long long id = detail::parse_int_field(fields[0], line_no, "trial_id");
        if (id < 0) throw ParseError("line " + std::to_string(line_no) + ": trial_id is negative");
        r.trial_id = static_cast<std::uint64_t>(id);
        r.eta_a = static_cast<int>(detail::parse_int_field(fields[1], line_no, "eta_a"));
        r.eta_b = static_cast<int>(detail::parse_int_field(fields[2], line_no, "eta_b"));
        r.a = static_cast<int>(detail::parse_int_field(fields[3], line_no, "a"));
        r.b = static_cast<int>(detail::parse_int_field(fields[4], line_no, "b"));
        records.push_back(r);
    }
    return records;
}

inline std::vector<TrialRecord> load_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open records file: " + path);
    try {
        return read_records_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace ctxspace
