#ifndef IVBOUND_IO_HPP
#define IVBOUND_IO_HPP

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ivbound/engine.hpp"
#include "ivbound/errors.hpp"
#include "ivbound/lp.hpp"
#include "ivbound/model.hpp"

namespace ivbound::io {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? ""
                                                : field.substr(b, e - b + 1));
    }
    return fields;
}

inline int parse_binary(const std::string& s, const char* what, int row) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw ParseError("row " + std::to_string(row) + ": " + what + " value '" +
                     s + "' is not 0 or 1");
}

inline long long parse_count(const std::string& s, int row) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size() || v < 0) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("row " + std::to_string(row) + ": count value '" + s +
                         "' is not a nonnegative integer");
    }
}

}  // namespace detail

// Reads either raw records (header "z,a,y") or pre-aggregated counts
// (header "z,a,y,count"), auto-detected by the header line.
inline CountsTable read_counts_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input file");
    const auto header = detail::split_csv_line(line);
    bool counts_format;
    if (header == std::vector<std::string>{"z", "a", "y"}) {
        counts_format = false;
    } else if (header == std::vector<std::string>{"z", "a", "y", "count"}) {
        counts_format = true;
    } else {
        throw ParseError("unrecognized header: expected 'z,a,y' or 'z,a,y,count'");
    }

    CountsTable counts;
    bool any = false;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        const std::size_t expected = counts_format ? 4 : 3;
        if (fields.size() != expected)
            throw ParseError("row " + std::to_string(row) + ": expected " +
                             std::to_string(expected) + " fields, got " +
                             std::to_string(fields.size()));
        const int z = detail::parse_binary(fields[0], "z", row);
        const int a = detail::parse_binary(fields[1], "a", row);
        const int y = detail::parse_binary(fields[2], "y", row);
        const long long c =
            counts_format ? detail::parse_count(fields[3], row) : 1;
        counts.n[cell_index(z, a, y)] += c;
        any = true;
    }
    if (!any) throw EmptyData();
    for (int z = 0; z < 2; ++z)
        if (counts.arm_total(z) == 0) throw MissingArm(z);
    return counts;
}

inline CountsTable read_counts_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file: " + path);
    return read_counts_csv(in);
}

inline void write_counts_csv(std::ostream& out, const CountsTable& counts) {
    out << "z,a,y,count\n";
    for (int z = 0; z < 2; ++z)
        for (int a = 0; a < 2; ++a)
            for (int y = 0; y < 2; ++y)
                out << z << ',' << a << ',' << y << ','
                    << counts.n[cell_index(z, a, y)] << '\n';
}

inline void write_records_csv(std::ostream& out,
                              const std::vector<TrialRecord>& records) {
    out << "z,a,y\n";
    for (const auto& r : records) out << r.z << ',' << r.a << ',' << r.y << '\n';
}

inline nlohmann::ordered_json to_json(const AnalysisResult& res,
                                      bool include_samples = false) {
    nlohmann::ordered_json j;
    j["estimand"] = to_string(res.estimand_kind);
    j["assumptions"] = to_string(res.assumption_label);
    j["seed"] = res.seed;
    j["level"] = res.level;
    j["accepted"] = res.accepted;
    j["attempts"] = res.attempts;
    j["acceptance_rate"] = res.acceptance_rate;
    j["lower_point"] = res.lower_point;
    j["upper_point"] = res.upper_point;
    j["lower_ci"] = {res.lower_ci.low, res.lower_ci.high};
    j["upper_ci"] = {res.upper_ci.low, res.upper_ci.high};
    j["degenerate_fraction"] = res.degenerate_fraction;
    if (include_samples) {
        auto samples = nlohmann::ordered_json::array();
        for (const auto& s : res.samples)
            samples.push_back({s.l, s.u, s.degenerate});
        j["samples"] = std::move(samples);
    }
    return j;
}

inline void write_samples_csv(std::ostream& out,
                              const std::vector<BoundsSample>& samples) {
    out << "j,l,u,degenerate\n";
    for (std::size_t j = 0; j < samples.size(); ++j)
        out << j << ',' << samples[j].l << ',' << samples[j].u << ','
            << (samples[j].degenerate ? 1 : 0) << '\n';
}

// Line-oriented problem dump: objective row, then one row per constraint with
// its relation and right-hand side.
inline void write_lp_dump(std::ostream& out, const LpProblem& lp) {
    out << (lp.maximize ? "max" : "min");
    for (double c : lp.objective) out << ' ' << c;
    out << '\n';
    for (std::size_t r = 0; r < lp.eq_rhs.size(); ++r) {
        for (double c : lp.eq_lhs[r]) out << c << ' ';
        out << "= " << lp.eq_rhs[r] << '\n';
    }
    for (std::size_t r = 0; r < lp.ge_rhs.size(); ++r) {
        for (double c : lp.ge_lhs[r]) out << c << ' ';
        out << ">= " << lp.ge_rhs[r] << '\n';
    }
}

// key = value configuration, '#' comments
inline std::map<std::string, std::string> read_config(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            const auto nonblank = line.find_first_not_of(" \t\r");
            if (nonblank == std::string::npos) continue;
            throw ParseError("config row " + std::to_string(row) +
                             ": expected 'key = value'");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string()
                                          : s.substr(b, e - b + 1);
        };
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

}  // namespace ivbound::io

#endif  // IVBOUND_IO_HPP
