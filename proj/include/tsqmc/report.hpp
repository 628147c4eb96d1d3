#pragma once

// Experiment output files. For a prefix P, emit_report writes
//
//   P.csv             one row per record: test_kind,sampler,factorization,n,repeat,rmse,runtime_s
//   P_replicates.csv  the replicate values behind each record, one per row
//   P.json            fitted slopes and box-plot quartiles per group
//   P.dat             gnuplot data: one block per group, columns n min q1 median q3 max
//
// Numbers use 17 significant digits so the CSV files read back exactly.
// Quartiles use the nearest-rank rule Q_p = x_(ceil(p N)) on sorted data.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "tsqmc/errors.hpp"
#include "tsqmc/experiment.hpp"

namespace tsqmc {

class IoError : public Error {
public:
    using Error::Error;
};

struct Quartiles {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

inline double nearest_rank(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw InvalidArgument("quartiles: no data");
    const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

inline Quartiles quartiles(std::vector<double> v) {
    if (v.empty()) throw InvalidArgument("quartiles: no data");
    std::sort(v.begin(), v.end());
    return {v.front(), nearest_rank(v, 0.25), nearest_rank(v, 0.5), nearest_rank(v, 0.75), v.back()};
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Records in the order they are written: by test kind, sampler,
/// factorization, n and repeat.
inline void sort_records(std::vector<RmseRecord>& records) {
    auto key = [](const RmseRecord& r) {
        return std::make_tuple(static_cast<int>(r.test_kind), static_cast<int>(r.sampler),
                               static_cast<int>(r.factorization), r.n, r.repeat);
    };
    std::stable_sort(records.begin(), records.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
}

inline void write_records_csv(std::ostream& out, std::vector<RmseRecord> records) {
    sort_records(records);
    out << "test_kind,sampler,factorization,n,repeat,rmse,runtime_s\n";
    for (const auto& r : records)
        out << to_string(r.test_kind) << ',' << to_string(r.sampler) << ',' << to_string(r.factorization) << ','
            << r.n << ',' << r.repeat << ',' << format_double(r.rmse) << ',' << format_double(r.runtime_s) << '\n';
}

inline void write_replicates_csv(std::ostream& out, std::vector<RmseRecord> records) {
    sort_records(records);
    out << "test_kind,sampler,factorization,n,repeat,replication,value,reference\n";
    for (const auto& r : records)
        for (std::size_t k = 0; k < r.replicates.size(); ++k)
            out << to_string(r.test_kind) << ',' << to_string(r.sampler) << ',' << to_string(r.factorization) << ','
                << r.n << ',' << r.repeat << ',' << k << ',' << format_double(r.replicates[k]) << ','
                << format_double(r.reference) << '\n';
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double csv_double(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("CSV line " + std::to_string(line) + ": bad number '" + s + "'");
}

inline std::size_t csv_size(const std::string& s, std::size_t line) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw InvalidArgument("CSV line " + std::to_string(line) + ": bad integer '" + s + "'");
    return std::stoull(s);
}

using RecordKey = std::tuple<int, int, int, std::size_t, std::size_t>;

}  // namespace detail

/// Reads records written by write_records_csv; replicate values and the
/// reference come from the optional replicates file.
inline std::vector<RmseRecord> read_records_csv(std::istream& in, std::istream* replicates = nullptr) {
    std::string line;
    if (!std::getline(in, line) || line != "test_kind,sampler,factorization,n,repeat,rmse,runtime_s")
        throw InvalidArgument("records CSV: missing or unexpected header");
    std::vector<RmseRecord> out;
    std::map<detail::RecordKey, std::size_t> index;
    for (std::size_t no = 2; std::getline(in, line); ++no) {
        if (line.empty()) continue;
        const auto c = detail::split_csv(line);
        if (c.size() != 7) throw InvalidArgument("records CSV line " + std::to_string(no) + ": expected 7 fields");
        RmseRecord r;
        r.test_kind = parse_test_kind(c[0]);
        r.sampler = parse_sampler_kind(c[1]);
        r.factorization = parse_factor_kind(c[2]);
        r.n = detail::csv_size(c[3], no);
        r.repeat = detail::csv_size(c[4], no);
        r.rmse = detail::csv_double(c[5], no);
        r.runtime_s = detail::csv_double(c[6], no);
        index[{static_cast<int>(r.test_kind), static_cast<int>(r.sampler), static_cast<int>(r.factorization), r.n,
               r.repeat}] = out.size();
        out.push_back(std::move(r));
    }
    if (!replicates) return out;
    if (!std::getline(*replicates, line) || line != "test_kind,sampler,factorization,n,repeat,replication,value,reference")
        throw InvalidArgument("replicates CSV: missing or unexpected header");
    for (std::size_t no = 2; std::getline(*replicates, line); ++no) {
        if (line.empty()) continue;
        const auto c = detail::split_csv(line);
        if (c.size() != 8) throw InvalidArgument("replicates CSV line " + std::to_string(no) + ": expected 8 fields");
        const detail::RecordKey key{static_cast<int>(parse_test_kind(c[0])), static_cast<int>(parse_sampler_kind(c[1])),
                                    static_cast<int>(parse_factor_kind(c[2])), detail::csv_size(c[3], no),
                                    detail::csv_size(c[4], no)};
        const auto it = index.find(key);
        if (it == index.end())
            throw InvalidArgument("replicates CSV line " + std::to_string(no) + ": no matching record");
        auto& rec = out[it->second];
        if (detail::csv_size(c[5], no) != rec.replicates.size())
            throw InvalidArgument("replicates CSV line " + std::to_string(no) + ": replications out of order");
        rec.replicates.push_back(detail::csv_double(c[6], no));
        rec.reference = detail::csv_double(c[7], no);
    }
    return out;
}

struct GroupSummary {
    TestKind test_kind;
    SamplerKind sampler;
    FactorKind factorization;
    RateFit fit;
    std::vector<std::pair<std::size_t, Quartiles>> boxes;  // per n
};

inline std::vector<GroupSummary> summarize(std::vector<RmseRecord> records) {
    if (records.empty()) throw InvalidArgument("summarize: no records");
    sort_records(records);
    std::vector<GroupSummary> out;
    std::map<std::tuple<int, int, int>, std::map<std::size_t, std::vector<double>>> groups;
    for (const auto& r : records)
        groups[{static_cast<int>(r.test_kind), static_cast<int>(r.sampler), static_cast<int>(r.factorization)}][r.n]
            .push_back(r.rmse);
    for (const auto& [key, by_n] : groups) {
        GroupSummary g{static_cast<TestKind>(std::get<0>(key)), static_cast<SamplerKind>(std::get<1>(key)),
                       static_cast<FactorKind>(std::get<2>(key)), {}, {}};
        for (const auto& [n, v] : by_n) g.boxes.emplace_back(n, quartiles(v));
        if (by_n.size() >= 3) g.fit = fit_group(records, g.test_kind, g.sampler, g.factorization);
        else g.fit = {std::nan(""), std::nan(""), std::nan("")};
        out.push_back(std::move(g));
    }
    return out;
}

inline nlohmann::json summary_json(const std::vector<RmseRecord>& records) {
    using nlohmann::json;
    json groups = json::array();
    for (const auto& g : summarize(records)) {
        json boxes = json::array();
        for (const auto& [n, q] : g.boxes)
            boxes.push_back({{"n", n}, {"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}});
        json jg{{"test_kind", to_string(g.test_kind)},
                {"sampler", to_string(g.sampler)},
                {"factorization", to_string(g.factorization)},
                {"boxes", boxes}};
        if (std::isfinite(g.fit.slope))
            jg["slope"] = {{"value", g.fit.slope}, {"half_width", g.fit.half_width}, {"intercept", g.fit.intercept}};
        else
            jg["slope"] = nullptr;
        groups.push_back(jg);
    }
    return {{"quartile_rule", "nearest-rank"}, {"groups", groups}};
}

inline void write_boxplot_dat(std::ostream& out, const std::vector<RmseRecord>& records) {
    out << "# columns: n min q1 median q3 max\n";
    out << "# plot with: using 1:3:2:6:5 with candlesticks, '' using 1:4:4:4:4 with candlesticks\n";
    bool first = true;
    for (const auto& g : summarize(records)) {
        if (!first) out << "\n\n";
        first = false;
        out << "# " << to_string(g.test_kind) << ' ' << to_string(g.sampler) << ' ' << to_string(g.factorization)
            << '\n';
        for (const auto& [n, q] : g.boxes)
            out << n << ' ' << format_double(q.min) << ' ' << format_double(q.q1) << ' ' << format_double(q.median)
                << ' ' << format_double(q.q3) << ' ' << format_double(q.max) << '\n';
    }
}

struct ReportPaths {
    std::filesystem::path csv, replicates, json, dat;

    static ReportPaths from_prefix(const std::filesystem::path& prefix) {
        auto with = [&](const std::string& suffix) {
            auto p = prefix;
            p += suffix;
            return p;
        };
        return {with(".csv"), with("_replicates.csv"), with(".json"), with(".dat")};
    }
};

namespace detail {
template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& w) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    w(out);
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}
}  // namespace detail

inline ReportPaths emit_report(const std::vector<RmseRecord>& records, const std::filesystem::path& prefix,
                               const nlohmann::json& extra = nlohmann::json::object()) {
    if (records.empty()) throw InvalidArgument("emit_report: no records");
    const auto paths = ReportPaths::from_prefix(prefix);
    if (prefix.has_parent_path() && !std::filesystem::is_directory(prefix.parent_path()))
        throw IoError("output directory " + prefix.parent_path().string() + " does not exist");
    detail::write_file(paths.csv, [&](std::ostream& o) { write_records_csv(o, records); });
    detail::write_file(paths.replicates, [&](std::ostream& o) { write_replicates_csv(o, records); });
    detail::write_file(paths.json, [&](std::ostream& o) {
        auto j = summary_json(records);
        for (const auto& [k, v] : extra.items()) j[k] = v;
        o << j.dump(2) << '\n';
    });
    detail::write_file(paths.dat, [&](std::ostream& o) { write_boxplot_dat(o, records); });
    return paths;
}

inline std::vector<RmseRecord> read_report(const std::filesystem::path& prefix) {
    const auto paths = ReportPaths::from_prefix(prefix);
    std::ifstream csv(paths.csv);
    if (!csv) throw IoError("cannot open " + paths.csv.string());
    std::ifstream reps(paths.replicates);
    if (!reps) throw IoError("cannot open " + paths.replicates.string());
    return read_records_csv(csv, &reps);
}

}  // namespace tsqmc
