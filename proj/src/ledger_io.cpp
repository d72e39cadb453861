/*
 * Copyright 2026 The sortbo Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "sortbo/ledger_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace sortbo {

namespace {

using Json = nlohmann::ordered_json;

const char* const kCsvHeader =
    "reaction_lines,extended_time,extended_space,tp_n_mean,tn_n_mean,tp_n_var,tn_n_var,timestamp";

Json point_json(const ParameterPoint& p) {
    return Json{{"reaction_lines", p.reaction_lines},
                {"extended_time", p.extended_time},
                {"extended_space", p.extended_space}};
}

ParameterPoint point_from(const Json& j) {
    return {j.at("reaction_lines").get<double>(), j.at("extended_time").get<double>(),
            j.at("extended_space").get<double>()};
}

Json record_json(const ExperimentRecord& r) {
    Json intervals = Json::array();
    for (const auto& iv : r.intervals) {
        intervals.push_back(Json{{"tp", iv.confusion.tp},
                                 {"fn", iv.confusion.fn},
                                 {"fp", iv.confusion.fp},
                                 {"tn", iv.confusion.tn},
                                 {"duration_s", iv.duration_s}});
    }
    return Json{{"schema_version", kLedgerSchemaVersion},
                {"kind", "record"},
                {"params", point_json(r.params)},
                {"intervals", std::move(intervals)},
                {"tp_n_mean", r.tp_n_mean},
                {"tn_n_mean", r.tn_n_mean},
                {"tp_n_var", r.tp_n_var},
                {"tn_n_var", r.tn_n_var},
                {"timestamp", r.timestamp}};
}

ExperimentRecord record_from(const Json& j) {
    ExperimentRecord r;
    r.params = point_from(j.at("params"));
    for (const auto& iv : j.at("intervals")) {
        IntervalResult out;
        out.confusion.tp = iv.at("tp").get<std::uint64_t>();
        out.confusion.fn = iv.at("fn").get<std::uint64_t>();
        out.confusion.fp = iv.at("fp").get<std::uint64_t>();
        out.confusion.tn = iv.at("tn").get<std::uint64_t>();
        out.duration_s = iv.at("duration_s").get<double>();
        r.intervals.push_back(out);
    }
    r.tp_n_mean = j.at("tp_n_mean").get<double>();
    r.tn_n_mean = j.at("tn_n_mean").get<double>();
    r.tp_n_var = j.at("tp_n_var").get<double>();
    r.tn_n_var = j.at("tn_n_var").get<double>();
    r.timestamp = j.at("timestamp").get<double>();
    return r;
}

double parse_double(const std::string& text, const std::string& what) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw LedgerFormatError("bad number '" + text + "' in " + what);
    return value;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buf, ptr);
}

std::string to_json_line(const LedgerEntry& entry) {
    Json j;
    if (const auto* r = std::get_if<ExperimentRecord>(&entry)) {
        j = record_json(*r);
    } else if (const auto* p = std::get_if<Proposal>(&entry)) {
        j = Json{{"schema_version", kLedgerSchemaVersion},
                 {"kind", "proposal"},
                 {"step", p->step},
                 {"raw", point_json(p->raw)},
                 {"actuated", point_json(p->actuated)},
                 {"combined_ei_value", p->combined_ei_value}};
    } else {
        const auto& f = std::get<FailureEntry>(entry);
        j = Json{{"schema_version", kLedgerSchemaVersion},
                 {"kind", "failure"},
                 {"step", f.step},
                 {"params", point_json(f.params)},
                 {"message", f.message}};
    }
    return j.dump();
}

LedgerEntry parse_json_line(const std::string& line) {
    try {
        const auto j = Json::parse(line);
        const int version = j.at("schema_version").get<int>();
        if (version != kLedgerSchemaVersion) {
            throw LedgerFormatError("unsupported schema_version " + std::to_string(version));
        }
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "record") return record_from(j);
        if (kind == "proposal") {
            return Proposal{j.at("step").get<int>(), point_from(j.at("raw")), point_from(j.at("actuated")),
                            j.at("combined_ei_value").get<double>()};
        }
        if (kind == "failure") {
            return FailureEntry{j.at("step").get<int>(), point_from(j.at("params")),
                                j.at("message").get<std::string>()};
        }
        throw LedgerFormatError("unknown kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw LedgerFormatError(e.what());
    }
}

void write_ledger(std::ostream& out, const std::vector<LedgerEntry>& entries) {
    for (const auto& e : entries) out << to_json_line(e) << '\n';
}

void write_ledger_file(const std::string& path, const std::vector<LedgerEntry>& entries) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_ledger(out, entries);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<LedgerEntry> read_ledger(std::istream& in) {
    std::vector<LedgerEntry> entries;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            entries.push_back(parse_json_line(line));
        } catch (const LedgerFormatError& e) {
            throw LedgerFormatError("line " + std::to_string(number) + ": " + e.what());
        }
    }
    return entries;
}

std::vector<LedgerEntry> read_ledger_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LedgerFormatError("cannot open '" + path + "'");
    return read_ledger(in);
}

std::vector<ExperimentRecord> records_of(const std::vector<LedgerEntry>& entries) {
    std::vector<ExperimentRecord> out;
    for (const auto& e : entries) {
        if (const auto* r = std::get_if<ExperimentRecord>(&e)) out.push_back(*r);
    }
    return out;
}

void write_ledger_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << format_double(r.params.reaction_lines) << ',' << format_double(r.params.extended_time) << ','
            << format_double(r.params.extended_space) << ',' << format_double(r.tp_n_mean) << ','
            << format_double(r.tn_n_mean) << ',' << format_double(r.tp_n_var) << ','
            << format_double(r.tn_n_var) << ',' << format_double(r.timestamp) << '\n';
    }
}

std::vector<ExperimentRecord> read_ledger_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw LedgerFormatError("missing ledger CSV header");
    std::vector<ExperimentRecord> out;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        const auto where = "CSV line " + std::to_string(number);
        while (std::getline(ss, cell, ',')) fields.push_back(parse_double(cell, where));
        if (fields.size() != 8) throw LedgerFormatError(where + ": expected 8 fields");
        ExperimentRecord r;
        r.params = {fields[0], fields[1], fields[2]};
        r.tp_n_mean = fields[3];
        r.tn_n_mean = fields[4];
        r.tp_n_var = fields[5];
        r.tn_n_var = fields[6];
        r.timestamp = fields[7];
        out.push_back(std::move(r));
    }
    return out;
}

void write_variance_csv(std::ostream& out, const std::vector<std::pair<double, double>>& series) {
    out << "t,var\n";
    for (const auto& [t, v] : series) out << format_double(t) << ',' << format_double(v) << '\n';
}

}  // namespace sortbo
