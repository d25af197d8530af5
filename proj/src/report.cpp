#include "qtwist/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace qtwist {

int Report::passed() const {
    return static_cast<int>(std::count_if(rows.begin(), rows.end(),
                                          [](const CheckRow& r) { return r.pass; }));
}

int Report::failed() const { return static_cast<int>(rows.size()) - passed(); }

bool Report::any_error() const {
    return std::any_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.error; });
}

void Report::sort_canonical() {
    std::stable_sort(rows.begin(), rows.end(), [](const CheckRow& a, const CheckRow& b) {
        if (a.check_id != b.check_id) return a.check_id < b.check_id;
        return a.params < b.params;
    });
}

int Report::exit_code() const {
    if (any_error()) return 2;
    if (failed() > 0) return 1;
    return 0;
}

std::string format_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

std::string to_csv(const Report& r) {
    std::string out = "check_id,params,value,target,provenance,pass,seconds\n";
    for (const auto& row : r.rows) {
        out += csv_quote(row.check_id);
        out += ',';
        out += csv_quote(row.params);
        out += ',';
        out += format_g12(row.value);
        out += ',';
        out += format_g12(row.target);
        out += ',';
        out += csv_quote(row.provenance);
        out += ',';
        out += row.pass ? "true" : "false";
        out += ',';
        out += format_g12(row.seconds);
        out += '\n';
    }
    return out;
}

std::string to_json(const Report& r) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json o;
        o["check_id"] = row.check_id;
        o["params"] = row.params;
        o["value"] = row.value;
        o["target"] = row.target;
        o["provenance"] = row.provenance;
        o["pass"] = row.pass;
        o["seconds"] = row.seconds;
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

void emit(const Report& r, const std::string& format, const std::string& path) {
    std::string body;
    if (format == "csv") {
        body = to_csv(r);
    } else if (format == "json") {
        body = to_json(r);
    } else {
        throw std::invalid_argument("emit: format must be csv or json");
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("emit: cannot open output path " + path);
    f << body;
    if (!f.good()) throw std::runtime_error("emit: write failed for " + path);
}

}  // namespace qtwist
