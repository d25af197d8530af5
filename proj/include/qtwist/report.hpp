#pragma once

#include <string>
#include <vector>

namespace qtwist {

// One verification row. `target` is the bound or reference value the check is
// judged against; `provenance` records whether that number is paper-quoted,
// derived from an independent oracle, or trivial.
struct CheckRow {
    std::string check_id;
    std::string params;
    double value = 0.0;
    double target = 0.0;
    std::string provenance;  // "paper-quoted" | "derived-oracle" | "trivial"
    bool pass = false;
    bool error = false;  // resolvability/configuration failure (exit code 2)
    double seconds = 0.0;
};

struct Report {
    std::vector<CheckRow> rows;

    int passed() const;
    int failed() const;
    bool any_error() const;
    void sort_canonical();  // by check id, then params
    int exit_code() const;  // 0 all pass, 1 any fail, 2 any error
};

// CSV columns exactly: check_id,params,value,target,provenance,pass,seconds
// (header row, RFC-4180 quoting, numbers at 12 significant digits).
std::string to_csv(const Report& r);
// JSON: array of row objects with the same keys.
std::string to_json(const Report& r);

void emit(const Report& r, const std::string& format, const std::string& path);

std::string format_g12(double v);

}  // namespace qtwist
