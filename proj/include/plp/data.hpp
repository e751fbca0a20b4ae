#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "plp/embedded_data.hpp"  // generated at configure time from data/*.json

namespace plp {

/** Raw JSON text of the shipped tables. */
struct DataSources {
    std::string criteria;
    std::string ledger;
    std::string expected_records;
};

inline const DataSources& embedded_data() {
    static const DataSources d{std::string(embedded::criteria_json), std::string(embedded::ledger_json),
                               std::string(embedded::expected_records_json)};
    return d;
}

struct DataIoError : std::runtime_error {
    explicit DataIoError(const std::string& w) : std::runtime_error(w) {}
};

/** Reads the tables from a directory; files that are absent fall back to the embedded copy. */
inline DataSources load_data_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw DataIoError("data directory not found: " + dir.string());
    auto read = [&](const char* name, const std::string& fallback) {
        const auto p = dir / name;
        if (!std::filesystem::exists(p)) return fallback;
        std::ifstream in(p);
        if (!in) throw DataIoError("cannot read " + p.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const auto& e = embedded_data();
    return {read("criteria.json", e.criteria), read("ledger.json", e.ledger),
            read("expected_records.json", e.expected_records)};
}

}  // namespace plp
