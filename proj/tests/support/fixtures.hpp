#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "cbci/clustering.hpp"
#include "cbci/data_model.hpp"
#include "cbci/schema_file.hpp"
#include "oracle/straight_line.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) {
    return std::string(CBCI_TEST_DATA_DIR) + "/" + name;
}

inline cbci::RawDataset load_raw(const std::string& csv_name, const std::string& schema_name = "case_study.schema") {
    const auto spec = cbci::read_schema_file(data_path(schema_name));
    std::ifstream in(data_path(csv_name));
    return cbci::load_csv(in, spec);
}

/// The nine-record case study, encoded with lexicographic levels.
inline cbci::Dataset case_study() { return cbci::encode(load_raw("case_study.csv")); }

/// Initial means in the order of the reference clusters.
inline cbci::init::Fixed case_study_means() {
    return {{{1.75, 6.25, 1.25, 10.0}, {7.0 / 3.0, 6.0, 5.0 / 3.0, 5.0}}};
}

inline const cbci::Record& by_id(const cbci::Dataset& ds, cbci::RecordId id) {
    for (const auto& r : ds.records) {
        if (r.id == id) return r;
    }
    throw std::out_of_range("no record " + std::to_string(id));
}

/// Dataset -> oracle input (NaN for missing cells).
inline oracle::Input to_oracle(const cbci::Dataset& ds) {
    oracle::Input in;
    for (const auto& r : ds.records) {
        oracle::Row row;
        for (const auto& c : r.values) row.push_back(c ? *c : std::numeric_limits<double>::quiet_NaN());
        in.rows.push_back(row);
        in.labels.push_back(r.label.value_or(""));
    }
    return in;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace fixtures
