#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "optotherm/config.hpp"
#include "optotherm/protocols.hpp"

namespace optotherm {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Rectangular numeric table with '#'-prefixed metadata header lines.
// Bit-reproducible for identical content: all numbers are printed with 17
// significant digits, which round-trips IEEE doubles exactly.
struct OutputTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> row_status;  // optional trailing status column
};

std::string format_double(double v);  // %.17g
void write_csv(const OutputTable& t, std::ostream& os);
void write_csv_file(const OutputTable& t, const std::string& path);
OutputTable read_csv(std::istream& is);
OutputTable read_csv_file(const std::string& path);

// Table builders. None of them record wall time; the CLI appends the
// wall_time_s meta line itself so that builder output stays reproducible.
OutputTable run_table(const RunRecord& rec, const RunConfig& cfg);
OutputTable otto_table(const OttoResult& otto, const RunConfig& cfg);
OutputTable sweep_table(const SweepResult& sw, const RunConfig& cfg);

nlohmann::json run_summary(const RunRecord& rec, const RunConfig& cfg);
nlohmann::json half_swing_summary(const HalfSwingResult& r, const RunConfig& cfg);
nlohmann::json transducer_summary(const TransducerResult& r, const RunConfig& cfg);
nlohmann::json otto_summary(const OttoResult& otto, const RunConfig& cfg);
nlohmann::json sweep_summary(const SweepResult& sw, const RunConfig& cfg);

}  // namespace optotherm
