#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eprb/analysis.hpp"
#include "eprb/experiment.hpp"

namespace eprb::io {

/// Floating-point fields are serialized with 17 significant digits so a
/// round-trip through text reproduces the exact double.
std::string format_double(double v);
std::string format_bool(bool b);

/// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);
/// "fnv1a64:<16 lowercase hex digits>"
std::string checksum_string(std::string_view bytes);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp_now();

/// In-memory CSV: a mandatory header plus string-valued rows. Fields never
/// contain commas by construction (vectors are split into one column per
/// component), so no quoting dialect is needed.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

/// Renders comments ("# key=value" lines) followed by header and rows.
/// Comma-separated, '.' decimal separator, LF line endings.
std::string emit_csv(const CsvTable& table,
                     const std::vector<std::pair<std::string, std::string>>& comments = {});

/// Inverse of emit_csv for the data payload: '#' comment lines and blank
/// lines are skipped; the first remaining line is the header.
CsvTable parse_csv(std::string_view text);

/// Serializes with sorted keys, two-space indent, LF newlines, and %.17g
/// floating-point fields (nlohmann's own dump uses shortest-round-trip
/// formatting, which is not the contract here).
std::string dump_json(const nlohmann::json& value);

/// Provenance block attached to every output. The checksum covers the
/// canonical JSON serialization of the result payload only, so it is
/// identical across output formats and independent of the timestamp.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> parameters; // flag, value
    std::uint64_t seed = 0;
    std::string version;
    std::string timestamp;
    std::string result_checksum;
};

nlohmann::json manifest_to_json(const RunManifest& m);
std::vector<std::pair<std::string, std::string>> manifest_comment_lines(const RunManifest& m);

/// The one-record output of the correlate command.
struct CorrelateRecord {
    ModelKind model = ModelKind::BellNaive;
    double theta_deg = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double analytic = 0.0;
    std::optional<double> quadrature;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

nlohmann::json to_json(const CorrelateRecord& rec);
CsvTable to_csv(const CorrelateRecord& rec);

/// Sweep serialization keeps the caller's degree grid so the theta_deg
/// column shows the requested angles verbatim.
nlohmann::json sweep_to_json(ModelKind model, const std::vector<double>& theta_deg,
                             const std::vector<AngleSweepRow>& rows, std::uint64_t trials,
                             std::uint64_t seed);
CsvTable sweep_to_csv(const std::vector<double>& theta_deg,
                      const std::vector<AngleSweepRow>& rows);

nlohmann::json to_json(const ChshReport& r);
CsvTable to_csv(const ChshReport& r);

nlohmann::json to_json(const LocalityReport& r);
CsvTable to_csv(const LocalityReport& r);

nlohmann::json to_json(const NoSignalingReport& r);
CsvTable to_csv(const NoSignalingReport& r);

nlohmann::json to_json(const RingConsistencyReport& r);
CsvTable to_csv(const RingConsistencyReport& r);

/// Assembles the final output document for one run.
/// JSON: one object {"manifest": ..., "result": ...}.
/// CSV: manifest comment lines, then the table.
std::string render_json(const RunManifest& manifest, const nlohmann::json& result);
std::string render_csv(const RunManifest& manifest, const CsvTable& table);

} // namespace eprb::io
