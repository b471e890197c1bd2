#include "eprb/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>

#include "eprb/version.hpp"

namespace eprb::io {

namespace {

nlohmann::json axis_json(const UnitVector& v) {
    return nlohmann::json::array({v.x(), v.y(), v.z()});
}

nlohmann::json estimate_json(const CorrelationEstimate& e) {
    return {{"mean", e.mean}, {"std_error", e.std_error}, {"trials", e.trials}};
}

void push_axis(std::vector<std::string>& row, const UnitVector& v) {
    row.push_back(format_double(v.x()));
    row.push_back(format_double(v.y()));
    row.push_back(format_double(v.z()));
}

void dump_rec(const nlohmann::json& v, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
    switch (v.type()) {
    case nlohmann::json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [key, val] : v.items()) {
            if (!first) out += ",\n";
            first = false;
            out += pad_in;
            out += nlohmann::json(key).dump();
            out += ": ";
            dump_rec(val, out, depth + 1);
        }
        out += "\n";
        out += pad;
        out += "}";
        return;
    }
    case nlohmann::json::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const auto& el : v) {
            if (!first) out += ",\n";
            first = false;
            out += pad_in;
            dump_rec(el, out, depth + 1);
        }
        out += "\n";
        out += pad;
        out += "]";
        return;
    }
    case nlohmann::json::value_t::number_float:
        out += format_double(v.get<double>());
        return;
    case nlohmann::json::value_t::number_integer:
        out += std::to_string(v.get<std::int64_t>());
        return;
    case nlohmann::json::value_t::number_unsigned:
        out += std::to_string(v.get<std::uint64_t>());
        return;
    case nlohmann::json::value_t::boolean:
        out += v.get<bool>() ? "true" : "false";
        return;
    case nlohmann::json::value_t::string:
        out += v.dump(); // nlohmann handles the escaping
        return;
    default:
        out += "null";
        return;
    }
}

} // namespace

std::string format_double(double v) {
    if (!std::isfinite(v)) {
        return "null";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string checksum_string(std::string_view bytes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string utc_timestamp_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string emit_csv(const CsvTable& table,
                     const std::vector<std::pair<std::string, std::string>>& comments) {
    std::string out;
    for (const auto& [key, value] : comments) {
        out += "# ";
        out += key;
        out += "=";
        out += value;
        out += "\n";
    }
    const auto emit_row = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) out += ",";
            out += fields[i];
        }
        out += "\n";
    };
    emit_row(table.header);
    for (const auto& row : table.rows) {
        emit_row(row);
    }
    return out;
}

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') {
            if (pos > text.size()) break;
            continue;
        }
        std::vector<std::string> fields;
        std::size_t fpos = 0;
        while (true) {
            const std::size_t comma = line.find(',', fpos);
            if (comma == std::string_view::npos) {
                fields.emplace_back(line.substr(fpos));
                break;
            }
            fields.emplace_back(line.substr(fpos, comma - fpos));
            fpos = comma + 1;
        }
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            table.rows.push_back(std::move(fields));
        }
        if (pos > text.size()) break;
    }
    return table;
}

std::string dump_json(const nlohmann::json& value) {
    std::string out;
    dump_rec(value, out, 0);
    return out;
}

nlohmann::json manifest_to_json(const RunManifest& m) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [key, value] : m.parameters) {
        params[key] = value;
    }
    return {{"command", m.command},    {"parameters", params},
            {"seed", m.seed},          {"version", m.version},
            {"timestamp", m.timestamp}, {"result_checksum", m.result_checksum}};
}

std::vector<std::pair<std::string, std::string>> manifest_comment_lines(const RunManifest& m) {
    std::vector<std::pair<std::string, std::string>> lines;
    lines.emplace_back("command", m.command);
    lines.emplace_back("version", m.version);
    lines.emplace_back("seed", std::to_string(m.seed));
    lines.emplace_back("timestamp", m.timestamp);
    for (const auto& [key, value] : m.parameters) {
        lines.emplace_back("parameter:" + key, value);
    }
    lines.emplace_back("result_checksum", m.result_checksum);
    return lines;
}

nlohmann::json to_json(const CorrelateRecord& rec) {
    nlohmann::json j = {{"model", std::string(to_string(rec.model))},
                        {"theta_deg", rec.theta_deg},
                        {"estimate", rec.estimate},
                        {"std_error", rec.std_error},
                        {"analytic", rec.analytic},
                        {"trials", rec.trials},
                        {"seed", rec.seed}};
    j["quadrature"] = rec.quadrature ? nlohmann::json(*rec.quadrature) : nlohmann::json();
    return j;
}

CsvTable to_csv(const CorrelateRecord& rec) {
    CsvTable t;
    t.header = {"model",    "theta_deg",  "estimate", "std_error",
                "analytic", "quadrature", "trials",   "seed"};
    t.rows.push_back({std::string(to_string(rec.model)), format_double(rec.theta_deg),
                      format_double(rec.estimate), format_double(rec.std_error),
                      format_double(rec.analytic),
                      rec.quadrature ? format_double(*rec.quadrature) : std::string(),
                      std::to_string(rec.trials), std::to_string(rec.seed)});
    return t;
}

nlohmann::json sweep_to_json(ModelKind model, const std::vector<double>& theta_deg,
                             const std::vector<AngleSweepRow>& rows, std::uint64_t trials,
                             std::uint64_t seed) {
    nlohmann::json out_rows = nlohmann::json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out_rows.push_back({{"theta_deg", theta_deg[i]},
                            {"estimate", rows[i].estimate},
                            {"std_error", rows[i].std_error},
                            {"analytic_model", rows[i].analytic_model},
                            {"analytic_qm", rows[i].analytic_qm}});
    }
    return {{"model", std::string(to_string(model))},
            {"trials", trials},
            {"seed", seed},
            {"rows", out_rows}};
}

CsvTable sweep_to_csv(const std::vector<double>& theta_deg,
                      const std::vector<AngleSweepRow>& rows) {
    CsvTable t;
    t.header = {"theta_deg", "estimate", "std_error", "analytic_model", "analytic_qm"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.rows.push_back({format_double(theta_deg[i]), format_double(rows[i].estimate),
                          format_double(rows[i].std_error),
                          format_double(rows[i].analytic_model),
                          format_double(rows[i].analytic_qm)});
    }
    return t;
}

nlohmann::json to_json(const ChshReport& r) {
    return {{"model", std::string(to_string(r.model))},
            {"a", axis_json(r.a)},
            {"a_prime", axis_json(r.a_prime)},
            {"b", axis_json(r.b)},
            {"b_prime", axis_json(r.b_prime)},
            {"e_ab", estimate_json(r.e_ab)},
            {"e_ab_prime", estimate_json(r.e_ab_prime)},
            {"e_a_prime_b", estimate_json(r.e_a_prime_b)},
            {"e_a_prime_b_prime", estimate_json(r.e_a_prime_b_prime)},
            {"s_value", r.s_value},
            {"s_std_error", r.s_std_error},
            {"local_bound", r.local_bound},
            {"tsirelson_bound", r.tsirelson_bound},
            {"violated", r.violated}};
}

CsvTable to_csv(const ChshReport& r) {
    CsvTable t;
    t.header = {"model",
                "a_x", "a_y", "a_z",
                "a_prime_x", "a_prime_y", "a_prime_z",
                "b_x", "b_y", "b_z",
                "b_prime_x", "b_prime_y", "b_prime_z",
                "e_ab", "se_ab",
                "e_ab_prime", "se_ab_prime",
                "e_a_prime_b", "se_a_prime_b",
                "e_a_prime_b_prime", "se_a_prime_b_prime",
                "s_value", "s_std_error", "local_bound", "tsirelson_bound",
                "violated", "trials"};
    std::vector<std::string> row;
    row.push_back(std::string(to_string(r.model)));
    push_axis(row, r.a);
    push_axis(row, r.a_prime);
    push_axis(row, r.b);
    push_axis(row, r.b_prime);
    for (const CorrelationEstimate* e :
         {&r.e_ab, &r.e_ab_prime, &r.e_a_prime_b, &r.e_a_prime_b_prime}) {
        row.push_back(format_double(e->mean));
        row.push_back(format_double(e->std_error));
    }
    row.push_back(format_double(r.s_value));
    row.push_back(format_double(r.s_std_error));
    row.push_back(format_double(r.local_bound));
    row.push_back(format_double(r.tsirelson_bound));
    row.push_back(format_bool(r.violated));
    row.push_back(std::to_string(r.e_ab.trials));
    t.rows.push_back(std::move(row));
    return t;
}

nlohmann::json to_json(const LocalityReport& r) {
    nlohmann::json settings = nlohmann::json::array();
    for (const auto& s : r.settings) {
        settings.push_back({{"setting", axis_json(s.setting)},
                            {"outcome1_sign", s.outcome1_sign},
                            {"p_plus", s.p_plus}});
    }
    return {{"model", std::string(to_string(r.model))},
            {"probe_lambda", axis_json(r.probe_lambda)},
            {"b", axis_json(r.b)},
            {"trials_per_setting", r.trials_per_setting},
            {"seed", r.seed},
            {"settings", settings},
            {"max_divergence", r.max_divergence},
            {"max_z", r.max_z},
            {"depends_on_remote", r.depends_on_remote}};
}

CsvTable to_csv(const LocalityReport& r) {
    CsvTable t;
    t.header = {"model", "probe_x", "probe_y", "probe_z", "b_x", "b_y", "b_z",
                "setting_x", "setting_y", "setting_z", "outcome1_sign", "p_plus",
                "max_divergence", "max_z", "depends_on_remote",
                "trials_per_setting", "seed"};
    for (const auto& s : r.settings) {
        std::vector<std::string> row;
        row.push_back(std::string(to_string(r.model)));
        push_axis(row, r.probe_lambda);
        push_axis(row, r.b);
        push_axis(row, s.setting);
        row.push_back(std::to_string(s.outcome1_sign));
        row.push_back(format_double(s.p_plus));
        row.push_back(format_double(r.max_divergence));
        row.push_back(format_double(r.max_z));
        row.push_back(format_bool(r.depends_on_remote));
        row.push_back(std::to_string(r.trials_per_setting));
        row.push_back(std::to_string(r.seed));
        t.rows.push_back(std::move(row));
    }
    return t;
}

nlohmann::json to_json(const NoSignalingReport& r) {
    nlohmann::json settings = nlohmann::json::array();
    for (const auto& s : r.settings) {
        settings.push_back(
            {{"setting", axis_json(s.setting)}, {"marginal_plus", s.marginal_plus}});
    }
    return {{"model", std::string(to_string(r.model))},
            {"b", axis_json(r.b)},
            {"trials_per_setting", r.trials_per_setting},
            {"seed", r.seed},
            {"settings", settings},
            {"sigma_null", r.sigma_null},
            {"max_deviation_from_half", r.max_deviation_from_half},
            {"max_divergence", r.max_divergence},
            {"all_within_3sigma", r.all_within_3sigma}};
}

CsvTable to_csv(const NoSignalingReport& r) {
    CsvTable t;
    t.header = {"model", "b_x", "b_y", "b_z", "setting_x", "setting_y", "setting_z",
                "marginal_plus", "sigma_null", "max_deviation_from_half",
                "max_divergence", "all_within_3sigma", "trials_per_setting", "seed"};
    for (const auto& s : r.settings) {
        std::vector<std::string> row;
        row.push_back(std::string(to_string(r.model)));
        push_axis(row, r.b);
        push_axis(row, s.setting);
        row.push_back(format_double(s.marginal_plus));
        row.push_back(format_double(r.sigma_null));
        row.push_back(format_double(r.max_deviation_from_half));
        row.push_back(format_double(r.max_divergence));
        row.push_back(format_bool(r.all_within_3sigma));
        row.push_back(std::to_string(r.trials_per_setting));
        row.push_back(std::to_string(r.seed));
        t.rows.push_back(std::move(row));
    }
    return t;
}

nlohmann::json to_json(const RingConsistencyReport& r) {
    return {{"state_axis", axis_json(r.state_axis)},
            {"state_sign", r.state_sign},
            {"meas_axis", axis_json(r.meas_axis)},
            {"trials", r.trials},
            {"seed", r.seed},
            {"sign_rule_plus", r.sign_rule_plus},
            {"born_plus", r.born_plus},
            {"gap", r.gap},
            {"std_error", r.std_error}};
}

CsvTable to_csv(const RingConsistencyReport& r) {
    CsvTable t;
    t.header = {"state_x", "state_y", "state_z", "state_sign",
                "meas_x", "meas_y", "meas_z",
                "sign_rule_plus", "born_plus", "gap", "std_error", "trials", "seed"};
    std::vector<std::string> row;
    push_axis(row, r.state_axis);
    row.push_back(std::to_string(r.state_sign));
    push_axis(row, r.meas_axis);
    row.push_back(format_double(r.sign_rule_plus));
    row.push_back(format_double(r.born_plus));
    row.push_back(format_double(r.gap));
    row.push_back(format_double(r.std_error));
    row.push_back(std::to_string(r.trials));
    row.push_back(std::to_string(r.seed));
    t.rows.push_back(std::move(row));
    return t;
}

std::string render_json(const RunManifest& manifest, const nlohmann::json& result) {
    const nlohmann::json doc = {{"manifest", manifest_to_json(manifest)}, {"result", result}};
    return dump_json(doc) + "\n";
}

std::string render_csv(const RunManifest& manifest, const CsvTable& table) {
    return emit_csv(table, manifest_comment_lines(manifest));
}

} // namespace eprb::io
