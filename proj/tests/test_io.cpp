#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "eprb/report_io.hpp"
#include "schema_check.hpp"

using namespace eprb;

namespace {

nlohmann::json load_schema(const std::string& name) {
    std::ifstream in("docs/schemas/" + name);
    REQUIRE_MESSAGE(in.good(), "schema file missing (tests expect repo root as cwd): ", name);
    return nlohmann::json::parse(in);
}

io::RunManifest sample_manifest() {
    io::RunManifest m;
    m.command = "correlate";
    m.parameters = {{"model", "matzkin"}, {"angle_deg", "60"}};
    m.seed = 7;
    m.version = "0.1.0";
    m.timestamp = "2026-01-01T00:00:00Z";
    m.result_checksum = "fnv1a64:0123456789abcdef";
    return m;
}

} // namespace

TEST_CASE("doubles survive a text round trip") {
    for (const double v : {0.0, -0.0, 0.5, -0.125, 1.0 / 3.0, std::numbers::pi,
                           0.1 + 0.2, 6.123233995736766e-17, -0.7071067811865476,
                           1.7976931348623157e308, 5e-324}) {
        const std::string text = io::format_double(v);
        const double back = std::strtod(text.c_str(), nullptr);
        REQUIRE(back == v);
    }
}

TEST_CASE("hash matches the published reference vectors") {
    CHECK(io::fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(io::fnv1a64("foobar") == 0x85944171f73967e8ull);
    CHECK(io::checksum_string("") == "fnv1a64:cbf29ce484222325");
    CHECK(io::checksum_string("foobar") == "fnv1a64:85944171f73967e8");
}

TEST_CASE("timestamps have the documented shape") {
    const std::string ts = io::utc_timestamp_now();
    REQUIRE(ts.size() == 20);
    CHECK(ts[4] == '-');
    CHECK(ts[10] == 'T');
    CHECK(ts.back() == 'Z');
}

TEST_CASE("csv emit/parse round trip") {
    io::CsvTable t;
    t.header = {"alpha", "beta", "gamma"};
    t.rows = {{"1", "-0.25", "qm"}, {"2", "0.70710678118654757", ""}};
    const std::string text = io::emit_csv(t, {{"key", "value"}, {"timestamp", "now"}});
    CHECK(text.find("# key=value\n") != std::string::npos);
    CHECK(text.find("\r") == std::string::npos);
    CHECK(io::parse_csv(text) == t);
    // Idempotent through a second cycle.
    CHECK(io::parse_csv(io::emit_csv(io::parse_csv(text))) == t);
}

TEST_CASE("csv parser tolerates blank lines and missing trailing newline") {
    const io::CsvTable t = io::parse_csv("# c=1\n\na,b\n1,2\n\n3,4");
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1] == std::vector<std::string>{"3", "4"});
}

TEST_CASE("json dumper: 17 significant digits, sorted keys, escapes") {
    nlohmann::json j;
    j["beta"] = 1.0 / 3.0;
    j["alpha"] = std::string("quote \" backslash \\");
    j["gamma"] = {{"n", nlohmann::json()}, {"t", true}, {"u", std::uint64_t{12345}}};
    j["delta"] = nlohmann::json::array({0.5, -1});
    const std::string text = io::dump_json(j);
    CHECK(text.find("0.33333333333333331") != std::string::npos);
    CHECK(text.find("\"quote \\\" backslash \\\\\"") != std::string::npos);
    CHECK(text.find("null") != std::string::npos);
    CHECK(text.find("12345") != std::string::npos);
    // Alphabetical key order.
    CHECK(text.find("\"alpha\"") < text.find("\"beta\""));
    CHECK(text.find("\"beta\"") < text.find("\"delta\""));
    CHECK(text.find("\"delta\"") < text.find("\"gamma\""));
    // Round trip through the standard parser.
    CHECK(nlohmann::json::parse(text) == j);
}

TEST_CASE("manifest serialization carries every field") {
    const io::RunManifest m = sample_manifest();
    const nlohmann::json j = io::manifest_to_json(m);
    CHECK(j["command"] == "correlate");
    CHECK(j["parameters"]["model"] == "matzkin");
    CHECK(j["seed"] == 7);
    CHECK(j["version"] == "0.1.0");
    CHECK(j["result_checksum"] == "fnv1a64:0123456789abcdef");

    const auto lines = io::manifest_comment_lines(m);
    const std::string text = io::emit_csv(io::CsvTable{{"h"}, {}}, lines);
    CHECK(text.find("# command=correlate\n") != std::string::npos);
    CHECK(text.find("# version=0.1.0\n") != std::string::npos);
    CHECK(text.find("# seed=7\n") != std::string::npos);
    CHECK(text.find("# timestamp=2026-01-01T00:00:00Z\n") != std::string::npos);
    CHECK(text.find("# parameter:model=matzkin\n") != std::string::npos);
    CHECK(text.find("# result_checksum=fnv1a64:0123456789abcdef\n") != std::string::npos);
}

TEST_CASE("correlate record serializes to both formats") {
    io::CorrelateRecord rec;
    rec.model = ModelKind::MatzkinConditioned;
    rec.theta_deg = 60.0;
    rec.estimate = -0.12487;
    rec.std_error = 0.0002;
    rec.analytic = -0.125;
    rec.trials = 1000000;
    rec.seed = 7;

    SUBCASE("without quadrature") {
        const nlohmann::json j = io::to_json(rec);
        CHECK(j["quadrature"].is_null());
        const io::CsvTable t = io::to_csv(rec);
        REQUIRE(t.rows.size() == 1);
        CHECK(t.rows[0][5].empty());
        CHECK(io::parse_csv(io::emit_csv(t)) == t);
    }
    SUBCASE("with quadrature") {
        rec.quadrature = -0.1250001;
        const nlohmann::json j = io::to_json(rec);
        CHECK(j["quadrature"].get<double>() == -0.1250001);
        const io::CsvTable t = io::to_csv(rec);
        CHECK(t.rows[0][5] == io::format_double(-0.1250001));
    }
}

TEST_CASE("report tables round trip through csv") {
    const UnitVector z = UnitVector::z_axis();
    const UnitVector b = axis_in_xz_plane(std::numbers::pi / 3);

    const ChshReport chsh = chsh_scan(ModelKind::BellNaive, z, UnitVector::x_axis(),
                                      axis_in_xz_plane(0.8), b, 2000, 1);
    CHECK(io::parse_csv(io::emit_csv(io::to_csv(chsh))) == io::to_csv(chsh));

    const LocalityReport loc =
        locality_audit(ModelKind::MatzkinConditioned, z, b,
                       {UnitVector::z_axis(), UnitVector::x_axis()}, 2000, 2);
    const io::CsvTable loc_csv = io::to_csv(loc);
    REQUIRE(loc_csv.rows.size() == 2);
    CHECK(io::parse_csv(io::emit_csv(loc_csv)) == loc_csv);

    const NoSignalingReport ns =
        no_signaling_check(ModelKind::BellNaive, b, {z, UnitVector::x_axis()}, 2000, 3);
    CHECK(io::parse_csv(io::emit_csv(io::to_csv(ns))) == io::to_csv(ns));

    const RingConsistencyReport ring = ring_consistency_check(z, +1, b, 2000, 4);
    CHECK(io::parse_csv(io::emit_csv(io::to_csv(ring))) == io::to_csv(ring));

    const auto sweep_rows = angle_sweep(ModelKind::BellNaive, {0.0, 1.0}, 2000, 5);
    const io::CsvTable sweep_csv = io::sweep_to_csv({0.0, 57.29577951308232}, sweep_rows);
    CHECK(sweep_csv.header ==
          std::vector<std::string>{"theta_deg", "estimate", "std_error", "analytic_model",
                                   "analytic_qm"});
    CHECK(io::parse_csv(io::emit_csv(sweep_csv)) == sweep_csv);
}

TEST_CASE("rendered json documents validate against the published schemas") {
    io::RunManifest m = sample_manifest();
    const UnitVector z = UnitVector::z_axis();
    const UnitVector b = axis_in_xz_plane(std::numbers::pi / 3);

    SUBCASE("correlate") {
        io::CorrelateRecord rec;
        rec.model = ModelKind::BellNaive;
        rec.theta_deg = 60.0;
        rec.quadrature = -0.0833;
        rec.trials = 100;
        const nlohmann::json doc = nlohmann::json::parse(io::render_json(m, io::to_json(rec)));
        CHECK(eprb_test::validate_schema(load_schema("correlate.schema.json"), doc) == "");
    }
    SUBCASE("sweep") {
        m.command = "sweep";
        const auto rows = angle_sweep(ModelKind::BellNaive, {0.0, 1.0}, 1000, 6);
        const nlohmann::json result =
            io::sweep_to_json(ModelKind::BellNaive, {0.0, 57.3}, rows, 1000, 6);
        const nlohmann::json doc = nlohmann::json::parse(io::render_json(m, result));
        CHECK(eprb_test::validate_schema(load_schema("sweep.schema.json"), doc) == "");
    }
    SUBCASE("chsh") {
        m.command = "chsh";
        const ChshReport r = chsh_scan(ModelKind::QuantumReference, z, UnitVector::x_axis(),
                                       axis_in_xz_plane(0.8), b, 2000, 7);
        const nlohmann::json doc = nlohmann::json::parse(io::render_json(m, io::to_json(r)));
        CHECK(eprb_test::validate_schema(load_schema("chsh.schema.json"), doc) == "");
    }
    SUBCASE("audit: locality") {
        m.command = "audit";
        const LocalityReport r = locality_audit(ModelKind::MatzkinConditioned, z, b,
                                                {z, UnitVector::x_axis()}, 2000, 8);
        const nlohmann::json doc = nlohmann::json::parse(io::render_json(m, io::to_json(r)));
        CHECK(eprb_test::validate_schema(load_schema("audit-locality.schema.json"), doc) == "");
    }
    SUBCASE("audit: no-signaling") {
        m.command = "audit";
        const NoSignalingReport r = no_signaling_check(ModelKind::BellNaive, b, {z}, 2000, 9);
        const nlohmann::json doc = nlohmann::json::parse(io::render_json(m, io::to_json(r)));
        CHECK(eprb_test::validate_schema(load_schema("audit-no-signaling.schema.json"), doc) ==
              "");
    }
    SUBCASE("audit: ring") {
        m.command = "audit";
        const RingConsistencyReport r = ring_consistency_check(z, -1, b, 2000, 10);
        const nlohmann::json doc = nlohmann::json::parse(io::render_json(m, io::to_json(r)));
        CHECK(eprb_test::validate_schema(load_schema("audit-ring.schema.json"), doc) == "");
    }
}

TEST_CASE("schema checker itself rejects bad documents") {
    const nlohmann::json schema = load_schema("correlate.schema.json");
    const io::CorrelateRecord rec;
    nlohmann::json doc =
        nlohmann::json::parse(io::render_json(sample_manifest(), io::to_json(rec)));
    doc["result"]["model"] = "not-a-model";
    CHECK(eprb_test::validate_schema(schema, doc) != "");
    doc = nlohmann::json::parse(io::render_json(sample_manifest(), io::to_json(rec)));
    doc["result"].erase("estimate");
    CHECK(eprb_test::validate_schema(schema, doc) != "");
}
