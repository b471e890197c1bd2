// End-to-end tests that shell out to the installed binary. The test runner
// passes the executable location via --cli=<path>; the working directory is
// the repository root so docs/schemas/ resolves.
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eprb/report_io.hpp"
#include "schema_check.hpp"
#include "test_support.hpp"

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    REQUIRE_MESSAGE(!eprb_test::cli_path().empty(), "pass --cli=<path-to-eprb>");
    static int counter = 0;
    const auto tmp = std::filesystem::temp_directory_path() /
                     ("eprb_cli_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter++) + ".out");
    const std::string cmd =
        "\"" + eprb_test::cli_path() + "\" " + args + " > \"" + tmp.string() + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -2;
    r.out = slurp(tmp);
    std::filesystem::remove(tmp);
    return r;
}

// Timestamps are the one legitimately run-dependent field; drop them before
// comparing reruns byte for byte.
std::string strip_timestamp_lines(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("timestamp") == std::string::npos) {
            out << line << '\n';
        }
    }
    return out.str();
}

nlohmann::json load_schema_file(const std::string& name) {
    std::ifstream in("docs/schemas/" + name);
    REQUIRE_MESSAGE(in.good(), "missing schema: ", name);
    return nlohmann::json::parse(in);
}

std::string csv_comment_value(const std::string& text, const std::string& key) {
    const std::string needle = "# " + key + "=";
    const std::size_t pos = text.find(needle);
    if (pos == std::string::npos) return {};
    const std::size_t end = text.find('\n', pos);
    return text.substr(pos + needle.size(), end - pos - needle.size());
}

} // namespace

TEST_CASE("correlate: json output is complete, schema-valid, and exact where it can be") {
    const CliResult r = run_cli(
        "correlate --model matzkin --angle-deg 60 --trials 20000 --seed 7 --format json");
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["manifest"]["command"] == "correlate");
    CHECK(doc["manifest"]["seed"] == 7);
    CHECK(doc["manifest"]["parameters"]["model"] == "matzkin");
    CHECK(std::regex_match(doc["manifest"]["result_checksum"].get<std::string>(),
                           std::regex("^fnv1a64:[0-9a-f]{16}$")));
    CHECK(std::abs(doc["result"]["analytic"].get<double>() + 0.125) < 1e-12);
    const double est = doc["result"]["estimate"].get<double>();
    const double se = doc["result"]["std_error"].get<double>();
    CHECK(std::abs(est + 0.125) <= 4.0 * se);
    CHECK(doc["result"]["quadrature"].is_null());
    CHECK(eprb_test::validate_schema(load_schema_file("correlate.schema.json"), doc) == "");
}

TEST_CASE("correlate: zero angle is exact even at tiny trial counts") {
    const CliResult r = run_cli(
        "correlate --model bell-naive --angle-deg 0 --trials 10 --seed 1 --format json");
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["result"]["estimate"].get<double>() == -0.25);
    CHECK(doc["result"]["std_error"].get<double>() == 0.0);
    CHECK(doc["result"]["analytic"].get<double>() == -0.25);
}

TEST_CASE("correlate: explicit axes route reports the qm closed form") {
    const CliResult r =
        run_cli("correlate --model qm --a 1,0,0 --b 1,0,0 --trials 100 --format json");
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["result"]["analytic"].get<double>() == -0.25);
    CHECK(doc["result"]["theta_deg"].get<double>() == 0.0);
    CHECK(doc["result"]["estimate"].get<double>() == -0.25);
}

TEST_CASE("correlate: quadrature column appears on request") {
    const CliResult r = run_cli(
        "correlate --model bell-naive --angle-deg 60 --trials 1000 --quadrature-nodes 10000 "
        "--format json");
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    REQUIRE(!doc["result"]["quadrature"].is_null());
    CHECK(std::abs(doc["result"]["quadrature"].get<double>() + 1.0 / 12.0) < 1e-3);

    // CSV keeps the column but leaves it empty when not requested.
    const CliResult csv =
        run_cli("correlate --model bell-naive --angle-deg 60 --trials 1000 --format csv");
    REQUIRE(csv.code == 0);
    const eprb::io::CsvTable t = eprb::io::parse_csv(csv.out);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.header[5] == "quadrature");
    CHECK(t.rows[0][5].empty());
}

TEST_CASE("flag errors exit 2") {
    CHECK(run_cli("correlate --model nope --angle-deg 10").code == 2);
    CHECK(run_cli("correlate --model qm").code == 2);                       // no geometry
    CHECK(run_cli("correlate --model qm --angle-deg 60 --a 0,0,1").code == 2);
    CHECK(run_cli("correlate --model qm --angle-deg 60 --quadrature-nodes 256").code == 2);
    CHECK(run_cli("correlate --model bell-naive --a 1,1 --b 0,0,1").code == 2);
    CHECK(run_cli("sweep --model qm --theta-start 90 --theta-end 10").code == 2);
    CHECK(run_cli("sweep --model qm --theta-end 200").code == 2);
    CHECK(run_cli("chsh --model qm --a 0,0,1").code == 2);                  // incomplete set
    CHECK(run_cli("audit --check ring --state-sign 2").code == 2);
    CHECK(run_cli("").code == 2);                                           // no subcommand
}

TEST_CASE("non-unit axes exit 3; the renormalization window is honored") {
    CHECK(run_cli("correlate --model qm --a 1,1,1 --b 0,0,1 --trials 10").code == 3);
    CHECK(run_cli("correlate --model qm --a 0,0,1 --b 0.5,0.5,0.5 --trials 10").code == 3);
    CHECK(run_cli("audit --check locality --probe 2,0,0 --trials 10").code == 3);
    // Within 1e-6 of unit length: accepted and silently renormalized.
    CHECK(run_cli("correlate --model qm --a 0,0,1.0000001 --b 1,0,0 --trials 10").code == 0);
}

TEST_CASE("precondition violations exit 4") {
    CHECK(run_cli("audit --check locality --model qm --trials 10").code == 4);
    CHECK(run_cli("correlate --model bell-naive --angle-deg 90 --trials 100 "
                  "--quadrature-nodes 64")
              .code == 0); // 64 is the smallest legal budget
}

TEST_CASE("chsh: violation is signaled through the exit code") {
    const CliResult qm =
        run_cli("chsh --model qm --optimal-planar --trials 20000 --seed 5 --format json");
    REQUIRE(qm.code == 10);
    const nlohmann::json doc = nlohmann::json::parse(qm.out);
    CHECK(doc["result"]["violated"].get<bool>());
    CHECK(std::abs(doc["result"]["s_value"].get<double>() + std::sqrt(2.0) / 2.0) < 0.02);
    CHECK(eprb_test::validate_schema(load_schema_file("chsh.schema.json"), doc) == "");

    const CliResult naive =
        run_cli("chsh --model bell-naive --optimal-planar --trials 20000 --seed 5");
    CHECK(naive.code == 0);
}

TEST_CASE("audit locality: remote dependence is signaled through the exit code") {
    const CliResult mz = run_cli("audit --check locality --trials 20000 --seed 2 --format json");
    REQUIRE(mz.code == 11);
    const nlohmann::json doc = nlohmann::json::parse(mz.out);
    CHECK(doc["result"]["depends_on_remote"].get<bool>());
    CHECK(doc["result"]["max_z"].get<double>() > 5.0);
    CHECK(eprb_test::validate_schema(load_schema_file("audit-locality.schema.json"), doc) == "");

    const CliResult naive =
        run_cli("audit --check locality --model bell-naive --trials 20000 --seed 2");
    CHECK(naive.code == 0);
}

TEST_CASE("audit no-signaling: marginals stay flat for every engine") {
    for (const char* model : {"qm", "bell-naive", "matzkin"}) {
        const CliResult r = run_cli(std::string("audit --check no-signaling --model ") + model +
                                    " --trials 50000 --seed 21 --format json");
        REQUIRE(r.code == 0);
        const nlohmann::json doc = nlohmann::json::parse(r.out);
        CHECK(doc["result"]["all_within_3sigma"].get<bool>());
        CHECK(eprb_test::validate_schema(load_schema_file("audit-no-signaling.schema.json"),
                                         doc) == "");
    }
}

TEST_CASE("audit ring: default run reproduces the documented gap") {
    const CliResult r = run_cli("audit --check ring --trials 100000 --seed 3 --format json");
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(std::abs(doc["result"]["gap"].get<double>() - 0.14182655203060723) < 0.01);
    CHECK(std::abs(doc["result"]["born_plus"].get<double>() - 0.75) < 1e-12);
    CHECK(eprb_test::validate_schema(load_schema_file("audit-ring.schema.json"), doc) == "");
}

TEST_CASE("sweep: csv layout and closed-form columns") {
    const CliResult r =
        run_cli("sweep --model bell-naive --theta-steps 13 --trials 1000 --seed 9 --format csv");
    REQUIRE(r.code == 0);
    const eprb::io::CsvTable t = eprb::io::parse_csv(r.out);
    CHECK(t.header == std::vector<std::string>{"theta_deg", "estimate", "std_error",
                                               "analytic_model", "analytic_qm"});
    REQUIRE(t.rows.size() == 13);
    CHECK(t.rows.front()[0] == "0");
    CHECK(t.rows.back()[0] == "180");
    // The naive closed form is linear in theta: -1/4 at 0, -1/12 at 60, +1/4 at 180.
    CHECK(std::strtod(t.rows[0][3].c_str(), nullptr) == -0.25);
    CHECK(std::abs(std::strtod(t.rows[4][3].c_str(), nullptr) + 1.0 / 12.0) < 1e-12);
    CHECK(std::abs(std::strtod(t.rows[12][3].c_str(), nullptr) - 0.25) < 1e-12);

    const CliResult mz =
        run_cli("sweep --model matzkin --theta-steps 7 --trials 1000 --seed 9 --format csv");
    REQUIRE(mz.code == 0);
    const eprb::io::CsvTable mt = eprb::io::parse_csv(mz.out);
    REQUIRE(mt.rows.size() == 7);
    for (const auto& row : mt.rows) {
        CHECK(row[3] == row[4]); // matzkin's closed form IS the qm curve
    }

    const CliResult js =
        run_cli("sweep --model matzkin --theta-steps 3 --trials 500 --seed 9 --format json");
    REQUIRE(js.code == 0);
    CHECK(eprb_test::validate_schema(load_schema_file("sweep.schema.json"),
                                     nlohmann::json::parse(js.out)) == "");
}

TEST_CASE("determinism: reruns and thread counts do not change the payload") {
    const std::string args =
        "correlate --model matzkin --angle-deg 60 --trials 50000 --seed 11 --format json";
    const CliResult first = run_cli(args + " --threads 1");
    const CliResult second = run_cli(args + " --threads 1");
    const CliResult eight = run_cli(args + " --threads 8");
    REQUIRE(first.code == 0);
    CHECK(strip_timestamp_lines(first.out) == strip_timestamp_lines(second.out));
    CHECK(strip_timestamp_lines(first.out) == strip_timestamp_lines(eight.out));

    const std::string chsh_args =
        "chsh --model bell-naive --optimal-planar --trials 30000 --seed 12 --format csv";
    const CliResult c1 = run_cli(chsh_args + " --threads 1");
    const CliResult c8 = run_cli(chsh_args + " --threads 8");
    CHECK(strip_timestamp_lines(c1.out) == strip_timestamp_lines(c8.out));
}

TEST_CASE("determinism: the checksum is format-independent") {
    const std::string base =
        "audit --check ring --trials 20000 --seed 13 ";
    const CliResult js = run_cli(base + "--format json");
    const CliResult cs = run_cli(base + "--format csv");
    REQUIRE(js.code == 0);
    REQUIRE(cs.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(js.out);
    const std::string json_sum = doc["manifest"]["result_checksum"].get<std::string>();
    const std::string csv_sum = csv_comment_value(cs.out, "result_checksum");
    CHECK(json_sum == csv_sum);
    CHECK(std::regex_match(json_sum, std::regex("^fnv1a64:[0-9a-f]{16}$")));
}

TEST_CASE("--out writes the same bytes a stdout run produces") {
    const auto tmp = std::filesystem::temp_directory_path() /
                     ("eprb_out_" + std::to_string(::getpid()) + ".json");
    const std::string args =
        "correlate --model qm --angle-deg 90 --trials 5000 --seed 4 --format json";
    const CliResult direct = run_cli(args);
    const CliResult filed = run_cli(args + " --out \"" + tmp.string() + "\"");
    REQUIRE(direct.code == 0);
    REQUIRE(filed.code == 0);
    CHECK(filed.out.empty());
    CHECK(strip_timestamp_lines(slurp(tmp)) == strip_timestamp_lines(direct.out));
    std::filesystem::remove(tmp);
}

TEST_CASE("--version exits cleanly") {
    const CliResult r = run_cli("--version");
    CHECK(r.code == 0);
    CHECK(r.out.find("0.1.0") != std::string::npos);
}
