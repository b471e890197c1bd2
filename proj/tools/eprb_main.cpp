// Command-line front end: correlate | sweep | chsh | audit.
//
// Exit codes:
//   0  success
//   2  invalid flags / malformed input
//   3  non-unit axis (outside the 1e-6 renormalization window)
//   4  library precondition violation
//   10 CHSH inequality violated (chsh)
//   11 remote dependence detected (audit)

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eprb/analysis.hpp"
#include "eprb/experiment.hpp"
#include "eprb/geometry.hpp"
#include "eprb/models.hpp"
#include "eprb/report_io.hpp"
#include "eprb/version.hpp"

namespace {

using namespace eprb;

constexpr double kPi = std::numbers::pi;

double deg_to_rad(double deg) { return deg * kPi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Flag-level problem discovered after CLI11 parsing (bad triple syntax,
// missing axis, inconsistent combination). Maps to exit 2.
struct FlagError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Axis parsed fine but is not unit length within the 1e-6 window. Exit 3.
struct NonUnitAxisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

UnitVector parse_axis(const std::string& text, const char* flag) {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    char trail = '\0';
    const int got = std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &x, &y, &z, &trail);
    if (got != 3) {
        throw FlagError(std::string(flag) + " expects a comma-separated triple x,y,z, got '" +
                        text + "'");
    }
    try {
        return UnitVector(x, y, z);
    } catch (const std::invalid_argument& e) {
        throw NonUnitAxisError(std::string(flag) + ": " + e.what());
    }
}

std::vector<UnitVector> parse_settings(const std::string& text, const char* flag) {
    std::vector<UnitVector> settings;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(';', pos);
        if (end == std::string::npos) end = text.size();
        const std::string item = text.substr(pos, end - pos);
        if (!item.empty()) {
            settings.push_back(parse_axis(item, flag));
        }
        pos = end + 1;
        if (end == text.size()) break;
    }
    if (settings.empty()) {
        throw FlagError(std::string(flag) + ": expected at least one x,y,z triple");
    }
    return settings;
}

std::string axis_param(const UnitVector& v) {
    return io::format_double(v.x()) + "," + io::format_double(v.y()) + "," +
           io::format_double(v.z());
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) {
        omp_set_num_threads(threads);
    }
#else
    (void)threads;
#endif
}

struct CommonOpts {
    std::uint64_t seed = 0;
    std::uint64_t trials = 100000;
    std::string format = "csv";
    std::string out = "stdout";
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "Master seed (default 0)");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials (default 100000)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--format", o.format, "Output format (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out, "Output path, or 'stdout' (default)");
    cmd->add_option("--threads", o.threads, "Worker thread cap; 0 = library default")
        ->check(CLI::NonNegativeNumber);
}

// --threads and --out are intentionally not part of the manifest: neither
// affects the result payload, and recording them would break byte-identity
// of otherwise identical runs.
int emit_output(const CommonOpts& o, io::RunManifest manifest, const nlohmann::json& result,
                const io::CsvTable& table) {
    manifest.seed = o.seed;
    manifest.version = kVersion;
    manifest.timestamp = io::utc_timestamp_now();
    manifest.result_checksum = io::checksum_string(io::dump_json(result));
    const std::string payload = o.format == "json" ? io::render_json(manifest, result)
                                                   : io::render_csv(manifest, table);
    if (o.out == "stdout" || o.out == "-") {
        std::cout << payload;
        return 0;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) {
        std::cerr << "error: cannot open output file '" << o.out << "'\n";
        return 2;
    }
    file << payload;
    return file.good() ? 0 : 2;
}

struct CorrelateOpts {
    CommonOpts common;
    std::string model_name;
    double angle_deg = 0.0;
    bool angle_set = false;
    std::string a_text;
    std::string b_text;
    std::uint64_t quadrature_nodes = 0; // 0 = not requested
};

int run_correlate(const CorrelateOpts& o) {
    apply_threads(o.common.threads);
    const ModelKind model = *model_from_string(o.model_name);

    UnitVector a = UnitVector::z_axis();
    UnitVector b = UnitVector::z_axis();
    double theta = 0.0;
    double theta_deg = 0.0;
    if (o.angle_set) {
        if (!o.a_text.empty() || !o.b_text.empty()) {
            throw FlagError("--angle-deg cannot be combined with --a/--b");
        }
        theta_deg = o.angle_deg;
        theta = deg_to_rad(o.angle_deg);
        b = axis_in_xz_plane(theta);
    } else {
        if (o.a_text.empty() || o.b_text.empty()) {
            throw FlagError("provide either --angle-deg or both --a and --b");
        }
        a = parse_axis(o.a_text, "--a");
        b = parse_axis(o.b_text, "--b");
        theta = angle_between(a, b);
        theta_deg = rad_to_deg(theta);
    }

    if (o.quadrature_nodes > 0 && model == ModelKind::QuantumReference) {
        throw FlagError("--quadrature-nodes applies to HV models only (bell-naive, matzkin)");
    }

    const CorrelationEstimate est = estimate_correlation(
        ExperimentConfig{model, a, b, o.common.trials, o.common.seed});

    io::CorrelateRecord rec;
    rec.model = model;
    rec.theta_deg = theta_deg;
    rec.estimate = est.mean;
    rec.std_error = est.std_error;
    rec.analytic = model == ModelKind::BellNaive ? naive_pair_expectation_analytic(theta)
                                                 : qm_pair_expectation(a, b);
    if (o.quadrature_nodes > 0) {
        rec.quadrature = quadrature_expectation(model, a, b, o.quadrature_nodes).value;
    }
    rec.trials = o.common.trials;
    rec.seed = o.common.seed;

    io::RunManifest manifest;
    manifest.command = "correlate";
    manifest.parameters.emplace_back("model", o.model_name);
    if (o.angle_set) {
        manifest.parameters.emplace_back("angle_deg", io::format_double(o.angle_deg));
    } else {
        manifest.parameters.emplace_back("a", axis_param(a));
        manifest.parameters.emplace_back("b", axis_param(b));
    }
    manifest.parameters.emplace_back("trials", std::to_string(o.common.trials));
    if (o.quadrature_nodes > 0) {
        manifest.parameters.emplace_back("quadrature_nodes",
                                         std::to_string(o.quadrature_nodes));
    }
    return emit_output(o.common, std::move(manifest), io::to_json(rec), io::to_csv(rec));
}

struct SweepOpts {
    CommonOpts common;
    std::string model_name;
    double theta_start = 0.0;
    double theta_end = 180.0;
    std::uint64_t theta_steps = 13;
};

int run_sweep(const SweepOpts& o) {
    apply_threads(o.common.threads);
    const ModelKind model = *model_from_string(o.model_name);
    if (o.theta_steps < 1) {
        throw FlagError("--theta-steps must be >= 1");
    }
    if (o.theta_start > o.theta_end) {
        throw FlagError("--theta-start must not exceed --theta-end");
    }
    if (o.theta_start < 0.0 || o.theta_end > 180.0) {
        throw FlagError("theta grid must lie within [0, 180] degrees");
    }

    std::vector<double> grid_deg;
    grid_deg.reserve(o.theta_steps);
    if (o.theta_steps == 1) {
        grid_deg.push_back(o.theta_start);
    } else {
        const double step =
            (o.theta_end - o.theta_start) / static_cast<double>(o.theta_steps - 1);
        for (std::uint64_t i = 0; i < o.theta_steps; ++i) {
            grid_deg.push_back(o.theta_start + static_cast<double>(i) * step);
        }
        grid_deg.back() = o.theta_end; // exact despite rounding in the step
    }
    std::vector<double> grid_rad;
    grid_rad.reserve(grid_deg.size());
    for (const double d : grid_deg) {
        grid_rad.push_back(std::min(deg_to_rad(d), kPi));
    }

    const std::vector<AngleSweepRow> rows =
        angle_sweep(model, grid_rad, o.common.trials, o.common.seed);

    io::RunManifest manifest;
    manifest.command = "sweep";
    manifest.parameters.emplace_back("model", o.model_name);
    manifest.parameters.emplace_back("theta_start", io::format_double(o.theta_start));
    manifest.parameters.emplace_back("theta_end", io::format_double(o.theta_end));
    manifest.parameters.emplace_back("theta_steps", std::to_string(o.theta_steps));
    manifest.parameters.emplace_back("trials", std::to_string(o.common.trials));
    return emit_output(o.common, std::move(manifest),
                       io::sweep_to_json(model, grid_deg, rows, o.common.trials, o.common.seed),
                       io::sweep_to_csv(grid_deg, rows));
}

struct ChshOpts {
    CommonOpts common;
    std::string model_name;
    bool optimal_planar = false;
    std::string a_text, a_prime_text, b_text, b_prime_text;
};

int run_chsh(const ChshOpts& o) {
    apply_threads(o.common.threads);
    const ModelKind model = *model_from_string(o.model_name);

    UnitVector a = UnitVector::z_axis();
    UnitVector a_prime = UnitVector::x_axis();
    UnitVector b = UnitVector::z_axis();
    UnitVector b_prime = UnitVector::z_axis();
    if (o.optimal_planar) {
        a = axis_in_xz_plane(0.0);
        a_prime = axis_in_xz_plane(deg_to_rad(90.0));
        b = axis_in_xz_plane(deg_to_rad(45.0));
        b_prime = axis_in_xz_plane(deg_to_rad(135.0));
    } else {
        if (o.a_text.empty() || o.a_prime_text.empty() || o.b_text.empty() ||
            o.b_prime_text.empty()) {
            throw FlagError("provide --optimal-planar or all of --a --a-prime --b --b-prime");
        }
        a = parse_axis(o.a_text, "--a");
        a_prime = parse_axis(o.a_prime_text, "--a-prime");
        b = parse_axis(o.b_text, "--b");
        b_prime = parse_axis(o.b_prime_text, "--b-prime");
    }

    const ChshReport report =
        chsh_scan(model, a, a_prime, b, b_prime, o.common.trials, o.common.seed);

    io::RunManifest manifest;
    manifest.command = "chsh";
    manifest.parameters.emplace_back("model", o.model_name);
    if (o.optimal_planar) {
        manifest.parameters.emplace_back("optimal_planar", "true");
    } else {
        manifest.parameters.emplace_back("a", axis_param(a));
        manifest.parameters.emplace_back("a_prime", axis_param(a_prime));
        manifest.parameters.emplace_back("b", axis_param(b));
        manifest.parameters.emplace_back("b_prime", axis_param(b_prime));
    }
    manifest.parameters.emplace_back("trials", std::to_string(o.common.trials));
    const int rc =
        emit_output(o.common, std::move(manifest), io::to_json(report), io::to_csv(report));
    if (rc != 0) return rc;
    return report.violated ? 10 : 0;
}

struct AuditOpts {
    CommonOpts common;
    std::string check;
    std::string model_name = "matzkin";
    std::string probe_text = "0,0,1";
    std::string settings_text = "0,0,1;1,0,0";
    std::string b_text;
    double b_angle_deg = 60.0;
    std::string state_axis_text = "0,0,1";
    int state_sign = 1;
    std::string meas_axis_text;
    double meas_angle_deg = 60.0;
};

int run_audit(const AuditOpts& o) {
    apply_threads(o.common.threads);
    const ModelKind model = *model_from_string(o.model_name);

    io::RunManifest manifest;
    manifest.command = "audit";
    manifest.parameters.emplace_back("check", o.check);

    if (o.check == "ring") {
        if (o.state_sign != 1 && o.state_sign != -1) {
            throw FlagError("--state-sign must be +1 or -1");
        }
        const UnitVector state = parse_axis(o.state_axis_text, "--state-axis");
        const UnitVector meas = o.meas_axis_text.empty()
                                    ? axis_in_xz_plane(deg_to_rad(o.meas_angle_deg))
                                    : parse_axis(o.meas_axis_text, "--meas-axis");
        const RingConsistencyReport report =
            ring_consistency_check(state, o.state_sign, meas, o.common.trials, o.common.seed);
        manifest.parameters.emplace_back("state_axis", axis_param(state));
        manifest.parameters.emplace_back("state_sign", std::to_string(o.state_sign));
        manifest.parameters.emplace_back("meas_axis", axis_param(meas));
        manifest.parameters.emplace_back("trials", std::to_string(o.common.trials));
        return emit_output(o.common, std::move(manifest), io::to_json(report),
                           io::to_csv(report));
    }

    const UnitVector b = o.b_text.empty() ? axis_in_xz_plane(deg_to_rad(o.b_angle_deg))
                                          : parse_axis(o.b_text, "--b");
    const std::vector<UnitVector> settings = parse_settings(o.settings_text, "--settings");
    std::string settings_param;
    for (const auto& s : settings) {
        if (!settings_param.empty()) settings_param += ";";
        settings_param += axis_param(s);
    }

    if (o.check == "locality") {
        const UnitVector probe = parse_axis(o.probe_text, "--probe");
        const LocalityReport report =
            locality_audit(model, probe, b, settings, o.common.trials, o.common.seed);
        manifest.parameters.emplace_back("model", o.model_name);
        manifest.parameters.emplace_back("probe", axis_param(probe));
        manifest.parameters.emplace_back("b", axis_param(b));
        manifest.parameters.emplace_back("settings", settings_param);
        manifest.parameters.emplace_back("trials_per_setting",
                                         std::to_string(o.common.trials));
        const int rc = emit_output(o.common, std::move(manifest), io::to_json(report),
                                   io::to_csv(report));
        if (rc != 0) return rc;
        return report.depends_on_remote ? 11 : 0;
    }

    if (o.check == "no-signaling") {
        const NoSignalingReport report =
            no_signaling_check(model, b, settings, o.common.trials, o.common.seed);
        manifest.parameters.emplace_back("model", o.model_name);
        manifest.parameters.emplace_back("b", axis_param(b));
        manifest.parameters.emplace_back("settings", settings_param);
        manifest.parameters.emplace_back("trials_per_setting",
                                         std::to_string(o.common.trials));
        const int rc = emit_output(o.common, std::move(manifest), io::to_json(report),
                                   io::to_csv(report));
        if (rc != 0) return rc;
        return report.all_within_3sigma ? 0 : 11;
    }

    throw FlagError("--check must be one of locality, no-signaling, ring");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EPRB hidden-variable simulation toolkit"};
    app.set_version_flag("--version", eprb::kVersion);
    app.require_subcommand(1);

    CorrelateOpts co;
    CLI::App* correlate =
        app.add_subcommand("correlate", "Estimate E(a,b) for one setting pair");
    correlate->add_option("--model", co.model_name, "qm | bell-naive | matzkin")
        ->required()
        ->check(CLI::IsMember({"qm", "bell-naive", "matzkin"}));
    correlate->add_option("--angle-deg", co.angle_deg, "Angle between analyzers, degrees")
        ->check(CLI::Range(0.0, 180.0))
        ->each([&co](const std::string&) { co.angle_set = true; });
    correlate->add_option("--a", co.a_text, "Analyzer 1 axis as x,y,z");
    correlate->add_option("--b", co.b_text, "Analyzer 2 axis as x,y,z");
    correlate->add_option("--quadrature-nodes", co.quadrature_nodes,
                          "Also run deterministic quadrature with this node budget")
        ->check(CLI::Range(std::uint64_t{64}, std::uint64_t{100000000}));
    add_common(correlate, co.common);

    SweepOpts so;
    CLI::App* sweep = app.add_subcommand("sweep", "Sweep E over a grid of angles");
    sweep->add_option("--model", so.model_name, "qm | bell-naive | matzkin")
        ->required()
        ->check(CLI::IsMember({"qm", "bell-naive", "matzkin"}));
    sweep->add_option("--theta-start", so.theta_start, "Grid start, degrees (default 0)");
    sweep->add_option("--theta-end", so.theta_end, "Grid end, degrees (default 180)");
    sweep->add_option("--theta-steps", so.theta_steps, "Grid size (default 13)");
    add_common(sweep, so.common);

    ChshOpts ho;
    CLI::App* chsh = app.add_subcommand("chsh", "Evaluate the CHSH combination S");
    chsh->add_option("--model", ho.model_name, "qm | bell-naive | matzkin")
        ->required()
        ->check(CLI::IsMember({"qm", "bell-naive", "matzkin"}));
    chsh->add_flag("--optimal-planar", ho.optimal_planar,
                   "Planar settings 0/90/45/135 degrees in the x-z plane");
    chsh->add_option("--a", ho.a_text, "Axis a as x,y,z");
    chsh->add_option("--a-prime", ho.a_prime_text, "Axis a' as x,y,z");
    chsh->add_option("--b", ho.b_text, "Axis b as x,y,z");
    chsh->add_option("--b-prime", ho.b_prime_text, "Axis b' as x,y,z");
    add_common(chsh, ho.common);

    AuditOpts ao;
    CLI::App* audit =
        app.add_subcommand("audit", "Locality, no-signaling, and ring-consistency checks");
    audit->add_option("--check", ao.check, "locality | no-signaling | ring")
        ->required()
        ->check(CLI::IsMember({"locality", "no-signaling", "ring"}));
    audit->add_option("--model", ao.model_name, "bell-naive | matzkin (default matzkin)")
        ->check(CLI::IsMember({"qm", "bell-naive", "matzkin"}));
    audit->add_option("--probe", ao.probe_text, "Fixed hidden variable as x,y,z (locality)");
    audit->add_option("--settings", ao.settings_text,
                      "Remote settings, semicolon-separated x,y,z triples");
    audit->add_option("--b", ao.b_text, "Particle-2 analyzer as x,y,z");
    audit->add_option("--b-angle-deg", ao.b_angle_deg,
                      "Particle-2 analyzer angle from z in the x-z plane (default 60)");
    audit->add_option("--state-axis", ao.state_axis_text, "Eigenstate axis (ring)");
    audit->add_option("--state-sign", ao.state_sign, "+1 or -1 (ring)");
    audit->add_option("--meas-axis", ao.meas_axis_text, "Measurement axis (ring)");
    audit->add_option("--meas-angle-deg", ao.meas_angle_deg,
                      "Measurement angle from z in the x-z plane (ring, default 60)");
    add_common(audit, ao.common);

    int rc = 0;
    correlate->callback([&] { rc = run_correlate(co); });
    sweep->callback([&] { rc = run_sweep(so); });
    chsh->callback([&] { rc = run_chsh(ho); });
    audit->callback([&] { rc = run_audit(ao); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const FlagError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NonUnitAxisError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
