#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cli_app.hpp"
#include "hmts/csv.hpp"
#include "hmts/errors.hpp"
#include "hmts/scenario.hpp"

using namespace hmts;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = HMTS_SOURCE_DIR;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run hmts_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "hmts_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Writes `body` as a scenario file, with @DATA@ pointing at the shipped data directory.
fs::path scenario_with(const fs::path& dir, const std::string& body) {
    const auto data = (kRoot / "data").string();
    std::string text = body;
    for (std::string::size_type pos; (pos = text.find("@DATA@")) != std::string::npos;) text.replace(pos, 6, data);
    write(dir / "s.ini", text);
    return dir / "s.ini";
}

double field(const std::string& out, const std::string& key) {
    std::istringstream in(out);
    std::string k;
    double v;
    while (in >> k) {
        if (k == key && in >> v) return v;
    }
    FAIL("missing " << key);
    return 0.0;
}

const std::string kFullScenario = "[tables]\n"
                                  "baseline = @DATA@/dvbs2_single.csv\n"
                                  "hierarchical = @DATA@/hqpsk_thresholds.csv, @DATA@/h32apsk_thresholds.csv\n"
                                  "anomalies = @DATA@/known_anomalies.csv\n"
                                  "[weather]\ncdf = @DATA@/weather_cdf_sample.csv\n";

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("shipped default scenario file") {
    const auto s = load_scenario(kRoot / "scenarios" / "default.ini");
    CHECK(s.baseline_tables.size() == 1);
    CHECK(s.hierarchical_tables.size() == 2);
    CHECK(s.anomalies.has_value());
    CHECK(s.receivers == 500);
    CHECK(s.repetitions == 100);
    CHECK(s.grid == "1:16:0.5");
    CHECK(s.diameter_m == 1.5);
    CHECK(s.frequency_hz == 20e9);
    CHECK(s.edge_level_db == 4.0);
    for (const auto& p : s.hierarchical_tables) CHECK(fs::exists(p));
    const auto loaded = load_inputs(s);
    CHECK(loaded.warnings.size() == 1);
    CHECK(loaded.table.has_single_stream());
}

TEST_CASE("grid, outage and curve parsing") {
    CHECK(parse_grid("1:16:0.5").size() == 31);
    CHECK(parse_grid("4:4:1") == std::vector<double>{4.0});
    CHECK_THROWS_AS(parse_grid("1:16"), ValidationError);
    CHECK_THROWS_AS(parse_grid("a:2:1"), ValidationError);
    CHECK(parse_outage_policy("zero") == OutagePolicy::ZeroRate);
    CHECK(parse_outage_policy("exclude") == OutagePolicy::Exclude);
    CHECK_THROWS_AS(parse_outage_policy("drop"), ValidationError);

    const auto table = load_inputs(default_scenario()).table;
    CHECK(parse_curves("all", table).size() == 2);
    // "combined" adds the all-families curve after the individual ones.
    const auto comb = parse_curves("combined", table);
    REQUIRE(comb.size() == 3);
    CHECK(comb[2].label == "combined");
    const auto list = parse_curves("h_qpsk,combined", table);
    REQUIRE(list.size() == 2);
    CHECK(list[0].label == "h_qpsk");
    CHECK_THROWS_AS(parse_curves("h_8psk", table), ValidationError);
    CHECK_THROWS_AS(parse_curves("nonsense", table), ValidationError);
}

TEST_CASE("scenario errors") {
    const auto dir = scratch("scenario_errors");
    CHECK_THROWS_AS(load_scenario(dir / "absent.ini"), ValidationError);
    write(dir / "bad.ini", "[campaign]\nreceivers = many\n");
    CHECK_THROWS_AS(load_scenario(dir / "bad.ini"), ValidationError);
    write(dir / "nobase.ini", "[tables]\nhierarchical = " + (kRoot / "data/hqpsk_thresholds.csv").string() +
                                  "\n[weather]\ncdf = " + (kRoot / "data/weather_cdf_sample.csv").string() + "\n");
    CHECK_THROWS_AS(load_inputs(load_scenario(dir / "nobase.ini")), ValidationError);
}

}

TEST_SUITE("cli") {

TEST_CASE("rho") {
    auto r = hmts_cli({"rho", "--hqpsk", "--theta", "30"});
    CHECK(r.code == 0);
    CHECK(field(r.out, "rho_he") == doctest::Approx(0.75));

    r = hmts_cli({"rho", "--h32apsk", "--g1", "1.6", "--g2", "2.6", "--theta", "28.4"});
    CHECK(r.code == 0);
    CHECK(std::abs(field(r.out, "rho_he") - 0.80) <= 0.005);

    r = hmts_cli({"rho", "--hqpsk", "--theta", "90"});
    CHECK(r.code == cli::kExitValidation);
    CHECK(r.err.find("theta") != std::string::npos);

    r = hmts_cli({"rho", "--h16qam", "--alpha", "2"});
    CHECK(field(r.out, "energy_ratio") == 9.0);

    r = hmts_cli({"rho", "--table1"});
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 10);
    r = hmts_cli({"rho", "--table2"});
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 6);

    CHECK(hmts_cli({"rho"}).code == cli::kExitValidation);
    CHECK(hmts_cli({"rho", "--hqpsk"}).code == cli::kExitValidation);
    CHECK(hmts_cli({"frobnicate"}).code == cli::kExitValidation);
    CHECK(hmts_cli({"--help"}).code == 0);
}

TEST_CASE("pair") {
    auto r = hmts_cli({"pair", "7", "10"});
    CHECK(r.code == 0);
    CHECK(field(r.out, "r_hm") >= field(r.out, "r_ts"));

    r = hmts_cli({"pair", "-10", "-10"});
    CHECK(r.code == 0);
    CHECK(field(r.out, "r_hm") == 0.0);
    CHECK(field(r.out, "r_ts") == 0.0);
    CHECK(r.out.find("outage both") != std::string::npos);

    // Order of the two SNRs does not matter.
    CHECK(hmts_cli({"pair", "10", "7"}).out == hmts_cli({"pair", "7", "10"}).out);
}

TEST_CASE("pair with a single hierarchical scheme") {
    const auto dir = scratch("pair_single");
    std::string rows = "family,rho_he,stream,code_rate,threshold_db\n";
    const auto source = load_threshold_csv(kRoot / "data/hqpsk_thresholds.csv");
    for (const auto& [key, v] : source.cells())
        if (key.scheme == SchemeId(Family::H_QPSK, 0.8))
            rows += "H_QPSK,0.8," + std::string(to_string(key.stream)) + "," + key.code_rate.str() + "," +
                    format_number(v) + "\n";
    write(dir / "h08.csv", rows);
    const auto s = scenario_with(dir, "[tables]\nbaseline = @DATA@/dvbs2_single.csv\nhierarchical = h08.csv\n"
                                      "[weather]\ncdf = @DATA@/weather_cdf_sample.csv\n");
    const auto r = hmts_cli({"pair", "1", "7", "--scenario", s.string(), "--hull-csv", (dir / "hull.csv").string()});
    REQUIRE(r.code == 0);
    // Singles 1 and 2 bit/s/Hz; the hierarchical point (2/3, 2/3) sits on their time-sharing line.
    CHECK(field(r.out, "r_ts") == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(field(r.out, "r_hm") == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(field(r.out, "gain") == doctest::Approx(0.0));

    const auto hull = csv::read(csv::slurp(dir / "hull.csv"), "r_weak,r_strong,on_hull,origin", "hull.csv");
    bool saw_point = false;
    for (const auto& row : hull)
        if (row.fields[0] == format_number(2.0 / 3.0) && row.fields[1] == format_number(2.0 / 3.0)) saw_point = true;
    CHECK(saw_point);
}

TEST_CASE("validate") {
    auto r = hmts_cli({"validate", "--scenario", (kRoot / "scenarios/default.ini").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("0 error(s), 1 warning(s)") != std::string::npos);
    CHECK(r.out.find("known anomaly") != std::string::npos);

    const auto dir = scratch("validate");
    write(dir / "cdf.csv", "attenuation_db,cum_prob\n0,0\n1,0.7\n2,0.5\n3,1\n");
    auto s = scenario_with(dir, "[tables]\nbaseline = @DATA@/dvbs2_single.csv\n[weather]\ncdf = cdf.csv\n");
    r = hmts_cli({"validate", "--scenario", s.string()});
    CHECK(r.code == cli::kExitValidation);

    s = scenario_with(dir, "[tables]\nbaseline = missing.csv\nhierarchical = @DATA@/hqpsk_thresholds.csv\n"
                           "[weather]\ncdf = @DATA@/weather_cdf_sample.csv\n");
    r = hmts_cli({"validate", "--scenario", s.string()});
    CHECK(r.code == cli::kExitValidation);
    CHECK(r.out.find("missing") != std::string::npos);
    CHECK(hmts_cli({"campaign", "--scenario", s.string(), "--out", (dir / "o").string()}).code ==
          cli::kExitValidation);
}

TEST_CASE("campaign outputs") {
    const auto dir = scratch("campaign");
    const auto s = scenario_with(dir, kFullScenario);
    const auto out = dir / "out";
    auto r = hmts_cli({"campaign", "--scenario", s.string(), "--receivers", "20", "--reps", "3", "--grid", "1:4:1",
                       "--families", "h_qpsk,combined", "--seed", "42", "--out", out.string()});
    REQUIRE(r.code == 0);
    const auto gains = csv::read(csv::slurp(out / "gains.csv"), "snr_max_db,family,mean_gain,std_gain,excluded_runs",
                                 "gains.csv");
    CHECK(gains.size() == 4 * 2);
    CHECK(gains[0].fields[1] == "h_qpsk");
    CHECK(gains[1].fields[1] == "combined");
    CHECK(fs::exists(out / "curve_h_qpsk.csv"));
    CHECK(fs::exists(out / "curve_combined.csv"));
    CHECK(fs::exists(out / "stats.csv"));

    const auto first = csv::slurp(out / "gains.csv");
    r = hmts_cli({"campaign", "--scenario", s.string(), "--receivers", "20", "--reps", "3", "--grid", "1:4:1",
                  "--families", "h_qpsk,combined", "--seed", "42", "--workers", "3", "--out", out.string()});
    REQUIRE(r.code == 0);
    CHECK(csv::slurp(out / "gains.csv") == first);

    CHECK(hmts_cli({"campaign", "--scenario", s.string(), "--grid", "3:1:1", "--out", out.string()}).code ==
          cli::kExitValidation);
    CHECK(hmts_cli({"campaign", "--scenario", s.string(), "--families", "h_8psk", "--out", out.string()}).code ==
          cli::kExitValidation);
}

TEST_CASE("unwritable output is a runtime error") {
    const auto dir = scratch("unwritable");
    const auto s = scenario_with(dir, kFullScenario);
    write(dir / "file", "x");
    const auto r = hmts_cli({"campaign", "--scenario", s.string(), "--receivers", "4", "--reps", "1", "--grid",
                             "5:5:1", "--out", (dir / "file" / "sub").string()});
    CHECK(r.code == cli::kExitRuntime);
}

}
