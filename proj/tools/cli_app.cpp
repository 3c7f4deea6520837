#include "cli_app.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "hmts/constellation.hpp"
#include "hmts/csv.hpp"
#include "hmts/errors.hpp"
#include "hmts/scenario.hpp"
#include "hmts/simulation.hpp"

namespace hmts::cli {

namespace fs = std::filesystem;

namespace {

struct RhoArgs {
    bool hqpsk = false;
    bool h32apsk = false;
    bool h8psk = false;
    bool h16qam = false;
    bool table1 = false;
    bool table2 = false;
    std::optional<double> theta;
    std::optional<double> g1;
    std::optional<double> g2;
    std::optional<double> alpha;
};

struct ScenarioArgs {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> receivers;
    std::optional<std::size_t> reps;
    std::optional<std::string> grid;
    std::optional<std::string> families;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
    std::optional<std::string> outage;
};

struct PairArgs {
    double snr1 = 0.0;
    double snr2 = 0.0;
    std::string hull_csv;
};

template <typename T>
T require(const std::optional<T>& v, const char* flag) {
    if (!v) throw ValidationError(std::string("missing ") + flag);
    return *v;
}

Scenario resolve_scenario(const ScenarioArgs& a) {
    Scenario s = a.scenario.empty() ? default_scenario() : load_scenario(a.scenario);
    if (a.seed) s.seed = *a.seed;
    if (a.receivers) s.receivers = *a.receivers;
    if (a.reps) s.repetitions = *a.reps;
    if (a.grid) s.grid = *a.grid;
    if (a.families) s.families = *a.families;
    if (a.out) s.out_dir = *a.out;
    if (a.workers) s.workers = *a.workers;
    if (a.outage) s.outage = parse_outage_policy(*a.outage);
    return s;
}

void print_warnings(const std::vector<Diagnostic>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w.message << '\n';
}

std::string describe_modcod(const ModcodChoice& m) {
    std::string s = m.scheme.str();
    if (m.stream != Stream::SINGLE) s += " " + std::string(to_string(m.stream));
    return s + " " + m.code_rate.str();
}

std::string describe_origin(const RatePair& p) {
    switch (p.origin.kind) {
    case PairOrigin::Kind::Idle: return "idle";
    case PairOrigin::Kind::WeakOnly: return "weak only: " + describe_modcod(*p.origin.weak);
    case PairOrigin::Kind::StrongOnly: return "strong only: " + describe_modcod(*p.origin.strong);
    case PairOrigin::Kind::Hierarchical:
        return "weak " + describe_modcod(*p.origin.weak) + " + strong " + describe_modcod(*p.origin.strong);
    }
    return "?";
}

std::string fixed(double v, int digits = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

// --- rho ---------------------------------------------------------------------

int cmd_rho(const RhoArgs& a, std::ostream& out) {
    if (a.table1) {
        out << "rho_nominal,theta_deg,rho_he\n";
        for (const auto& row : adopted_qpsk_parameters())
            out << format_number(row.rho_he) << ',' << format_number(row.theta_deg) << ','
                << fixed(qpsk_rho_he(QpskParams(row.theta_deg)), 4) << '\n';
        return kExitOk;
    }
    if (a.table2) {
        out << "rho_nominal,gamma1,gamma2,theta_deg,rho_he\n";
        for (const auto& row : adopted_apsk32_parameters())
            out << format_number(row.rho_he) << ',' << format_number(row.gamma1) << ',' << format_number(row.gamma2)
                << ',' << format_number(row.theta_deg) << ','
                << fixed(apsk32_rho_he(Apsk32Params(row.gamma1, row.gamma2, row.theta_deg)), 4) << '\n';
        return kExitOk;
    }
    const int picked = a.hqpsk + a.h32apsk + a.h8psk + a.h16qam;
    if (picked != 1)
        throw ValidationError("pick exactly one of --hqpsk, --h32apsk, --h8psk, --h16qam, --table1, --table2");
    if (a.hqpsk) {
        const double rho_he = qpsk_rho_he(QpskParams(require(a.theta, "--theta")));
        out << "rho_he " << fixed(rho_he, 4) << '\n';
    } else if (a.h8psk) {
        const double rho_he = psk8_rho_he(Psk8Params(require(a.theta, "--theta")));
        out << "rho_he " << fixed(rho_he, 4) << '\n';
    } else if (a.h32apsk) {
        const Apsk32Params p(require(a.g1, "--g1"), require(a.g2, "--g2"), require(a.theta, "--theta"));
        out << "rho_he " << fixed(apsk32_rho_he(p), 4) << '\n'
            << "barycenter_distance " << fixed(apsk32_barycenter_distance(p), 4) << '\n';
    } else {
        const double ratio = qam16_energy_ratio(Qam16Params(require(a.alpha, "--alpha")));
        out << "energy_ratio " << fixed(ratio, 4) << '\n';
    }
    return kExitOk;
}

// --- pair --------------------------------------------------------------------

int cmd_pair(const PairArgs& a, const ScenarioArgs& sa, std::ostream& out, std::ostream& err) {
    const auto scenario = resolve_scenario(sa);
    const auto inputs = load_inputs(scenario);
    print_warnings(inputs.warnings, err);

    std::vector<Family> families;
    for (const auto& c : parse_curves(scenario.families, inputs.table))
        for (const auto f : c.families)
            if (std::find(families.begin(), families.end(), f) == families.end()) families.push_back(f);

    const PairEvaluator evaluator(inputs.table.restricted(families));
    const double weak = std::min(a.snr1, a.snr2);
    const double strong = std::max(a.snr1, a.snr2);
    const auto sol = evaluator.solve(weak, strong);
    const double gain = sol.r_ts > 0.0 ? (sol.r_hm - sol.r_ts) / sol.r_ts : 0.0;

    out << "snr_weak_db " << format_number(weak) << '\n'
        << "snr_strong_db " << format_number(strong) << '\n'
        << "r_ts " << fixed(sol.r_ts) << '\n'
        << "r_hm " << fixed(sol.r_hm) << '\n'
        << "gain " << fixed(gain) << '\n';
    const bool weak_out = !evaluator.best_single(weak);
    const bool strong_out = !evaluator.best_single(strong);
    if (weak_out || strong_out)
        out << "outage " << (weak_out && strong_out ? "both" : weak_out ? "weak" : "strong") << '\n';
    for (const auto& ts : sol.schedule) {
        out << "schedule tau=" << fixed(ts.tau) << " [" << describe_origin(ts.point_a) << "]";
        if (ts.tau < 1.0) out << " / " << fixed(1.0 - ts.tau) << " [" << describe_origin(ts.point_b) << "]";
        out << '\n';
    }

    if (!a.hull_csv.empty()) {
        const auto pairs = evaluator.achievable_pairs(weak, strong);
        const auto hull = hull_vertices(pairs);
        std::ofstream f(a.hull_csv);
        if (!f) throw std::runtime_error("cannot write " + a.hull_csv);
        f << "r_weak,r_strong,on_hull,origin\n";
        for (const auto& p : pairs) {
            const bool on_hull = std::any_of(hull.begin(), hull.end(),
                                             [&](const RatePair& h) { return h.r1 == p.r1 && h.r2 == p.r2; });
            f << format_number(p.r1) << ',' << format_number(p.r2) << ',' << (on_hull ? 1 : 0) << ','
              << describe_origin(p) << '\n';
        }
    }
    return kExitOk;
}

// --- campaign ------------------------------------------------------------------

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("failed writing " + path.string());
}

int cmd_campaign(const ScenarioArgs& sa, std::ostream& out, std::ostream& err) {
    const auto scenario = resolve_scenario(sa);
    const auto inputs = load_inputs(scenario);
    print_warnings(inputs.warnings, err);

    CampaignConfig cfg;
    cfg.snr_max_grid = parse_grid(scenario.grid);
    cfg.receivers = scenario.receivers;
    cfg.repetitions = scenario.repetitions;
    cfg.curves = parse_curves(scenario.families, inputs.table);
    cfg.master_seed = scenario.seed;
    cfg.workers = scenario.workers;
    cfg.outage = scenario.outage;

    const auto report = run_campaign(cfg, inputs.table, inputs.antenna, inputs.weather);

    std::ostringstream gains;
    std::ostringstream stats;
    gains << "snr_max_db,family,mean_gain,std_gain,excluded_runs\n";
    stats << "snr_max_db,family,mean_gain,std_gain,median_gain,included_runs,excluded_runs,mean_outage_receivers,"
             "max_outage_receivers\n";
    for (std::size_t g = 0; g < report.snr_max_grid.size(); ++g) {
        for (std::size_t c = 0; c < report.curves.size(); ++c) {
            const auto& s = report.stats[g][c];
            const auto snr = format_number(report.snr_max_grid[g]);
            gains << snr << ',' << report.curves[c] << ',' << format_number(s.mean_gain) << ','
                  << format_number(s.std_gain) << ',' << s.excluded_runs << '\n';
            stats << snr << ',' << report.curves[c] << ',' << format_number(s.mean_gain) << ','
                  << format_number(s.std_gain) << ',' << format_number(s.median_gain) << ',' << s.included_runs << ','
                  << s.excluded_runs << ',' << format_number(s.mean_outage_receivers) << ','
                  << s.max_outage_receivers << '\n';
        }
    }

    fs::create_directories(scenario.out_dir);
    write_file(scenario.out_dir / "gains.csv", gains.str());
    write_file(scenario.out_dir / "stats.csv", stats.str());
    for (const auto& label : report.curves) {
        std::ostringstream curve;
        curve << "snr_max_db,mean_gain\n";
        for (const auto& [snr, g] : gain_curve(report, label))
            curve << format_number(snr) << ',' << format_number(g) << '\n';
        write_file(scenario.out_dir / ("curve_" + label + ".csv"), curve.str());
    }

    out << "snr_max_db";
    for (const auto& c : report.curves) out << ' ' << std::setw(10) << c;
    out << '\n';
    for (std::size_t g = 0; g < report.snr_max_grid.size(); ++g) {
        out << std::setw(10) << format_number(report.snr_max_grid[g]);
        for (std::size_t c = 0; c < report.curves.size(); ++c)
            out << ' ' << std::setw(std::max<int>(10, static_cast<int>(report.curves[c].size())))
                << fixed(report.stats[g][c].mean_gain, 4);
        out << '\n';
    }
    out << "wrote " << (scenario.out_dir / "gains.csv").string() << '\n';
    return kExitOk;
}

// --- validate ------------------------------------------------------------------

int cmd_validate(const ScenarioArgs& sa, std::ostream& out) {
    std::size_t errors = 0;
    std::size_t warnings = 0;
    auto error = [&](const std::string& msg) {
        out << "error: " << msg << '\n';
        ++errors;
    };

    Scenario scenario;
    try {
        scenario = resolve_scenario(sa);
    } catch (const ValidationError& e) {
        error(e.what());
        out << errors << " error(s), 0 warning(s)\n";
        return kExitValidation;
    }

    KnownAnomalies anomalies;
    if (scenario.anomalies) {
        try {
            anomalies = KnownAnomalies::load_csv(*scenario.anomalies);
        } catch (const ValidationError& e) {
            error(e.what());
        }
    }

    bool have_baseline = false;
    auto check_table = [&](const fs::path& p, bool baseline) {
        if (!fs::exists(p)) {
            error("missing threshold table " + p.string());
            return;
        }
        try {
            const auto table = parse_threshold_csv(csv::slurp(p), p.string());
            if (baseline && table.has_single_stream()) have_baseline = true;
            for (const auto& d : table.validate(anomalies)) {
                if (d.severity == Diagnostic::Severity::Error) {
                    error(p.string() + ": " + d.message);
                } else {
                    out << "warning: " << p.string() << ": " << d.message << '\n';
                    ++warnings;
                }
            }
            out << "ok: " << p.string() << " (" << table.size() << " thresholds)\n";
        } catch (const ValidationError& e) {
            error(e.what());
        }
    };
    for (const auto& p : scenario.baseline_tables) check_table(p, true);
    for (const auto& p : scenario.hierarchical_tables) check_table(p, false);
    if (!have_baseline) error("no baseline (single-stream) threshold table available for the campaign");

    if (scenario.weather_cdf.empty() || !fs::exists(scenario.weather_cdf)) {
        error("missing weather CDF " + scenario.weather_cdf.string());
    } else {
        try {
            const auto cdf = WeatherCdf::load_csv(scenario.weather_cdf);
            out << "ok: " << scenario.weather_cdf.string() << " (" << cdf.points().size() << " points)\n";
        } catch (const ValidationError& e) {
            error(e.what());
        }
    }
    try {
        AntennaConfig(scenario.diameter_m, scenario.frequency_hz, scenario.edge_level_db);
        parse_grid(scenario.grid);
    } catch (const ValidationError& e) {
        error(e.what());
    }

    out << errors << " error(s), " << warnings << " warning(s)\n";
    return errors ? kExitValidation : kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hierarchical-modulation time sharing simulator", "hmts"};
    app.require_subcommand(1);

    RhoArgs rho;
    auto* rho_cmd = app.add_subcommand("rho", "Energy split of a hierarchical constellation");
    rho_cmd->add_flag("--hqpsk", rho.hqpsk, "Hierarchical QPSK (needs --theta)");
    rho_cmd->add_flag("--h32apsk", rho.h32apsk, "Hierarchical 32-APSK (needs --g1 --g2 --theta)");
    rho_cmd->add_flag("--h8psk", rho.h8psk, "Hierarchical 8-PSK (needs --theta)");
    rho_cmd->add_flag("--h16qam", rho.h16qam, "Non-uniform 16-QAM energy ratio (needs --alpha)");
    rho_cmd->add_flag("--table1", rho.table1, "Regenerate the adopted hierarchical QPSK parameters");
    rho_cmd->add_flag("--table2", rho.table2, "Regenerate the adopted hierarchical 32-APSK parameters");
    rho_cmd->add_option("--theta", rho.theta, "Angle in degrees");
    rho_cmd->add_option("--g1", rho.g1, "gamma1 = R2/R1");
    rho_cmd->add_option("--g2", rho.g2, "gamma2 = R3/R1");
    rho_cmd->add_option("--alpha", rho.alpha, "alpha = d_h/d_l");

    ScenarioArgs sa;
    auto add_scenario = [&sa](CLI::App* cmd) { cmd->add_option("--scenario", sa.scenario, "Scenario file"); };
    auto add_campaign_flags = [&sa](CLI::App* cmd) {
        cmd->add_option("--seed", sa.seed, "Master seed");
        cmd->add_option("--receivers", sa.receivers, "Receivers per population");
        cmd->add_option("--reps", sa.reps, "Repetitions per SNR_max");
        cmd->add_option("--grid", sa.grid, "SNR_max grid a:b:step (dB)");
        cmd->add_option("--out", sa.out, "Output directory");
        cmd->add_option("--workers", sa.workers, "Worker threads (0 = all cores)");
        cmd->add_option("--outage", sa.outage, "Outage receivers: exclude | zero");
    };

    PairArgs pair;
    auto* pair_cmd = app.add_subcommand("pair", "Equal-rate point for two receivers");
    pair_cmd->add_option("snr1", pair.snr1, "SNR of one receiver (dB)")->required();
    pair_cmd->add_option("snr2", pair.snr2, "SNR of the other receiver (dB)")->required();
    pair_cmd->add_option("--hull-csv", pair.hull_csv, "Write the achievable pairs and hull flags here");
    pair_cmd->add_option("--families", sa.families, "Hierarchical families: list | all | combined");
    add_scenario(pair_cmd);

    auto* campaign_cmd = app.add_subcommand("campaign", "Monte Carlo gain curves over SNR_max");
    add_scenario(campaign_cmd);
    add_campaign_flags(campaign_cmd);
    campaign_cmd->add_option("--families", sa.families, "Hierarchical families: list | all | combined");

    auto* validate_cmd = app.add_subcommand("validate", "Check threshold tables, anomalies and the weather CDF");
    add_scenario(validate_cmd);

    // CLI11 wants argv order reversed in a vector.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*rho_cmd) return cmd_rho(rho, out);
        if (*pair_cmd) return cmd_pair(pair, sa, out, err);
        if (*campaign_cmd) return cmd_campaign(sa, out, err);
        if (*validate_cmd) return cmd_validate(sa, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace hmts::cli
