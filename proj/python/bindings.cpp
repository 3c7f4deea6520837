#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hmts/beam_channel.hpp"
#include "hmts/constellation.hpp"
#include "hmts/errors.hpp"
#include "hmts/modcod.hpp"
#include "hmts/rate_optimizer.hpp"
#include "hmts/scenario.hpp"
#include "hmts/simulation.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace hmts;

namespace {

Stream parse_stream(const std::string& s) {
    if (s == "HE") return Stream::HE;
    if (s == "LE") return Stream::LE;
    if (s == "SINGLE") return Stream::SINGLE;
    throw ValidationError("stream must be HE, LE or SINGLE (got '" + s + "')");
}

SchemeId make_scheme(const std::string& family, std::optional<double> rho) {
    const auto f = parse_family(family);
    if (!f) throw ValidationError("unknown family '" + family + "'");
    return rho ? SchemeId(*f, *rho) : SchemeId(*f);
}

py::object choice_dict(const std::optional<ModcodChoice>& c) {
    if (!c) return py::none();
    py::dict d;
    d["scheme"] = c->scheme.str();
    d["family"] = std::string(to_string(c->scheme.family()));
    d["rho_he"] = c->scheme.rho_he();
    d["stream"] = std::string(to_string(c->stream));
    d["code_rate"] = c->code_rate.str();
    d["spectral_efficiency"] = c->spectral_efficiency;
    return std::move(d);
}

std::vector<RatePair> to_pairs(const std::vector<std::pair<double, double>>& pts) {
    std::vector<RatePair> out;
    out.reserve(pts.size());
    for (const auto& [a, b] : pts) out.push_back({a, b, {}});
    return out;
}

Scenario scenario_from(const std::optional<std::filesystem::path>& path) {
    return path ? load_scenario(*path) : default_scenario();
}

} // namespace

PYBIND11_MODULE(_hmts, m) {
    m.doc() = "Hierarchical-modulation time sharing core";
    m.attr("DATA_DIR") = std::string(HMTS_DATA_DIR);

    auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", validation.ptr());

    // constellation
    m.def("qpsk_rho_he", [](double theta_deg) { return qpsk_rho_he(QpskParams(theta_deg)); }, "theta_deg"_a);
    m.def("apsk32_rho_he", [](double g1, double g2, double theta) { return apsk32_rho_he(Apsk32Params(g1, g2, theta)); },
          "gamma1"_a, "gamma2"_a, "theta_deg"_a);
    m.def("apsk32_barycenter_distance",
          [](double g1, double g2, double theta) { return apsk32_barycenter_distance(Apsk32Params(g1, g2, theta)); },
          "gamma1"_a, "gamma2"_a, "theta_deg"_a);
    m.def("qam16_energy_ratio", [](double alpha) { return qam16_energy_ratio(Qam16Params(alpha)); }, "alpha"_a);
    m.def("psk8_rho_he", [](double theta_deg) { return psk8_rho_he(Psk8Params(theta_deg)); }, "theta_deg"_a);
    m.def("build_qpsk_points", [](double theta) { return build_qpsk_points(QpskParams(theta)).points; },
          "theta_deg"_a);
    m.def("build_apsk32_points",
          [](double g1, double g2, double theta) { return build_apsk32_points(Apsk32Params(g1, g2, theta)).points; },
          "gamma1"_a, "gamma2"_a, "theta_deg"_a);

    // modcod tables
    py::class_<ThresholdTable>(m, "ThresholdTable")
        .def_static(
            "load",
            [](const std::vector<std::filesystem::path>& paths, std::optional<std::filesystem::path> anomalies) {
                const auto known = anomalies ? KnownAnomalies::load_csv(*anomalies) : KnownAnomalies{};
                ThresholdTable t;
                for (const auto& p : paths) t = ThresholdTable::merge(t, load_threshold_csv(p, known));
                return t;
            },
            "paths"_a, "anomalies"_a = py::none())
        .def_static("parse", [](const std::string& text) { return parse_threshold_csv(text); }, "text"_a)
        .def_static(
            "from_scenario",
            [](std::optional<std::filesystem::path> scenario) { return load_inputs(scenario_from(scenario)).table; },
            "scenario"_a = py::none())
        .def("__len__", &ThresholdTable::size)
        .def(
            "threshold",
            [](const ThresholdTable& t, const std::string& family, const std::string& stream,
               const std::string& code_rate, std::optional<double> rho_he) {
                return t.threshold(make_scheme(family, rho_he), parse_stream(stream), CodeRate::parse(code_rate));
            },
            "family"_a, "stream"_a, "code_rate"_a, "rho_he"_a = py::none())
        .def("families",
             [](const ThresholdTable& t) {
                 std::vector<std::string> out;
                 for (const auto f : t.families()) out.emplace_back(to_string(f));
                 return out;
             })
        .def("to_csv", &ThresholdTable::to_csv)
        .def(
            "validate",
            [](const ThresholdTable& t, std::optional<std::filesystem::path> anomalies) {
                const auto known = anomalies ? KnownAnomalies::load_csv(*anomalies) : KnownAnomalies{};
                py::list out;
                for (const auto& d : t.validate(known))
                    out.append(py::dict("severity"_a = d.severity == Diagnostic::Severity::Error ? "error" : "warning",
                                        "message"_a = d.message, "known_anomaly"_a = d.known_anomaly));
                return out;
            },
            "anomalies"_a = py::none());

    m.def("signaling_bits", &signaling_bits, "n_rates"_a, "n_hier_mods"_a);
    m.def(
        "best_single_modcod",
        [](double snr_db, const ThresholdTable& t) { return choice_dict(best_modcod(snr_db, t.single_modcods())); },
        "snr_db"_a, "table"_a);

    // rate optimizer
    m.def(
        "achievable_pairs",
        [](double weak, double strong, const ThresholdTable& t) {
            std::vector<std::pair<double, double>> out;
            for (const auto& p : achievable_pairs(weak, strong, t)) out.emplace_back(p.r1, p.r2);
            return out;
        },
        "snr_weak"_a, "snr_strong"_a, "table"_a);
    m.def(
        "equal_rate_point",
        [](const std::vector<std::pair<double, double>>& pts) {
            const auto pairs = to_pairs(pts);
            const auto e = equal_rate_point(pairs);
            return py::dict("r_hm"_a = e.r_hm, "tau"_a = e.schedule.tau,
                            "point_a"_a = std::make_pair(e.schedule.point_a.r1, e.schedule.point_a.r2),
                            "point_b"_a = std::make_pair(e.schedule.point_b.r1, e.schedule.point_b.r2));
        },
        "pairs"_a);
    m.def("classical_pair_rate", &classical_pair_rate, "r_weak"_a, "r_strong"_a);
    m.def(
        "solve_pair",
        [](double snr1, double snr2, const ThresholdTable& t) {
            const PairEvaluator ev(t);
            const auto sol = ev.solve(std::min(snr1, snr2), std::max(snr1, snr2));
            const double gain = sol.r_ts > 0.0 ? (sol.r_hm - sol.r_ts) / sol.r_ts : 0.0;
            return py::dict("r_hm"_a = sol.r_hm, "r_ts"_a = sol.r_ts, "gain"_a = gain);
        },
        "snr1"_a, "snr2"_a, "table"_a);
    m.def(
        "group_receivers",
        [](const std::vector<double>& snrs) {
            const auto g = group_receivers(snrs);
            return py::make_tuple(g.pairs, g.unpaired);
        },
        "snrs"_a);
    m.def(
        "system_gain",
        [](const std::vector<double>& snrs, const ThresholdTable& t, const std::string& outage) {
            const auto g = system_gain(snrs, t, parse_outage_policy(outage));
            return py::dict("r_hm"_a = g.r_hm, "r_ts"_a = g.r_ts, "gain"_a = g.gain,
                            "outage_receivers"_a = g.outage_receivers);
        },
        "snrs"_a, "table"_a, "outage"_a = "exclude");

    // beam channel
    m.def("bessel_j1", &bessel_j1, "x"_a);
    m.def(
        "antenna_gain_rel",
        [](double theta, double d, double f, double edge) { return antenna_gain_rel(theta, AntennaConfig(d, f, edge)); },
        "theta_off"_a, "diameter_m"_a = 1.5, "frequency_hz"_a = 20e9, "edge_level_db"_a = 4.0);
    m.def(
        "beam_edge_angle", [](double d, double f, double edge) { return beam_edge_angle(AntennaConfig(d, f, edge)); },
        "diameter_m"_a = 1.5, "frequency_hz"_a = 20e9, "edge_level_db"_a = 4.0);
    m.def(
        "draw_population",
        [](std::size_t n, double snr_max, std::uint64_t seed, std::optional<std::filesystem::path> weather_cdf,
           double d, double f, double edge) {
            const auto cdf = weather_cdf ? WeatherCdf::load_csv(*weather_cdf) : WeatherCdf::point_mass(0.0);
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& b : draw_population(n, snr_max, AntennaConfig(d, f, edge), cdf, seed))
                out.emplace_back(b.location_att_db, b.weather_att_db, b.snr_db);
            return out;
        },
        "n"_a, "snr_max_db"_a, "seed"_a, "weather_cdf"_a = py::none(), "diameter_m"_a = 1.5,
        "frequency_hz"_a = 20e9, "edge_level_db"_a = 4.0);

    // simulation
    m.def(
        "run_campaign",
        [](std::optional<std::filesystem::path> scenario, std::optional<std::uint64_t> seed,
           std::optional<std::size_t> receivers, std::optional<std::size_t> repetitions,
           std::optional<std::string> grid, std::optional<std::string> families, std::optional<unsigned> workers,
           std::optional<std::string> outage) {
            auto s = scenario_from(scenario);
            const auto in = load_inputs(s);
            CampaignConfig cfg;
            cfg.snr_max_grid = parse_grid(grid.value_or(s.grid));
            cfg.receivers = receivers.value_or(s.receivers);
            cfg.repetitions = repetitions.value_or(s.repetitions);
            cfg.curves = parse_curves(families.value_or(s.families), in.table);
            cfg.master_seed = seed.value_or(s.seed);
            cfg.workers = workers.value_or(s.workers);
            cfg.outage = outage ? parse_outage_policy(*outage) : s.outage;
            SimulationReport report;
            {
                py::gil_scoped_release release;
                report = run_campaign(cfg, in.table, in.antenna, in.weather);
            }
            py::dict curves;
            for (std::size_t c = 0; c < report.curves.size(); ++c) {
                std::vector<double> mean, sd;
                std::vector<std::size_t> excluded;
                for (const auto& row : report.stats) {
                    mean.push_back(row[c].mean_gain);
                    sd.push_back(row[c].std_gain);
                    excluded.push_back(row[c].excluded_runs);
                }
                curves[py::str(report.curves[c])] =
                    py::dict("mean_gain"_a = mean, "std_gain"_a = sd, "excluded_runs"_a = excluded);
            }
            return py::dict("snr_max_db"_a = report.snr_max_grid, "curves"_a = curves);
        },
        "scenario"_a = py::none(), "seed"_a = py::none(), "receivers"_a = py::none(), "repetitions"_a = py::none(),
        "grid"_a = py::none(), "families"_a = py::none(), "workers"_a = py::none(), "outage"_a = py::none());
}
