#include "hmts/scenario.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hmts/csv.hpp"
#include "hmts/errors.hpp"

#ifndef HMTS_DATA_DIR
#define HMTS_DATA_DIR "data"
#endif

namespace hmts {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        auto item = csv::trim(std::string_view(text).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

template <typename T>
T get_number(const pt::ptree& tree, const std::string& key, T fallback, const std::string& source) {
    const auto v = tree.get_optional<std::string>(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        T out{};
        if constexpr (std::is_floating_point_v<T>) {
            out = static_cast<T>(std::stod(*v, &used));
        } else {
            if (!v->empty() && v->front() == '-') throw std::invalid_argument("negative");
            out = static_cast<T>(std::stoull(*v, &used));
        }
        if (used != v->size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw ParseError(source, 0, "bad value for " + key + ": '" + *v + "'");
    }
}

} // namespace

Scenario load_scenario(const fs::path& path) {
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(path.string(), e.line(), e.message());
    }

    const fs::path base = path.parent_path();
    const std::string source = path.string();
    Scenario s;

    for (const auto& p : split_list(tree.get("tables.baseline", std::string{}))) s.baseline_tables.push_back(resolve(base, p));
    for (const auto& p : split_list(tree.get("tables.hierarchical", std::string{})))
        s.hierarchical_tables.push_back(resolve(base, p));
    if (const auto a = tree.get_optional<std::string>("tables.anomalies"); a && !a->empty()) s.anomalies = resolve(base, *a);
    if (const auto w = tree.get_optional<std::string>("weather.cdf")) s.weather_cdf = resolve(base, *w);

    s.diameter_m = get_number(tree, "antenna.diameter_m", s.diameter_m, source);
    s.frequency_hz = get_number(tree, "antenna.frequency_hz", s.frequency_hz, source);
    s.edge_level_db = get_number(tree, "antenna.edge_level_db", s.edge_level_db, source);

    s.grid = tree.get("campaign.grid", s.grid);
    s.receivers = get_number(tree, "campaign.receivers", s.receivers, source);
    s.repetitions = get_number(tree, "campaign.repetitions", s.repetitions, source);
    s.families = tree.get("campaign.families", s.families);
    s.seed = get_number(tree, "campaign.seed", s.seed, source);
    s.workers = get_number(tree, "campaign.workers", s.workers, source);
    if (const auto o = tree.get_optional<std::string>("campaign.outage")) s.outage = parse_outage_policy(*o);

    if (const auto o = tree.get_optional<std::string>("output.dir")) s.out_dir = resolve(base, *o);
    return s;
}

Scenario default_scenario() {
    const fs::path data(HMTS_DATA_DIR);
    Scenario s;
    s.baseline_tables = {data / "dvbs2_single.csv"};
    s.hierarchical_tables = {data / "hqpsk_thresholds.csv", data / "h32apsk_thresholds.csv"};
    s.anomalies = data / "known_anomalies.csv";
    s.weather_cdf = data / "weather_cdf_sample.csv";
    return s;
}

std::vector<double> parse_grid(const std::string& text) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ValidationError("grid must be written a:b:step (got '" + text + "')");
    const auto num = [&](const std::string& part) {
        return csv::parse_double(csv::trim(part), 0, "grid");
    };
    return CampaignConfig::make_grid(num(text.substr(0, c1)), num(text.substr(c1 + 1, c2 - c1 - 1)),
                                     num(text.substr(c2 + 1)));
}

OutagePolicy parse_outage_policy(const std::string& text) {
    if (text == "exclude") return OutagePolicy::Exclude;
    if (text == "zero") return OutagePolicy::ZeroRate;
    throw ValidationError("outage policy must be 'exclude' or 'zero' (got '" + text + "')");
}

std::vector<CurveSpec> parse_curves(const std::string& text, const ThresholdTable& table) {
    if (text == "all") return family_curves(table, false);
    if (text == "combined") return family_curves(table, true);
    std::vector<CurveSpec> out;
    for (const auto& item : split_list(text)) {
        if (item == "combined") {
            out.push_back(family_curves(table, true).back());
        } else if (item == "baseline") {
            out.push_back({"baseline", {}});
        } else if (const auto f = parse_family(item); f && is_hierarchical(*f)) {
            const auto loaded = table.families();
            if (std::find(loaded.begin(), loaded.end(), *f) == loaded.end())
                throw ValidationError("family '" + item + "' has no loaded threshold table");
            out.push_back({curve_label(*f), {*f}});
        } else {
            throw ValidationError("unknown hierarchical family '" + item + "'");
        }
    }
    if (out.empty()) throw ValidationError("no families requested");
    return out;
}

LoadedScenario load_inputs(const Scenario& scenario) {
    KnownAnomalies anomalies;
    if (scenario.anomalies) anomalies = KnownAnomalies::load_csv(*scenario.anomalies);

    if (scenario.baseline_tables.empty()) throw ValidationError("scenario names no baseline threshold table");

    ThresholdTable table;
    std::vector<Diagnostic> warnings;
    auto add = [&](const fs::path& p) {
        if (!fs::exists(p)) throw ValidationError("missing threshold table " + p.string());
        table = ThresholdTable::merge(table, load_threshold_csv(p, anomalies, &warnings));
    };
    for (const auto& p : scenario.baseline_tables) add(p);
    if (!table.has_single_stream()) throw ValidationError("baseline tables hold no single-stream modcods");
    for (const auto& p : scenario.hierarchical_tables) add(p);

    if (scenario.weather_cdf.empty()) throw ValidationError("scenario names no weather CDF");
    if (!fs::exists(scenario.weather_cdf)) throw ValidationError("missing weather CDF " + scenario.weather_cdf.string());

    return {std::move(table), WeatherCdf::load_csv(scenario.weather_cdf),
            AntennaConfig(scenario.diameter_m, scenario.frequency_hz, scenario.edge_level_db), std::move(warnings)};
}

} // namespace hmts
