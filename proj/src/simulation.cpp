#include "hmts/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "hmts/errors.hpp"

namespace hmts {

std::string curve_label(Family f) {
    std::string s(to_string(f));
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<CurveSpec> family_curves(const ThresholdTable& table, bool include_combined) {
    std::vector<CurveSpec> out;
    std::vector<Family> all;
    for (const auto f : table.families()) {
        if (!is_hierarchical(f)) continue;
        out.push_back({curve_label(f), {f}});
        all.push_back(f);
    }
    if (include_combined) out.push_back({"combined", all});
    return out;
}

std::vector<double> CampaignConfig::make_grid(double first, double last, double step) {
    if (!(step > 0.0) || !(last >= first) || !std::isfinite(first) || !std::isfinite(last))
        throw ValidationError("grid needs first <= last and step > 0");
    std::vector<double> grid;
    for (std::size_t i = 0;; ++i) {
        const double v = first + static_cast<double>(i) * step;
        if (v > last + 1e-9) break;
        // Snap values such as 1.5000000000000002 onto the decimal grid.
        grid.push_back(std::round(v * 1e9) / 1e9);
    }
    return grid;
}

std::uint64_t population_seed(std::uint64_t master_seed, std::size_t grid_index, std::size_t repetition) noexcept {
    return RandomStream::derive_seed(master_seed, {grid_index, repetition});
}

const CurveStats& SimulationReport::at(std::size_t grid_index, const std::string& curve) const {
    const auto it = std::find(curves.begin(), curves.end(), curve);
    if (it == curves.end()) throw ValidationError("unknown curve '" + curve + "'");
    return stats.at(grid_index).at(static_cast<std::size_t>(it - curves.begin()));
}

namespace {

void check_config(const CampaignConfig& cfg, const ThresholdTable& table) {
    if (cfg.receivers < 2) throw ValidationError("campaign needs at least 2 receivers");
    if (cfg.repetitions < 1) throw ValidationError("campaign needs at least 1 repetition");
    if (cfg.snr_max_grid.empty()) throw ValidationError("SNR_max grid is empty");
    if (!std::is_sorted(cfg.snr_max_grid.begin(), cfg.snr_max_grid.end()))
        throw ValidationError("SNR_max grid must be sorted");
    if (cfg.curves.empty()) throw ValidationError("no curves requested");
    if (!table.has_single_stream())
        throw ValidationError("threshold tables lack the non-hierarchical baseline modcods");
    const auto present = table.families();
    for (const auto& c : cfg.curves)
        for (const auto f : c.families) {
            if (!is_hierarchical(f))
                throw ValidationError("curve '" + c.label + "' lists non-hierarchical family " + std::string(to_string(f)));
            if (std::find(present.begin(), present.end(), f) == present.end())
                throw ValidationError("requested family " + std::string(to_string(f)) + " has no thresholds loaded");
        }
}

CurveStats summarize(const std::vector<SystemGain>& runs, bool keep_raw) {
    CurveStats s;
    std::vector<double> gains;
    std::size_t outage_total = 0;
    for (const auto& r : runs) {
        outage_total += r.outage_receivers;
        s.max_outage_receivers = std::max(s.max_outage_receivers, r.outage_receivers);
        const bool included = r.r_ts > 0.0;
        if (included)
            gains.push_back(r.gain);
        else
            ++s.excluded_runs;
        if (keep_raw) s.raw.push_back(included ? std::optional<double>(r.gain) : std::nullopt);
    }
    s.mean_outage_receivers = static_cast<double>(outage_total) / static_cast<double>(runs.size());
    s.included_runs = gains.size();
    if (gains.empty()) return s;

    double sum = 0.0;
    for (const double g : gains) sum += g;
    s.mean_gain = sum / static_cast<double>(gains.size());
    if (gains.size() > 1) {
        double sq = 0.0;
        for (const double g : gains) sq += (g - s.mean_gain) * (g - s.mean_gain);
        s.std_gain = std::sqrt(sq / static_cast<double>(gains.size() - 1));
    }
    std::sort(gains.begin(), gains.end());
    const auto n = gains.size();
    s.median_gain = n % 2 ? gains[n / 2] : 0.5 * (gains[n / 2 - 1] + gains[n / 2]);
    return s;
}

} // namespace

SimulationReport run_campaign(const CampaignConfig& cfg, const ThresholdTable& table, const AntennaConfig& beam,
                              const WeatherCdf& weather) {
    check_config(cfg, table);

    std::vector<PairEvaluator> evaluators;
    evaluators.reserve(cfg.curves.size());
    for (const auto& c : cfg.curves) evaluators.emplace_back(table.restricted(c.families));

    const std::size_t n_grid = cfg.snr_max_grid.size();
    const std::size_t n_rep = cfg.repetitions;
    const std::size_t n_curves = cfg.curves.size();
    const std::size_t n_units = n_grid * n_rep;

    // results[(g * n_rep + rep) * n_curves + c]; each unit writes only its own slots.
    std::vector<SystemGain> results(n_units * n_curves);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t u = next++; u < n_units; u = next++) {
                const std::size_t g = u / n_rep;
                const std::size_t rep = u % n_rep;
                const auto pop = draw_population(cfg.receivers, cfg.snr_max_grid[g], beam, weather,
                                                 population_seed(cfg.master_seed, g, rep));
                std::vector<double> snrs(pop.size());
                std::transform(pop.begin(), pop.end(), snrs.begin(), [](const BeamDraw& d) { return d.snr_db; });
                for (std::size_t c = 0; c < n_curves; ++c)
                    results[u * n_curves + c] = system_gain(snrs, evaluators[c], cfg.outage);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n_units;
        }
    };

    unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_units));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    SimulationReport report;
    report.snr_max_grid = cfg.snr_max_grid;
    for (const auto& c : cfg.curves) report.curves.push_back(c.label);
    report.stats.resize(n_grid);
    std::vector<SystemGain> runs(n_rep);
    for (std::size_t g = 0; g < n_grid; ++g) {
        for (std::size_t c = 0; c < n_curves; ++c) {
            for (std::size_t rep = 0; rep < n_rep; ++rep) runs[rep] = results[(g * n_rep + rep) * n_curves + c];
            report.stats[g].push_back(summarize(runs, cfg.keep_raw));
        }
    }
    return report;
}

std::vector<std::pair<double, double>> gain_curve(const SimulationReport& report, const std::string& curve) {
    if (std::find(report.curves.begin(), report.curves.end(), curve) == report.curves.end())
        throw ValidationError("unknown curve '" + curve + "'");
    std::vector<std::pair<double, double>> out;
    for (std::size_t g = 0; g < report.snr_max_grid.size(); ++g)
        out.emplace_back(report.snr_max_grid[g], report.at(g, curve).mean_gain);
    return out;
}

} // namespace hmts
