#include "hmts/rate_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hmts/errors.hpp"

namespace hmts {

namespace {

double rate_of(const std::optional<ModcodChoice>& m) { return m ? m->spectral_efficiency : 0.0; }

double harmonic(std::span<const double> rates) {
    if (rates.empty()) throw ValidationError("harmonic aggregation needs at least one rate");
    double inv = 0.0;
    for (const double r : rates) {
        if (!(r > 0.0)) return 0.0;
        inv += 1.0 / r;
    }
    return 1.0 / inv;
}

double cross(const RatePair& o, const RatePair& a, const RatePair& b) {
    return (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1);
}

} // namespace

// --- PairEvaluator ----------------------------------------------------------

PairEvaluator::PairEvaluator(const ThresholdTable& table) : singles_(table.single_modcods()) {
    for (const auto& s : table.schemes()) {
        if (!s.hierarchical()) continue;
        hierarchical_.push_back({s, table.column(s, Stream::HE), table.column(s, Stream::LE)});
    }
}

std::optional<ModcodChoice> PairEvaluator::best_single(double snr_db) const { return best_modcod(snr_db, singles_); }

std::vector<RatePair> PairEvaluator::achievable_pairs(double snr_weak, double snr_strong) const {
    if (snr_weak > snr_strong) throw ValidationError("achievable_pairs needs snr_weak <= snr_strong");

    std::vector<RatePair> out;
    out.push_back({});
    if (const auto w = best_single(snr_weak)) out.push_back({w->spectral_efficiency, 0.0, {PairOrigin::Kind::WeakOnly, w, {}}});
    if (const auto s = best_single(snr_strong)) out.push_back({0.0, s->spectral_efficiency, {PairOrigin::Kind::StrongOnly, {}, s}});

    for (const auto& scheme : hierarchical_) {
        // weak -> HE, strong -> LE
        if (auto he = best_modcod(snr_weak, scheme.he)) {
            if (auto le = best_modcod(snr_strong, scheme.le))
                out.push_back({he->spectral_efficiency, le->spectral_efficiency,
                               {PairOrigin::Kind::Hierarchical, std::move(he), std::move(le)}});
        }
        // strong -> HE, weak -> LE
        if (auto le = best_modcod(snr_weak, scheme.le)) {
            if (auto he = best_modcod(snr_strong, scheme.he))
                out.push_back({le->spectral_efficiency, he->spectral_efficiency,
                               {PairOrigin::Kind::Hierarchical, std::move(le), std::move(he)}});
        }
    }
    return out;
}

PairSolution PairEvaluator::solve(double snr_weak, double snr_strong) const {
    const auto pairs = achievable_pairs(snr_weak, snr_strong);
    const auto eq = equal_rate_point(pairs);
    const double r_ts = classical_pair_rate(rate_of(best_single(snr_weak)), rate_of(best_single(snr_strong)));
    // Mixing single-stream points cannot beat the classical value, and the classical mix is in
    // the hull, so r_hm >= r_ts; both facts are enforced against rounding.
    const auto is_hier = [](const RatePair& p) { return p.origin.kind == PairOrigin::Kind::Hierarchical; };
    const bool uses_hm = is_hier(eq.schedule.point_a) || is_hier(eq.schedule.point_b);
    return {uses_hm ? std::max(eq.r_hm, r_ts) : r_ts, r_ts, {eq.schedule}};
}

std::vector<RatePair> achievable_pairs(double snr_weak, double snr_strong, const ThresholdTable& table) {
    return PairEvaluator(table).achievable_pairs(snr_weak, snr_strong);
}

// --- equal-rate point -------------------------------------------------------

std::vector<RatePair> hull_vertices(std::span<const RatePair> pairs) {
    // Pareto front, r1 ascending / r2 strictly descending.
    std::vector<RatePair> sorted(pairs.begin(), pairs.end());
    std::sort(sorted.begin(), sorted.end(), [](const RatePair& a, const RatePair& b) {
        return a.r1 != b.r1 ? a.r1 > b.r1 : a.r2 > b.r2;
    });
    std::vector<RatePair> front;
    for (const auto& p : sorted)
        if (front.empty() || p.r2 > front.back().r2) front.push_back(p);
    std::reverse(front.begin(), front.end());

    // Upper (concave) hull of the front.
    std::vector<RatePair> hull;
    for (const auto& p : front) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0.0) hull.pop_back();
        hull.push_back(p);
    }
    return hull;
}

EqualRate equal_rate_point(std::span<const RatePair> pairs) {
    const auto hull = hull_vertices(pairs);
    if (hull.empty()) return {0.0, {1.0, {}, {}}};

    // r1 - r2 strictly increases along the hull; find where it crosses zero.
    const auto k = static_cast<std::size_t>(
        std::find_if(hull.begin(), hull.end(), [](const RatePair& p) { return p.r1 - p.r2 >= 0.0; }) - hull.begin());

    if (k == hull.size()) {
        // Every vertex favours receiver 2: receiver 1's best rate bounds the equal rate.
        const auto& v = hull.back();
        return {v.r1, {1.0, v, v}};
    }
    const auto& b = hull[k];
    if (b.r1 == b.r2 || k == 0) {
        // On the diagonal, or every vertex favours receiver 1.
        return {std::min(b.r1, b.r2), {1.0, b, b}};
    }
    const auto& a = hull[k - 1];
    const double da = a.r1 - a.r2;
    const double db = b.r1 - b.r2;
    const double tau = db / (db - da);
    const double r = tau * a.r1 + (1.0 - tau) * b.r1;
    return {r, {tau, a, b}};
}

double classical_pair_rate(double r_weak, double r_strong) noexcept {
    if (!(r_weak > 0.0) || !(r_strong > 0.0)) return 0.0;
    return 1.0 / (1.0 / r_weak + 1.0 / r_strong);
}

// --- n receivers --------------------------------------------------------------

Grouping group_receivers(std::span<const double> snrs) {
    std::vector<std::size_t> order(snrs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return snrs[a] != snrs[b] ? snrs[a] < snrs[b] : a < b;
    });

    Grouping g;
    std::size_t lo = 0;
    std::size_t hi = order.size();
    while (hi - lo >= 2) {
        g.pairs.emplace_back(order[lo], order[hi - 1]);
        ++lo;
        --hi;
    }
    if (hi - lo == 1) g.unpaired = order[lo];
    return g;
}

double aggregate_hm(std::span<const double> pair_rates) { return harmonic(pair_rates); }

double aggregate_ts(std::span<const double> rates) { return harmonic(rates); }

SystemGain system_gain(std::span<const double> snrs, const PairEvaluator& evaluator, OutagePolicy policy) {
    if (snrs.empty()) throw ValidationError("system_gain needs at least one receiver");

    SystemGain out;
    std::vector<double> served_snrs;
    std::vector<double> single_rates;
    served_snrs.reserve(snrs.size());
    single_rates.reserve(snrs.size());
    for (const double snr : snrs) {
        const auto best = evaluator.best_single(snr);
        if (!best) ++out.outage_receivers;
        if (best || policy == OutagePolicy::ZeroRate) {
            served_snrs.push_back(snr);
            single_rates.push_back(rate_of(best));
        }
    }

    if (served_snrs.empty() || (policy == OutagePolicy::ZeroRate && out.outage_receivers > 0)) {
        out.gain = 0.0;
        return out;
    }

    // Work on the harmonic sums directly: each pair saves
    //   s_j = (1/r_weak + 1/r_strong) - 1/R_hm,j >= 0
    // so 1/R_hm = 1/R_ts - sum s_j and the gain is sum s_j / (1/R_ts - sum s_j), which keeps
    // it exactly 0 when no pair improves and nonnegative under rounding.
    double inv_ts = 0.0;
    for (const double r : single_rates) {
        if (!(r > 0.0)) {
            inv_ts = std::numeric_limits<double>::infinity();
            break;
        }
        inv_ts += 1.0 / r;
    }
    if (!std::isfinite(inv_ts)) {
        out.gain = 0.0;
        return out;
    }

    const auto groups = group_receivers(served_snrs);
    double savings = 0.0;
    for (const auto& [weak, strong] : groups.pairs) {
        const auto sol = evaluator.solve(served_snrs[weak], served_snrs[strong]);
        if (sol.r_hm > sol.r_ts)
            savings += std::max(0.0, 1.0 / single_rates[weak] + 1.0 / single_rates[strong] - 1.0 / sol.r_hm);
    }
    const double inv_hm = inv_ts - savings;
    out.r_ts = 1.0 / inv_ts;
    out.r_hm = 1.0 / inv_hm;
    out.gain = savings / inv_hm;
    return out;
}

SystemGain system_gain(std::span<const double> snrs, const ThresholdTable& table, OutagePolicy policy) {
    return system_gain(snrs, PairEvaluator(table), policy);
}

} // namespace hmts
