#include "hmts/modcod.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "hmts/csv.hpp"
#include "hmts/errors.hpp"

namespace hmts {

namespace {

struct FamilyInfo {
    Family family;
    std::string_view name;
    std::string_view alias;
    int bits_he;  // total bits for non-hierarchical families
    int bits_le;
};

constexpr FamilyInfo kFamilies[] = {
    {Family::QPSK, "QPSK", "qpsk", 2, 0},
    {Family::PSK8, "PSK8", "8psk", 3, 0},
    {Family::APSK16, "APSK16", "16apsk", 4, 0},
    {Family::APSK32, "APSK32", "32apsk", 5, 0},
    {Family::H_QPSK, "H_QPSK", "hqpsk", 1, 1},
    {Family::H_PSK8, "H_PSK8", "h8psk", 2, 1},
    {Family::H_APSK16, "H_APSK16", "h16apsk", 2, 2},
    {Family::H_APSK32, "H_APSK32", "h32apsk", 2, 3},
};

const FamilyInfo& info(Family f) noexcept { return kFamilies[static_cast<int>(f)]; }

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

constexpr int kRhoScale = 10000;

std::string format_rho(int rho_e4) { return format_number(static_cast<double>(rho_e4) / kRhoScale); }

std::optional<Stream> parse_stream(std::string_view s) {
    if (s == "HE") return Stream::HE;
    if (s == "LE") return Stream::LE;
    if (s == "SINGLE") return Stream::SINGLE;
    return std::nullopt;
}

std::string describe(const AnomalyKey& k) {
    return k.scheme.str() + " " + std::string(to_string(k.stream)) + " rate " + k.code_rate.str();
}

// Integer efficiency comparison: bits_a * rate_a vs bits_b * rate_b.
std::strong_ordering compare_efficiency(const ModcodChoice& a, const ModcodChoice& b) {
    const int ba = stream_bits(a.scheme.family(), a.stream);
    const int bb = stream_bits(b.scheme.family(), b.stream);
    return ba * a.code_rate.num() * b.code_rate.den() <=> bb * b.code_rate.num() * a.code_rate.den();
}

} // namespace

std::string_view to_string(Stream s) noexcept {
    switch (s) {
    case Stream::HE: return "HE";
    case Stream::LE: return "LE";
    case Stream::SINGLE: return "SINGLE";
    }
    return "?";
}

std::string_view to_string(Family f) noexcept { return info(f).name; }

std::optional<Family> parse_family(std::string_view text) {
    const auto l = lower(text);
    for (const auto& fi : kFamilies)
        if (lower(fi.name) == l || fi.alias == l) return fi.family;
    return std::nullopt;
}

bool is_hierarchical(Family f) noexcept { return info(f).bits_le > 0; }

int stream_bits(Family f, Stream s) noexcept {
    const auto& fi = info(f);
    if (is_hierarchical(f)) {
        if (s == Stream::HE) return fi.bits_he;
        if (s == Stream::LE) return fi.bits_le;
        return 0;
    }
    return s == Stream::SINGLE ? fi.bits_he : 0;
}

// --- CodeRate ---------------------------------------------------------------

CodeRate::CodeRate(std::int64_t num, std::int64_t den) {
    if (num <= 0 || den <= 0 || num > den)
        throw ValidationError("code rate must satisfy 0 < p/q <= 1 (got " + std::to_string(num) + "/" +
                              std::to_string(den) + ")");
    const auto g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

CodeRate CodeRate::parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) throw ValidationError("code rate must be written p/q: '" + std::string(text) + "'");
    std::int64_t p = 0;
    std::int64_t q = 0;
    const auto a = text.substr(0, slash);
    const auto b = text.substr(slash + 1);
    const auto ra = std::from_chars(a.data(), a.data() + a.size(), p);
    const auto rb = std::from_chars(b.data(), b.data() + b.size(), q);
    if (ra.ec != std::errc{} || ra.ptr != a.data() + a.size() || rb.ec != std::errc{} ||
        rb.ptr != b.data() + b.size())
        throw ValidationError("code rate must be written p/q: '" + std::string(text) + "'");
    return CodeRate(p, q);
}

std::string CodeRate::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

const std::vector<CodeRate>& dvbs2_code_rates() {
    static const std::vector<CodeRate> rates = {
        {1, 4}, {1, 3}, {2, 5}, {1, 2}, {3, 5}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {8, 9}, {9, 10},
    };
    return rates;
}

// --- SchemeId ---------------------------------------------------------------

SchemeId::SchemeId(Family family) : family_(family) {
    if (is_hierarchical(family))
        throw ValidationError(std::string(to_string(family)) + " is hierarchical and needs rho_he");
}

SchemeId::SchemeId(Family family, double rho_he) : family_(family) {
    if (!is_hierarchical(family))
        throw ValidationError(std::string(to_string(family)) + " is not hierarchical and takes no rho_he");
    if (!(rho_he >= 0.5 - 1e-12 && rho_he <= 0.9 + 1e-12))
        throw ValidationError("rho_he must satisfy 0.5 <= rho_he <= 0.9 (got " + format_number(rho_he) + ")");
    rho_e4_ = static_cast<int>(std::lround(rho_he * kRhoScale));
}

std::optional<double> SchemeId::rho_he() const noexcept {
    if (!rho_e4_) return std::nullopt;
    return static_cast<double>(*rho_e4_) / kRhoScale;
}

int SchemeId::bits_he() const noexcept { return info(family_).bits_he; }
int SchemeId::bits_le() const noexcept { return info(family_).bits_le; }

std::string SchemeId::str() const {
    std::string s(to_string(family_));
    if (rho_e4_) s += "(rho=" + format_rho(*rho_e4_) + ")";
    return s;
}

// --- free functions ---------------------------------------------------------

double stream_efficiency(const SchemeId& scheme, Stream stream, const CodeRate& rate) {
    const int bits = stream_bits(scheme.family(), stream);
    if (bits == 0)
        throw ValidationError("stream " + std::string(to_string(stream)) + " does not exist for " + scheme.str());
    return bits * rate.value();
}

std::optional<ModcodChoice> best_modcod(double snr_db, std::span<const Modcod> candidates) {
    const Modcod* best = nullptr;
    for (const auto& m : candidates) {
        if (!(snr_db >= m.threshold_db)) continue;
        if (!best) {
            best = &m;
            continue;
        }
        const auto eff = compare_efficiency(m.choice, best->choice);
        if (eff > 0) {
            best = &m;
        } else if (eff == 0) {
            if (m.threshold_db < best->threshold_db) {
                best = &m;
            } else if (m.threshold_db == best->threshold_db) {
                const auto ka = std::tie(m.choice.scheme, m.choice.stream, m.choice.code_rate);
                const auto kb = std::tie(best->choice.scheme, best->choice.stream, best->choice.code_rate);
                if (ka < kb) best = &m;
            }
        }
    }
    if (!best) return std::nullopt;
    return best->choice;
}

int signaling_bits(int n_rates, int n_hier_mods) {
    if (n_rates < 1 || n_hier_mods < 1) throw ValidationError("signaling_bits needs counts >= 1");
    const auto configs = static_cast<std::uint64_t>(n_rates) * static_cast<std::uint64_t>(n_rates) *
                         static_cast<std::uint64_t>(n_hier_mods);
    int bits = 0;
    while ((std::uint64_t{1} << bits) < configs) ++bits;
    return bits;
}

std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, r.ptr);
    if (s == "-0") s = "0";
    return s;
}

// --- KnownAnomalies ---------------------------------------------------------

namespace {

SchemeId parse_scheme(const csv::Row& row, const std::string& source) {
    const auto family = parse_family(row.fields[0]);
    if (!family) throw ParseError(source, row.line, "unknown family '" + row.fields[0] + "'");
    const auto& rho = row.fields[1];
    try {
        if (is_hierarchical(*family)) {
            if (rho.empty()) throw ValidationError(row.fields[0] + " rows need rho_he");
            return SchemeId(*family, csv::parse_double(rho, row.line, source));
        }
        if (!rho.empty()) throw ValidationError(row.fields[0] + " rows must leave rho_he empty");
        return SchemeId(*family);
    } catch (const ParseError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ParseError(source, row.line, e.what());
    }
}

CodeRate parse_rate(const csv::Row& row, std::size_t col, const std::string& source) {
    try {
        return CodeRate::parse(row.fields[col]);
    } catch (const ValidationError& e) {
        throw ParseError(source, row.line, e.what());
    }
}

} // namespace

KnownAnomalies KnownAnomalies::load_csv(const std::filesystem::path& path) {
    return parse_csv(csv::slurp(path), path.string());
}

KnownAnomalies KnownAnomalies::parse_csv(std::string_view text, const std::string& source) {
    KnownAnomalies out;
    for (const auto& row : csv::read(text, "family,rho_he,stream,code_rate,note", source)) {
        const auto scheme = parse_scheme(row, source);
        const auto stream = parse_stream(row.fields[2]);
        if (!stream) throw ParseError(source, row.line, "unknown stream '" + row.fields[2] + "'");
        out.add({scheme, *stream, parse_rate(row, 3, source)}, row.fields[4]);
    }
    return out;
}

void KnownAnomalies::add(AnomalyKey key, std::string note) { cells_[key] = std::move(note); }

const std::string* KnownAnomalies::find(const AnomalyKey& key) const {
    const auto it = cells_.find(key);
    return it == cells_.end() ? nullptr : &it->second;
}

// --- ThresholdTable ---------------------------------------------------------

void ThresholdTable::insert(const SchemeId& scheme, Stream stream, const CodeRate& rate, double threshold_db) {
    if (stream_bits(scheme.family(), stream) == 0)
        throw ValidationError("stream " + std::string(to_string(stream)) + " does not exist for " + scheme.str());
    if (!std::isfinite(threshold_db)) throw ValidationError("threshold must be finite");
    const Key key{scheme, stream, rate};
    if (!cells_.emplace(key, threshold_db).second) throw ValidationError("duplicate cell " + describe(key));
}

std::optional<double> ThresholdTable::threshold(const SchemeId& scheme, Stream stream, const CodeRate& rate) const {
    const auto it = cells_.find(Key{scheme, stream, rate});
    if (it == cells_.end()) return std::nullopt;
    return it->second;
}

std::vector<SchemeId> ThresholdTable::schemes() const {
    std::vector<SchemeId> out;
    for (const auto& [k, v] : cells_)
        if (out.empty() || out.back() != k.scheme) out.push_back(k.scheme);
    return out;
}

std::vector<Family> ThresholdTable::families() const {
    std::vector<Family> out;
    for (const auto& s : schemes())
        if (out.empty() || out.back() != s.family()) out.push_back(s.family());
    return out;
}

bool ThresholdTable::has_single_stream() const {
    return std::any_of(cells_.begin(), cells_.end(), [](const auto& kv) { return kv.first.stream == Stream::SINGLE; });
}

std::vector<Modcod> ThresholdTable::column(const SchemeId& scheme, Stream stream) const {
    std::vector<Modcod> out;
    const auto lo = cells_.lower_bound(Key{scheme, stream, CodeRate(1, 1000000)});
    for (auto it = lo; it != cells_.end() && it->first.scheme == scheme && it->first.stream == stream; ++it)
        out.push_back({{scheme, stream, it->first.code_rate, stream_efficiency(scheme, stream, it->first.code_rate)},
                       it->second});
    return out;
}

std::vector<Modcod> ThresholdTable::single_modcods() const {
    std::vector<Modcod> out;
    for (const auto& [k, thr] : cells_)
        if (k.stream == Stream::SINGLE)
            out.push_back({{k.scheme, k.stream, k.code_rate, stream_efficiency(k.scheme, k.stream, k.code_rate)}, thr});
    return out;
}

ThresholdTable ThresholdTable::restricted(std::span<const Family> hierarchical_families) const {
    ThresholdTable out;
    for (const auto& [k, thr] : cells_) {
        const auto f = k.scheme.family();
        if (!is_hierarchical(f) ||
            std::find(hierarchical_families.begin(), hierarchical_families.end(), f) != hierarchical_families.end())
            out.cells_.emplace(k, thr);
    }
    return out;
}

ThresholdTable ThresholdTable::merge(const ThresholdTable& a, const ThresholdTable& b) {
    ThresholdTable out = a;
    for (const auto& [k, thr] : b.cells_)
        if (!out.cells_.emplace(k, thr).second) throw ValidationError("tables overlap at " + describe(k));
    return out;
}

std::vector<Diagnostic> ThresholdTable::validate(const KnownAnomalies& anomalies) const {
    std::vector<Diagnostic> out;
    const auto& rates = dvbs2_code_rates();

    for (const auto& [k, thr] : cells_)
        if (std::find(rates.begin(), rates.end(), k.code_rate) == rates.end())
            out.push_back({Diagnostic::Severity::Error, describe(k) + ": code rate is not a DVB-S2 rate"});

    // Thresholds strictly increase with code rate inside each (scheme, stream) column.
    const Key* prev = nullptr;
    double prev_thr = 0.0;
    for (const auto& [k, thr] : cells_) {
        if (prev && prev->scheme == k.scheme && prev->stream == k.stream && !(thr > prev_thr)) {
            const auto* note = anomalies.find(k);
            if (!note) note = anomalies.find(*prev);
            std::ostringstream msg;
            msg << describe(k) << ": threshold " << format_number(thr) << " dB does not exceed "
                << format_number(prev_thr) << " dB at rate " << prev->code_rate.str()
                << " (thresholds must increase with code rate)";
            if (note) msg << " [known anomaly: " << *note << "]";
            out.push_back({note ? Diagnostic::Severity::Warning : Diagnostic::Severity::Error, msg.str(), note != nullptr});
        }
        prev = &k;
        prev_thr = thr;
    }

    // Hierarchical: at a fixed code rate, HE threshold falls and LE threshold rises with rho_he.
    std::map<std::tuple<Family, Stream, CodeRate>, std::vector<std::pair<SchemeId, double>>> by_rate;
    for (const auto& [k, thr] : cells_)
        if (k.scheme.hierarchical()) by_rate[{k.scheme.family(), k.stream, k.code_rate}].emplace_back(k.scheme, thr);
    for (const auto& [group, cells] : by_rate) {
        const auto stream = std::get<1>(group);
        for (std::size_t i = 1; i < cells.size(); ++i) {
            const double a = cells[i - 1].second;
            const double b = cells[i].second;
            const bool ok = stream == Stream::HE ? b < a : b > a;
            if (ok) continue;
            const Key ka{cells[i - 1].first, stream, std::get<2>(group)};
            const Key kb{cells[i].first, stream, std::get<2>(group)};
            const auto* note = anomalies.find(kb);
            if (!note) note = anomalies.find(ka);
            std::ostringstream msg;
            msg << describe(kb) << ": threshold " << format_number(b) << " dB is not "
                << (stream == Stream::HE ? "below" : "above") << " " << format_number(a) << " dB at rho="
                << format_number(*cells[i - 1].first.rho_he()) << " ("
                << (stream == Stream::HE ? "HE thresholds must fall" : "LE thresholds must rise") << " with rho_he)";
            if (note) msg << " [known anomaly: " << *note << "]";
            out.push_back({Diagnostic::Severity::Warning, msg.str(), note != nullptr});
        }
    }
    return out;
}

std::string ThresholdTable::to_csv() const {
    std::ostringstream os;
    os << "family,rho_he,stream,code_rate,threshold_db\n";
    auto row = [&os](const SchemeId& s, std::string_view stream, const CodeRate& r, double thr) {
        os << to_string(s.family()) << ',' << (s.rho_he() ? format_number(*s.rho_he()) : std::string{}) << ','
           << stream << ',' << r.str() << ',' << format_number(thr) << '\n';
    };
    for (const auto& scheme : schemes()) {
        if (!scheme.hierarchical()) {
            for (const auto& m : column(scheme, Stream::SINGLE))
                row(scheme, "SINGLE", m.choice.code_rate, m.threshold_db);
            continue;
        }
        const auto he = column(scheme, Stream::HE);
        const auto le = column(scheme, Stream::LE);
        std::set<CodeRate> merged;
        if (scheme.rho_he() == 0.5) {
            for (const auto& h : he) {
                const auto l = threshold(scheme, Stream::LE, h.choice.code_rate);
                if (l && *l == h.threshold_db) merged.insert(h.choice.code_rate);
            }
        }
        for (const auto& r : merged) row(scheme, "HE/LE", r, *threshold(scheme, Stream::HE, r));
        for (const auto& h : he)
            if (!merged.contains(h.choice.code_rate)) row(scheme, "HE", h.choice.code_rate, h.threshold_db);
        for (const auto& l : le)
            if (!merged.contains(l.choice.code_rate)) row(scheme, "LE", l.choice.code_rate, l.threshold_db);
    }
    return os.str();
}

ThresholdTable parse_threshold_csv(std::string_view text, const std::string& source) {
    ThresholdTable table;
    for (const auto& row : csv::read(text, "family,rho_he,stream,code_rate,threshold_db", source)) {
        const auto scheme = parse_scheme(row, source);
        const auto rate = parse_rate(row, 3, source);
        const double thr = csv::parse_double(row.fields[4], row.line, source);
        std::vector<Stream> streams;
        if (row.fields[2] == "HE/LE") {
            if (scheme.rho_he() != 0.5)
                throw ParseError(source, row.line, "HE/LE rows are only valid for rho_he = 0.5");
            streams = {Stream::HE, Stream::LE};
        } else if (const auto s = parse_stream(row.fields[2])) {
            streams = {*s};
        } else {
            throw ParseError(source, row.line, "unknown stream '" + row.fields[2] + "'");
        }
        try {
            for (const auto s : streams) table.insert(scheme, s, rate, thr);
        } catch (const ValidationError& e) {
            throw ParseError(source, row.line, e.what());
        }
    }
    if (table.empty()) throw ParseError(source, 0, "no threshold rows");
    return table;
}

ThresholdTable load_threshold_csv(const std::filesystem::path& path, const KnownAnomalies& anomalies,
                                  std::vector<Diagnostic>* warnings) {
    auto table = parse_threshold_csv(csv::slurp(path), path.string());
    for (auto& d : table.validate(anomalies)) {
        if (d.severity == Diagnostic::Severity::Error)
            throw ValidationError(path.string() + ": " + d.message);
        if (warnings) warnings->push_back(std::move(d));
    }
    return table;
}

} // namespace hmts
