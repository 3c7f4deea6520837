#pragma once

// Decoding-threshold tables: (scheme, stream, code rate) -> minimum SNR in dB.
//
// Thresholds are step functions of SNR: a stream decodes iff snr >= threshold.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hmts {

enum class Stream { HE, LE, SINGLE };

enum class Family { QPSK, PSK8, APSK16, APSK32, H_QPSK, H_PSK8, H_APSK16, H_APSK32 };

std::string_view to_string(Stream s) noexcept;
std::string_view to_string(Family f) noexcept;
/// Accepts the canonical upper-case names ("H_QPSK") and lower-case aliases ("h_qpsk").
std::optional<Family> parse_family(std::string_view text);

bool is_hierarchical(Family f) noexcept;
/// Bits per symbol carried by `stream` of `family`; 0 when the stream does not exist for it.
int stream_bits(Family f, Stream s) noexcept;

/// Exact code rate p/q, kept in lowest terms.
class CodeRate {
public:
    CodeRate(std::int64_t num, std::int64_t den);
    /// Parses "p/q"; throws ValidationError.
    static CodeRate parse(std::string_view text);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    friend bool operator==(const CodeRate&, const CodeRate&) = default;
    friend std::strong_ordering operator<=>(const CodeRate& a, const CodeRate& b) noexcept {
        return a.num_ * b.den_ <=> b.num_ * a.den_;
    }

private:
    std::int64_t num_;
    std::int64_t den_;
};

/// The 11 DVB-S2 normal-frame code rates, ascending.
const std::vector<CodeRate>& dvbs2_code_rates();

/// A modulation scheme. rho_he is stored in units of 1e-4 so it can key maps exactly.
class SchemeId {
public:
    /// Non-hierarchical scheme. Throws ValidationError for hierarchical families.
    explicit SchemeId(Family family);
    /// Hierarchical scheme. Throws ValidationError unless 0.5 <= rho_he <= 0.9.
    SchemeId(Family family, double rho_he);

    Family family() const noexcept { return family_; }
    bool hierarchical() const noexcept { return rho_e4_.has_value(); }
    std::optional<double> rho_he() const noexcept;
    int bits_he() const noexcept;
    int bits_le() const noexcept;
    std::string str() const;

    friend auto operator<=>(const SchemeId&, const SchemeId&) = default;

private:
    Family family_;
    std::optional<int> rho_e4_;
};

/// One modcod with its spectral efficiency (stream bits x code rate, bit/s/Hz).
struct ModcodChoice {
    SchemeId scheme;
    Stream stream;
    CodeRate code_rate;
    double spectral_efficiency;
};

/// A modcod together with the SNR it needs.
struct Modcod {
    ModcodChoice choice;
    double threshold_db;
};

/// bits(stream) x rate. Throws ValidationError when the stream does not exist for the scheme.
double stream_efficiency(const SchemeId& scheme, Stream stream, const CodeRate& rate);

/// Best modcod decodable at snr_db: max efficiency, then lowest threshold, then lowest scheme id.
std::optional<ModcodChoice> best_modcod(double snr_db, std::span<const Modcod> candidates);

/// ceil(log2(n_rates^2 * n_hier_mods)).
int signaling_bits(int n_rates, int n_hier_mods);

/// Cells that are known to break the table invariants and are kept as printed.
struct AnomalyKey {
    SchemeId scheme;
    Stream stream;
    CodeRate code_rate;
    friend auto operator<=>(const AnomalyKey&, const AnomalyKey&) = default;
};

class KnownAnomalies {
public:
    KnownAnomalies() = default;
    /// CSV header `family,rho_he,stream,code_rate,note`.
    static KnownAnomalies load_csv(const std::filesystem::path& path);
    static KnownAnomalies parse_csv(std::string_view text, const std::string& source = "<memory>");

    void add(AnomalyKey key, std::string note);
    const std::string* find(const AnomalyKey& key) const;
    bool empty() const noexcept { return cells_.empty(); }

private:
    std::map<AnomalyKey, std::string> cells_;
};

struct Diagnostic {
    enum class Severity { Warning, Error };
    Severity severity;
    std::string message;
    bool known_anomaly = false;
};

class ThresholdTable {
public:
    using Key = AnomalyKey;

    ThresholdTable() = default;

    /// Adds one cell; throws ValidationError on duplicates or a stream the scheme lacks.
    void insert(const SchemeId& scheme, Stream stream, const CodeRate& rate, double threshold_db);

    std::optional<double> threshold(const SchemeId& scheme, Stream stream, const CodeRate& rate) const;
    std::size_t size() const noexcept { return cells_.size(); }
    bool empty() const noexcept { return cells_.empty(); }
    const std::map<Key, double>& cells() const noexcept { return cells_; }

    /// Distinct schemes, ordered.
    std::vector<SchemeId> schemes() const;
    std::vector<Family> families() const;
    bool has_single_stream() const;

    /// All cells of one (scheme, stream) column, ascending code rate.
    std::vector<Modcod> column(const SchemeId& scheme, Stream stream) const;
    /// Non-hierarchical modcods.
    std::vector<Modcod> single_modcods() const;

    /// Subset containing the non-hierarchical schemes plus the listed hierarchical families.
    ThresholdTable restricted(std::span<const Family> hierarchical_families) const;

    /// Union; throws ValidationError on overlapping cells.
    static ThresholdTable merge(const ThresholdTable& a, const ThresholdTable& b);

    /// Invariant checks. Code-rate monotonicity violations are errors unless listed in
    /// `anomalies`; rho monotonicity violations and unusual code rates are warnings.
    std::vector<Diagnostic> validate(const KnownAnomalies& anomalies = {}) const;

    /// Canonical CSV: header, rows ordered by scheme, stream, code rate. A hierarchical
    /// rho_he = 0.5 column whose HE and LE cells coincide is written as one `HE/LE` row.
    std::string to_csv() const;

private:
    std::map<Key, double> cells_;
};

/// Parses the threshold CSV (`family,rho_he,stream,code_rate,threshold_db`) without validating.
ThresholdTable parse_threshold_csv(std::string_view text, const std::string& source = "<memory>");

/// Parses and validates. Throws ParseError / ValidationError; warnings go to `warnings` if given.
ThresholdTable load_threshold_csv(const std::filesystem::path& path, const KnownAnomalies& anomalies = {},
                                  std::vector<Diagnostic>* warnings = nullptr);

std::string format_number(double v);

} // namespace hmts
