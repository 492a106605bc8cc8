#pragma once

// Domain types for dissolved-gas-analysis fault diagnosis: gas samples,
// fault taxonomies and the per-method diagnosis record.

#include <array>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace dga {

// ---------------------------------------------------------------------------
// Calendar date (no time-of-day; chromatography reports carry sampling dates)
// ---------------------------------------------------------------------------

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    friend constexpr auto operator<=>(const Date&, const Date&) = default;
};

inline bool valid_date(const Date& d) {
    static constexpr std::array<int, 12> days_in = {31, 29, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    return d.year >= 1 && d.month >= 1 && d.month <= 12 && d.day >= 1 &&
           d.day <= days_in[static_cast<std::size_t>(d.month - 1)];
}

/// Parses an ISO-8601 calendar date (YYYY-MM-DD).
inline std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    Date d;
    int fields = std::sscanf(std::string(text).c_str(), "%4d-%2d-%2d",
                             &d.year, &d.month, &d.day);
    if (fields != 3 || !valid_date(d)) return std::nullopt;
    return d;
}

inline std::string to_string(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

// ---------------------------------------------------------------------------
// Fault vocabularies
// ---------------------------------------------------------------------------

/// Coarse scoring vocabulary shared by every diagnosis method.
enum class CoarseFault { Normal, PD, ARC, OH, NoDecision };

inline std::string_view to_string(CoarseFault f) {
    switch (f) {
        case CoarseFault::Normal: return "Normal";
        case CoarseFault::PD: return "PD";
        case CoarseFault::ARC: return "ARC";
        case CoarseFault::OH: return "OH";
        case CoarseFault::NoDecision: return "NoDecision";
    }
    return "?";
}

/// CSV label token (N/PD/ARC/OH). NoDecision is not a valid sample label.
inline std::string_view label_token(CoarseFault f) {
    return f == CoarseFault::Normal ? "N" : to_string(f);
}

inline std::optional<CoarseFault> parse_label(std::string_view token) {
    if (token == "N") return CoarseFault::Normal;
    if (token == "PD") return CoarseFault::PD;
    if (token == "ARC") return CoarseFault::ARC;
    if (token == "OH") return CoarseFault::OH;
    return std::nullopt;
}

/// The twelve Rogers ratio-code fault classes, index 1..12.
enum class RogersFault : int {
    Normal = 1,
    PdLowEnergy = 2,
    OverheatingBelow150 = 3,
    Overheating150To200 = 4,
    Overheating200To300 = 5,
    ConductorOverheating = 6,
    WindingCirculatingCurrent = 7,
    CoreTankCirculatingCurrent = 8,
    ArcingLowEnergy = 9,
    ArcingHighEnergy = 10,
    ContinuousSparking = 11,
    PdHighEnergy = 12,
};

/// The nine IEC ratio-code fault classes, index 1..9.
enum class IecFault : int {
    NoFault = 1,
    PdLowDensity = 2,
    PdHighDensity = 3,
    DischargeLowEnergy = 4,
    DischargeHighEnergy = 5,
    ThermalBelow150 = 6,
    Thermal150To300 = 7,
    Thermal300To700 = 8,
    ThermalAbove700 = 9,
};

inline constexpr int kRogersClassCount = 12;
inline constexpr int kIecClassCount = 9;

inline std::string_view describe(RogersFault f) {
    switch (f) {
        case RogersFault::Normal: return "normal";
        case RogersFault::PdLowEnergy: return "partial discharge of low energy";
        case RogersFault::OverheatingBelow150: return "overheating <150 C";
        case RogersFault::Overheating150To200: return "overheating 150-200 C";
        case RogersFault::Overheating200To300: return "overheating 200-300 C";
        case RogersFault::ConductorOverheating: return "conductor overheating";
        case RogersFault::WindingCirculatingCurrent:
            return "overheating by winding circulating current";
        case RogersFault::CoreTankCirculatingCurrent:
            return "overheating by core and tank circulating current";
        case RogersFault::ArcingLowEnergy: return "arcing of low energy";
        case RogersFault::ArcingHighEnergy: return "arcing of high energy";
        case RogersFault::ContinuousSparking:
            return "continuous sparking to floating potential";
        case RogersFault::PdHighEnergy: return "partial discharge with high energy";
    }
    return "?";
}

inline std::string_view describe(IecFault f) {
    switch (f) {
        case IecFault::NoFault: return "no fault";
        case IecFault::PdLowDensity: return "partial discharge with low energy density";
        case IecFault::PdHighDensity: return "partial discharge with high energy density";
        case IecFault::DischargeLowEnergy: return "discharge of low energy";
        case IecFault::DischargeHighEnergy: return "discharge of high energy";
        case IecFault::ThermalBelow150: return "overheating T<150 C";
        case IecFault::Thermal150To300: return "overheating 150<T<300 C";
        case IecFault::Thermal300To700: return "overheating 300<=T<=700 C";
        case IecFault::ThermalAbove700: return "overheating >=700 C";
    }
    return "?";
}

/// Projects a Rogers class onto the coarse scoring vocabulary. Total.
inline CoarseFault coarse_of_rogers(RogersFault f) {
    switch (f) {
        case RogersFault::Normal: return CoarseFault::Normal;
        case RogersFault::PdLowEnergy:
        case RogersFault::PdHighEnergy: return CoarseFault::PD;
        case RogersFault::ArcingLowEnergy:
        case RogersFault::ArcingHighEnergy:
        case RogersFault::ContinuousSparking: return CoarseFault::ARC;
        default: return CoarseFault::OH;  // classes 3..8, all thermal
    }
}

/// Projects an IEC class onto the coarse scoring vocabulary. Total.
inline CoarseFault coarse_of_iec(IecFault f) {
    switch (f) {
        case IecFault::NoFault: return CoarseFault::Normal;
        case IecFault::PdLowDensity:
        case IecFault::PdHighDensity: return CoarseFault::PD;
        case IecFault::DischargeLowEnergy:
        case IecFault::DischargeHighEnergy: return CoarseFault::ARC;
        default: return CoarseFault::OH;  // classes 6..9, all thermal
    }
}

// ---------------------------------------------------------------------------
// Gas sample
// ---------------------------------------------------------------------------

/// One measured concentration. `below_detection` marks values reported at the
/// chromatograph's detection limit; the stored ppm then equals that limit.
struct GasReading {
    double ppm = 0.0;
    bool below_detection = false;

    friend bool operator==(const GasReading&, const GasReading&) = default;
};

/// One oil-chromatography reading: seven gas concentrations plus metadata.
struct GasSample {
    std::string id;
    std::optional<Date> date;
    GasReading h2, ch4, c2h2, c2h4, c2h6, co, co2;
    std::optional<CoarseFault> actual_fault;

    friend bool operator==(const GasSample&, const GasSample&) = default;
};

/// Field table for iterating the seven gases in CSV column order.
struct GasField {
    GasReading GasSample::* member;
    std::string_view name;
};

inline constexpr std::array<GasField, 7> kGasFields = {{
    {&GasSample::h2, "h2"},
    {&GasSample::ch4, "ch4"},
    {&GasSample::c2h2, "c2h2"},
    {&GasSample::c2h4, "c2h4"},
    {&GasSample::c2h6, "c2h6"},
    {&GasSample::co, "co"},
    {&GasSample::co2, "co2"},
}};

// ---------------------------------------------------------------------------
// Diagnosis record
// ---------------------------------------------------------------------------

/// Diagnosis method tag.
enum class Method { RogersTable, IecTable, AnnRogers, AnnIec };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::RogersTable: return "rogers";
        case Method::IecTable: return "iec";
        case Method::AnnRogers: return "ann-rogers";
        case Method::AnnIec: return "ann-iec";
    }
    return "?";
}

using FineFault = std::variant<RogersFault, IecFault>;

/// Result of one method applied to one sample. An absent fine fault means
/// NoDecision (rule-table miss); the ANN methods always commit to a class.
struct Diagnosis {
    Method method = Method::RogersTable;
    std::optional<FineFault> fine;
    CoarseFault coarse = CoarseFault::NoDecision;
    double confidence = 0.0;
    bool low_confidence = false;
    bool ambiguous = false;
};

inline bool is_no_decision(const Diagnosis& d) { return !d.fine.has_value(); }

inline std::string_view fine_description(const Diagnosis& d) {
    if (!d.fine) return "no decision";
    if (const auto* r = std::get_if<RogersFault>(&*d.fine)) return describe(*r);
    return describe(std::get<IecFault>(*d.fine));
}

inline int fine_class_index(const Diagnosis& d) {
    if (!d.fine) return 0;
    if (const auto* r = std::get_if<RogersFault>(&*d.fine)) return static_cast<int>(*r);
    return static_cast<int>(std::get<IecFault>(*d.fine));
}

}  // namespace dga
