#pragma once

// Gas-ratio computation and integer ratio coding for the Rogers and IEC
// methods. Each ratio position maps onto a small code alphabet through a
// fixed interval partition of [0, inf).

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "dga/gas.hpp"

namespace dga {

inline constexpr double kDefaultDetectionFloor = 1.0;  // ppm

/// Rogers ratios, in the method's fixed order.
struct RogersRatios {
    double r1 = 0.0;  // CH4 / H2
    double r2 = 0.0;  // C2H6 / CH4
    double r3 = 0.0;  // C2H4 / C2H6
    double r4 = 0.0;  // C2H2 / C2H4
};

/// IEC ratios, in the method's fixed order.
struct IecRatios {
    double r1 = 0.0;  // C2H2 / C2H4
    double r2 = 0.0;  // CH4 / H2
    double r3 = 0.0;  // C2H4 / C2H6
};

enum class RatioMethod { Rogers, Iec };

inline std::string_view to_string(RatioMethod m) {
    return m == RatioMethod::Rogers ? "rogers" : "iec";
}

inline constexpr std::size_t arity(RatioMethod m) {
    return m == RatioMethod::Rogers ? 4 : 3;
}

/// Ordered integer ratio codes for one method.
struct CodeVector {
    RatioMethod method = RatioMethod::Rogers;
    std::vector<int> codes;

    friend bool operator==(const CodeVector&, const CodeVector&) = default;
};

/// Valid codes for one ratio position of a method.
inline std::span<const int> code_alphabet(RatioMethod m, std::size_t position) {
    static constexpr int rogers_r1[] = {5, 0, 1, 2};
    static constexpr int rogers_r2[] = {0, 1};
    static constexpr int ternary[] = {0, 1, 2};
    if (m == RatioMethod::Rogers) {
        switch (position) {
            case 0: return rogers_r1;
            case 1: return rogers_r2;
            case 2:
            case 3: return ternary;
            default: throw std::invalid_argument("code_alphabet: rogers position out of range");
        }
    }
    if (position >= 3) throw std::invalid_argument("code_alphabet: iec position out of range");
    return ternary;
}

// ---------------------------------------------------------------------------
// Detection-limit clamping
// ---------------------------------------------------------------------------

/// Raises every concentration below `floor` to the floor and marks it
/// below-detection. Keeps all downstream ratio denominators nonzero.
inline GasSample clamp_sample(GasSample sample, double floor = kDefaultDetectionFloor) {
    if (!(floor > 0.0))
        throw std::invalid_argument("clamp_sample: detection floor must be positive");
    for (const auto& field : kGasFields) {
        GasReading& g = sample.*(field.member);
        if (g.ppm < floor) {
            g.ppm = floor;
            g.below_detection = true;
        }
    }
    return sample;
}

// ---------------------------------------------------------------------------
// Ratio computation
// ---------------------------------------------------------------------------

namespace detail {
inline double quotient(double num, double den, const char* what) {
    if (den == 0.0)
        throw std::domain_error(std::string("division by zero in ratio ") + what +
                                " (sample not clamped?)");
    return num / den;
}
}  // namespace detail

inline RogersRatios rogers_ratios(const GasSample& s) {
    return {detail::quotient(s.ch4.ppm, s.h2.ppm, "CH4/H2"),
            detail::quotient(s.c2h6.ppm, s.ch4.ppm, "C2H6/CH4"),
            detail::quotient(s.c2h4.ppm, s.c2h6.ppm, "C2H4/C2H6"),
            detail::quotient(s.c2h2.ppm, s.c2h4.ppm, "C2H2/C2H4")};
}

inline IecRatios iec_ratios(const GasSample& s) {
    return {detail::quotient(s.c2h2.ppm, s.c2h4.ppm, "C2H2/C2H4"),
            detail::quotient(s.ch4.ppm, s.h2.ppm, "CH4/H2"),
            detail::quotient(s.c2h4.ppm, s.c2h6.ppm, "C2H4/C2H6")};
}

// ---------------------------------------------------------------------------
// Interval coding
//
// Rogers boundaries follow the method's published inequalities. The IEC
// ranges use the partition [0,0.1) / [0.1,1) / [1,3] / (3,inf) so that every
// non-negative ratio receives exactly one code.
// ---------------------------------------------------------------------------

/// Code of one Rogers ratio position (0-based) for ratio value r.
inline int rogers_position_code(std::size_t position, double r) {
    switch (position) {
        case 0:  // CH4/H2: <=0.1 -> 5, (0.1,1) -> 0, [1,3) -> 1, >=3 -> 2
            if (r <= 0.1) return 5;
            if (r < 1.0) return 0;
            return r < 3.0 ? 1 : 2;
        case 1:  // C2H6/CH4: <1 -> 0, >=1 -> 1
            return r < 1.0 ? 0 : 1;
        case 2:  // C2H4/C2H6: <1 -> 0, [1,3) -> 1, >=3 -> 2
            if (r < 1.0) return 0;
            return r < 3.0 ? 1 : 2;
        case 3:  // C2H2/C2H4: <0.5 -> 0, [0.5,3) -> 1, >=3 -> 2
            if (r < 0.5) return 0;
            return r < 3.0 ? 1 : 2;
        default:
            throw std::invalid_argument("rogers_position_code: position out of range");
    }
}

/// Code of one IEC ratio position (0-based) for ratio value r.
inline int iec_position_code(std::size_t position, double r) {
    const int band = r < 0.1 ? 0 : (r < 1.0 ? 1 : (r <= 3.0 ? 2 : 3));
    static constexpr int codes[3][4] = {
        {0, 1, 1, 2},  // C2H2/C2H4
        {1, 0, 2, 2},  // CH4/H2
        {0, 0, 1, 2},  // C2H4/C2H6
    };
    if (position >= 3)
        throw std::invalid_argument("iec_position_code: position out of range");
    return codes[position][band];
}

inline CodeVector code_rogers(const RogersRatios& r) {
    return {RatioMethod::Rogers,
            {rogers_position_code(0, r.r1), rogers_position_code(1, r.r2),
             rogers_position_code(2, r.r3), rogers_position_code(3, r.r4)}};
}

inline CodeVector code_iec(const IecRatios& r) {
    return {RatioMethod::Iec,
            {iec_position_code(0, r.r1), iec_position_code(1, r.r2),
             iec_position_code(2, r.r3)}};
}

}  // namespace dga
