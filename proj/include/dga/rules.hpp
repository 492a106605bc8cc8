#pragma once

// Fault lookup tables for the Rogers and IEC ratio-code methods. Table rows
// carry per-position matchers; a position matches either one exact code or
// any member of a small wildcard set. A code vector matching no row is the
// methods' classic "no decision" outcome.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dga/gas.hpp"
#include "dga/ratios.hpp"

namespace dga {

/// One position of a rule pattern: exact code, or any member of a set.
struct CodeMatcher {
    std::vector<int> allowed;  // size 1 = exact code

    bool is_exact() const { return allowed.size() == 1; }
    bool matches(int code) const {
        return std::find(allowed.begin(), allowed.end(), code) != allowed.end();
    }

    friend bool operator==(const CodeMatcher&, const CodeMatcher&) = default;
};

using CodePattern = std::vector<CodeMatcher>;

inline bool pattern_is_exact(const CodePattern& p) {
    return std::all_of(p.begin(), p.end(),
                       [](const CodeMatcher& m) { return m.is_exact(); });
}

/// True iff every position's code is accepted by the pattern's matcher.
inline bool match_pattern(const CodeVector& codes, const CodePattern& pattern) {
    if (codes.codes.size() != pattern.size())
        throw std::invalid_argument("match_pattern: arity mismatch");
    for (std::size_t i = 0; i < pattern.size(); ++i)
        if (!pattern[i].matches(codes.codes[i])) return false;
    return true;
}

/// One table row: pattern plus the fault class it diagnoses (1-based index
/// into the method's taxonomy).
struct RuleRow {
    int row = 0;
    CodePattern pattern;
    int fault_class = 0;
};

/// The published IEC table prints the 150<T<300 C row with the same codes as
/// the 300..700 C row; the corrected variant restores (0,2,0), the pattern
/// the method's training data uses for that class.
enum class IecVariant { Printed, Corrected };

inline std::string_view to_string(IecVariant v) {
    return v == IecVariant::Printed ? "printed" : "corrected";
}

struct RuleTable {
    RatioMethod method = RatioMethod::Rogers;
    std::optional<IecVariant> variant;
    std::vector<RuleRow> rows;
};

namespace detail {

inline CodeMatcher exact(int c) { return {{c}}; }
inline CodeMatcher one_or_two() { return {{1, 2}}; }

inline RuleTable make_rogers_table() {
    RuleTable t{RatioMethod::Rogers, std::nullopt, {}};
    auto add = [&](int row, CodePattern p) {
        t.rows.push_back({row, std::move(p), row});
    };
    add(1, {exact(0), exact(0), exact(0), exact(0)});
    add(2, {exact(5), exact(0), exact(0), exact(0)});
    add(3, {one_or_two(), exact(0), exact(0), exact(0)});
    add(4, {one_or_two(), exact(1), exact(0), exact(0)});
    add(5, {exact(5), exact(1), exact(0), exact(0)});
    add(6, {exact(0), exact(0), exact(1), exact(0)});
    add(7, {exact(1), exact(0), exact(1), exact(0)});
    add(8, {exact(1), exact(0), exact(2), exact(0)});
    add(9, {exact(0), exact(0), exact(0), exact(1)});
    add(10, {exact(0), exact(0), one_or_two(), one_or_two()});
    add(11, {exact(0), exact(0), exact(2), exact(2)});
    add(12, {exact(5), exact(0), exact(0), one_or_two()});
    return t;
}

inline RuleTable make_iec_table(IecVariant variant) {
    RuleTable t{RatioMethod::Iec, variant, {}};
    auto add = [&](int row, CodePattern p) {
        t.rows.push_back({row, std::move(p), row});
    };
    add(1, {exact(0), exact(0), exact(0)});
    add(2, {exact(0), exact(1), exact(0)});
    add(3, {exact(1), exact(1), exact(0)});
    add(4, {one_or_two(), exact(0), one_or_two()});
    add(5, {exact(1), exact(0), exact(2)});
    add(6, {exact(0), exact(0), exact(1)});
    add(7, {exact(0), exact(2), variant == IecVariant::Printed ? exact(1) : exact(0)});
    add(8, {exact(0), exact(2), exact(1)});
    add(9, {exact(0), exact(2), exact(2)});
    return t;
}

}  // namespace detail

inline const RuleTable& rogers_rule_table() {
    static const RuleTable table = detail::make_rogers_table();
    return table;
}

inline const RuleTable& iec_rule_table(IecVariant variant) {
    static const RuleTable printed = detail::make_iec_table(IecVariant::Printed);
    static const RuleTable corrected = detail::make_iec_table(IecVariant::Corrected);
    return variant == IecVariant::Printed ? printed : corrected;
}

namespace detail {

struct TableHit {
    const RuleRow* row = nullptr;  // null = no decision
    bool ambiguous = false;
};

/// Resolves a code vector against a table. A row whose pattern is fully
/// exact takes precedence over wildcard rows covering the same vector; if
/// several exact rows collide (the printed IEC table's duplicated thermal
/// row), the lowest row number wins and the hit is flagged ambiguous.
inline TableHit resolve(const CodeVector& codes, const RuleTable& table) {
    std::vector<const RuleRow*> hits;
    for (const RuleRow& row : table.rows)
        if (match_pattern(codes, row.pattern)) hits.push_back(&row);
    if (hits.empty()) return {};
    if (hits.size() == 1) return {hits.front(), false};
    std::vector<const RuleRow*> exact_hits;
    for (const RuleRow* r : hits)
        if (pattern_is_exact(r->pattern)) exact_hits.push_back(r);
    if (exact_hits.size() == 1) return {exact_hits.front(), false};
    return {hits.front(), true};
}

}  // namespace detail

/// Looks a Rogers code vector up in the fault table.
inline Diagnosis rogers_lookup(const CodeVector& codes) {
    if (codes.method != RatioMethod::Rogers)
        throw std::invalid_argument("rogers_lookup: expected a Rogers code vector");
    const auto hit = detail::resolve(codes, rogers_rule_table());
    Diagnosis d;
    d.method = Method::RogersTable;
    if (hit.row) {
        const auto fault = static_cast<RogersFault>(hit.row->fault_class);
        d.fine = fault;
        d.coarse = coarse_of_rogers(fault);
        d.confidence = 1.0;
        d.ambiguous = hit.ambiguous;
    }
    return d;
}

/// Looks an IEC code vector up in the chosen table variant.
inline Diagnosis iec_lookup(const CodeVector& codes, IecVariant variant) {
    if (codes.method != RatioMethod::Iec)
        throw std::invalid_argument("iec_lookup: expected an IEC code vector");
    const auto hit = detail::resolve(codes, iec_rule_table(variant));
    Diagnosis d;
    d.method = Method::IecTable;
    if (hit.row) {
        const auto fault = static_cast<IecFault>(hit.row->fault_class);
        d.fine = fault;
        d.coarse = coarse_of_iec(fault);
        d.confidence = 1.0;
        d.ambiguous = hit.ambiguous;
    }
    return d;
}

/// Every concrete code vector of a method, in lexicographic position order
/// (4*2*3*3 = 72 for Rogers, 27 for IEC). Used by exhaustiveness checks and
/// the model round-trip verification.
inline std::vector<CodeVector> all_code_vectors(RatioMethod m) {
    std::vector<CodeVector> out;
    std::vector<std::size_t> idx(arity(m), 0);
    while (true) {
        CodeVector v{m, {}};
        for (std::size_t p = 0; p < idx.size(); ++p)
            v.codes.push_back(code_alphabet(m, p)[idx[p]]);
        out.push_back(std::move(v));
        std::size_t p = idx.size();
        while (p > 0) {
            --p;
            if (++idx[p] < code_alphabet(m, p).size()) break;
            idx[p] = 0;
            if (p == 0) return out;
        }
    }
}

}  // namespace dga
