#pragma once

// Text, CSV and JSON renderings of diagnosis reports, the comparison table,
// trend tables and the rule tables. All formats are views of the same
// underlying objects.

#include <iomanip>
#include <ostream>
#include <span>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dga/data.hpp"
#include "dga/pipeline.hpp"
#include "dga/rules.hpp"

namespace dga {

enum class OutputFormat { Text, Csv, Json };

inline std::optional<OutputFormat> parse_format(std::string_view s) {
    if (s == "text") return OutputFormat::Text;
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    return std::nullopt;
}

namespace detail {

inline std::string codes_string(const CodeVector& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.codes.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v.codes[i]);
    }
    return out + ")";
}

inline nlohmann::json to_json(const Diagnosis& d) {
    nlohmann::json j;
    j["method"] = std::string(to_string(d.method));
    j["fine_class"] = d.fine ? nlohmann::json(fine_class_index(d)) : nlohmann::json(nullptr);
    j["fine"] = std::string(fine_description(d));
    j["coarse"] = std::string(to_string(d.coarse));
    j["confidence"] = d.confidence;
    j["low_confidence"] = d.low_confidence;
    j["ambiguous"] = d.ambiguous;
    return j;
}

inline nlohmann::json to_json(const DiagnosisReport& r) {
    nlohmann::json j;
    j["id"] = r.id;
    j["rogers"] = {{"ratios", {r.rogers.r1, r.rogers.r2, r.rogers.r3, r.rogers.r4}},
                   {"codes", r.rogers_codes.codes}};
    j["iec"] = {{"ratios", {r.iec.r1, r.iec.r2, r.iec.r3}}, {"codes", r.iec_codes.codes}};
    j["floored_gases"] = r.floored_gases;
    j["diagnoses"] = nlohmann::json::array();
    for (const auto& d : r.diagnoses) j["diagnoses"].push_back(to_json(d));
    j["actual"] = r.actual ? nlohmann::json(std::string(to_string(*r.actual)))
                           : nlohmann::json(nullptr);
    return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Diagnosis reports
// ---------------------------------------------------------------------------

inline void render_text(std::span<const DiagnosisReport> reports, std::ostream& out) {
    for (const auto& r : reports) {
        out << "sample " << r.id;
        if (r.actual) out << "  [actual: " << to_string(*r.actual) << "]";
        out << '\n';
        if (!r.floored_gases.empty()) {
            out << "  raised to detection floor:";
            for (const auto& g : r.floored_gases) out << ' ' << g;
            out << '\n';
        }
        out << "  rogers ratios: " << std::setprecision(4) << r.rogers.r1 << ' '
            << r.rogers.r2 << ' ' << r.rogers.r3 << ' ' << r.rogers.r4 << "  codes "
            << detail::codes_string(r.rogers_codes) << '\n';
        out << "  iec ratios:    " << r.iec.r1 << ' ' << r.iec.r2 << ' ' << r.iec.r3
            << "  codes " << detail::codes_string(r.iec_codes) << '\n';
        for (const auto& d : r.diagnoses) {
            out << "  " << std::setw(10) << std::left << to_string(d.method) << ' '
                << to_string(d.coarse) << " -- " << fine_description(d)
                << " (confidence " << std::setprecision(3) << d.confidence << ")";
            if (d.low_confidence) out << " [low confidence]";
            if (d.ambiguous) out << " [ambiguous]";
            out << '\n';
        }
    }
}

inline void render_csv(std::span<const DiagnosisReport> reports, std::ostream& out) {
    out << "id,method,fine_class,fine,coarse,confidence,low_confidence,ambiguous,"
           "rogers_codes,iec_codes,actual\n";
    for (const auto& r : reports) {
        for (const auto& d : r.diagnoses) {
            out << r.id << ',' << to_string(d.method) << ','
                << (d.fine ? std::to_string(fine_class_index(d)) : "") << ','
                << fine_description(d) << ',' << to_string(d.coarse) << ','
                << d.confidence << ',' << (d.low_confidence ? 1 : 0) << ','
                << (d.ambiguous ? 1 : 0) << ',' << '"'
                << detail::codes_string(r.rogers_codes) << '"' << ',' << '"'
                << detail::codes_string(r.iec_codes) << '"' << ','
                << (r.actual ? to_string(*r.actual) : "") << '\n';
        }
    }
}

inline void render_json(std::span<const DiagnosisReport> reports, std::ostream& out) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports) j.push_back(detail::to_json(r));
    out << j.dump(2) << '\n';
}

inline void render(std::span<const DiagnosisReport> reports, OutputFormat f,
                   std::ostream& out) {
    switch (f) {
        case OutputFormat::Text: render_text(reports, out); break;
        case OutputFormat::Csv: render_csv(reports, out); break;
        case OutputFormat::Json: render_json(reports, out); break;
    }
}

// ---------------------------------------------------------------------------
// Comparison table
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json to_json(const MethodEval& e) {
    nlohmann::json j;
    j["method"] = std::string(to_string(e.method));
    j["column"] = nlohmann::json::array();
    for (auto f : e.column) j["column"].push_back(std::string(to_string(f)));
    if (e.accuracy)
        j["accuracy"] = {{"correct", e.accuracy->correct}, {"total", e.accuracy->total}};
    if (e.reference_accuracy)
        j["reference_accuracy"] = {{"correct", e.reference_accuracy->correct},
                                   {"total", e.reference_accuracy->total}};
    if (e.agreement_with_reference)
        j["agreement_with_reference"] = *e.agreement_with_reference;
    j["divergent_rows"] = e.divergent_rows;
    return j;
}

}  // namespace detail

inline void render_text(const ComparisonTable& t, std::ostream& out) {
    out << "comparison (iec table: " << to_string(t.iec_variant) << ")\n";
    out << std::left << std::setw(8) << "sample" << std::setw(9) << "actual"
        << std::setw(11) << "trad-iec" << std::setw(13) << "trad-rogers"
        << std::setw(9) << "ann-iec" << std::setw(11) << "ann-rogers" << '\n';
    for (std::size_t i = 0; i < t.ids.size(); ++i) {
        const auto mark = [&](const MethodEval& e) {
            const bool divergent =
                std::find(e.divergent_rows.begin(), e.divergent_rows.end(), i) !=
                e.divergent_rows.end();
            return std::string(to_string(e.column[i])) + (divergent ? "*" : "");
        };
        out << std::setw(8) << t.ids[i] << std::setw(9)
            << (t.actual[i] ? to_string(*t.actual[i]) : "-") << std::setw(11)
            << mark(t.trad_iec) << std::setw(13) << mark(t.trad_rogers) << std::setw(9)
            << mark(t.ann_iec) << std::setw(11) << mark(t.ann_rogers) << '\n';
    }
    auto metrics = [&](const char* name, const MethodEval& e) {
        out << name << ": ";
        if (e.accuracy)
            out << "accuracy " << e.accuracy->correct << '/' << e.accuracy->total;
        else
            out << "accuracy n/a";
        if (e.reference_accuracy)
            out << ", reference-column accuracy " << e.reference_accuracy->correct << '/'
                << e.reference_accuracy->total;
        if (e.agreement_with_reference)
            out << ", agreement with reference " << *e.agreement_with_reference << '/'
                << e.column.size();
        out << '\n';
    };
    metrics("trad-iec", t.trad_iec);
    metrics("trad-rogers", t.trad_rogers);
    metrics("ann-iec", t.ann_iec);
    metrics("ann-rogers", t.ann_rogers);
    for (const auto& note : t.annotations) out << "note: " << note << '\n';
}

inline void render_csv(const ComparisonTable& t, std::ostream& out) {
    out << "sample,actual,trad_iec,trad_rogers,ann_iec,ann_rogers,divergent\n";
    for (std::size_t i = 0; i < t.ids.size(); ++i) {
        std::string divergent;
        for (const auto* e : {&t.trad_iec, &t.trad_rogers}) {
            if (std::find(e->divergent_rows.begin(), e->divergent_rows.end(), i) !=
                e->divergent_rows.end()) {
                if (!divergent.empty()) divergent += ';';
                divergent += to_string(e->method);
            }
        }
        out << t.ids[i] << ',' << (t.actual[i] ? to_string(*t.actual[i]) : "") << ','
            << to_string(t.trad_iec.column[i]) << ',' << to_string(t.trad_rogers.column[i])
            << ',' << to_string(t.ann_iec.column[i]) << ','
            << to_string(t.ann_rogers.column[i]) << ',' << divergent << '\n';
    }
}

inline void render_json(const ComparisonTable& t, std::ostream& out) {
    nlohmann::json j;
    j["iec_variant"] = std::string(to_string(t.iec_variant));
    j["ids"] = t.ids;
    j["actual"] = nlohmann::json::array();
    for (const auto& a : t.actual)
        j["actual"].push_back(a ? nlohmann::json(std::string(to_string(*a)))
                                : nlohmann::json(nullptr));
    j["trad_iec"] = detail::to_json(t.trad_iec);
    j["trad_rogers"] = detail::to_json(t.trad_rogers);
    j["ann_iec"] = detail::to_json(t.ann_iec);
    j["ann_rogers"] = detail::to_json(t.ann_rogers);
    j["annotations"] = t.annotations;
    out << j.dump(2) << '\n';
}

inline void render(const ComparisonTable& t, OutputFormat f, std::ostream& out) {
    switch (f) {
        case OutputFormat::Text: render_text(t, out); break;
        case OutputFormat::Csv: render_csv(t, out); break;
        case OutputFormat::Json: render_json(t, out); break;
    }
}

// ---------------------------------------------------------------------------
// Trend tables
// ---------------------------------------------------------------------------

inline void render_text(const TrendTable& t, std::ostream& out) {
    out << "gas trends for " << t.id << '\n';
    for (const auto& s : t.series) {
        out << "  " << std::setw(5) << std::left << s.gas;
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            const auto& p = s.points[i];
            out << "  " << to_string(p.date) << ' ' << (p.below_detection ? "<" : "")
                << p.ppm;
            if (i) out << " (" << std::showpos << s.deltas[i - 1] << std::noshowpos << ")";
        }
        out << '\n';
    }
}

inline void render_csv(const TrendTable& t, std::ostream& out) {
    out << "id,gas,date,ppm,below_detection,delta\n";
    for (const auto& s : t.series)
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            const auto& p = s.points[i];
            out << t.id << ',' << s.gas << ',' << to_string(p.date) << ',' << p.ppm << ','
                << (p.below_detection ? 1 : 0) << ',';
            if (i) out << s.deltas[i - 1];
            out << '\n';
        }
}

inline void render_json(const TrendTable& t, std::ostream& out) {
    nlohmann::json j;
    j["id"] = t.id;
    j["series"] = nlohmann::json::array();
    for (const auto& s : t.series) {
        nlohmann::json js;
        js["gas"] = s.gas;
        js["points"] = nlohmann::json::array();
        for (const auto& p : s.points)
            js["points"].push_back({{"date", to_string(p.date)},
                                    {"ppm", p.ppm},
                                    {"below_detection", p.below_detection}});
        js["deltas"] = s.deltas;
        j["series"].push_back(std::move(js));
    }
    out << j.dump(2) << '\n';
}

inline void render(const TrendTable& t, OutputFormat f, std::ostream& out) {
    switch (f) {
        case OutputFormat::Text: render_text(t, out); break;
        case OutputFormat::Csv: render_csv(t, out); break;
        case OutputFormat::Json: render_json(t, out); break;
    }
}

// ---------------------------------------------------------------------------
// Rule-table dump
// ---------------------------------------------------------------------------

namespace detail {

inline std::string pattern_string(const CodePattern& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ' ';
        if (p[i].is_exact()) {
            out += std::to_string(p[i].allowed.front());
        } else {
            out += '{';
            for (std::size_t k = 0; k < p[i].allowed.size(); ++k) {
                if (k) out += ',';
                out += std::to_string(p[i].allowed[k]);
            }
            out += '}';
        }
    }
    return out;
}

inline std::string fault_description(const RuleTable& t, int fault_class) {
    if (t.method == RatioMethod::Rogers)
        return std::string(describe(static_cast<RogersFault>(fault_class)));
    return std::string(describe(static_cast<IecFault>(fault_class)));
}

}  // namespace detail

inline void render_text(const RuleTable& t, std::ostream& out) {
    out << to_string(t.method) << " fault table";
    if (t.variant) out << " (" << to_string(*t.variant) << ")";
    out << '\n';
    for (const auto& row : t.rows)
        out << "  " << std::setw(2) << row.row << "  " << std::setw(16) << std::left
            << detail::pattern_string(row.pattern) << std::right << ' '
            << detail::fault_description(t, row.fault_class) << '\n';
}

inline void render_csv(const RuleTable& t, std::ostream& out) {
    out << "row,pattern,fault_class,fault\n";
    for (const auto& row : t.rows)
        out << row.row << ',' << '"' << detail::pattern_string(row.pattern) << '"' << ','
            << row.fault_class << ',' << detail::fault_description(t, row.fault_class)
            << '\n';
}

inline void render_json(const RuleTable& t, std::ostream& out) {
    nlohmann::json j;
    j["method"] = std::string(to_string(t.method));
    if (t.variant) j["variant"] = std::string(to_string(*t.variant));
    j["rows"] = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json jr;
        jr["row"] = row.row;
        jr["pattern"] = nlohmann::json::array();
        for (const auto& m : row.pattern) jr["pattern"].push_back(m.allowed);
        jr["fault_class"] = row.fault_class;
        jr["fault"] = detail::fault_description(t, row.fault_class);
        j["rows"].push_back(std::move(jr));
    }
    out << j.dump(2) << '\n';
}

inline void render(const RuleTable& t, OutputFormat f, std::ostream& out) {
    switch (f) {
        case OutputFormat::Text: render_text(t, out); break;
        case OutputFormat::Csv: render_csv(t, out); break;
        case OutputFormat::Json: render_json(t, out); break;
    }
}

}  // namespace dga
