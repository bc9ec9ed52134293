#pragma once

// Presentation of bias reports: continent tables (delimited text, optional
// x1e3 scaling) and a machine-readable JSON view carrying raw values.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "herb/error.hpp"
#include "herb/metric.hpp"
#include "herb/region_tree.hpp"
#include "herb/text_io.hpp"

namespace herb {

using json = nlohmann::ordered_json;

inline constexpr std::string_view scale_note = "* All the statistics are multiplied by 1e3.";
inline constexpr double presentation_scale = 1e3;
inline constexpr int table_decimals = 4;

struct ReportTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> notes;

    /// Tab-delimited; notes follow as '#' lines.
    std::string to_tsv() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "\t" : "") + cells[i];
            out += '\n';
        };
        line(columns);
        for (const auto& r : rows) line(r);
        for (const auto& n : notes) out += "# " + n + '\n';
        return out;
    }
};

/// A continent column: the region whose score fills it and its header label.
struct ColumnSpec {
    RegionId region;
    std::string label;
};

/// Children of the root in id order, labelled by region name.
inline std::vector<ColumnSpec> default_columns(const RegionTree& tree) {
    std::vector<ColumnSpec> out;
    for (const auto& c : tree.sub_regions(tree.root())) out.push_back({c, tree.node(c).name});
    return out;
}

/// Parses "africa:AF,asia:AS,..." (label optional, defaults to the region name).
inline std::vector<ColumnSpec> parse_columns(std::string_view spec, const RegionTree& tree) {
    if (io::trim(spec).empty()) return default_columns(tree);
    std::vector<ColumnSpec> out;
    for (const auto& item : io::split(spec, ',')) {
        const auto t = std::string(io::trim(item));
        const auto colon = t.find(':');
        ColumnSpec c;
        c.region = t.substr(0, colon);
        (void)tree.node(c.region);
        c.label = colon == std::string::npos ? tree.node(c.region).name : t.substr(colon + 1);
        out.push_back(std::move(c));
    }
    return out;
}

inline std::string present(double v, bool scale) {
    return io::format_fixed(scale ? v * presentation_scale : v, table_decimals);
}

/// One table row: leading label cells, then per-column scores, then overall.
inline std::vector<std::string> continent_row(std::vector<std::string> leading, const BiasReport& rep,
                                              const std::vector<ColumnSpec>& columns, bool scale) {
    for (const auto& c : columns) leading.push_back(rep.has(c.region) ? present(rep.score(c.region).value, scale) : "");
    leading.push_back(present(rep.overall.value, scale));
    return leading;
}

inline std::vector<std::string> continent_header(std::vector<std::string> leading,
                                                 const std::vector<ColumnSpec>& columns) {
    for (const auto& c : columns) leading.push_back(c.label);
    leading.emplace_back("Overall Bias");
    return leading;
}

struct ModelReports {
    std::string model_label;
    std::vector<BiasReport> reports; ///< one per metric variant
};

/// Model x metric rows with continent columns and the overall score.
inline ReportTable overall_table(const std::vector<ModelReports>& models, const std::vector<ColumnSpec>& columns,
                                 bool scale) {
    ReportTable t;
    t.columns = continent_header({"Model", "Metric"}, columns);
    for (const auto& m : models)
        for (const auto& rep : m.reports)
            t.rows.push_back(continent_row({m.model_label, std::string(variant_name(rep.variant))}, rep, columns, scale));
    if (scale) t.notes.emplace_back(scale_note);
    return t;
}

struct LabeledReport {
    std::string label;
    BiasReport report;
};

/// Row label x continent columns (ablation and robustness layouts).
inline ReportTable labeled_table(std::string_view first_column, const std::vector<LabeledReport>& rows,
                                 const std::vector<ColumnSpec>& columns, bool scale) {
    ReportTable t;
    t.columns = continent_header({std::string(first_column)}, columns);
    for (const auto& r : rows) t.rows.push_back(continent_row({r.label}, r.report, columns, scale));
    if (scale) t.notes.emplace_back(scale_note);
    return t;
}

inline json report_to_json(const BiasReport& rep, const RegionTree& tree) {
    json j;
    j["model_id"] = rep.model_id;
    j["lexicon"] = rep.lexicon_name;
    j["variant"] = std::string(variant_name(rep.variant));
    j["root"] = rep.overall.region;
    j["overall"] = rep.overall.value;
    json scores = json::array();
    for (const auto& s : rep.scores)
        scores.push_back({{"region", s.region}, {"name", tree.node(s.region).name}, {"level", s.level}, {"value", s.value}});
    j["scores"] = std::move(scores);
    json means = json::object();
    for (const auto& [r, v] : rep.child_mean) means[r] = v;
    j["child_mean"] = std::move(means);
    j["warnings"] = rep.warnings;
    return j;
}

inline BiasReport report_from_json(const json& j) {
    try {
        BiasReport rep;
        rep.model_id = j.at("model_id").get<std::string>();
        rep.lexicon_name = j.at("lexicon").get<std::string>();
        rep.variant = parse_variant(j.at("variant").get<std::string>());
        for (const auto& s : j.at("scores"))
            rep.scores.push_back({s.at("region").get<std::string>(), rep.variant, s.at("value").get<double>(),
                                  s.at("level").get<int>()});
        rep.overall = rep.score(j.at("root").get<std::string>());
        if (j.contains("child_mean"))
            for (const auto& [r, v] : j.at("child_mean").items()) rep.child_mean[r] = v.get<double>();
        return rep;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed report JSON: ") + e.what());
    }
}

inline BiasReport load_report_json(const std::filesystem::path& path) {
    const auto text = io::read_file(path);
    try {
        return report_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

inline json table_to_json(const ReportTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        json row = json::object();
        for (std::size_t i = 0; i < t.columns.size() && i < r.size(); ++i) row[t.columns[i]] = r[i];
        rows.push_back(std::move(row));
    }
    return {{"columns", t.columns}, {"rows", std::move(rows)}, {"notes", t.notes}};
}

} // namespace herb
