#pragma once

// Region-keyed value rows for external mapping tools. Values are written
// untransformed.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "herb/error.hpp"
#include "herb/metric.hpp"
#include "herb/region_tree.hpp"
#include "herb/report.hpp"
#include "herb/text_io.hpp"

namespace herb {

struct ChoroplethRow {
    RegionId region;
    std::string name;
    double value = 0.0;
};

namespace detail {

inline void require_level(const RegionTree& tree, int lvl) {
    if (tree.ids_at_level(lvl).empty())
        throw ValidationError("unknown level " + std::to_string(lvl) + " (" + level_name(lvl) +
                              "): no region in the tree has it");
}

} // namespace detail

/// Rows for every region of `values` at `lvl` (all levels when absent), in id order.
inline std::vector<ChoroplethRow> choropleth_rows(const RegionTree& tree, const std::map<RegionId, double>& values,
                                                  std::optional<int> lvl) {
    const int want = lvl.value_or(0);
    if (want) detail::require_level(tree, want);
    std::vector<ChoroplethRow> out;
    for (const auto& [id, v] : values) {
        const auto& node = tree.node(id);
        if (want && node.level != want) continue;
        out.push_back({id, node.name, v});
    }
    if (out.empty())
        throw ValidationError("no values at level " + (want ? std::to_string(want) : std::string("(any)")));
    return out;
}

inline std::vector<ChoroplethRow> choropleth_rows(const RegionTree& tree, const BiasReport& rep, std::optional<int> lvl) {
    std::map<RegionId, double> values;
    for (const auto& s : rep.scores) values[s.region] = s.value;
    return choropleth_rows(tree, values, lvl);
}

inline std::string format_choropleth(const std::vector<ChoroplethRow>& rows) {
    std::string out = "region_id\tname\tvalue\n";
    for (const auto& r : rows) out += r.region + '\t' + r.name + '\t' + io::format_exact(r.value) + '\n';
    return out;
}

inline json choropleth_to_json(const std::vector<ChoroplethRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back({{"region", r.region}, {"name", r.name}, {"value", r.value}});
    return arr;
}

} // namespace herb
