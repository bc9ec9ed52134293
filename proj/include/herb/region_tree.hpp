#pragma once

// Leveled region hierarchy (root > continent > country > city).
//
// File format: tab-delimited with header `id  name  level  parent`; the root
// leaves `parent` empty. Children are derived from parent links and kept
// sorted by id so every reduction over them is order-deterministic.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "herb/error.hpp"
#include "herb/text_io.hpp"

namespace herb {

using RegionId = std::string;

namespace level {
inline constexpr int city = 1;
inline constexpr int country = 2;
inline constexpr int continent = 3;
inline constexpr int root = 4;
} // namespace level

inline std::string level_name(int l) {
    switch (l) {
    case level::city: return "city";
    case level::country: return "country";
    case level::continent: return "continent";
    case level::root: return "root";
    default: return "level-" + std::to_string(l);
    }
}

/// Accepts "city", "country", "continent", "root" or a positive integer.
inline int parse_level(std::string_view s) {
    if (s == "city") return level::city;
    if (s == "country") return level::country;
    if (s == "continent") return level::continent;
    if (s == "root" || s == "earth") return level::root;
    const long v = io::parse_int(s, "level");
    if (v < 1) throw ValidationError("level must be >= 1, got " + std::string(s));
    return static_cast<int>(v);
}

struct RegionNode {
    RegionId id;
    std::string name;
    int level = 0;
    std::optional<RegionId> parent;
    std::vector<RegionId> children;

    bool operator==(const RegionNode&) const = default;
};

inline bool is_valid_region_id(std::string_view id) {
    return !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
}

class RegionTree {
public:
    RegionTree() = default;

    /// Validates the records and derives children lists. Any `children`
    /// already present on the input nodes are ignored.
    static RegionTree from_nodes(std::vector<RegionNode> records) {
        RegionTree tree;
        std::vector<RegionId> roots;
        for (auto& rec : records) {
            if (!is_valid_region_id(rec.id))
                throw ValidationError("invalid region id '" + rec.id + "' (allowed: [a-z0-9_-])");
            if (rec.name.empty()) throw ValidationError("region '" + rec.id + "' has an empty name");
            if (rec.level < 1) throw ValidationError("region '" + rec.id + "' has level < 1");
            if (tree.nodes_.count(rec.id)) throw ValidationError("duplicate region id '" + rec.id + "'");
            if (!rec.parent) roots.push_back(rec.id);
            rec.children.clear();
            auto id = rec.id;
            tree.nodes_.emplace(std::move(id), std::move(rec));
        }
        if (roots.empty()) throw ValidationError("region tree has no root (every node lists a parent)");
        if (roots.size() > 1) {
            std::string list;
            for (const auto& r : roots) list += (list.empty() ? "" : ", ") + r;
            throw ValidationError("region tree has multiple roots: " + list);
        }
        tree.root_ = roots.front();

        for (auto& [id, node] : tree.nodes_) {
            if (!node.parent) continue;
            auto it = tree.nodes_.find(*node.parent);
            if (it == tree.nodes_.end())
                throw ValidationError("orphan region '" + id + "': parent '" + *node.parent + "' not found");
            if (node.level != it->second.level - 1)
                throw ValidationError("level mismatch: region '" + id + "' (level " + std::to_string(node.level) +
                                      ") under parent '" + it->first + "' (level " +
                                      std::to_string(it->second.level) + ")");
            it->second.children.push_back(id);
        }
        // std::map iteration already visits children in id order.

        std::size_t reached = 0;
        std::vector<RegionId> stack{tree.root_};
        while (!stack.empty()) {
            const auto id = stack.back();
            stack.pop_back();
            ++reached;
            for (const auto& c : tree.nodes_.at(id).children) stack.push_back(c);
        }
        if (reached != tree.nodes_.size()) {
            for (const auto& [id, node] : tree.nodes_)
                if (!tree.is_descendant_or_self(id, tree.root_))
                    throw ValidationError("region '" + id + "' is not reachable from root '" + tree.root_ + "'");
        }
        return tree;
    }

    const RegionId& root() const { return root_; }
    std::size_t size() const { return nodes_.size(); }
    const std::map<RegionId, RegionNode>& nodes() const { return nodes_; }
    bool contains(const RegionId& id) const { return nodes_.count(id) != 0; }

    const RegionNode& node(const RegionId& id) const {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) throw ValidationError("unknown region id '" + id + "'");
        return it->second;
    }

    /// Direct children, sorted by id.
    const std::vector<RegionId>& sub_regions(const RegionId& id) const { return node(id).children; }

    /// Children of the parent, including `id` itself. The root is its own only sibling.
    std::vector<RegionId> siblings(const RegionId& id) const {
        const auto& n = node(id);
        if (!n.parent) return {id};
        return node(*n.parent).children;
    }

    bool is_leaf(const RegionId& id) const { return node(id).children.empty(); }

    /// Childless descendants of `id` sorted by id; `id` itself if childless.
    std::vector<RegionId> leaf_set(const RegionId& id) const {
        std::vector<RegionId> out;
        std::vector<RegionId> stack{id};
        (void)node(id);
        while (!stack.empty()) {
            const auto cur = stack.back();
            stack.pop_back();
            const auto& kids = nodes_.at(cur).children;
            if (kids.empty()) out.push_back(cur);
            for (const auto& c : kids) stack.push_back(c);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// All nodes strictly below `id`, sorted by id.
    std::vector<RegionId> descendants(const RegionId& id) const {
        std::vector<RegionId> out;
        std::vector<RegionId> stack(node(id).children);
        while (!stack.empty()) {
            const auto cur = stack.back();
            stack.pop_back();
            out.push_back(cur);
            for (const auto& c : nodes_.at(cur).children) stack.push_back(c);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<RegionId> ids_at_level(int l) const {
        std::vector<RegionId> out;
        for (const auto& [id, n] : nodes_)
            if (n.level == l) out.push_back(id);
        return out;
    }

    /// Every node except the root, sorted by id.
    std::vector<RegionId> scoreable_regions() const {
        std::vector<RegionId> out;
        for (const auto& [id, n] : nodes_)
            if (id != root_) out.push_back(id);
        return out;
    }

    bool is_descendant_or_self(RegionId id, const RegionId& ancestor) const {
        for (std::size_t guard = 0; guard <= nodes_.size(); ++guard) {
            if (id == ancestor) return true;
            const auto& n = nodes_.at(id);
            if (!n.parent) return false;
            id = *n.parent;
        }
        return false;
    }

    bool operator==(const RegionTree&) const = default;

private:
    std::map<RegionId, RegionNode> nodes_;
    RegionId root_;
};

inline RegionTree parse_region_tree(const std::string& text, const std::string& source = "<tree>") {
    const auto table = io::parse_delimited(text, source, {"id", "name", "level", "parent"});
    const auto c_id = table.column("id", source);
    const auto c_name = table.column("name", source);
    const auto c_level = table.column("level", source);
    const auto c_parent = table.column("parent", source);
    std::vector<RegionNode> records;
    records.reserve(table.cells.size());
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        const auto& row = table.cells[i];
        const auto where = source + ":" + std::to_string(table.rows[i].number);
        RegionNode n;
        n.id = row[c_id];
        n.name = row[c_name];
        const long lvl = io::parse_int(row[c_level], where + " (region '" + n.id + "')");
        n.level = static_cast<int>(lvl);
        if (!row[c_parent].empty()) n.parent = row[c_parent];
        records.push_back(std::move(n));
    }
    return RegionTree::from_nodes(std::move(records));
}

inline RegionTree load_region_tree(const std::filesystem::path& path) {
    return parse_region_tree(io::read_file(path), path.string());
}

inline std::vector<RegionId> leaf_set(const RegionTree& tree, const RegionId& r) { return tree.leaf_set(r); }

} // namespace herb
