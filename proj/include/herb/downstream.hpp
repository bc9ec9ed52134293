#pragma once

// Prediction-change statistics for regional-prefix probes.
//
// Prediction file (tab-delimited):
//     sample_id  condition  label  positive_probability
// `condition` is "original" for the unmodified sample, otherwise the id of
// the region whose prefix was prepended. Optional gold file:
//     sample_id  label

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "herb/error.hpp"
#include "herb/report.hpp"
#include "herb/text_io.hpp"

namespace herb {

inline constexpr std::string_view original_condition = "original";

struct PredictionRecord {
    std::string sample_id;
    std::string condition;
    std::string label;
    double positive_probability = 0.0;
};

inline std::vector<PredictionRecord> parse_predictions(const std::string& text, const std::string& source) {
    const auto table = io::parse_delimited(text, source, {"sample_id", "condition", "label", "positive_probability"});
    const auto c_sample = table.column("sample_id", source);
    const auto c_cond = table.column("condition", source);
    const auto c_label = table.column("label", source);
    const auto c_prob = table.column("positive_probability", source);
    std::vector<PredictionRecord> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        const auto& row = table.cells[i];
        const auto where = source + ":" + std::to_string(table.rows[i].number);
        PredictionRecord rec{row[c_sample], row[c_cond], row[c_label], io::parse_double(row[c_prob], where)};
        if (rec.sample_id.empty() || rec.condition.empty()) throw ValidationError(where + ": empty sample_id or condition");
        if (rec.positive_probability < 0.0 || rec.positive_probability > 1.0)
            throw ValidationError(where + ": probability " + row[c_prob] + " outside [0, 1]");
        if (!seen.emplace(rec.sample_id, rec.condition).second)
            throw ValidationError(where + ": duplicate record for sample '" + rec.sample_id + "' under condition '" +
                                  rec.condition + "'");
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
    return parse_predictions(io::read_file(path), path.string());
}

inline std::map<std::string, std::string> load_gold_labels(const std::filesystem::path& path) {
    const auto source = path.string();
    const auto table = io::read_delimited(path, {"sample_id", "label"});
    const auto c_sample = table.column("sample_id", source);
    const auto c_label = table.column("label", source);
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < table.cells.size(); ++i)
        if (!out.emplace(table.cells[i][c_sample], table.cells[i][c_label]).second)
            throw ValidationError(source + ":" + std::to_string(table.rows[i].number) + ": duplicate sample '" +
                                  table.cells[i][c_sample] + "'");
    return out;
}

struct ChangeStats {
    std::string region;
    std::size_t quantity_up = 0;
    std::size_t quantity_down = 0;
    std::size_t unchanged = 0;
    double avg_prob_up = 0.0;   ///< mean |delta| among samples whose probability rose; 0 if none
    double avg_prob_down = 0.0; ///< mean |delta| among samples whose probability fell; 0 if none
    std::map<std::string, double> label_flips; ///< "a->b" -> percent of all samples; observed directions only
    std::optional<double> accuracy;
    std::optional<double> macro_f1;

    double flip_pct(const std::string& direction) const {
        auto it = label_flips.find(direction);
        return it == label_flips.end() ? 0.0 : it->second;
    }
};

/// Unweighted mean of per-region statistics ("Country-All").
struct AverageChangeStats {
    double quantity_up = 0.0;
    double quantity_down = 0.0;
    double unchanged = 0.0;
    double avg_prob_up = 0.0;
    double avg_prob_down = 0.0;
    std::map<std::string, double> label_flips;
    std::optional<double> accuracy;
    std::optional<double> macro_f1;
};

struct DownstreamSummary {
    std::size_t sample_count = 0;
    std::vector<std::string> flip_directions; ///< sorted union over regions
    std::vector<ChangeStats> regions;         ///< sorted by region id
    AverageChangeStats all;
    std::optional<double> original_accuracy;
    std::optional<double> original_macro_f1;

    const ChangeStats& region(const std::string& id) const {
        for (const auto& r : regions)
            if (r.region == id) return r;
        throw ValidationError("no statistics for region '" + id + "'");
    }
};

namespace detail {

struct Classification {
    double accuracy;
    double macro_f1;
};

inline Classification classify(const std::map<std::string, std::string>& predicted,
                               const std::map<std::string, std::string>& gold) {
    std::set<std::string> labels;
    std::map<std::string, std::size_t> tp, fp, fn;
    std::size_t correct = 0;
    for (const auto& [sample, pred] : predicted) {
        const auto& truth = gold.at(sample);
        labels.insert(pred);
        labels.insert(truth);
        if (pred == truth) {
            ++correct;
            ++tp[pred];
        } else {
            ++fp[pred];
            ++fn[truth];
        }
    }
    double f1_sum = 0.0;
    for (const auto& l : labels) {
        const double denom = 2.0 * static_cast<double>(tp[l]) + static_cast<double>(fp[l] + fn[l]);
        f1_sum += denom > 0.0 ? 2.0 * static_cast<double>(tp[l]) / denom : 0.0;
    }
    return {static_cast<double>(correct) / static_cast<double>(predicted.size()),
            labels.empty() ? 0.0 : f1_sum / static_cast<double>(labels.size())};
}

} // namespace detail

inline DownstreamSummary downstream_stats(const std::vector<PredictionRecord>& records,
                                          const std::map<std::string, std::string>* gold = nullptr) {
    struct Pred {
        std::string label;
        double prob;
    };
    std::map<std::string, std::map<std::string, Pred>> by_condition;
    for (const auto& r : records) by_condition[r.condition][r.sample_id] = {r.label, r.positive_probability};

    auto orig_it = by_condition.find(std::string(original_condition));
    if (orig_it == by_condition.end()) throw ValidationError("prediction dump has no 'original' records");
    const auto original = orig_it->second;

    DownstreamSummary out;
    out.sample_count = original.size();

    if (gold) {
        for (const auto& [sample, _] : original)
            if (!gold->count(sample)) throw ValidationError("no gold label for sample '" + sample + "'");
    }
    auto labels_of = [](const std::map<std::string, Pred>& preds) {
        std::map<std::string, std::string> m;
        for (const auto& [s, p] : preds) m[s] = p.label;
        return m;
    };
    if (gold) {
        const auto c = detail::classify(labels_of(original), *gold);
        out.original_accuracy = c.accuracy;
        out.original_macro_f1 = c.macro_f1;
    }

    std::set<std::string> directions;
    std::map<std::string, std::map<std::string, std::size_t>> flip_counts;
    for (const auto& [condition, preds] : by_condition) {
        if (condition == original_condition) continue;
        if (preds.size() != original.size())
            throw ValidationError("condition '" + condition + "' has " + std::to_string(preds.size()) +
                                  " samples, 'original' has " + std::to_string(original.size()));
        ChangeStats st;
        st.region = condition;
        double up_sum = 0.0, down_sum = 0.0;
        for (const auto& [sample, p] : preds) {
            auto o = original.find(sample);
            if (o == original.end())
                throw ValidationError("sample '" + sample + "' under condition '" + condition +
                                      "' has no 'original' record");
            const double delta = p.prob - o->second.prob;
            if (delta > 0.0) {
                ++st.quantity_up;
                up_sum += delta;
            } else if (delta < 0.0) {
                ++st.quantity_down;
                down_sum -= delta;
            } else {
                ++st.unchanged;
            }
            if (p.label != o->second.label) {
                const auto dir = o->second.label + "->" + p.label;
                directions.insert(dir);
                ++flip_counts[condition][dir];
            }
        }
        if (st.quantity_up) st.avg_prob_up = up_sum / static_cast<double>(st.quantity_up);
        if (st.quantity_down) st.avg_prob_down = down_sum / static_cast<double>(st.quantity_down);
        if (gold) {
            const auto c = detail::classify(labels_of(preds), *gold);
            st.accuracy = c.accuracy;
            st.macro_f1 = c.macro_f1;
        }
        out.regions.push_back(std::move(st));
    }

    out.flip_directions.assign(directions.begin(), directions.end());
    const double n = static_cast<double>(out.sample_count);
    for (auto& st : out.regions)
        for (const auto& [dir, count] : flip_counts[st.region]) st.label_flips[dir] = 100.0 * static_cast<double>(count) / n;

    if (!out.regions.empty()) {
        const double k = static_cast<double>(out.regions.size());
        auto& a = out.all;
        for (const auto& st : out.regions) {
            a.quantity_up += static_cast<double>(st.quantity_up) / k;
            a.quantity_down += static_cast<double>(st.quantity_down) / k;
            a.unchanged += static_cast<double>(st.unchanged) / k;
            a.avg_prob_up += st.avg_prob_up / k;
            a.avg_prob_down += st.avg_prob_down / k;
            for (const auto& dir : out.flip_directions) a.label_flips[dir] += st.flip_pct(dir) / k;
            if (st.accuracy) a.accuracy = a.accuracy.value_or(0.0) + *st.accuracy / k;
            if (st.macro_f1) a.macro_f1 = a.macro_f1.value_or(0.0) + *st.macro_f1 / k;
        }
    }
    return out;
}

/// Per-region rows, then "Country-All"; accuracy columns only with gold labels.
inline ReportTable downstream_table(const DownstreamSummary& sum) {
    const bool with_gold = sum.original_accuracy.has_value();
    ReportTable t;
    t.columns = {"region", "quantity_up", "avg_prob_up", "quantity_down", "avg_prob_down", "unchanged"};
    for (const auto& d : sum.flip_directions) t.columns.push_back("flip_pct:" + d);
    if (with_gold) {
        t.columns.emplace_back("accuracy");
        t.columns.emplace_back("macro_f1");
    }
    auto fx = [](double v) { return io::format_fixed(v, 4); };
    if (with_gold) {
        std::vector<std::string> row{std::string(original_condition), "", "", "", "", ""};
        for (std::size_t i = 0; i < sum.flip_directions.size(); ++i) row.emplace_back("");
        row.push_back(fx(*sum.original_accuracy));
        row.push_back(fx(*sum.original_macro_f1));
        t.rows.push_back(std::move(row));
    }
    for (const auto& st : sum.regions) {
        std::vector<std::string> row{st.region,          std::to_string(st.quantity_up), fx(st.avg_prob_up),
                                     std::to_string(st.quantity_down), fx(st.avg_prob_down),
                                     std::to_string(st.unchanged)};
        for (const auto& d : sum.flip_directions) row.push_back(fx(st.flip_pct(d)));
        if (with_gold) {
            row.push_back(fx(st.accuracy.value_or(0.0)));
            row.push_back(fx(st.macro_f1.value_or(0.0)));
        }
        t.rows.push_back(std::move(row));
    }
    if (!sum.regions.empty()) {
        const auto& a = sum.all;
        std::vector<std::string> row{"Country-All", fx(a.quantity_up), fx(a.avg_prob_up),
                                     fx(a.quantity_down), fx(a.avg_prob_down), fx(a.unchanged)};
        for (const auto& d : sum.flip_directions) row.push_back(fx(a.label_flips.at(d)));
        if (with_gold) {
            row.push_back(fx(a.accuracy.value_or(0.0)));
            row.push_back(fx(a.macro_f1.value_or(0.0)));
        }
        t.rows.push_back(std::move(row));
    }
    t.notes.push_back("samples: " + std::to_string(sum.sample_count) + "; flip_pct is percent of all samples");
    return t;
}

inline json downstream_to_json(const DownstreamSummary& sum) {
    auto stats = [](const ChangeStats& st) {
        json j{{"region", st.region},
               {"quantity_up", st.quantity_up},
               {"avg_prob_up", st.avg_prob_up},
               {"quantity_down", st.quantity_down},
               {"avg_prob_down", st.avg_prob_down},
               {"unchanged", st.unchanged},
               {"label_flips_pct", st.label_flips}};
        if (st.accuracy) j["accuracy"] = *st.accuracy;
        if (st.macro_f1) j["macro_f1"] = *st.macro_f1;
        return j;
    };
    json regions = json::array();
    for (const auto& st : sum.regions) regions.push_back(stats(st));
    json all{{"quantity_up", sum.all.quantity_up},     {"avg_prob_up", sum.all.avg_prob_up},
             {"quantity_down", sum.all.quantity_down}, {"avg_prob_down", sum.all.avg_prob_down},
             {"unchanged", sum.all.unchanged},         {"label_flips_pct", sum.all.label_flips}};
    if (sum.all.accuracy) all["accuracy"] = *sum.all.accuracy;
    if (sum.all.macro_f1) all["macro_f1"] = *sum.all.macro_f1;
    json j{{"sample_count", sum.sample_count}, {"regions", std::move(regions)}, {"country_all", std::move(all)}};
    if (sum.original_accuracy) {
        j["original"] = {{"accuracy", *sum.original_accuracy}, {"macro_f1", *sum.original_macro_f1}};
    }
    return j;
}

} // namespace herb
