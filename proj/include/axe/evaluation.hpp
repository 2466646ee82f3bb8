#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "axe/corpus.hpp"
#include "axe/embeddings.hpp"
#include "axe/numerics.hpp"

namespace axe {

// Many-to-one map from inferred aspect id to gold category, total over [0, k).
struct AspectMapping {
    std::vector<GoldCategory> targets;

    int k() const { return static_cast<int>(targets.size()); }

    GoldCategory category_of(int aspect) const {
        if (aspect < 0 || aspect >= k())
            throw std::invalid_argument("aspect mapping: aspect id " + std::to_string(aspect) +
                                        " outside [0, " + std::to_string(k()) + ")");
        return targets[aspect];
    }
};

// File format: one line per aspect, "aspect_id<TAB>CategoryName".
inline AspectMapping parse_mapping(const std::string &text, int k) {
    if (k < 1) throw std::invalid_argument("aspect mapping: k must be positive");
    std::vector<GoldCategory> targets(k, GoldCategory::Miscellaneous);
    std::vector<bool> seen(k, false);
    size_t start = 0;
    int line_no = 0;
    while (start < text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::invalid_argument("aspect mapping line " + std::to_string(line_no) +
                                        ": expected \"aspect_id<TAB>CategoryName\"");
        const std::string id_str = line.substr(0, tab);
        int aspect = -1;
        auto [p, ec] = std::from_chars(id_str.data(), id_str.data() + id_str.size(), aspect);
        if (ec != std::errc{} || p != id_str.data() + id_str.size())
            throw std::invalid_argument("aspect mapping line " + std::to_string(line_no) +
                                        ": bad aspect id \"" + id_str + "\"");
        if (aspect < 0 || aspect >= k)
            throw std::invalid_argument("aspect mapping line " + std::to_string(line_no) +
                                        ": aspect id " + std::to_string(aspect) + " outside [0, " +
                                        std::to_string(k) + ")");
        if (seen[aspect])
            throw std::invalid_argument("aspect mapping line " + std::to_string(line_no) +
                                        ": duplicate aspect id " + std::to_string(aspect));
        try {
            targets[aspect] = category_from_string(line.substr(tab + 1));
        } catch (const std::invalid_argument &e) {
            throw std::invalid_argument("aspect mapping line " + std::to_string(line_no) + ": " +
                                        e.what());
        }
        seen[aspect] = true;
    }
    for (int i = 0; i < k; ++i)
        if (!seen[i])
            throw std::invalid_argument("aspect mapping: no category for aspect id " +
                                        std::to_string(i));
    return AspectMapping{std::move(targets)};
}

inline std::string format_mapping(const AspectMapping &mapping) {
    std::string out;
    for (int i = 0; i < mapping.k(); ++i) {
        out += std::to_string(i);
        out += '\t';
        out += to_string(mapping.targets[i]);
        out += '\n';
    }
    return out;
}

inline std::vector<std::pair<std::string, GoldCategory>> apply_mapping(
    const std::vector<std::pair<std::string, int>> &aspect_preds, const AspectMapping &mapping) {
    std::vector<std::pair<std::string, GoldCategory>> out;
    out.reserve(aspect_preds.size());
    for (const auto &[id, aspect] : aspect_preds) out.emplace_back(id, mapping.category_of(aspect));
    return out;
}

// Fallback mapping: each aspect row goes to the category with the nearest
// seed-word embedding; seed words missing from the vocabulary drop their
// category. Ties keep the earlier category in declaration order.
inline AspectMapping auto_mapping(
    const Matrix &T, const EmbeddingMatrix &E,
    const std::vector<std::pair<GoldCategory, std::vector<std::string>>> &seeds = {
        {GoldCategory::Food, {"food"}},
        {GoldCategory::Staff, {"staff"}},
        {GoldCategory::Ambience, {"ambience"}},
        {GoldCategory::Price, {"price"}},
        {GoldCategory::Miscellaneous, {"miscellaneous"}}}) {
    std::vector<std::pair<GoldCategory, Vector>> label_vecs;
    for (const auto &[category, words] : seeds) {
        Vector mean(E.dim(), 0.0);
        int found = 0;
        for (const auto &w : words) {
            if (!E.contains(w)) continue;
            auto row = E.row_of(w);
            for (int j = 0; j < E.dim(); ++j) mean[j] += row[j];
            ++found;
        }
        if (found == 0) continue;
        for (double &x : mean) x /= found;
        if (norm2(std::span<const double>(mean)) < kNormEps) continue;
        label_vecs.emplace_back(category, std::move(mean));
    }
    if (label_vecs.empty())
        throw std::invalid_argument("auto mapping: no seed word present in the vocabulary");

    AspectMapping mapping;
    for (int a = 0; a < T.rows; ++a) {
        auto row = T.row(a);
        if (norm2(row) < kNormEps)
            throw std::invalid_argument("auto mapping: zero aspect row " + std::to_string(a));
        GoldCategory best = label_vecs.front().first;
        double best_cos = -2.0;
        for (const auto &[category, vec] : label_vecs) {
            const double c = cosine(row, std::span<const double>(vec));
            if (c > best_cos) {
                best_cos = c;
                best = category;
            }
        }
        mapping.targets.push_back(best);
    }
    return mapping;
}

struct CategoryScore {
    GoldCategory category = GoldCategory::Miscellaneous;
    double precision = 0.0;  // percentages
    double recall = 0.0;
    double f1 = 0.0;
    long long support = 0;
};

struct EvalReport {
    std::vector<CategoryScore> rows;  // kAllCategories order, categories in gold or preds
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    long long total_support = 0;

    double f1(GoldCategory category) const {
        for (const auto &r : rows)
            if (r.category == category) return r.f1;
        return 0.0;
    }
};

// Recomputes the averages from per-category rows.
inline EvalReport make_report(std::vector<CategoryScore> rows) {
    if (rows.empty()) throw std::invalid_argument("eval report: no category rows");
    EvalReport report;
    report.rows = std::move(rows);
    double f1_sum = 0.0, weighted_sum = 0.0;
    for (const auto &r : report.rows) {
        f1_sum += r.f1;
        weighted_sum += r.f1 * static_cast<double>(r.support);
        report.total_support += r.support;
    }
    report.macro_f1 = f1_sum / static_cast<double>(report.rows.size());
    report.weighted_f1 =
        report.total_support > 0 ? weighted_sum / static_cast<double>(report.total_support) : 0.0;
    return report;
}

// One-vs-rest precision/recall/F1 in percent per category present in either
// stream; macro is the unweighted mean over those rows, weighted is the
// support-weighted mean.
inline EvalReport score(const std::vector<GoldCategory> &preds, const std::vector<GoldCategory> &golds) {
    if (preds.size() != golds.size())
        throw std::invalid_argument("score: " + std::to_string(preds.size()) + " predictions vs " +
                                    std::to_string(golds.size()) + " golds");
    if (preds.empty()) throw std::invalid_argument("score: empty input");

    std::vector<CategoryScore> rows;
    for (GoldCategory category : kAllCategories) {
        long long tp = 0, fp = 0, fn = 0, support = 0;
        bool present = false;
        for (size_t i = 0; i < preds.size(); ++i) {
            const bool p = preds[i] == category;
            const bool g = golds[i] == category;
            present = present || p || g;
            if (g) ++support;
            if (p && g) ++tp;
            if (p && !g) ++fp;
            if (!p && g) ++fn;
        }
        if (!present) continue;
        CategoryScore row;
        row.category = category;
        row.support = support;
        const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        row.precision = 100.0 * precision;
        row.recall = 100.0 * recall;
        row.f1 = precision + recall > 0 ? 100.0 * 2 * precision * recall / (precision + recall) : 0.0;
        rows.push_back(row);
    }
    return make_report(std::move(rows));
}

struct ReportDelta {
    struct Row {
        GoldCategory category;
        double precision, recall, f1;
        long long support;
    };
    std::vector<Row> rows;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
};

inline ReportDelta compare_reports(const EvalReport &a, const EvalReport &b) {
    if (a.rows.size() != b.rows.size())
        throw std::invalid_argument("compare_reports: category sets differ");
    ReportDelta delta;
    for (size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i].category != b.rows[i].category)
            throw std::invalid_argument("compare_reports: category sets differ");
        delta.rows.push_back({a.rows[i].category, b.rows[i].precision - a.rows[i].precision,
                              b.rows[i].recall - a.rows[i].recall, b.rows[i].f1 - a.rows[i].f1,
                              b.rows[i].support - a.rows[i].support});
    }
    delta.macro_f1 = b.macro_f1 - a.macro_f1;
    delta.weighted_f1 = b.weighted_f1 - a.weighted_f1;
    return delta;
}

inline std::string format_report(const EvalReport &report) {
    char buf[64];
    auto pct = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%10.2f", v);
        return std::string(buf);
    };
    auto count = [&](long long v) {
        std::snprintf(buf, sizeof(buf), "%9lld", v);
        return std::string(buf);
    };
    auto name_col = [](const std::string &name) {
        std::string out = name;
        out.resize(18, ' ');
        return out;
    };
    std::string out = name_col("Category") + " Precision     Recall         F1   Support\n";
    for (const auto &r : report.rows)
        out += name_col(to_string(r.category)) + pct(r.precision) + " " + pct(r.recall) + " " +
               pct(r.f1) + " " + count(r.support) + "\n";
    out += name_col("Macro Average") + std::string(22, ' ') + pct(report.macro_f1) + "\n";
    out += name_col("Weighted Average") + std::string(22, ' ') + pct(report.weighted_f1) + " " +
           count(report.total_support) + "\n";
    return out;
}

inline nlohmann::json report_to_json(const EvalReport &report) {
    nlohmann::json j;
    j["categories"] = nlohmann::json::array();
    for (const auto &r : report.rows) {
        nlohmann::json row;
        row["category"] = to_string(r.category);
        row["precision"] = r.precision;
        row["recall"] = r.recall;
        row["f1"] = r.f1;
        row["support"] = r.support;
        j["categories"].push_back(std::move(row));
    }
    j["macro_f1"] = report.macro_f1;
    j["weighted_f1"] = report.weighted_f1;
    j["total_support"] = report.total_support;
    return j;
}

inline EvalReport report_from_json(const nlohmann::json &j) {
    EvalReport report;
    try {
        for (const auto &row : j.at("categories")) {
            CategoryScore score;
            score.category = category_from_string(row.at("category").get<std::string>());
            score.precision = row.at("precision").get<double>();
            score.recall = row.at("recall").get<double>();
            score.f1 = row.at("f1").get<double>();
            score.support = row.at("support").get<long long>();
            report.rows.push_back(score);
        }
        report.macro_f1 = j.at("macro_f1").get<double>();
        report.weighted_f1 = j.at("weighted_f1").get<double>();
        report.total_support = j.at("total_support").get<long long>();
    } catch (const nlohmann::json::exception &e) {
        throw std::invalid_argument(std::string("eval report json: ") + e.what());
    }
    return report;
}

}  // namespace axe
