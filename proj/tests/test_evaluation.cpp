#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <vector>

#include "axe/evaluation.hpp"

using namespace axe;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<GoldCategory> random_stream(int n, SeededRng &rng) {
    std::vector<GoldCategory> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(kAllCategories[rng.uniform_u64(5)]);
    return out;
}

// Independent confusion-matrix scorer used as the oracle for score().
struct OracleRow {
    double precision, recall, f1;
    long long support;
};

std::map<GoldCategory, OracleRow> oracle_rows(const std::vector<GoldCategory> &preds,
                                              const std::vector<GoldCategory> &golds) {
    std::map<GoldCategory, OracleRow> rows;
    for (GoldCategory c : kAllCategories) {
        long long tp = 0, pred_n = 0, gold_n = 0;
        for (size_t i = 0; i < preds.size(); ++i) {
            if (preds[i] == c) ++pred_n;
            if (golds[i] == c) ++gold_n;
            if (preds[i] == c && golds[i] == c) ++tp;
        }
        if (pred_n + gold_n == 0) continue;
        const double p = pred_n ? double(tp) / pred_n : 0.0;
        const double r = gold_n ? double(tp) / gold_n : 0.0;
        const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
        rows[c] = {100 * p, 100 * r, 100 * f, gold_n};
    }
    return rows;
}

}  // namespace

TEST_CASE("perfect predictions score 100 everywhere", "[evaluation]") {
    std::vector<GoldCategory> golds = {GoldCategory::Food, GoldCategory::Staff, GoldCategory::Food,
                                       GoldCategory::Ambience, GoldCategory::Miscellaneous};
    const EvalReport report = score(golds, golds);
    REQUIRE(report.rows.size() == 4);
    for (const auto &row : report.rows) {
        CHECK(row.precision == 100.0);
        CHECK(row.recall == 100.0);
        CHECK(row.f1 == 100.0);
    }
    CHECK(report.macro_f1 == 100.0);
    CHECK(report.weighted_f1 == 100.0);
    CHECK(report.total_support == 5);
}

TEST_CASE("hand-computed binary confusion", "[evaluation]") {
    // Four gold Food sentences, two predicted correctly, plus one false positive.
    std::vector<GoldCategory> golds = {GoldCategory::Food, GoldCategory::Food, GoldCategory::Food,
                                       GoldCategory::Food, GoldCategory::Miscellaneous,
                                       GoldCategory::Miscellaneous};
    std::vector<GoldCategory> preds = {GoldCategory::Food, GoldCategory::Food,
                                       GoldCategory::Miscellaneous, GoldCategory::Miscellaneous,
                                       GoldCategory::Food, GoldCategory::Miscellaneous};
    const EvalReport report = score(preds, golds);
    REQUIRE(report.rows.size() == 2);
    const CategoryScore &food = report.rows.front();
    REQUIRE(food.category == GoldCategory::Food);
    CHECK_THAT(food.precision, WithinAbs(100.0 * 2 / 3, 1e-9));
    CHECK_THAT(food.recall, WithinAbs(50.0, 1e-9));
    CHECK_THAT(food.f1, WithinAbs(100.0 * 4 / 7, 1e-9));  // 57.14...
    CHECK(food.support == 4);
}

TEST_CASE("formatted report mirrors the reference layout", "[evaluation]") {
    // Fixture with known averages: macro 59.94, weighted 65.36 at support 1496.
    std::vector<CategoryScore> rows = {
        {GoldCategory::Food, 70.11, 65.92, 67.95, 806},
        {GoldCategory::Staff, 58.70, 64.34, 61.39, 222},
        {GoldCategory::Ambience, 66.10, 60.98, 63.44, 194},
        {GoldCategory::Price, 30.77, 44.44, 36.36, 66},
        {GoldCategory::Miscellaneous, 72.41, 68.78, 70.55, 208},
    };
    const EvalReport report = make_report(rows);
    CHECK(report.total_support == 1496);
    CHECK_THAT(report.macro_f1, WithinAbs(59.938, 1e-9));
    CHECK_THAT(report.weighted_f1, WithinAbs(65.3594919786096, 1e-9));

    const std::string text = format_report(report);
    CHECK_THAT(text, ContainsSubstring("Category"));
    CHECK_THAT(text, ContainsSubstring("Food"));
    CHECK_THAT(text, ContainsSubstring("67.95"));
    CHECK_THAT(text, ContainsSubstring("36.36"));
    CHECK_THAT(text, ContainsSubstring("Macro Average"));
    CHECK_THAT(text, ContainsSubstring("59.94"));
    CHECK_THAT(text, ContainsSubstring("Weighted Average"));
    CHECK_THAT(text, ContainsSubstring("65.36"));
    CHECK_THAT(text, ContainsSubstring("1496"));
    // Categories keep their canonical order.
    CHECK(text.find("Food") < text.find("Staff"));
    CHECK(text.find("Staff") < text.find("Ambience"));
    CHECK(text.find("Ambience") < text.find("Price"));
    CHECK(text.find("Price") < text.find("Miscellaneous"));
}

TEST_CASE("report deltas", "[evaluation]") {
    const EvalReport a = make_report({{GoldCategory::Food, 60.0, 52.0, 55.71, 100}});
    const EvalReport b = make_report({{GoldCategory::Food, 63.0, 57.2, 59.94, 100}});

    SECTION("identical reports give zero deltas") {
        const ReportDelta d = compare_reports(a, a);
        REQUIRE(d.rows.size() == 1);
        CHECK(d.rows[0].precision == 0.0);
        CHECK(d.rows[0].recall == 0.0);
        CHECK(d.rows[0].f1 == 0.0);
        CHECK(d.rows[0].support == 0);
        CHECK(d.macro_f1 == 0.0);
        CHECK(d.weighted_f1 == 0.0);
    }
    SECTION("signed macro improvement") {
        const ReportDelta d = compare_reports(a, b);
        CHECK_THAT(d.macro_f1, WithinAbs(4.23, 1e-9));
    }
    SECTION("swapping arguments negates every delta") {
        const ReportDelta fwd = compare_reports(a, b);
        const ReportDelta rev = compare_reports(b, a);
        CHECK(rev.macro_f1 == -fwd.macro_f1);
        CHECK(rev.weighted_f1 == -fwd.weighted_f1);
        CHECK(rev.rows[0].f1 == -fwd.rows[0].f1);
    }
    SECTION("category mismatch is rejected") {
        const EvalReport c = make_report({{GoldCategory::Staff, 63.0, 57.2, 59.94, 100}});
        CHECK_THROWS_AS(compare_reports(a, c), std::invalid_argument);
        const EvalReport two = make_report(
            {{GoldCategory::Food, 1, 1, 1, 1}, {GoldCategory::Staff, 1, 1, 1, 1}});
        CHECK_THROWS_AS(compare_reports(a, two), std::invalid_argument);
    }
}

TEST_CASE("score matches an independent confusion-matrix oracle", "[evaluation]") {
    SeededRng rng(4242);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 50 + int(rng.uniform_u64(150));
        const auto golds = random_stream(n, rng);
        const auto preds = random_stream(n, rng);
        const EvalReport report = score(preds, golds);
        const auto expected = oracle_rows(preds, golds);
        REQUIRE(report.rows.size() == expected.size());
        double f1_sum = 0.0, weighted = 0.0;
        long long total = 0;
        for (const auto &row : report.rows) {
            const OracleRow &want = expected.at(row.category);
            CHECK_THAT(row.precision, WithinAbs(want.precision, 1e-12));
            CHECK_THAT(row.recall, WithinAbs(want.recall, 1e-12));
            CHECK_THAT(row.f1, WithinAbs(want.f1, 1e-12));
            CHECK(row.support == want.support);
            f1_sum += want.f1;
            weighted += want.f1 * double(want.support);
            total += want.support;
        }
        CHECK_THAT(report.macro_f1, WithinAbs(f1_sum / double(report.rows.size()), 1e-12));
        CHECK_THAT(report.weighted_f1, WithinAbs(weighted / double(total), 1e-12));
        CHECK(report.total_support == total);
    }
}

TEST_CASE("score is invariant under joint permutation", "[evaluation]") {
    SeededRng rng(99);
    const auto golds = random_stream(120, rng);
    const auto preds = random_stream(120, rng);
    const EvalReport base = score(preds, golds);

    std::vector<int> order(golds.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    rng.shuffle(order);
    std::vector<GoldCategory> golds2, preds2;
    for (int i : order) {
        golds2.push_back(golds[i]);
        preds2.push_back(preds[i]);
    }
    const EvalReport shuffled = score(preds2, golds2);

    REQUIRE(shuffled.rows.size() == base.rows.size());
    for (size_t i = 0; i < base.rows.size(); ++i) {
        CHECK(shuffled.rows[i].category == base.rows[i].category);
        CHECK(shuffled.rows[i].precision == base.rows[i].precision);
        CHECK(shuffled.rows[i].recall == base.rows[i].recall);
        CHECK(shuffled.rows[i].f1 == base.rows[i].f1);
        CHECK(shuffled.rows[i].support == base.rows[i].support);
    }
    CHECK(shuffled.macro_f1 == base.macro_f1);
    CHECK(shuffled.weighted_f1 == base.weighted_f1);
}

TEST_CASE("weighted equals macro under equal supports", "[evaluation]") {
    SeededRng rng(7);
    std::vector<GoldCategory> golds, preds;
    for (int rep = 0; rep < 8; ++rep)
        for (GoldCategory c : kAllCategories) {
            golds.push_back(c);
            preds.push_back(kAllCategories[rng.uniform_u64(5)]);
        }
    const EvalReport report = score(preds, golds);
    REQUIRE(report.rows.size() == 5);
    for (const auto &row : report.rows) CHECK(row.support == 8);
    CHECK_THAT(report.weighted_f1, WithinAbs(report.macro_f1, 1e-12));
}

TEST_CASE("fixed-point-free relabeling zeroes recall", "[evaluation]") {
    SeededRng rng(13);
    const auto golds = random_stream(80, rng);
    auto rotate = [](GoldCategory c) {
        const auto *it = std::find(std::begin(kAllCategories), std::end(kAllCategories), c);
        const auto next = (it - std::begin(kAllCategories) + 1) % 5;
        return kAllCategories[next];
    };
    std::vector<GoldCategory> preds;
    for (GoldCategory c : golds) preds.push_back(rotate(c));
    const EvalReport report = score(preds, golds);
    for (const auto &row : report.rows) {
        CHECK(row.recall == 0.0);
        CHECK(row.f1 == 0.0);
    }
    CHECK(report.macro_f1 == 0.0);
    CHECK(report.weighted_f1 == 0.0);
}

TEST_CASE("prediction-only categories get zero-support rows", "[evaluation]") {
    std::vector<GoldCategory> golds = {GoldCategory::Food, GoldCategory::Food, GoldCategory::Food};
    std::vector<GoldCategory> preds = {GoldCategory::Food, GoldCategory::Ambience,
                                       GoldCategory::Food};
    const EvalReport report = score(preds, golds);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].category == GoldCategory::Food);
    CHECK(report.rows[1].category == GoldCategory::Ambience);
    CHECK(report.rows[1].support == 0);
    CHECK(report.rows[1].precision == 0.0);
    CHECK(report.rows[1].recall == 0.0);
    CHECK(report.rows[1].f1 == 0.0);
    // Accessor treats absent categories as zero-score.
    CHECK(report.f1(GoldCategory::Price) == 0.0);
    CHECK(report.f1(GoldCategory::Food) > 0.0);
}

TEST_CASE("score input validation", "[evaluation]") {
    std::vector<GoldCategory> golds = {GoldCategory::Food};
    CHECK_THROWS_AS(score({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(score({}, golds), std::invalid_argument);
    CHECK_THROWS_AS(score({GoldCategory::Food, GoldCategory::Food}, golds), std::invalid_argument);
}

TEST_CASE("report json round trip", "[evaluation]") {
    SeededRng rng(321);
    const auto golds = random_stream(64, rng);
    const auto preds = random_stream(64, rng);
    const EvalReport report = score(preds, golds);

    const std::string text = report_to_json(report).dump(2);
    const EvalReport back = report_from_json(nlohmann::json::parse(text));

    REQUIRE(back.rows.size() == report.rows.size());
    for (size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(back.rows[i].category == report.rows[i].category);
        CHECK(back.rows[i].precision == report.rows[i].precision);
        CHECK(back.rows[i].recall == report.rows[i].recall);
        CHECK(back.rows[i].f1 == report.rows[i].f1);
        CHECK(back.rows[i].support == report.rows[i].support);
    }
    CHECK(back.macro_f1 == report.macro_f1);
    CHECK(back.weighted_f1 == report.weighted_f1);
    CHECK(back.total_support == report.total_support);

    CHECK_THROWS_AS(report_from_json(nlohmann::json{{"macro_f1", 1.0}}), std::invalid_argument);
}

TEST_CASE("mapping file parsing", "[evaluation]") {
    SECTION("well-formed file") {
        const AspectMapping m = parse_mapping("0\tFood\n1\tStaff\n2\tAmbience\n", 3);
        CHECK(m.k() == 3);
        CHECK(m.category_of(0) == GoldCategory::Food);
        CHECK(m.category_of(1) == GoldCategory::Staff);
        CHECK(m.category_of(2) == GoldCategory::Ambience);
    }
    SECTION("ids may arrive out of order, comments and blank lines skipped") {
        const AspectMapping m =
            parse_mapping("# aspects\r\n1\tPrice\n\n0\tMiscellaneous\r\n", 2);
        CHECK(m.category_of(0) == GoldCategory::Miscellaneous);
        CHECK(m.category_of(1) == GoldCategory::Price);
    }
    SECTION("alias names resolve like gold labels") {
        const AspectMapping m = parse_mapping("0\tservice\n", 1);
        CHECK(m.category_of(0) == GoldCategory::Staff);
    }
    SECTION("format and reparse round trip") {
        const AspectMapping m = parse_mapping("0\tFood\n1\tStaff\n", 2);
        const std::string text = format_mapping(m);
        CHECK(text == "0\tFood\n1\tStaff\n");
        const AspectMapping back = parse_mapping(text, 2);
        CHECK(back.targets == m.targets);
    }
    SECTION("rejects malformed input with line numbers") {
        CHECK_THROWS_WITH(parse_mapping("0 Food\n", 1), ContainsSubstring("line 1"));
        CHECK_THROWS_WITH(parse_mapping("0\tFood\nx\tStaff\n", 2), ContainsSubstring("line 2"));
        CHECK_THROWS_WITH(parse_mapping("0\tFood\n5\tStaff\n", 2), ContainsSubstring("outside"));
        CHECK_THROWS_WITH(parse_mapping("0\tFood\n0\tStaff\n", 1), ContainsSubstring("duplicate"));
        CHECK_THROWS_WITH(parse_mapping("0\tDrinks\n", 1), ContainsSubstring("Drinks"));
        CHECK_THROWS_WITH(parse_mapping("0\tFood\n", 2), ContainsSubstring("aspect id 1"));
        CHECK_THROWS_AS(parse_mapping("", 0), std::invalid_argument);
    }
}

TEST_CASE("apply_mapping", "[evaluation]") {
    const AspectMapping m = parse_mapping("0\tFood\n1\tStaff\n", 2);
    const auto out = apply_mapping({{"s1", 0}, {"s2", 1}, {"s3", 0}}, m);
    REQUIRE(out.size() == 3);
    CHECK(out[0] == std::pair<std::string, GoldCategory>{"s1", GoldCategory::Food});
    CHECK(out[1].second == GoldCategory::Staff);
    CHECK(out[2].second == GoldCategory::Food);
    CHECK_THROWS_AS(apply_mapping({{"s1", 2}}, m), std::invalid_argument);
    CHECK_THROWS_AS(apply_mapping({{"s1", -1}}, m), std::invalid_argument);
}

TEST_CASE("auto mapping picks the nearest seed category", "[evaluation]") {
    std::vector<std::string> words = {"food", "staff", "ambience", "price"};
    Matrix vecs(4, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1});
    EmbeddingMatrix E;
    E.words = words;
    for (int i = 0; i < 4; ++i) E.index[words[i]] = i;
    E.vectors = vecs;

    Matrix T(3, 3,
             {0.9, 0.1, 0.0,    // food-like
              0.2, 0.1, 0.9,    // ambience-like
              0.0, 0.95, 0.1}); // staff-like
    const AspectMapping m = auto_mapping(T, E);
    REQUIRE(m.k() == 3);
    CHECK(m.targets[0] == GoldCategory::Food);
    CHECK(m.targets[1] == GoldCategory::Ambience);
    CHECK(m.targets[2] == GoldCategory::Staff);

    SECTION("zero aspect rows are rejected") {
        Matrix zero(1, 3, {0, 0, 0});
        CHECK_THROWS_WITH(auto_mapping(zero, E), ContainsSubstring("zero aspect row"));
    }
    SECTION("missing every seed word is an error") {
        CHECK_THROWS_AS(auto_mapping(T, E, {{GoldCategory::Food, {"absent"}}}),
                        std::invalid_argument);
    }
    SECTION("equidistant rows keep the earlier category") {
        Matrix tie(1, 3, {1, 1, 0});  // same cosine to food and staff
        const AspectMapping t = auto_mapping(
            tie, E, {{GoldCategory::Food, {"food"}}, {GoldCategory::Staff, {"staff"}}});
        CHECK(t.targets[0] == GoldCategory::Food);
    }
}
