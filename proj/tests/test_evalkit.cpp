#include "corank/evalkit.hpp"
#include "metric_oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace corank;

namespace {

corank::Run run_of(const std::string& qid, const std::vector<std::string>& docs)
{
    ScoredList l{qid, {}};
    for (std::size_t i = 0; i < docs.size(); ++i) {
        l.entries.push_back({docs[i], static_cast<double>(docs.size() - i), 0});
    }
    return corank::Run::from_lists({l}, "t");
}

std::vector<std::string> ids(int count, const std::string& prefix = "d")
{
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(prefix + std::to_string(i));
    }
    return out;
}

}  // namespace

TEST(Precision, Examples)
{
    Qrels q;
    auto docs = ids(30);
    for (int i = 0; i < 5; ++i) {
        q.set("1", docs[static_cast<std::size_t>(i * 4)], 1);
    }
    EXPECT_DOUBLE_EQ(precision_at(run_of("1", docs), q, 20).mean, 0.25);

    Qrels all;
    for (int i = 0; i < 20; ++i) {
        all.set("1", docs[static_cast<std::size_t>(i)], 2);
    }
    EXPECT_DOUBLE_EQ(precision_at(run_of("1", docs), all, 20).mean, 1.0);

    Qrels four;
    auto ten = ids(10);
    for (int i : {0, 3, 6, 9}) {
        four.set("1", ten[static_cast<std::size_t>(i)], 1);
    }
    EXPECT_DOUBLE_EQ(precision_at(run_of("1", ten), four, 20).mean, 0.2);
    EXPECT_DOUBLE_EQ(precision_of({1, 0, 1, 0}, 20), 0.1);
    EXPECT_THROW(precision_of({1}, 0), std::invalid_argument);
}

TEST(Ndcg, WorkedExample)
{
    EXPECT_NEAR(ndcg_of({1, 0, 1}, {1, 1}, 20), 0.919721, 1e-6);
    EXPECT_NEAR(ndcg_of({1, 0, 1}, {1, 1}, 20), 1.5 / (1.0 + 1.0 / std::log2(3.0)), 1e-12);
    EXPECT_DOUBLE_EQ(ndcg_of({1, 1, 0}, {1, 1, 0}, 20), 1.0);
    EXPECT_DOUBLE_EQ(ndcg_of({0, 0}, {0, 0}, 20), 0.0);
    EXPECT_DOUBLE_EQ(ndcg_of({}, {}, 20), 0.0);
}

TEST(AveragePrecision, WorkedExample)
{
    EXPECT_NEAR(average_precision_of({1, 0, 1}, 2, 1000), 0.833333, 1e-6);
    EXPECT_NEAR(average_precision_of({1, 0, 1}, 2, 1000), (1.0 + 2.0 / 3.0) / 2.0, 1e-15);
    EXPECT_DOUBLE_EQ(average_precision_of({1}, 1, 1000), 1.0);
    EXPECT_LT(average_precision_of({1, 1}, 3, 1000), 1.0);
    EXPECT_DOUBLE_EQ(average_precision_of({0, 0}, 0, 1000), 0.0);
}

TEST(Metrics, MissingQueryContributesZero)
{
    Qrels q;
    q.set("1", "d0", 1);
    q.set("2", "x", 1);
    auto run = run_of("1", ids(3));
    EXPECT_DOUBLE_EQ(ndcg_at(run, q, 20).mean, 0.5);
    EXPECT_DOUBLE_EQ(map_at(run, q, 1000).mean, 0.5);
    EXPECT_DOUBLE_EQ(precision_at(run, q, 20).per_query.at("2"), 0.0);
    EXPECT_EQ(ndcg_at(run, q).values({"2", "1", "3"}), (std::vector<double>{0.0, 1.0, 0.0}));
}


TEST(Metrics, MatchBruteForceOracle)
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> grade(0, 3);
    for (int trial = 0; trial < 100; ++trial) {
        Qrels q;
        std::vector<ScoredList> lists;
        const int queries = 1 + static_cast<int>(rng() % 4);
        for (int qi = 0; qi < queries; ++qi) {
            const std::string qid = "q" + std::to_string(qi);
            auto pool = ids(12, qid + "-");
            // Up to 8 judged docs keeps the permutation oracle cheap.
            const std::size_t judged = rng() % 9;
            for (std::size_t j = 0; j < judged; ++j) {
                q.set(qid, pool[rng() % pool.size()], grade(rng));
            }
            std::shuffle(pool.begin(), pool.end(), rng);
            pool.resize(rng() % 13);
            if (qi == 0 || rng() % 4 != 0) {
                ScoredList l{qid, {}};
                for (std::size_t i = 0; i < pool.size(); ++i) {
                    l.entries.push_back({pool[i], -static_cast<double>(i), 0});
                }
                lists.push_back(l);
            }
        }
        const corank::Run run = corank::Run::from_lists(lists, "t");
        const std::size_t cut = 1 + rng() % 10;
        auto p = precision_at(run, q, cut);
        auto n = ndcg_at(run, q, cut);
        auto ap = map_at(run, q, cut);
        double sp = 0, sn = 0, sa = 0;
        for (auto const& qid : q.query_ids()) {
            std::vector<int> ranked;
            for (auto const& d : run.ranked_docs(qid)) {
                ranked.push_back(q.grade(qid, d));
            }
            const auto judged = q.grades(qid);
            const auto rel = static_cast<std::size_t>(std::count_if(judged.begin(), judged.end(), [](int g) { return g >= 1; }));
            const double op = oracle::precision(ranked, cut);
            const double on = oracle::ndcg(ranked, judged, cut);
            const double oa = oracle::average_precision(ranked, rel, cut);
            EXPECT_NEAR(p.per_query.at(qid), op, 1e-9);
            EXPECT_NEAR(n.per_query.at(qid), on, 1e-9);
            EXPECT_NEAR(ap.per_query.at(qid), oa, 1e-9);
            for (double v : {op, on, oa}) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0 + 1e-12);
            }
            sp += op;
            sn += on;
            sa += oa;
        }
        const double nq = static_cast<double>(q.query_ids().size());
        if (nq > 0) {
            EXPECT_NEAR(p.mean, sp / nq, 1e-9);
            EXPECT_NEAR(n.mean, sn / nq, 1e-9);
            EXPECT_NEAR(ap.mean, sa / nq, 1e-9);
        }
    }
}

TEST(Metrics, PromotingRelevantDocNeverHurts)
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> g(15);
        for (auto& x : g) {
            x = static_cast<int>(rng() % 3);
        }
        const std::size_t i = 1 + rng() % 14;
        if (g[i] == 0 || g[i - 1] != 0) {
            continue;
        }
        auto swapped = g;
        std::swap(swapped[i], swapped[i - 1]);
        const auto rel = static_cast<std::size_t>(std::count_if(g.begin(), g.end(), [](int x) { return x >= 1; }));
        EXPECT_GE(precision_of(swapped, 10), precision_of(g, 10));
        EXPECT_GE(ndcg_of(swapped, g, 10), ndcg_of(g, g, 10));
        EXPECT_GE(average_precision_of(swapped, rel, 10), average_precision_of(g, rel, 10));
    }
}

namespace {

// Two-tailed p by Simpson integration of the Student t density over [0, |t|].
double numeric_p(double t, double dof)
{
    const double c = std::exp(std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2)) / std::sqrt(dof * std::numbers::pi);
    auto pdf = [&](double x) { return c * std::pow(1 + x * x / dof, -(dof + 1) / 2); };
    const int steps = 20000;
    const double h = std::abs(t) / steps;
    double s = pdf(0) + pdf(std::abs(t));
    for (int i = 1; i < steps; ++i) {
        s += (i % 2 == 1 ? 4 : 2) * pdf(i * h);
    }
    return 1.0 - 2.0 * s * h / 3.0;
}

}  // namespace

TEST(TTest, WorkedExample)
{
    auto r = paired_t_test({2, 3, 4}, {1, 2, 2});
    EXPECT_NEAR(r.t, 4.0, 1e-12);
    EXPECT_EQ(r.dof, 2u);
    EXPECT_NEAR(r.p, 0.0572, 1e-3);
    EXPECT_NEAR(r.p, numeric_p(4.0, 2.0), 1e-9);
}

TEST(TTest, SymmetryAndIdentity)
{
    std::mt19937_64 rng(13);
    std::normal_distribution<double> d;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(10), b(10);
        for (std::size_t i = 0; i < 10; ++i) {
            a[i] = d(rng);
            b[i] = d(rng);
        }
        auto ab = paired_t_test(a, b);
        auto ba = paired_t_test(b, a);
        EXPECT_DOUBLE_EQ(ab.t, -ba.t);
        EXPECT_DOUBLE_EQ(ab.p, ba.p);
        EXPECT_NEAR(ab.p, numeric_p(ab.t, 9.0), 1e-8);
    }
    auto same = paired_t_test({0.1, 0.5, 0.7}, {0.1, 0.5, 0.7});
    EXPECT_EQ(same.t, 0.0);
    EXPECT_EQ(same.p, 1.0);
    EXPECT_THROW(paired_t_test({1, 2}, {1}), std::invalid_argument);
    EXPECT_THROW(paired_t_test({1}, {1}), std::invalid_argument);
}

TEST(TrecIo, ParseExamples)
{
    std::istringstream qin("301 0 FBIS3-1 1\n\n302 0 LA-7 0\n");
    auto q = parse_qrels(qin);
    EXPECT_EQ(q.grade("301", "FBIS3-1"), 1);
    EXPECT_EQ(q.grade("302", "LA-7"), 0);
    EXPECT_TRUE(q.has_query("302"));

    std::istringstream rin("301 Q0 FBIS3-1 1 12.5 corank\n");
    auto run = parse_run(rin);
    ASSERT_NE(run.rows("301"), nullptr);
    EXPECT_EQ(run.rows("301")->front(), (RunRow{"301", "FBIS3-1", 1, 12.5, "corank"}));
}

TEST(TrecIo, MalformedLinesNameTheLine)
{
    std::istringstream qin("301 0 A 1\n301 0 B\n");
    try {
        parse_qrels(qin, "qrels.txt");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("qrels.txt:2"), std::string::npos) << e.what();
    }
    std::istringstream rin("1 Q0 a 1 1.0 t\n1 Q0 b 2 notanumber t\n");
    try {
        parse_run(rin, "run.txt");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("run.txt:2"), std::string::npos) << e.what();
    }
}

TEST(TrecIo, RoundTripThousandRows)
{
    std::mt19937_64 rng(14);
    std::normal_distribution<double> score(0.0, 10.0);
    std::vector<ScoredList> lists;
    for (int q = 0; q < 10; ++q) {
        ScoredList l{std::to_string(300 + q), {}};
        for (int d = 0; d < 100; ++d) {
            l.entries.push_back({"DOC-" + std::to_string(rng() % 100000) + "-" + std::to_string(d), score(rng), 0});
        }
        l.sort();
        lists.push_back(l);
    }
    std::ostringstream out;
    write_run(out, lists, "corank");
    std::istringstream in(out.str());
    auto run = parse_run(in);
    auto rows = run.all_rows();
    ASSERT_EQ(rows.size(), 1000u);
    auto expected = corank::Run::from_lists(lists, "corank").all_rows();
    EXPECT_EQ(rows, expected);
    std::ostringstream again;
    write_run(again, run);
    EXPECT_EQ(again.str(), out.str());

    Qrels q;
    for (int i = 0; i < 1000; ++i) {
        q.set(std::to_string(i % 7), "D" + std::to_string(i), static_cast<int>(rng() % 4));
    }
    std::ostringstream qout;
    write_qrels(qout, q);
    std::istringstream qin(qout.str());
    EXPECT_EQ(parse_qrels(qin), q);
}

TEST(TrecIo, FormatDoubleRoundTrips)
{
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng);
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(12.5), "12.5");
}
