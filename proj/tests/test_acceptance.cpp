// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any fails. Arguments select criteria by number (default: all).

#include "benchmark.hpp"
#include "corank/flops.hpp"
#include "corank/grad_check.hpp"
#include "corank/pipeline.hpp"
#include "metric_oracle.hpp"
#include "toy.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

using namespace corank;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Records the first failure; later checks still run so the detail stays useful.
struct Checker {
    Outcome out;
    void require(bool ok, const std::string& what)
    {
        if (!ok && out.pass) {
            out.pass = false;
            out.detail = what;
        }
    }
};

Matrix<double> random_rows(Index r, Index c, std::mt19937_64& rng)
{
    std::normal_distribution<double> d;
    Matrix<double> m(r, c);
    for (Index i = 0; i < m.size(); ++i) {
        m.data()[i] = d(rng);
    }
    return m;
}

double max_abs(const Matrix<double>& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<std::size_t> ranks(std::size_t first, std::size_t last)
{
    std::vector<std::size_t> r(last - first + 1);
    std::iota(r.begin(), r.end(), first);
    return r;
}

Outcome scheduler()
{
    Checker c;
    const auto s = schedule_groups(1000, 200, 5);
    c.require(s.size() == 6, "expected six groups");
    const std::vector<std::pair<std::size_t, std::size_t>> expected{{1, 200},   {196, 395}, {391, 590},
                                                                    {586, 785}, {781, 980}, {976, 1000}};
    for (std::size_t g = 0; g < expected.size() && g < s.size(); ++g) {
        c.require(s.groups[g] == ranks(expected[g].first, expected[g].second), fmt::format("group {} differs", g + 1));
    }
    std::size_t cases = 0;
    for (std::size_t k = 1; k <= 50; ++k) {
        for (std::size_t n = 1; n <= 10; ++n) {
            for (std::size_t o = 0; o < n; ++o, ++cases) {
                const auto sch = schedule_groups(k, n, o);
                const std::string where = fmt::format("k={} n={} o={}", k, n, o);
                std::set<std::size_t> seen;
                for (std::size_t g = 0; g < sch.size(); ++g) {
                    const auto& grp = sch.groups[g];
                    c.require(!grp.empty() && grp.size() <= n, where + ": group size");
                    c.require(grp.front() == g * (n - o) + 1, where + ": group start");
                    if (g + 1 < sch.size()) {
                        c.require(grp.size() == n, where + ": only the last group may be short");
                        const std::set<std::size_t> a(grp.begin(), grp.end());
                        std::size_t shared = 0;
                        for (auto r : sch.groups[g + 1]) {
                            shared += a.count(r);
                        }
                        c.require(shared == o, where + ": overlap");
                    }
                    seen.insert(grp.begin(), grp.end());
                }
                c.require(seen.size() == k && *seen.begin() == 1 && *seen.rbegin() == k, where + ": coverage");
                c.require(sch.size() == 1 || sch.groups[sch.size() - 2].back() < k, where + ": redundant last group");
            }
        }
    }
    if (c.out.pass) {
        c.out.detail = fmt::format("six groups match; {} (k, n, o) cases covered", cases);
    }
    return c.out;
}

Outcome permutation_equivariance()
{
    Checker c;
    ModelConfig cfg = toy::model_config();
    cfg.group_size = 8;
    cfg.group_layers = 2;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        const CoBert<double> model(cfg, seed);
        const Matrix<double> x = random_rows(8, cfg.hidden, rng);
        const auto live = static_cast<Index>(1 + rng() % 8);
        std::vector<bool> mask(8, false);
        std::fill(mask.begin(), mask.begin() + live, true);
        std::vector<Index> perm(static_cast<std::size_t>(live));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Matrix<double> px = x;
        for (Index i = 0; i < live; ++i) {
            px.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
        }
        const auto a = model.score_group(Variant::group_only, std::nullopt, Tensor(x), mask).value();
        const auto b = model.score_group(Variant::group_only, std::nullopt, Tensor(px), mask).value();
        for (Index i = 0; i < live; ++i) {
            worst = std::max(worst, std::abs(b(i, 0) - a(perm[static_cast<std::size_t>(i)], 0)));
        }
    }
    c.require(worst < 1e-9, fmt::format("max deviation {:.3e}", worst));
    if (c.out.pass) {
        c.out.detail = fmt::format("100 seeds, max deviation {:.3e}", worst);
    }
    return c.out;
}

Outcome gradient_check()
{
    Checker c;
    const ModelConfig cfg = toy::model_config();
    CoBert<double> model(cfg, 3);
    const auto cands = toy::random_sequences(static_cast<std::size_t>(cfg.group_size), cfg, 1);
    const auto prf = toy::random_sequences(static_cast<std::size_t>(cfg.prf_docs), cfg, 2);
    const std::vector<int> labels{1, 0, 1, 0};
    const std::vector<bool> mask{true, true, true, false};
    GradCheckOptions opts;
    opts.coords_per_parameter = 6;
    const auto report =
        grad_check(model.params(), [&] { return toy::end_to_end_loss(model, cands, prf, labels, mask); }, opts);
    c.require(report.coordinates >= 200, fmt::format("only {} coordinates sampled", report.coordinates));
    c.require(report.max_error < 1e-4,
              fmt::format("max relative error {:.3e} in {}", report.max_error, report.worst_parameter));
    if (c.out.pass) {
        c.out.detail = fmt::format("{} coordinates, max relative error {:.3e}", report.coordinates, report.max_error);
    }
    return c.out;
}

Outcome calibration_algebra()
{
    Checker c;
    const EncoderConfig cfg = calibration_encoder_config(16, 2, 2);
    const std::string prefix = "cal.";
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ParameterStore<double> store;
        init_calibrator_params(store, cfg, prefix, seed);
        store.get("cal.proto.w").mutable_value() = random_rows(16, 1, rng);
        for (Index m = 1; m <= 6; ++m) {
            const auto w = prototype_weights(store, prefix, Tensor(random_rows(m, 16, rng))).value();
            c.require(std::abs(w.sum() - 1.0) < 1e-12, fmt::format("weights sum to {:.17g}", w.sum()));
        }
        const Matrix<double> r = random_rows(5, 16, rng);

        const Matrix<double> one = random_rows(1, 16, rng);
        const auto single = calibrate(store, cfg, prefix, Tensor(one), Tensor(r), true);
        c.require(single.weights.value()(0, 0) == 1.0, "single prototype weight is not 1");
        c.require(max_abs(single.combined.value() - single.pairwise.value()) < 1e-12, "m=1 does not collapse");

        const Matrix<double> same = random_rows(1, 16, rng).replicate(4, 1);
        const auto uniform = prototype_weights(store, prefix, Tensor(same)).value();
        c.require((uniform.array() - 0.25).abs().maxCoeff() < 1e-12, "identical prototypes are not uniform");

        const Matrix<double> t = random_rows(3, 16, rng);
        const auto with = calibrate(store, cfg, prefix, Tensor(t), Tensor(r), true);
        c.require(max_abs(2.0 * with.calibrated.value() - with.combined.value() - r) < 1e-12,
                  "residual identity fails");
        const auto without = calibrate(store, cfg, prefix, Tensor(t), Tensor(r), false);
        c.require(without.calibrated.value() == without.combined.value(), "no-residual output differs from r'");
    }
    if (c.out.pass) {
        c.out.detail = "20 seeds, m = 1..6";
    }
    return c.out;
}

Outcome synthetic_effectiveness()
{
    Checker c;
    const std::vector<Variant> variants{Variant::full, Variant::group_only, Variant::prf_only};
    std::map<Variant, double> sums;
    std::string per_seed;
    double slowest = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        for (Variant v : variants) {
            const auto r = synthetic::run_benchmark(synthetic::default_benchmark(v, seed));
            sums[v] += r.test_ndcg;
            slowest = std::max(slowest, r.seconds);
            per_seed += fmt::format(" {}/{}={:.3f}", to_string(v), seed, r.test_ndcg);
            std::cerr << fmt::format("  seed {} {}: nDCG@20 {:.4f} ({:.0f} s)\n", seed, to_string(v), r.test_ndcg,
                                     r.seconds);
        }
    }
    const double full = sums[Variant::full] / 3.0;
    const double group = sums[Variant::group_only] / 3.0;
    const double prf = sums[Variant::prf_only] / 3.0;
    c.require(full > group && full > prf, "full is not strictly best");
    c.require(slowest < 15 * 60, fmt::format("slowest run took {:.0f} s", slowest));
    const std::string means =
        fmt::format("mean nDCG@20 full {:.4f}, group-only {:.4f}, prf-only {:.4f}; slowest run {:.0f} s;", full,
                    group, prf, slowest);
    c.out.detail = c.out.pass ? means + per_seed : c.out.detail + "; " + means + per_seed;
    return c.out;
}

Outcome metrics_oracle()
{
    Checker c;
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> grade(0, 3);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Qrels qrels;
        std::vector<ScoredList> lists;
        const int queries = 1 + static_cast<int>(rng() % 5);
        for (int qi = 0; qi < queries; ++qi) {
            const std::string qid = std::to_string(qi + 1);
            std::vector<std::string> pool;
            for (int d = 0; d < 40; ++d) {
                pool.push_back(qid + "-d" + std::to_string(d));
            }
            // At most 8 judged documents keeps the permutation oracle cheap.
            const std::size_t judged = rng() % 9;
            for (std::size_t j = 0; j < judged; ++j) {
                qrels.set(qid, pool[rng() % pool.size()], grade(rng));
            }
            std::shuffle(pool.begin(), pool.end(), rng);
            pool.resize(rng() % 41);
            if (qi == 0 || rng() % 4 != 0) {
                ScoredList l{qid, {}};
                for (std::size_t i = 0; i < pool.size(); ++i) {
                    l.entries.push_back({pool[i], -static_cast<double>(i), 0});
                }
                lists.push_back(l);
            }
        }
        const Run run = Run::from_lists(lists, "oracle");
        const auto p = precision_at(run, qrels, 20);
        const auto n = ndcg_at(run, qrels, 20);
        const auto ap = map_at(run, qrels, 1000);
        double sp = 0, sn = 0, sa = 0;
        for (auto const& qid : qrels.query_ids()) {
            std::vector<int> ranked;
            for (auto const& d : run.ranked_docs(qid)) {
                ranked.push_back(qrels.grade(qid, d));
            }
            const auto judged = qrels.grades(qid);
            const auto rel = static_cast<std::size_t>(
                std::count_if(judged.begin(), judged.end(), [](int g) { return g >= 1; }));
            const double op = oracle::precision(ranked, 20);
            const double on = oracle::ndcg(ranked, judged, 20);
            const double oa = oracle::average_precision(ranked, rel, 1000);
            worst = std::max({worst, std::abs(p.per_query.at(qid) - op), std::abs(n.per_query.at(qid) - on),
                              std::abs(ap.per_query.at(qid) - oa)});
            sp += op;
            sn += on;
            sa += oa;
        }
        const double nq = static_cast<double>(qrels.query_ids().size());
        if (nq > 0) {
            worst = std::max({worst, std::abs(p.mean - sp / nq), std::abs(n.mean - sn / nq),
                              std::abs(ap.mean - sa / nq)});
        }
    }
    c.require(worst < 1e-9, fmt::format("oracle deviation {:.3e}", worst));
    const double ndcg = ndcg_of({1, 0, 1}, {1, 1}, 20);
    const double avp = average_precision_of({1, 0, 1}, 2, 1000);
    c.require(std::abs(ndcg - 0.919721) < 1e-6, fmt::format("worked nDCG {:.6f}", ndcg));
    c.require(std::abs(avp - 0.833333) < 1e-6, fmt::format("worked AP {:.6f}", avp));
    if (c.out.pass) {
        c.out.detail = fmt::format("100 instances, max deviation {:.3e}; nDCG {:.6f}, AP {:.6f}", worst, ndcg, avp);
    }
    return c.out;
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

Outcome flops_arithmetic()
{
    Checker c;
    const double robust_base = 59356.224e12;
    const double gov2_base = 160364.645e12;
    const auto bert = pipeline_flops("BERT-Base", 249, {2729808, robust_base}, {0, 0});
    c.require(round3(bert.per_query / 1e12) == 238.378, fmt::format("BERT {:.3f} T/query", bert.per_query / 1e12));
    const std::vector<std::pair<FlopsReport, double>> rows{
        {pipeline_flops("Co-BERT", 249, {2729808, robust_base}, {288000, 6301.095e12}), 1.106},
        {pipeline_flops("group-only", 249, {2729808, robust_base}, {256000, 5594.176e12}), 1.094},
        {pipeline_flops("Co-BERT", 150, {7375231, gov2_base}, {172800, 3780.657e12}), 1.024},
        {pipeline_flops("group-only", 150, {7375231, gov2_base}, {153600, 3356.505e12}), 1.021},
    };
    std::string ratios;
    for (auto const& [report, expected] : rows) {
        c.require(round3(report.ratio) == expected, fmt::format("{} ratio {:.4f}", report.model, report.ratio));
        ratios += fmt::format(" {:.3f}x", report.ratio);
    }

    double worst = 0.0;
    for (int layers : {1, 2, 3}) {
        for (int len : {8, 16}) {
            EncoderConfig cfg;
            cfg.hidden = 32;
            cfg.heads = 4;
            cfg.layers = layers;
            cfg.max_positions = 16;
            cfg.vocab_size = 50;
            const auto store = init_encoder_params<double>(cfg, 1);
            TokenBatch batch;
            batch.seq_len = len;
            for (Index i = 0; i < len; ++i) {
                batch.token_ids.push_back(kFirstWordId + i);
                batch.segment_ids.push_back(i < len / 2 ? 0 : 1);
                batch.mask.push_back(true);
            }
            FlopCounter counter;
            encode_tokens(store, cfg, "", batch);
            const double analytic = static_cast<double>(encoder_flops(cfg, static_cast<std::uint64_t>(len)));
            worst = std::max(worst, std::abs(analytic - static_cast<double>(counter.count())) / analytic);
        }
    }
    c.require(worst < 0.01, fmt::format("encoder_flops off by {:.2f}%", 100 * worst));
    if (c.out.pass) {
        c.out.detail = fmt::format("238.378 T/query, ratios{}; encoder count within {:.3f}%", ratios, 100 * worst);
    }
    return c.out;
}

Outcome cv_harness()
{
    Checker c;
    std::vector<std::string> ids;
    for (int i = 1; i <= 150; ++i) {
        ids.push_back(std::to_string(i));
    }
    const auto parts = round_robin_partitions(ids);
    c.require(parts.size() == 5, "expected five partitions");
    std::multiset<std::string> all;
    for (auto const& p : parts) {
        c.require(p.size() == 30, fmt::format("partition of size {}", p.size()));
        all.insert(p.begin(), p.end());
    }
    c.require(all.size() == 150 && std::set<std::string>(all.begin(), all.end()).size() == 150,
              "partitions overlap or miss queries");
    const auto folds = cv_split(ids);
    std::multiset<std::string> tested;
    for (auto const& f : folds) {
        tested.insert(f.test.begin(), f.test.end());
        std::set<std::string> u(f.train.begin(), f.train.end());
        u.insert(f.validation.begin(), f.validation.end());
        u.insert(f.test.begin(), f.test.end());
        c.require(u.size() == 150 && f.train.size() + f.validation.size() + f.test.size() == 150,
                  "fold roles overlap");
    }
    for (auto const& id : ids) {
        c.require(tested.count(id) == 1, "query " + id + " not tested exactly once");
    }
    c.require(select_model({0.3, 0.5, 0.5, 0.1}) == 1, "tie not broken toward the earliest checkpoint");
    c.require(select_model({0.1, 0.2, 0.9}) == 2, "argmax not selected");
    c.require(select_model({0.4}) == 0, "single checkpoint not selected");
    if (c.out.pass) {
        c.out.detail = "5 x 30, each query tested once; argmax with earliest tie";
    }
    return c.out;
}

Outcome loss_values()
{
    Checker c;
    const double sym = pointwise_loss({0.5, 0.5}, {1, 0}, {true, true});
    c.require(std::abs(sym - 2.0 * std::log(2.0)) < 1e-12, fmt::format("symmetric loss {:.17g}", sym));
    const double perfect = pointwise_loss({1.0, 0.0, 1.0}, {1, 0, 1}, {true, true, true});
    c.require(perfect >= 0.0 && perfect < 1e-10, fmt::format("perfect-prediction loss {:.3e}", perfect));
    if (c.out.pass) {
        c.out.detail = fmt::format("2 ln 2 = {:.15f}; perfect = {:.3e}", sym, perfect);
    }
    return c.out;
}

/// Trains and re-ranks once; returns the run file and snapshot bytes.
std::pair<std::string, std::string> train_and_rerank()
{
    synthetic::Options so;
    so.queries = 8;
    so.docs_per_query = 16;
    so.relevant = 3;
    so.decoys = 4;
    so.pool = 4;
    so.filler = 20;
    so.query_terms = 8;
    so.doc_length = 6;
    so.seed = 11;
    const auto data = synthetic::generate(so);
    ModelConfig cfg = toy::model_config();
    cfg.vocab_size = 200;
    cfg.candidates = 16;
    const Vocabulary vocab(cfg.vocab_size, data.words);
    const auto view = synthetic::training_view(data, vocab);
    TrainConfig tc;
    tc.epochs = 2;
    tc.base_lr = 1e-3;
    tc.seed = 4;
    CoBert<double> model(cfg, tc.seed);
    train(model, view, {"1", "2", "3", "4", "5"}, {"6"}, tc);
    std::vector<ScoredList> lists;
    for (auto const& q : std::vector<std::string>{"7", "8"}) {
        lists.push_back(rerank_query(model, vocab, q, view.queries.at(q), view.candidates.at(q), data.corpus));
    }
    std::ostringstream run;
    write_run(run, lists, "determinism");
    return {run.str(), snapshot_bytes(model.params())};
}

Outcome determinism()
{
    Checker c;
    const auto a = train_and_rerank();
    const auto b = train_and_rerank();
    c.require(!a.first.empty() && a.first == b.first, "run files differ");
    c.require(!a.second.empty() && a.second == b.second, "snapshots differ");
    if (c.out.pass) {
        c.out.detail = fmt::format("run file {} bytes, snapshot {} bytes identical", a.first.size(), a.second.size());
    }
    return c.out;
}

struct Criterion {
    const char* name;
    Outcome (*run)();
    double limit_seconds;  // 0: the criterion checks its own timing
};

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria{
        {"scheduler oracle", scheduler, 1},
        {"permutation equivariance", permutation_equivariance, 30},
        {"gradient check", gradient_check, 120},
        {"calibration algebra", calibration_algebra, 0},
        {"synthetic effectiveness ordering", synthetic_effectiveness, 0},
        {"metrics oracle", metrics_oracle, 0},
        {"FLOPs arithmetic", flops_arithmetic, 0},
        {"CV harness", cv_harness, 0},
        {"loss values", loss_values, 0},
        {"determinism", determinism, 0},
    };
    std::set<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        selected.insert(std::stoul(argv[i]));
    }
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected.empty() && selected.count(i + 1) == 0) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criteria[i].limit_seconds > 0 && secs >= criteria[i].limit_seconds) {
            out.pass = false;
            out.detail += fmt::format("; over the {:.0f} s limit", criteria[i].limit_seconds);
        }
        failures += out.pass ? 0 : 1;
        std::cout << fmt::format("[{}] {:2}. {}: {} ({:.2f} s)", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                                 out.detail, secs)
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
