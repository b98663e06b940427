// corank command-line interface.

#include "corank/config.hpp"
#include "corank/flops.hpp"

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <set>

namespace fs = std::filesystem;
using namespace corank;

namespace {

std::vector<std::string> g_args;

struct ManifestInfo {
    std::string command;
    std::optional<ExperimentConfig> config;
    std::map<std::string, std::string> inputs;
    std::vector<std::string> outputs;
};

void write_manifest(const fs::path& path, const ManifestInfo& info)
{
    nlohmann::ordered_json j;
    j["command"] = info.command;
    j["arguments"] = g_args;
    if (info.config) {
        j["config_hash"] = config_hash(*info.config);
        j["seed"] = info.config->model.seed;
        j["config"] = config_text(*info.config);
    }
    j["inputs"] = info.inputs;
    j["outputs"] = info.outputs;
    j["versions"] = {{"corank", CORANK_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "."
                                   + std::to_string(EIGEN_MINOR_VERSION)},
                     {"boost", BOOST_LIB_VERSION},
                     {"compiler", __VERSION__}};
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << j.dump(2) << '\n';
}

fs::path manifest_for(const fs::path& output) { return output.string() + ".manifest.json"; }

void ensure_parent(const fs::path& path)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
}

ExperimentConfig load_config(const std::string& path)
{
    if (path.empty()) {
        ExperimentConfig cfg;
        cfg.train.seed = cfg.model.seed;
        return cfg;
    }
    return read_config(path);
}

std::map<std::string, std::string> query_map(const std::vector<Query>& queries)
{
    std::map<std::string, std::string> out;
    for (auto const& q : queries) {
        out[q.query_id] = q.text;
    }
    return out;
}

/// Initial top-k pools per query, checked against the corpus.
std::map<std::string, std::vector<std::string>> candidate_pools(const corank::Run& initial, const std::string& run_path,
                                                                const std::map<std::string, std::string>& queries,
                                                                const Corpus& corpus, std::size_t k)
{
    std::map<std::string, std::vector<std::string>> pools;
    for (auto const& qid : initial.query_ids()) {
        if (queries.count(qid) == 0) {
            continue;
        }
        auto docs = initial.ranked_docs(qid);
        if (docs.size() > k) {
            docs.resize(k);
        }
        for (auto const& d : docs) {
            if (!corpus.contains(d)) {
                throw std::runtime_error(run_path + ": document " + d + " (query " + qid + ") is not in the corpus");
            }
        }
        pools[qid] = std::move(docs);
    }
    return pools;
}

struct TrainInputs {
    std::string config, corpus, queries, qrels, run, out, split, variant, order;
    int fold = -1;
    int epochs = 0;
    bool no_residual = false;
};

void cmd_index(const std::string& corpus_path, const std::string& out_dir)
{
    const Corpus corpus = read_corpus_jsonl(corpus_path);
    const auto index = InvertedIndex::build(corpus);
    fs::create_directories(out_dir);
    index.save(fs::path(out_dir) / "index.bin");
    write_manifest(fs::path(out_dir) / "manifest.json",
                   {"index", std::nullopt, {{"corpus", corpus_path}}, {(fs::path(out_dir) / "index.bin").string()}});
    std::cout << "indexed " << index.num_docs() << " documents, " << index.postings().size() << " terms\n";
}

void cmd_search(const std::string& index_dir, const std::string& queries_path, std::size_t k, const std::string& out,
                const std::string& tag, const std::string& config_path)
{
    const auto cfg = load_config(config_path);
    fs::path index_file = index_dir;
    if (fs::is_directory(index_file)) {
        index_file /= "index.bin";
    }
    const auto index = InvertedIndex::load(index_file);
    const auto queries = read_queries_tsv(queries_path);
    std::vector<ScoredList> lists;
    for (auto const& q : queries) {
        lists.push_back(index.search(q.query_id, split_words(q.text), k, cfg.bm25));
    }
    ensure_parent(out);
    write_run(fs::path(out), lists, tag);
    write_manifest(manifest_for(out), {"search",
                                       config_path.empty() ? std::nullopt : std::optional(cfg),
                                       {{"index", index_file.string()}, {"queries", queries_path}},
                                       {out}});
}

void cmd_cv(const std::string& queries_path, const std::string& qrels_path, std::size_t folds, const std::string& out)
{
    std::vector<std::string> ids;
    std::map<std::string, std::string> inputs;
    if (!queries_path.empty()) {
        for (auto const& q : read_queries_tsv(queries_path)) {
            ids.push_back(q.query_id);
        }
        inputs["queries"] = queries_path;
    } else {
        ids = parse_qrels(fs::path(qrels_path)).query_ids();
        inputs["qrels"] = qrels_path;
    }
    const auto parts = round_robin_partitions(ids, folds);
    ensure_parent(out);
    write_partitions(out, parts);
    write_manifest(manifest_for(out), {"cv", std::nullopt, inputs, {out}});
    for (std::size_t p = 0; p < parts.size(); ++p) {
        std::cout << "partition " << p << ": " << parts[p].size() << " queries\n";
    }
}

void apply_overrides(ExperimentConfig& cfg, const std::string& variant, const std::string& order, bool no_residual,
                     int epochs)
{
    if (!variant.empty()) {
        cfg.train.variant = parse_variant(variant);
    }
    if (!order.empty()) {
        cfg.train.order = parse_feed_order(order);
    }
    if (no_residual) {
        cfg.model.residual = false;
    }
    if (epochs > 0) {
        cfg.train.epochs = epochs;
    }
    cfg.validate();
}

void write_history(const fs::path& path, const TrainResult& result)
{
    std::ofstream out(path);
    out << "epoch\tmean_loss\tvalidation_ndcg20\tselected\n";
    for (std::size_t i = 0; i < result.history.size(); ++i) {
        const auto& r = result.history[i];
        out << r.epoch << '\t' << format_double(r.mean_loss) << '\t' << format_double(r.validation_ndcg) << '\t'
            << (i == result.selected ? 1 : 0) << '\n';
    }
}

void cmd_train(const TrainInputs& in)
{
    auto cfg = load_config(in.config);
    apply_overrides(cfg, in.variant, in.order, in.no_residual, in.epochs);
    const Corpus corpus = read_corpus_jsonl(in.corpus);
    const auto queries = query_map(read_queries_tsv(in.queries));
    const Qrels qrels = parse_qrels(fs::path(in.qrels));
    const auto initial = parse_run(fs::path(in.run));
    const Vocabulary vocab(cfg.model.vocab_size, {});

    TrainingData data;
    data.corpus = &corpus;
    data.vocab = &vocab;
    data.qrels = &qrels;
    data.candidates = candidate_pools(initial, in.run, queries, corpus, static_cast<std::size_t>(cfg.model.candidates));
    for (auto const& [qid, _] : data.candidates) {
        data.queries[qid] = tokenize(queries.at(qid), vocab);
    }
    auto present = [&](const std::vector<std::string>& ids) {
        std::vector<std::string> out;
        for (auto const& q : ids) {
            if (data.candidates.count(q) != 0) {
                out.push_back(q);
            }
        }
        return out;
    };

    const ManifestInfo base{"train", cfg,
                            {{"config", in.config}, {"corpus", in.corpus}, {"queries", in.queries},
                             {"qrels", in.qrels}, {"run", in.run}, {"split", in.split}},
                            {}};
    fs::create_directories(in.out);
    std::ofstream(fs::path(in.out) / "config.txt") << config_text(cfg);
    auto log = [](const std::string& msg) { std::cerr << msg << '\n'; };

    auto run_one = [&](const fs::path& dir, const std::vector<std::string>& train_ids,
                       const std::vector<std::string>& val_ids) {
        fs::create_directories(dir);
        CoBert<double> model(cfg.model, cfg.model.seed);
        const auto result = train(model, data, train_ids, val_ids, cfg.train, log);
        const auto& sel = result.history[result.selected];
        write_checkpoint(dir / "checkpoint.bin", cfg, {sel.epoch, sel.validation_ndcg}, model.params());
        write_history(dir / "history.tsv", result);
        std::cout << dir.string() << ": selected epoch " << sel.epoch << " (validation nDCG@20 "
                  << format_double(sel.validation_ndcg) << ")\n";
        return std::vector<std::string>{(dir / "checkpoint.bin").string(), (dir / "history.tsv").string()};
    };

    ManifestInfo manifest = base;
    if (in.split.empty()) {
        std::vector<std::string> ids;
        for (auto const& [qid, _] : data.candidates) {
            ids.push_back(qid);
        }
        manifest.outputs = run_one(in.out, ids, {});
    } else {
        const auto folds = folds_from_partitions(read_partitions(in.split));
        if (in.fold >= static_cast<int>(folds.size())) {
            throw std::invalid_argument("--fold " + std::to_string(in.fold) + " is out of range for " + in.split);
        }
        for (std::size_t f = 0; f < folds.size(); ++f) {
            if (in.fold >= 0 && static_cast<std::size_t>(in.fold) != f) {
                continue;
            }
            auto outs = run_one(fs::path(in.out) / ("fold" + std::to_string(f)), present(folds[f].train),
                                present(folds[f].validation));
            manifest.outputs.insert(manifest.outputs.end(), outs.begin(), outs.end());
        }
    }
    write_manifest(fs::path(in.out) / "manifest.json", manifest);
}

struct RerankInputs {
    std::string checkpoint, model_dir, split, corpus, queries, run, out, variant, tag;
    bool no_residual = false;
    int prf_docs = 0;
};

void cmd_rerank(const RerankInputs& in)
{
    if (in.checkpoint.empty() == (in.model_dir.empty() || in.split.empty())) {
        throw std::invalid_argument("rerank: give either --checkpoint or both --model-dir and --split");
    }
    const Corpus corpus = read_corpus_jsonl(in.corpus);
    const auto queries = query_map(read_queries_tsv(in.queries));
    const auto initial = parse_run(fs::path(in.run));

    // (checkpoint path, query ids it scores); an empty id list means every query.
    std::vector<std::pair<fs::path, std::vector<std::string>>> jobs;
    if (!in.checkpoint.empty()) {
        jobs.push_back({in.checkpoint, {}});
    } else {
        const auto parts = read_partitions(in.split);
        for (std::size_t f = 0; f < parts.size(); ++f) {
            jobs.push_back({fs::path(in.model_dir) / ("fold" + std::to_string(f)) / "checkpoint.bin", parts[f]});
        }
    }

    std::vector<ScoredList> lists;
    std::optional<ExperimentConfig> first_cfg;
    std::string tag = in.tag;
    std::map<std::string, std::string> inputs{{"corpus", in.corpus}, {"queries", in.queries}, {"run", in.run}};
    for (auto const& [path, ids] : jobs) {
        auto ck = read_checkpoint(path);
        inputs["checkpoint:" + path.string()] = config_hash(ck.config);
        if (in.prf_docs > 0) {
            ck.config.model.prf_docs = in.prf_docs;
        }
        const Variant variant = in.variant.empty() ? ck.config.train.variant : parse_variant(in.variant);
        const std::optional<bool> residual = in.no_residual ? std::optional(false) : std::nullopt;
        ck.config.train.variant = variant;
        if (in.no_residual) {
            ck.config.model.residual = false;
        }
        if (!first_cfg) {
            first_cfg = ck.config;
        }
        if (tag.empty()) {
            tag = "corank-" + std::string(to_string(variant));
        }
        const CoBert<double> model(ck.config.model, std::move(ck.params));
        const Vocabulary vocab(ck.config.model.vocab_size, {});
        const auto pools = candidate_pools(initial, in.run, queries, corpus,
                                           static_cast<std::size_t>(ck.config.model.candidates));
        const std::set<std::string> wanted(ids.begin(), ids.end());
        for (auto const& [qid, pool] : pools) {
            if (!wanted.empty() && wanted.count(qid) == 0) {
                continue;
            }
            lists.push_back(rerank_query(model, vocab, qid, tokenize(queries.at(qid), vocab), pool, corpus,
                                         RerankOptions{variant, residual}));
        }
    }
    std::sort(lists.begin(), lists.end(), [](auto& a, auto& b) { return a.query_id < b.query_id; });
    ensure_parent(in.out);
    write_run(fs::path(in.out), lists, tag);
    write_manifest(manifest_for(in.out), {"rerank", first_cfg, inputs, {in.out}});
}

void cmd_eval(const std::string& run_path, const std::string& qrels_path, std::size_t cut, std::size_t map_cut,
              const std::string& baseline, const std::string& out_path)
{
    const auto run = parse_run(fs::path(run_path));
    const Qrels qrels = parse_qrels(fs::path(qrels_path));
    const std::string p_name = "P@" + std::to_string(cut);
    const std::string n_name = "nDCG@" + std::to_string(cut);
    const std::string m_name = "MAP@" + std::to_string(map_cut);
    const auto p = precision_at(run, qrels, cut);
    const auto n = ndcg_at(run, qrels, cut);
    const auto m = map_at(run, qrels, map_cut);

    std::ostringstream text;
    text << p_name << "\tall\t" << format_double(p.mean) << '\n'
         << n_name << "\tall\t" << format_double(n.mean) << '\n'
         << m_name << "\tall\t" << format_double(m.mean) << '\n';
    std::map<std::string, std::string> inputs{{"run", run_path}, {"qrels", qrels_path}};
    if (!baseline.empty()) {
        inputs["baseline"] = baseline;
        const auto base = parse_run(fs::path(baseline));
        const auto ids = qrels.query_ids();
        const std::vector<std::pair<std::string, std::pair<MetricResult, MetricResult>>> pairs{
            {p_name, {p, precision_at(base, qrels, cut)}},
            {n_name, {n, ndcg_at(base, qrels, cut)}},
            {m_name, {m, map_at(base, qrels, map_cut)}}};
        for (auto const& [name, mr] : pairs) {
            const auto t = paired_t_test(mr.first.values(ids), mr.second.values(ids));
            text << "t-test\t" << name << "\tbaseline=" << format_double(mr.second.mean)
                 << "\tt=" << format_double(t.t) << "\tp=" << format_double(t.p) << '\n';
        }
    }
    std::cout << text.str();
    if (!out_path.empty()) {
        ensure_parent(out_path);
        std::ofstream(out_path) << text.str();
        write_manifest(manifest_for(out_path), {"eval", std::nullopt, inputs, {out_path}});
    }
}

std::vector<FlopsReport> published_table()
{
    struct Row {
        const char* model;
        std::size_t q;
        double p1, f1, p2, f2, base;
    };
    const double robust = 59356.224;
    const double gov2 = 160364.645;
    const std::vector<Row> rows{
        {"Robust04 BERT-Base", 249, 2729808, robust, 0, 0, robust},
        {"Robust04 Co-BERT", 249, 2729808, robust, 288000, 6301.095, robust},
        {"Robust04 Co-BERT prf-only", 249, 2729808, robust, 288000, 6293.448, robust},
        {"Robust04 Co-BERT group-only", 249, 2729808, robust, 256000, 5594.176, robust},
        {"GOV2 BERT-Base", 150, 7375231, gov2, 0, 0, gov2},
        {"GOV2 Co-BERT", 150, 7375231, gov2, 172800, 3780.657, gov2},
        {"GOV2 Co-BERT prf-only", 150, 7375231, gov2, 172800, 3776.069, gov2},
        {"GOV2 Co-BERT group-only", 150, 7375231, gov2, 153600, 3356.505, gov2},
    };
    std::vector<FlopsReport> out;
    for (auto const& r : rows) {
        out.push_back(pipeline_flops(r.model, r.q, {r.p1, r.f1 * 1e12}, {r.p2, r.f2 * 1e12}, r.base * 1e12));
    }
    return out;
}

void cmd_flops(const std::string& config_path, std::size_t queries, std::size_t k, double avg_passages, bool published,
               const std::string& out_path)
{
    std::vector<FlopsReport> reports;
    std::optional<ExperimentConfig> used;
    double unit = 1e12;
    if (published) {
        reports = published_table();
    } else {
        const auto cfg = load_config(config_path);
        used = cfg;
        unit = 1e9;
        const std::size_t pool = k > 0 ? k : static_cast<std::size_t>(cfg.model.candidates);
        const double qd = static_cast<double>(queries);
        const auto base = cobert_query_cost(cfg.model, Variant::full, pool, avg_passages);
        reports.push_back(pipeline_flops("single-pass", queries, {base.first_pass.passages * qd, base.first_pass.flops * qd},
                                         {0, 0}));
        for (auto v : {Variant::full, Variant::prf_only, Variant::group_only}) {
            const auto c = cobert_query_cost(cfg.model, v, pool, avg_passages);
            reports.push_back(pipeline_flops("co-bert " + std::string(to_string(v)), queries,
                                             {c.first_pass.passages * qd, c.first_pass.flops * qd},
                                             {c.second_pass.passages * qd, c.second_pass.flops * qd}));
        }
    }
    std::ostringstream text;
    write_flops_tsv(text, reports, unit);
    std::cout << text.str();
    if (!out_path.empty()) {
        ensure_parent(out_path);
        std::ofstream(out_path) << text.str();
        write_manifest(manifest_for(out_path), {"flops", used, {{"config", config_path}}, {out_path}});
    }
}

}  // namespace

int main(int argc, char** argv)
{
    g_args.assign(argv + 1, argv + argc);
    CLI::App app{"corank: context-aware BERT re-ranking with PRF calibration and groupwise scoring"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(CORANK_VERSION));

    std::string corpus, out, index_dir, queries, tag = "bm25", config, qrels, run, split, variant, order, checkpoint,
                                                     model_dir, baseline;
    std::string rerank_tag;
    std::size_t k = 1000;
    std::size_t folds = 5;
    std::size_t cut = 20;
    std::size_t map_cut = 1000;
    std::size_t nq = 1;
    double avg_passages = 1.0;
    int fold = -1;
    int epochs = 0;
    int prf_docs = 0;
    bool no_residual = false;
    bool published = false;

    auto* index = app.add_subcommand("index", "Build a BM25 inverted index from a JSONL corpus");
    index->add_option("--corpus", corpus, "corpus JSONL ({\"doc_id\", \"text\"} per line)")
        ->required()
        ->check(CLI::ExistingFile);
    index->add_option("--out", out, "output directory")->required();

    auto* search = app.add_subcommand("search", "Rank queries with BM25 and write a TREC run");
    search->add_option("--index", index_dir, "index directory or file")->required()->check(CLI::ExistingPath);
    search->add_option("--queries", queries, "queries TSV (qid<TAB>text)")->required()->check(CLI::ExistingFile);
    search->add_option("--k", k, "documents per query")->check(CLI::PositiveNumber);
    search->add_option("--out", out, "output run file")->required();
    search->add_option("--tag", tag, "run tag");
    search->add_option("--config", config, "config file (bm25_k1, bm25_b)")->check(CLI::ExistingFile);

    auto* train_cmd = app.add_subcommand("train", "Train the re-ranker, optionally per cross-validation fold");
    train_cmd->add_option("--config", config, "config file")->check(CLI::ExistingFile);
    train_cmd->add_option("--corpus", corpus, "corpus JSONL")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--queries", queries, "queries TSV")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--qrels", qrels, "relevance judgments")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--run", run, "initial ranking supplying the candidate pools")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--out", out, "output directory")->required();
    train_cmd->add_option("--split", split, "partition file from `corank cv`")->check(CLI::ExistingFile);
    train_cmd->add_option("--fold", fold, "train only this fold (default: all)");
    train_cmd->add_option("--variant", variant, "full, prf-only or group-only");
    train_cmd->add_option("--order", order, "batch feeding order: shuffled, initial or reversed");
    train_cmd->add_option("--epochs", epochs, "override the configured epoch count")->check(CLI::PositiveNumber);
    train_cmd->add_flag("--no-residual", no_residual, "disable averaging calibrated and original vectors");

    auto* rerank = app.add_subcommand("rerank", "Re-rank an initial run with a trained checkpoint");
    rerank->add_option("--checkpoint", checkpoint, "checkpoint used for every query")->check(CLI::ExistingFile);
    rerank->add_option("--model-dir", model_dir, "directory of per-fold checkpoints from `corank train --split`")
        ->check(CLI::ExistingDirectory);
    rerank->add_option("--split", split, "partition file; fold f's checkpoint scores partition f")
        ->check(CLI::ExistingFile);
    rerank->add_option("--corpus", corpus, "corpus JSONL")->required()->check(CLI::ExistingFile);
    rerank->add_option("--queries", queries, "queries TSV")->required()->check(CLI::ExistingFile);
    rerank->add_option("--run", run, "initial ranking")->required()->check(CLI::ExistingFile);
    rerank->add_option("--out", out, "output run file")->required();
    rerank->add_option("--variant", variant, "full, prf-only or group-only (default: as trained)");
    rerank->add_option("--prf-docs", prf_docs, "override the number of PRF documents m")->check(CLI::PositiveNumber);
    rerank->add_option("--tag", rerank_tag, "run tag (default: corank-<variant>)");
    rerank->add_flag("--no-residual", no_residual, "disable averaging calibrated and original vectors");

    auto* eval = app.add_subcommand("eval", "Evaluate a run: P, nDCG, MAP and a paired t-test");
    eval->add_option("--run", run, "run to evaluate")->required()->check(CLI::ExistingFile);
    eval->add_option("--qrels", qrels, "relevance judgments")->required()->check(CLI::ExistingFile);
    eval->add_option("--cut", cut, "cutoff for P and nDCG")->check(CLI::PositiveNumber);
    eval->add_option("--map-cut", map_cut, "cutoff for MAP")->check(CLI::PositiveNumber);
    eval->add_option("--baseline", baseline, "baseline run for the t-test")->check(CLI::ExistingFile);
    eval->add_option("--out", out, "also write the report here");

    auto* flops = app.add_subcommand("flops", "Report inference FLOPs per pipeline stage");
    flops->add_option("--config", config, "config file")->check(CLI::ExistingFile);
    flops->add_option("--queries", nq, "number of queries")->check(CLI::PositiveNumber);
    flops->add_option("--k", k, "candidates per query (default: config)");
    flops->add_option("--avg-passages", avg_passages, "average passages per document")->check(CLI::NonNegativeNumber);
    flops->add_flag("--published", published, "recompute the published stage totals and ratios");
    flops->add_option("--out", out, "also write the TSV here");

    auto* cv = app.add_subcommand("cv", "Assign queries to round-robin cross-validation partitions");
    auto* cv_queries = cv->add_option("--queries", queries, "queries TSV")->check(CLI::ExistingFile);
    auto* cv_qrels = cv->add_option("--qrels", qrels, "qrels (used when no queries file is given)")
                         ->check(CLI::ExistingFile);
    cv_queries->excludes(cv_qrels);
    cv->add_option("--folds", folds, "number of partitions");
    cv->add_option("--out", out, "output partition file")->required();

    // k is only a default for search; flops treats 0 as "from config".
    flops->preparse_callback([&k](std::size_t) { k = 0; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (index->parsed()) {
            cmd_index(corpus, out);
        } else if (search->parsed()) {
            cmd_search(index_dir, queries, k, out, tag, config);
        } else if (train_cmd->parsed()) {
            cmd_train(TrainInputs{config, corpus, queries, qrels, run, out, split, variant, order, fold, epochs,
                                  no_residual});
        } else if (rerank->parsed()) {
            cmd_rerank(RerankInputs{checkpoint, model_dir, split, corpus, queries, run, out, variant,
                                    rerank_tag, no_residual, prf_docs});
        } else if (eval->parsed()) {
            cmd_eval(run, qrels, cut, map_cut, baseline, out);
        } else if (flops->parsed()) {
            cmd_flops(config, nq, k, avg_passages, published, out);
        } else if (cv->parsed()) {
            if (queries.empty() && qrels.empty()) {
                throw std::invalid_argument("cv: give --queries or --qrels");
            }
            cmd_cv(queries, qrels, folds, out);
        }
    } catch (const std::exception& e) {
        std::cerr << "corank " << app.get_subcommands().front()->get_name() << ": error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
