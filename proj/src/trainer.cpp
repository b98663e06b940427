#include "corank/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace corank {

namespace {

constexpr double kProbFloor = 1e-12;

bool is_integer(const std::string& s)
{
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

FeedOrder parse_feed_order(std::string_view name)
{
    if (name == "shuffled") {
        return FeedOrder::shuffled;
    }
    if (name == "initial") {
        return FeedOrder::initial;
    }
    if (name == "reversed") {
        return FeedOrder::reversed;
    }
    throw std::invalid_argument("unknown feeding order '" + std::string(name)
                                + "' (expected shuffled, initial or reversed)");
}

std::string_view to_string(FeedOrder order)
{
    switch (order) {
    case FeedOrder::shuffled:
        return "shuffled";
    case FeedOrder::initial:
        return "initial";
    case FeedOrder::reversed:
        return "reversed";
    }
    return "shuffled";
}

void TrainConfig::validate() const
{
    if (epochs < 1) {
        throw std::invalid_argument("train config: epochs must be at least 1");
    }
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
        throw std::invalid_argument("train config: warmup_fraction must lie in [0, 1)");
    }
    if (!(base_lr > 0.0)) {
        throw std::invalid_argument("train config: base_lr must be positive");
    }
    if (first_pass_weight < 0.0) {
        throw std::invalid_argument("train config: first_pass_weight must be non-negative");
    }
}

double to_probability(double score)
{
    if (score >= 0) {
        return 1.0 / (1.0 + std::exp(-score));
    }
    const double e = std::exp(score);
    return e / (1.0 + e);
}

Tensor to_probability(const Tensor& scores) { return sigmoid(scores); }

int binary_label(int grade) { return grade >= 1 ? 1 : 0; }

double pointwise_loss(const std::vector<double>& probs, const std::vector<int>& labels, const std::vector<bool>& mask)
{
    if (probs.size() != labels.size() || probs.size() != mask.size()) {
        throw std::invalid_argument("loss: probabilities, labels and mask differ in length");
    }
    double loss = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (!mask[j]) {
            continue;
        }
        if (labels[j] != 0 && labels[j] != 1) {
            throw std::invalid_argument("loss: labels must be 0 or 1");
        }
        const double pr = std::clamp(probs[j], kProbFloor, 1.0 - kProbFloor);
        loss -= labels[j] == 1 ? std::log(pr) : std::log(1.0 - pr);
    }
    return loss;
}

Tensor pointwise_loss(const Tensor& probs, const std::vector<int>& labels, const std::vector<bool>& mask)
{
    const auto n = static_cast<std::size_t>(probs.rows());
    if (probs.cols() != 1 || labels.size() != n || mask.size() != n) {
        throw std::invalid_argument("loss: probabilities, labels and mask differ in length");
    }
    Matrix<double> pos = Matrix<double>::Zero(probs.rows(), 1);
    Matrix<double> neg = pos;
    for (std::size_t j = 0; j < n; ++j) {
        if (!mask[j]) {
            continue;
        }
        if (labels[j] != 0 && labels[j] != 1) {
            throw std::invalid_argument("loss: labels must be 0 or 1");
        }
        (labels[j] == 1 ? pos : neg)(static_cast<Index>(j), 0) = 1.0;
    }
    auto pr = clamp(probs, kProbFloor, 1.0 - kProbFloor);
    auto log_pr = log(pr);
    auto log_not = log(add_scalar(scale(pr, -1.0), 1.0));
    auto total = add(mul(Tensor(pos), log_pr), mul(Tensor(neg), log_not));
    return scale(sum(total), -1.0);
}

double lr_schedule(std::size_t step, std::size_t total_steps, double base_lr, double warmup_fraction)
{
    if (step > total_steps) {
        throw std::invalid_argument("lr_schedule: step beyond total steps");
    }
    const auto warmup = static_cast<std::size_t>(std::llround(warmup_fraction * static_cast<double>(total_steps)));
    if (step < warmup) {
        return base_lr * static_cast<double>(step) / static_cast<double>(warmup);
    }
    if (total_steps == warmup) {
        return base_lr;
    }
    return base_lr * static_cast<double>(total_steps - step) / static_cast<double>(total_steps - warmup);
}

std::vector<TrainBatch> make_batches(const std::vector<QueryRanking>& rankings, const Qrels& qrels, std::size_t n,
                                     std::size_t o, FeedOrder order, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<std::vector<TrainBatch>> per_query;
    for (auto const& q : rankings) {
        std::vector<TrainBatch> batches;
        if (q.ranking.empty()) {
            per_query.push_back(std::move(batches));
            continue;
        }
        const auto schedule = schedule_groups(q.ranking.size(), n, o);
        for (std::size_t g = 0; g < schedule.size(); ++g) {
            TrainBatch b;
            b.query_id = q.query_id;
            b.group = g + 1;
            b.prototype_ids = q.prf_ids;
            const auto& window = schedule.groups[g];
            for (std::size_t s = 0; s < window.size(); ++s) {
                const auto& doc = q.ranking[window[s] - 1];
                b.candidate_ids.push_back(doc);
                b.labels.push_back(binary_label(qrels.grade(q.query_id, doc)));
                if (g > 0 && s < o) {
                    b.context_ids.push_back(doc);
                }
            }
            b.pad_mask = schedule.pad_mask(g);
            batches.push_back(std::move(b));
        }
        per_query.push_back(std::move(batches));
    }

    std::vector<TrainBatch> out;
    if (order == FeedOrder::shuffled) {
        for (auto& q : per_query) {
            std::move(q.begin(), q.end(), std::back_inserter(out));
        }
        std::shuffle(out.begin(), out.end(), rng);
        return out;
    }
    // Query order is shuffled; each query's windows stay contiguous.
    std::vector<std::size_t> qorder(per_query.size());
    for (std::size_t i = 0; i < qorder.size(); ++i) {
        qorder[i] = i;
    }
    std::shuffle(qorder.begin(), qorder.end(), rng);
    for (std::size_t qi : qorder) {
        auto& q = per_query[qi];
        if (order == FeedOrder::reversed) {
            std::reverse(q.begin(), q.end());
        }
        std::move(q.begin(), q.end(), std::back_inserter(out));
    }
    return out;
}

std::vector<std::vector<std::string>> round_robin_partitions(std::vector<std::string> query_ids, std::size_t folds)
{
    if (folds < 2) {
        throw std::invalid_argument("cv_split: need at least two folds");
    }
    if (std::set<std::string>(query_ids.begin(), query_ids.end()).size() != query_ids.size()) {
        throw std::invalid_argument("cv_split: duplicate query ids");
    }
    if (query_ids.size() < folds) {
        throw std::invalid_argument("cv_split: fewer queries than folds");
    }
    const bool numeric = std::all_of(query_ids.begin(), query_ids.end(), is_integer);
    std::sort(query_ids.begin(), query_ids.end(), [numeric](const std::string& a, const std::string& b) {
        if (numeric) {
            return std::stoll(a) < std::stoll(b);
        }
        return a < b;
    });
    std::vector<std::vector<std::string>> parts(folds);
    for (std::size_t i = 0; i < query_ids.size(); ++i) {
        parts[i % folds].push_back(query_ids[i]);
    }
    return parts;
}

std::vector<Fold> folds_from_partitions(const std::vector<std::vector<std::string>>& partitions)
{
    const std::size_t k = partitions.size();
    if (k < 3) {
        throw std::invalid_argument("cv_split: need at least three partitions");
    }
    std::vector<Fold> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        folds[f].test = partitions[f];
        folds[f].validation = partitions[(f + 1) % k];
        for (std::size_t p = 0; p < k; ++p) {
            if (p != f && p != (f + 1) % k) {
                folds[f].train.insert(folds[f].train.end(), partitions[p].begin(), partitions[p].end());
            }
        }
    }
    return folds;
}

std::vector<Fold> cv_split(const std::vector<std::string>& query_ids, std::size_t folds)
{
    return folds_from_partitions(round_robin_partitions(query_ids, folds));
}

std::vector<std::vector<std::string>> read_partitions(const std::filesystem::path& path, std::size_t folds)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open split file " + path.string());
    }
    std::vector<std::vector<std::string>> parts(folds);
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string qid;
        std::size_t p = 0;
        if (!(ss >> qid)) {
            continue;
        }
        if (!(ss >> p) || p >= folds) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 'qid partition'");
        }
        if (!seen.insert(qid).second) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": duplicate query id " + qid);
        }
        parts[p].push_back(qid);
    }
    return parts;
}

void write_partitions(const std::filesystem::path& path, const std::vector<std::vector<std::string>>& partitions)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    for (std::size_t p = 0; p < partitions.size(); ++p) {
        for (auto const& q : partitions[p]) {
            out << q << ' ' << p << '\n';
        }
    }
}

std::size_t select_model(const std::vector<double>& validation_scores)
{
    if (validation_scores.empty()) {
        throw std::invalid_argument("select_model: no checkpoints");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < validation_scores.size(); ++i) {
        if (validation_scores[i] > validation_scores[best]) {
            best = i;
        }
    }
    return best;
}

void Adam::step(ParameterStore<double>& params, double lr)
{
    for (auto& [name, p] : params) {
        if (!p.trainable || !p.tensor.has_grad()) {
            continue;
        }
        const Matrix<double> g = p.tensor.grad();
        auto& st = state_[name];
        if (st.t == 0) {
            st.m = Matrix<double>::Zero(g.rows(), g.cols());
            st.v = st.m;
        }
        ++st.t;
        st.m = beta1_ * st.m + (1.0 - beta1_) * g;
        st.v = beta2_ * st.v + (1.0 - beta2_) * g.cwiseAbs2();
        const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(st.t));
        const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(st.t));
        auto& w = p.tensor.mutable_value();
        w.array() -= lr * (st.m.array() / c1) / ((st.v.array() / c2).sqrt() + eps_);
    }
    params.zero_grad();
}

Tensor batch_loss(const CoBert<double>& model, const TrainBatch& batch,
                  const std::map<std::string, TokenSequence>& sequences, const TrainConfig& cfg, double* main_loss)
{
    const auto& mc = model.config();
    const bool uses_prf = cfg.variant != Variant::group_only;
    std::vector<TokenSequence> seqs;
    for (auto const& id : batch.candidate_ids) {
        seqs.push_back(sequences.at(id));
    }
    if (uses_prf) {
        if (batch.prototype_ids.empty()) {
            throw std::invalid_argument("calibration requires m >= 1");
        }
        for (auto const& id : batch.prototype_ids) {
            seqs.push_back(sequences.at(id));
        }
    }
    const auto c = static_cast<Index>(batch.candidate_ids.size());
    const auto n = static_cast<Index>(mc.group_size);
    Tensor r = model.interactions(seqs);
    Tensor cand = slice_rows(r, 0, c);
    std::optional<Tensor> protos;
    if (uses_prf) {
        protos = slice_rows(r, c, r.rows() - c);
    }
    Tensor group = cand;
    if (c < n) {
        group = concat_rows<double>({cand, Tensor(Matrix<double>::Zero(n - c, mc.hidden))});
    }
    std::vector<int> labels = batch.labels;
    labels.resize(static_cast<std::size_t>(n), 0);
    Tensor scores = model.score_group(cfg.variant, protos, group, batch.pad_mask);
    Tensor main = pointwise_loss(to_probability(scores), labels, batch.pad_mask);
    if (main_loss != nullptr) {
        *main_loss = main.item();
    }
    if (cfg.first_pass_weight == 0.0) {
        return main;
    }
    Tensor first = pointwise_loss(to_probability(model.pointwise(cand)), batch.labels,
                                  std::vector<bool>(batch.candidate_ids.size(), true));
    return add(main, scale(first, cfg.first_pass_weight));
}

double train_step(CoBert<double>& model, Adam& optimizer, const TrainBatch& batch,
                  const std::map<std::string, TokenSequence>& sequences, const TrainConfig& cfg, double lr)
{
    double main = 0.0;
    model.params().zero_grad();
    Tensor loss = batch_loss(model, batch, sequences, cfg, &main);
    loss.backward();
    optimizer.step(model.params(), lr);
    return main;
}

double validation_ndcg(const CoBert<double>& model, const TrainingData& data, const std::vector<std::string>& query_ids,
                       Variant variant)
{
    if (query_ids.empty()) {
        return 0.0;
    }
    std::vector<ScoredList> lists;
    Qrels subset;
    for (auto const& qid : query_ids) {
        lists.push_back(rerank_query(model, *data.vocab, qid, data.queries.at(qid), data.candidates.at(qid),
                                     *data.corpus, RerankOptions{variant, std::nullopt}));
        if (auto it = data.qrels->judgments().find(qid); it != data.qrels->judgments().end()) {
            for (auto const& [doc, g] : it->second) {
                subset.set(qid, doc, g);
            }
        }
    }
    const Run run = Run::from_lists(lists, "validation");
    const auto res = ndcg_at(run, subset, 20);
    double total = 0.0;
    for (auto const& qid : query_ids) {
        auto it = res.per_query.find(qid);
        total += it == res.per_query.end() ? 0.0 : it->second;
    }
    return total / static_cast<double>(query_ids.size());
}

TrainResult train(CoBert<double>& model, const TrainingData& data, const std::vector<std::string>& train_ids,
                  const std::vector<std::string>& validation_ids, const TrainConfig& cfg, const TrainLogger& log)
{
    cfg.validate();
    const auto& mc = model.config();
    const auto n = static_cast<std::size_t>(mc.group_size);
    const auto o = static_cast<std::size_t>(mc.group_overlap);
    const auto m = static_cast<std::size_t>(mc.prf_docs);

    bool usable = false;
    std::size_t steps_per_epoch = 0;
    for (auto const& qid : train_ids) {
        const auto& pool = data.candidates.at(qid);
        std::size_t pos = 0;
        for (auto const& d : pool) {
            pos += static_cast<std::size_t>(binary_label(data.qrels->grade(qid, d)));
        }
        usable = usable || (pos > 0 && pos < pool.size());
        if (!pool.empty()) {
            steps_per_epoch += schedule_groups(pool.size(), n, o).size();
        }
        if (cfg.variant != Variant::group_only && pool.size() < m) {
            throw std::invalid_argument("query " + qid + " has fewer candidates than m");
        }
    }
    if (!usable) {
        throw std::invalid_argument("degenerate training set");
    }
    const std::size_t total_steps = steps_per_epoch * static_cast<std::size_t>(cfg.epochs);

    Adam optimizer;
    TrainResult result;
    std::size_t step = 0;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::vector<QueryRanking> rankings;
        std::map<std::string, std::map<std::string, TokenSequence>> sequences;
        for (auto const& qid : train_ids) {
            const auto& pool = data.candidates.at(qid);
            if (pool.empty()) {
                continue;
            }
            auto fp = first_pass(model, *data.vocab, data.queries.at(qid), pool, *data.corpus);
            auto& seqs = sequences[qid];
            for (std::size_t i = 0; i < fp.ranking.size(); ++i) {
                seqs.emplace(fp.ranking[i], fp.best_sequences[i]);
            }
            QueryRanking qr{qid, fp.ranking, {}};
            if (cfg.variant != Variant::group_only) {
                qr.prf_ids = select_prf(fp.ranking, m);
            }
            rankings.push_back(std::move(qr));
        }
        const auto batches = make_batches(rankings, *data.qrels, n, o, cfg.order,
                                          cfg.seed * 1000003ULL + static_cast<std::uint64_t>(epoch));
        double loss_sum = 0.0;
        for (auto const& b : batches) {
            ++step;
            const double lr = lr_schedule(step, total_steps, cfg.base_lr, cfg.warmup_fraction);
            loss_sum += train_step(model, optimizer, b, sequences.at(b.query_id), cfg, lr);
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.mean_loss = batches.empty() ? 0.0 : loss_sum / static_cast<double>(batches.size());
        rec.validation_ndcg = validation_ndcg(model, data, validation_ids, cfg.variant);
        result.history.push_back(rec);
        result.checkpoints.push_back(model.params().cast<double>());
        if (log) {
            std::ostringstream msg;
            msg << "epoch " << epoch << " loss " << rec.mean_loss << " validation nDCG@20 " << rec.validation_ndcg;
            log(msg.str());
        }
    }
    if (validation_ids.empty()) {
        result.selected = result.history.size() - 1;
    } else {
        std::vector<double> scores;
        for (auto const& r : result.history) {
            scores.push_back(r.validation_ndcg);
        }
        result.selected = select_model(scores);
    }
    model.params().assign(result.checkpoints[result.selected]);
    return result;
}

}  // namespace corank
