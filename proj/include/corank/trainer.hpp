#pragma once

// End-to-end training: pointwise cross-entropy over groupwise scores, Adam
// with linear warmup/decay, batch feeding orders, cross-validation folds and
// checkpoint selection on validation nDCG@20.

#include "corank/evalkit.hpp"
#include "corank/pipeline.hpp"

#include <filesystem>
#include <functional>
#include <map>

namespace corank {

enum class FeedOrder { shuffled, initial, reversed };

FeedOrder parse_feed_order(std::string_view name);
std::string_view to_string(FeedOrder order);

struct TrainConfig {
    int epochs = 5;
    double base_lr = 3e-6;
    double warmup_fraction = 0.10;
    FeedOrder order = FeedOrder::shuffled;
    Variant variant = Variant::full;
    // Weight of the first-pass head's own cross-entropy term.
    double first_pass_weight = 1.0;
    std::uint64_t seed = 42;

    void validate() const;
};

/// logistic sigmoid; maps a relevance score to P(relevant).
double to_probability(double score);
Tensor to_probability(const Tensor& scores);

/// -sum_pos log(pr) - sum_neg log(1 - pr) over unpadded slots, pr clamped to [1e-12, 1 - 1e-12].
double pointwise_loss(const std::vector<double>& probs, const std::vector<int>& labels, const std::vector<bool>& mask);
Tensor pointwise_loss(const Tensor& probs, const std::vector<int>& labels, const std::vector<bool>& mask);

/// Linear warmup to base_lr over round(warmup_fraction * total) steps, then linear decay to 0.
double lr_schedule(std::size_t step, std::size_t total_steps, double base_lr, double warmup_fraction);

struct TrainBatch {
    std::string query_id;
    std::size_t group = 0;                    // 1-based window index within the query
    std::vector<std::string> prototype_ids;   // m PRF documents
    std::vector<std::string> context_ids;     // documents shared with the previous window
    std::vector<std::string> candidate_ids;   // unpadded window, at most n
    std::vector<int> labels;                  // binary, aligned with candidate_ids
    std::vector<bool> pad_mask;               // n entries

    friend bool operator==(const TrainBatch&, const TrainBatch&) = default;
};

struct QueryRanking {
    std::string query_id;
    std::vector<std::string> ranking;  // first-pass order
    std::vector<std::string> prf_ids;
};

/// Grade >= 1 counts as relevant.
int binary_label(int grade);

std::vector<TrainBatch> make_batches(const std::vector<QueryRanking>& rankings, const Qrels& qrels, std::size_t n,
                                     std::size_t o, FeedOrder order, std::uint64_t seed);

struct Fold {
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;
};

/// Query ids sorted (numerically when all are integers), then assigned to
/// partition (index mod folds).
std::vector<std::vector<std::string>> round_robin_partitions(std::vector<std::string> query_ids, std::size_t folds = 5);

/// Fold f tests on partition f, validates on partition (f + 1) mod folds and trains on the rest.
std::vector<Fold> folds_from_partitions(const std::vector<std::vector<std::string>>& partitions);

std::vector<Fold> cv_split(const std::vector<std::string>& query_ids, std::size_t folds = 5);

/// Split file: one `qid partition` pair per line.
std::vector<std::vector<std::string>> read_partitions(const std::filesystem::path& path, std::size_t folds = 5);
void write_partitions(const std::filesystem::path& path, const std::vector<std::vector<std::string>>& partitions);

/// Index of the best validation score; earliest wins ties.
std::size_t select_model(const std::vector<double>& validation_scores);

class Adam {
  public:
    Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) : beta1_(beta1), beta2_(beta2), eps_(eps) {}

    /// Updates every trainable parameter that received a gradient.
    void step(ParameterStore<double>& params, double lr);

  private:
    struct Moments {
        Matrix<double> m;
        Matrix<double> v;
        long t = 0;
    };
    double beta1_;
    double beta2_;
    double eps_;
    std::map<std::string, Moments> state_;
};

struct TrainingData {
    const Corpus* corpus = nullptr;
    const Vocabulary* vocab = nullptr;
    const Qrels* qrels = nullptr;
    std::map<std::string, std::vector<Index>> queries;          // tokenized
    std::map<std::string, std::vector<std::string>> candidates; // initial top-k per query
};

struct EpochRecord {
    int epoch = 0;
    double mean_loss = 0.0;
    double validation_ndcg = 0.0;
};

struct TrainResult {
    std::vector<EpochRecord> history;
    std::size_t selected = 0;  // index into history
    std::vector<ParameterStore<double>> checkpoints;
};

using TrainLogger = std::function<void(const std::string&)>;

/// One optimisation step on a batch; returns the main (groupwise) loss.
double train_step(CoBert<double>& model, Adam& optimizer, const TrainBatch& batch,
                  const std::map<std::string, TokenSequence>& sequences, const TrainConfig& cfg, double lr);

/// Batch loss with gradients left in the parameters (no update).
Tensor batch_loss(const CoBert<double>& model, const TrainBatch& batch,
                  const std::map<std::string, TokenSequence>& sequences, const TrainConfig& cfg,
                  double* main_loss = nullptr);

/// Mean nDCG@20 of the re-ranked pools of `query_ids`.
double validation_ndcg(const CoBert<double>& model, const TrainingData& data, const std::vector<std::string>& query_ids,
                       Variant variant);

/// Trains `model` in place; on return it holds the selected checkpoint.
TrainResult train(CoBert<double>& model, const TrainingData& data, const std::vector<std::string>& train_ids,
                  const std::vector<std::string>& validation_ids, const TrainConfig& cfg, const TrainLogger& log = {});

}  // namespace corank
