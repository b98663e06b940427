#pragma once

// TREC-style evaluation: qrels/run I/O, P@k, nDCG@k, MAP@k and the paired
// two-tailed t-test.
//
// Means are taken over the queries present in the qrels; a query missing from
// the run contributes 0. Relevance for P and AP means grade >= 1; nDCG uses the
// grade as a linear gain with a log2(rank + 1) discount.

#include "corank/run.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace corank {

class Qrels {
  public:
    void set(const std::string& query_id, const std::string& doc_id, int grade);
    [[nodiscard]] int grade(const std::string& query_id, const std::string& doc_id) const;
    [[nodiscard]] std::size_t relevant_count(const std::string& query_id) const;
    [[nodiscard]] std::vector<int> grades(const std::string& query_id) const;
    [[nodiscard]] std::vector<std::string> query_ids() const;
    [[nodiscard]] bool has_query(const std::string& query_id) const { return judged_.count(query_id) != 0; }
    [[nodiscard]] const std::map<std::string, std::map<std::string, int>>& judgments() const { return judged_; }

    friend bool operator==(const Qrels&, const Qrels&) = default;

  private:
    std::map<std::string, std::map<std::string, int>> judged_;
};

struct RunRow {
    std::string query_id;
    std::string doc_id;
    int rank = 0;
    double score = 0.0;
    std::string tag;

    friend bool operator==(const RunRow&, const RunRow&) = default;
};

/// Rows grouped by query, each group ordered by rank.
class Run {
  public:
    void add(RunRow row);
    [[nodiscard]] const std::vector<RunRow>* rows(const std::string& query_id) const;
    [[nodiscard]] std::vector<std::string> ranked_docs(const std::string& query_id) const;
    [[nodiscard]] std::vector<RunRow> all_rows() const;
    [[nodiscard]] std::vector<std::string> query_ids() const;
    [[nodiscard]] ScoredList scored_list(const std::string& query_id) const;

    static Run from_lists(const std::vector<ScoredList>& lists, const std::string& tag);

  private:
    std::map<std::string, std::vector<RunRow>> by_query_;
};

struct MetricResult {
    std::map<std::string, double> per_query;
    double mean = 0.0;

    /// Per-query values in the order of `query_ids` (missing ids give 0).
    [[nodiscard]] std::vector<double> values(const std::vector<std::string>& query_ids) const;
};

MetricResult precision_at(const Run& run, const Qrels& qrels, std::size_t cutoff = 20);
MetricResult ndcg_at(const Run& run, const Qrels& qrels, std::size_t cutoff = 20);
MetricResult map_at(const Run& run, const Qrels& qrels, std::size_t cutoff = 1000);

// Single-query forms over grades listed in rank order.
double precision_of(const std::vector<int>& ranked_grades, std::size_t cutoff);
double ndcg_of(const std::vector<int>& ranked_grades, std::vector<int> all_grades, std::size_t cutoff);
double average_precision_of(const std::vector<int>& ranked_grades, std::size_t total_relevant, std::size_t cutoff);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    std::size_t dof = 0;
};

/// Paired two-tailed Student t-test on per-query differences a - b.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

/// `qid 0 docid grade` per line.
Qrels parse_qrels(std::istream& in, const std::string& source = "<qrels>");
Qrels parse_qrels(const std::filesystem::path& path);
void write_qrels(std::ostream& out, const Qrels& qrels);
void write_qrels(const std::filesystem::path& path, const Qrels& qrels);

/// `qid Q0 docid rank score tag` per line.
Run parse_run(std::istream& in, const std::string& source = "<run>");
Run parse_run(const std::filesystem::path& path);
void write_run(std::ostream& out, const Run& run);
void write_run(std::ostream& out, const std::vector<ScoredList>& lists, const std::string& tag);
void write_run(const std::filesystem::path& path, const std::vector<ScoredList>& lists, const std::string& tag);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace corank
