#include "corank/evalkit.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace corank {

namespace {

std::vector<std::string> fields_of(const std::string& line)
{
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string f;
    while (ss >> f) {
        out.push_back(f);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& where)
{
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::runtime_error(where + ": bad number '" + text + "'");
    }
    return v;
}

std::vector<int> ranked_grades(const Run& run, const Qrels& qrels, const std::string& qid)
{
    std::vector<int> out;
    if (const auto* rows = run.rows(qid)) {
        out.reserve(rows->size());
        for (auto const& r : *rows) {
            out.push_back(qrels.grade(qid, r.doc_id));
        }
    }
    return out;
}

template <typename F>
MetricResult evaluate(const Run& run, const Qrels& qrels, F per_query)
{
    MetricResult res;
    const auto ids = qrels.query_ids();
    double total = 0.0;
    for (auto const& qid : ids) {
        const double v = per_query(qid, ranked_grades(run, qrels, qid));
        res.per_query[qid] = v;
        total += v;
    }
    res.mean = ids.empty() ? 0.0 : total / static_cast<double>(ids.size());
    return res;
}

}  // namespace

void Qrels::set(const std::string& query_id, const std::string& doc_id, int grade)
{
    if (grade < 0) {
        // Negative TREC grades mean "judged, not relevant".
        grade = 0;
    }
    judged_[query_id][doc_id] = grade;
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const
{
    auto q = judged_.find(query_id);
    if (q == judged_.end()) {
        return 0;
    }
    auto d = q->second.find(doc_id);
    return d == q->second.end() ? 0 : d->second;
}

std::size_t Qrels::relevant_count(const std::string& query_id) const
{
    std::size_t n = 0;
    for (int g : grades(query_id)) {
        n += g >= 1 ? 1 : 0;
    }
    return n;
}

std::vector<int> Qrels::grades(const std::string& query_id) const
{
    std::vector<int> out;
    if (auto q = judged_.find(query_id); q != judged_.end()) {
        for (auto const& [_, g] : q->second) {
            out.push_back(g);
        }
    }
    return out;
}

std::vector<std::string> Qrels::query_ids() const
{
    std::vector<std::string> out;
    for (auto const& [q, _] : judged_) {
        out.push_back(q);
    }
    return out;
}

void Run::add(RunRow row)
{
    auto& rows = by_query_[row.query_id];
    auto pos = std::upper_bound(rows.begin(), rows.end(), row.rank,
                                [](int rank, const RunRow& r) { return rank < r.rank; });
    rows.insert(pos, std::move(row));
}

const std::vector<RunRow>* Run::rows(const std::string& query_id) const
{
    auto it = by_query_.find(query_id);
    return it == by_query_.end() ? nullptr : &it->second;
}

std::vector<std::string> Run::ranked_docs(const std::string& query_id) const
{
    std::vector<std::string> out;
    if (const auto* r = rows(query_id)) {
        for (auto const& row : *r) {
            out.push_back(row.doc_id);
        }
    }
    return out;
}

std::vector<RunRow> Run::all_rows() const
{
    std::vector<RunRow> out;
    for (auto const& [_, rows] : by_query_) {
        out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
}

std::vector<std::string> Run::query_ids() const
{
    std::vector<std::string> out;
    for (auto const& [q, _] : by_query_) {
        out.push_back(q);
    }
    return out;
}

ScoredList Run::scored_list(const std::string& query_id) const
{
    ScoredList out{query_id, {}};
    if (const auto* r = rows(query_id)) {
        for (auto const& row : *r) {
            out.entries.push_back({row.doc_id, row.score, 0});
        }
    }
    return out;
}

Run Run::from_lists(const std::vector<ScoredList>& lists, const std::string& tag)
{
    Run run;
    for (auto const& list : lists) {
        int rank = 0;
        for (auto const& e : list.entries) {
            run.add(RunRow{list.query_id, e.doc_id, ++rank, e.score, tag});
        }
    }
    return run;
}

std::vector<double> MetricResult::values(const std::vector<std::string>& query_ids) const
{
    std::vector<double> out;
    out.reserve(query_ids.size());
    for (auto const& q : query_ids) {
        auto it = per_query.find(q);
        out.push_back(it == per_query.end() ? 0.0 : it->second);
    }
    return out;
}

double precision_of(const std::vector<int>& ranked_grades, std::size_t cutoff)
{
    if (cutoff < 1) {
        throw std::invalid_argument("precision: cutoff must be at least 1");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(cutoff, ranked_grades.size()); ++i) {
        hits += ranked_grades[i] >= 1 ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(cutoff);
}

double ndcg_of(const std::vector<int>& ranked_grades, std::vector<int> all_grades, std::size_t cutoff)
{
    if (cutoff < 1) {
        throw std::invalid_argument("ndcg: cutoff must be at least 1");
    }
    auto dcg = [cutoff](const std::vector<int>& g) {
        double s = 0.0;
        for (std::size_t i = 0; i < std::min(cutoff, g.size()); ++i) {
            s += static_cast<double>(g[i]) / std::log2(static_cast<double>(i) + 2.0);
        }
        return s;
    };
    std::sort(all_grades.begin(), all_grades.end(), std::greater<>());
    const double ideal = dcg(all_grades);
    return ideal > 0.0 ? dcg(ranked_grades) / ideal : 0.0;
}

double average_precision_of(const std::vector<int>& ranked_grades, std::size_t total_relevant, std::size_t cutoff)
{
    if (cutoff < 1) {
        throw std::invalid_argument("map: cutoff must be at least 1");
    }
    if (total_relevant == 0) {
        return 0.0;
    }
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(cutoff, ranked_grades.size()); ++i) {
        if (ranked_grades[i] >= 1) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

MetricResult precision_at(const Run& run, const Qrels& qrels, std::size_t cutoff)
{
    return evaluate(run, qrels, [&](const std::string&, const std::vector<int>& g) { return precision_of(g, cutoff); });
}

MetricResult ndcg_at(const Run& run, const Qrels& qrels, std::size_t cutoff)
{
    return evaluate(run, qrels,
                    [&](const std::string& q, const std::vector<int>& g) { return ndcg_of(g, qrels.grades(q), cutoff); });
}

MetricResult map_at(const Run& run, const Qrels& qrels, std::size_t cutoff)
{
    return evaluate(run, qrels, [&](const std::string& q, const std::vector<int>& g) {
        return average_precision_of(g, qrels.relevant_count(q), cutoff);
    });
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("paired_t_test: lists differ in length");
    }
    if (a.size() < 2) {
        throw std::invalid_argument("paired_t_test: need at least two pairs");
    }
    const auto n = static_cast<double>(a.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean += a[i] - b[i];
    }
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i] - mean;
        ss += d * d;
    }
    TTestResult res;
    res.dof = a.size() - 1;
    const double sd = std::sqrt(ss / (n - 1.0));
    if (sd == 0.0) {
        if (mean == 0.0) {
            return res;
        }
        res.t = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        res.p = 0.0;
        return res;
    }
    res.t = mean / (sd / std::sqrt(n));
    boost::math::students_t dist(static_cast<double>(res.dof));
    res.p = 2.0 * boost::math::cdf(dist, -std::abs(res.t));
    return res;
}

Qrels parse_qrels(std::istream& in, const std::string& source)
{
    Qrels q;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto f = fields_of(line);
        if (f.empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(lineno);
        if (f.size() != 4) {
            throw std::runtime_error(where + ": expected 'qid 0 docid grade'");
        }
        q.set(f[0], f[2], parse_number<int>(f[3], where));
    }
    return q;
}

Qrels parse_qrels(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open qrels " + path.string());
    }
    return parse_qrels(in, path.string());
}

void write_qrels(std::ostream& out, const Qrels& qrels)
{
    for (auto const& [q, docs] : qrels.judgments()) {
        for (auto const& [d, g] : docs) {
            out << q << " 0 " << d << ' ' << g << '\n';
        }
    }
}

void write_qrels(const std::filesystem::path& path, const Qrels& qrels)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    write_qrels(out, qrels);
}

Run parse_run(std::istream& in, const std::string& source)
{
    Run run;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto f = fields_of(line);
        if (f.empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(lineno);
        if (f.size() != 6) {
            throw std::runtime_error(where + ": expected 'qid Q0 docid rank score tag'");
        }
        run.add(RunRow{f[0], f[2], parse_number<int>(f[3], where), parse_number<double>(f[4], where), f[5]});
    }
    return run;
}

Run parse_run(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open run " + path.string());
    }
    return parse_run(in, path.string());
}

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return {buf, ptr};
}

void write_run(std::ostream& out, const Run& run)
{
    for (auto const& r : run.all_rows()) {
        out << r.query_id << " Q0 " << r.doc_id << ' ' << r.rank << ' ' << format_double(r.score) << ' ' << r.tag
            << '\n';
    }
}

void write_run(std::ostream& out, const std::vector<ScoredList>& lists, const std::string& tag)
{
    for (auto const& list : lists) {
        int rank = 0;
        for (auto const& e : list.entries) {
            out << list.query_id << " Q0 " << e.doc_id << ' ' << ++rank << ' ' << format_double(e.score) << ' '
                << tag << '\n';
        }
    }
}

void write_run(const std::filesystem::path& path, const std::vector<ScoredList>& lists, const std::string& tag)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    write_run(out, lists, tag);
}

}  // namespace corank
