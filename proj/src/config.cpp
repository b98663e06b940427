#include "corank/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace corank {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

int to_int(const std::string& v)
{
    int out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw std::invalid_argument("expected an integer, got '" + v + "'");
    }
    return out;
}

std::uint64_t to_u64(const std::string& v)
{
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

double to_double(const std::string& v)
{
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw std::invalid_argument("expected a number, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& v)
{
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    throw std::invalid_argument("expected true or false, got '" + v + "'");
}

struct Field {
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field int_field(T ModelConfig::*member)
{
    return {[member](ExperimentConfig& c, const std::string& v) { c.model.*member = to_int(v); },
            [member](const ExperimentConfig& c) { return std::to_string(c.model.*member); }};
}

// Key order here is the canonical order of config_text.
const std::vector<std::pair<std::string, Field>>& fields()
{
    static const std::vector<std::pair<std::string, Field>> table = {
        {"hidden", int_field(&ModelConfig::hidden)},
        {"heads", int_field(&ModelConfig::heads)},
        {"base_layers", int_field(&ModelConfig::base_layers)},
        {"calibration_layers", int_field(&ModelConfig::calibration_layers)},
        {"group_layers", int_field(&ModelConfig::group_layers)},
        {"vocab_size", int_field(&ModelConfig::vocab_size)},
        {"max_seq_len", int_field(&ModelConfig::max_seq_len)},
        {"passage_window", int_field(&ModelConfig::passage_window)},
        {"passage_stride", int_field(&ModelConfig::passage_stride)},
        {"prf_docs", int_field(&ModelConfig::prf_docs)},
        {"group_size", int_field(&ModelConfig::group_size)},
        {"group_overlap", int_field(&ModelConfig::group_overlap)},
        {"candidates", int_field(&ModelConfig::candidates)},
        {"residual",
         {[](ExperimentConfig& c, const std::string& v) { c.model.residual = to_bool(v); },
          [](const ExperimentConfig& c) { return std::string(c.model.residual ? "true" : "false"); }}},
        {"seed",
         {[](ExperimentConfig& c, const std::string& v) { c.model.seed = c.train.seed = to_u64(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.model.seed); }}},
        {"epochs",
         {[](ExperimentConfig& c, const std::string& v) { c.train.epochs = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.train.epochs); }}},
        {"base_lr",
         {[](ExperimentConfig& c, const std::string& v) { c.train.base_lr = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.train.base_lr); }}},
        {"warmup_fraction",
         {[](ExperimentConfig& c, const std::string& v) { c.train.warmup_fraction = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.train.warmup_fraction); }}},
        {"order",
         {[](ExperimentConfig& c, const std::string& v) { c.train.order = parse_feed_order(v); },
          [](const ExperimentConfig& c) { return std::string(to_string(c.train.order)); }}},
        {"variant",
         {[](ExperimentConfig& c, const std::string& v) { c.train.variant = parse_variant(v); },
          [](const ExperimentConfig& c) { return std::string(to_string(c.train.variant)); }}},
        {"first_pass_weight",
         {[](ExperimentConfig& c, const std::string& v) { c.train.first_pass_weight = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.train.first_pass_weight); }}},
        {"bm25_k1",
         {[](ExperimentConfig& c, const std::string& v) { c.bm25.k1 = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.bm25.k1); }}},
        {"bm25_b",
         {[](ExperimentConfig& c, const std::string& v) { c.bm25.b = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.bm25.b); }}},
    };
    return table;
}

const Field* find_field(const std::string& key)
{
    for (auto const& [name, f] : fields()) {
        if (name == key) {
            return &f;
        }
    }
    return nullptr;
}

}  // namespace

void ExperimentConfig::validate() const
{
    model.validate();
    train.validate();
    if (!(bm25.k1 >= 0.0) || !(bm25.b >= 0.0 && bm25.b <= 1.0)) {
        throw std::invalid_argument("config: need bm25_k1 >= 0 and 0 <= bm25_b <= 1");
    }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source)
{
    ExperimentConfig cfg;
    cfg.train.seed = cfg.model.seed;
    std::map<std::string, std::size_t> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(where + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const Field* f = find_field(key);
        if (f == nullptr) {
            throw std::runtime_error(where + ": unknown key '" + key + "'");
        }
        if (auto [it, fresh] = seen.emplace(key, lineno); !fresh) {
            throw std::runtime_error(where + ": key '" + key + "' already set on line " + std::to_string(it->second));
        }
        try {
            f->set(cfg, value);
        } catch (const std::exception& e) {
            throw std::runtime_error(where + ": " + key + ": " + e.what());
        }
    }
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(source + ": " + e.what());
    }
    return cfg;
}

ExperimentConfig read_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config " + path.string());
    }
    return parse_config(in, path.string());
}

std::string config_text(const ExperimentConfig& cfg)
{
    std::string out;
    for (auto const& [name, f] : fields()) {
        out += name + " = " + f.get(cfg) + "\n";
    }
    return out;
}

std::string config_hash(const ExperimentConfig& cfg)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(config_text(cfg))));
    return buf;
}

void write_checkpoint(const std::filesystem::path& path, const ExperimentConfig& cfg, const CheckpointMeta& meta,
                      const ParameterStore<double>& params)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << "corank-checkpoint epoch=" << meta.epoch << " validation_ndcg20=" << format_double(meta.validation_ndcg)
        << '\n'
        << config_text(cfg) << "snapshot\n";
    write_snapshot(out, params);
    if (!out) {
        throw std::runtime_error("checkpoint: write failed for " + path.string());
    }
}

Checkpoint read_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open checkpoint " + path.string());
    }
    std::string header;
    std::getline(in, header);
    Checkpoint ck;
    {
        std::istringstream hs(header);
        std::string magic, epoch, ndcg;
        hs >> magic >> epoch >> ndcg;
        if (magic != "corank-checkpoint" || epoch.rfind("epoch=", 0) != 0
            || ndcg.rfind("validation_ndcg20=", 0) != 0) {
            throw std::runtime_error(path.string() + ":1: not a corank checkpoint");
        }
        try {
            ck.meta.epoch = to_int(epoch.substr(6));
            ck.meta.validation_ndcg = to_double(ndcg.substr(18));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":1: " + e.what());
        }
    }
    std::string text;
    std::string line;
    bool found = false;
    while (std::getline(in, line)) {
        if (line == "snapshot") {
            found = true;
            break;
        }
        text += line + "\n";
    }
    if (!found) {
        throw std::runtime_error(path.string() + ": missing snapshot section");
    }
    std::istringstream cs(text);
    ck.config = parse_config(cs, path.string());
    try {
        ck.params = read_snapshot(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    return ck;
}

}  // namespace corank
