#include "corank/model.hpp"

namespace corank {

Variant parse_variant(std::string_view name)
{
    if (name == "full") {
        return Variant::full;
    }
    if (name == "prf-only") {
        return Variant::prf_only;
    }
    if (name == "group-only") {
        return Variant::group_only;
    }
    throw std::invalid_argument("unknown variant '" + std::string(name) + "' (expected full, prf-only or group-only)");
}

std::string_view to_string(Variant v)
{
    switch (v) {
    case Variant::full:
        return "full";
    case Variant::prf_only:
        return "prf-only";
    case Variant::group_only:
        return "group-only";
    }
    return "full";
}

void ModelConfig::validate() const
{
    auto positive = [](int v, const char* name) {
        if (v <= 0) {
            throw std::invalid_argument(std::string("model config: ") + name + " must be positive");
        }
    };
    positive(hidden, "hidden");
    positive(heads, "heads");
    positive(max_seq_len, "max_seq_len");
    positive(passage_window, "passage_window");
    positive(passage_stride, "passage_stride");
    positive(prf_docs, "m");
    positive(group_size, "n");
    positive(candidates, "k");
    positive(vocab_size, "vocab_size");
    if (base_layers < 0 || calibration_layers < 0 || group_layers < 0) {
        throw std::invalid_argument("model config: layer counts must be non-negative");
    }
    if (hidden % heads != 0) {
        throw std::invalid_argument("model config: hidden must be divisible by heads");
    }
    if (passage_stride > passage_window) {
        throw std::invalid_argument("model config: passage_stride must not exceed passage_window");
    }
    if (group_overlap < 0 || group_overlap >= group_size) {
        throw std::invalid_argument("overlap must be smaller than group size");
    }
    if (vocab_size <= kFirstWordId) {
        throw std::invalid_argument("model config: vocab_size too small");
    }
}

}  // namespace corank
