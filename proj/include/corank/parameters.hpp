#pragma once

#include "corank/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace corank {

/// 64-bit FNV-1a; stable across platforms, used for seeding and hashing ids.
constexpr std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 1469598103934665603ULL)
{
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

template <typename Scalar>
struct Parameter {
    std::string name;
    BasicTensor<Scalar> tensor;
    bool trainable = true;
};

/// Named parameter tensors of one model, ordered by name.
template <typename Scalar>
class ParameterStore {
  public:
    using tensor_type = BasicTensor<Scalar>;

    tensor_type& add(const std::string& name, Matrix<Scalar> init, bool trainable = true)
    {
        if (params_.count(name) != 0) {
            throw std::invalid_argument("duplicate parameter name: " + name);
        }
        auto [it, _] = params_.emplace(name, Parameter<Scalar>{name, tensor_type(std::move(init), trainable), trainable});
        return it->second.tensor;
    }

    [[nodiscard]] const tensor_type& get(const std::string& name) const
    {
        auto it = params_.find(name);
        if (it == params_.end()) {
            throw std::out_of_range("no such parameter: " + name);
        }
        return it->second.tensor;
    }

    [[nodiscard]] tensor_type& get(const std::string& name)
    {
        return const_cast<tensor_type&>(std::as_const(*this).get(name));
    }

    [[nodiscard]] bool contains(const std::string& name) const { return params_.count(name) != 0; }
    [[nodiscard]] std::size_t size() const { return params_.size(); }

    /// Total number of scalar values across all parameters.
    [[nodiscard]] std::size_t scalar_count() const
    {
        std::size_t n = 0;
        for (auto const& [_, p] : params_) {
            n += static_cast<std::size_t>(p.tensor.size());
        }
        return n;
    }

    [[nodiscard]] auto begin() const { return params_.begin(); }
    [[nodiscard]] auto end() const { return params_.end(); }
    [[nodiscard]] auto begin() { return params_.begin(); }
    [[nodiscard]] auto end() { return params_.end(); }

    void zero_grad()
    {
        for (auto& [_, p] : params_) {
            p.tensor.zero_grad();
        }
    }

    template <typename Other>
    [[nodiscard]] ParameterStore<Other> cast() const
    {
        ParameterStore<Other> out;
        for (auto const& [name, p] : params_) {
            out.add(name, p.tensor.value().template cast<Other>(), p.trainable);
        }
        return out;
    }

    /// Copies values (not gradients) from a store with the same names and shapes.
    template <typename Other>
    void assign(const ParameterStore<Other>& other)
    {
        for (auto& [name, p] : params_) {
            const auto& src = other.get(name);
            if (src.rows() != p.tensor.rows() || src.cols() != p.tensor.cols()) {
                throw shape_error("assign: shape mismatch for " + name);
            }
            p.tensor.mutable_value() = src.value().template cast<Scalar>();
        }
    }

  private:
    std::map<std::string, Parameter<Scalar>> params_;
};

/// Truncated normal (cut at two standard deviations), seeded per parameter name.
template <typename Scalar>
Matrix<Scalar> truncated_normal(Index rows, Index cols, double stddev, std::uint64_t seed,
                                std::string_view name)
{
    std::mt19937_64 rng(fnv1a(name, seed ^ 0x9e3779b97f4a7c15ULL));
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix<Scalar> m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) {
        double z = normal(rng);
        while (std::abs(z) > 2.0) {
            z = normal(rng);
        }
        m.data()[i] = static_cast<Scalar>(z * stddev);
    }
    return m;
}

// Snapshot format (all integers and floats little-endian):
//
//   magic   8 bytes  "CRNKSNP1"
//   count   u64      number of entries
//   entry*  u32 name length, name bytes (UTF-8),
//           u32 rank (always 2), u64 rows, u64 cols,
//           rows*cols f64 values in row-major order
//
// Entries are written in name order.
void write_snapshot(std::ostream& out, const ParameterStore<double>& params);
void write_snapshot(const std::filesystem::path& path, const ParameterStore<double>& params);

/// Reads every entry of a snapshot into a fresh store (all marked trainable).
ParameterStore<double> read_snapshot(std::istream& in);
ParameterStore<double> read_snapshot(const std::filesystem::path& path);

/// Snapshot bytes; used for byte-level determinism checks.
std::string snapshot_bytes(const ParameterStore<double>& params);

}  // namespace corank
