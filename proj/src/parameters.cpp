#include "corank/parameters.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace corank {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'R', 'N', 'K', 'S', 'N', 'P', '1'};

template <typename T>
void put_le(std::ostream& out, T v)
{
    static_assert(std::is_integral_v<T>);
    std::array<char, sizeof(T)> buf{};
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        buf[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xffU);
    }
    out.write(buf.data(), buf.size());
}

template <typename T>
T get_le(std::istream& in)
{
    std::array<unsigned char, sizeof(T)> buf{};
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (!in) {
        throw std::runtime_error("snapshot: truncated input");
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    }
    return static_cast<T>(v);
}

}  // namespace

void write_snapshot(std::ostream& out, const ParameterStore<double>& params)
{
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint64_t>(out, params.size());
    for (auto const& [name, p] : params) {
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_le<std::uint32_t>(out, 2);
        put_le<std::uint64_t>(out, static_cast<std::uint64_t>(p.tensor.rows()));
        put_le<std::uint64_t>(out, static_cast<std::uint64_t>(p.tensor.cols()));
        const auto& v = p.tensor.value();
        for (Index i = 0; i < v.size(); ++i) {
            put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v.data()[i]));
        }
    }
    if (!out) {
        throw std::runtime_error("snapshot: write failed");
    }
}

void write_snapshot(const std::filesystem::path& path, const ParameterStore<double>& params)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    write_snapshot(out, params);
}

ParameterStore<double> read_snapshot(std::istream& in)
{
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw std::runtime_error("snapshot: bad magic");
    }
    ParameterStore<double> params;
    const auto count = get_le<std::uint64_t>(in);
    for (std::uint64_t e = 0; e < count; ++e) {
        const auto len = get_le<std::uint32_t>(in);
        std::string name(len, '\0');
        in.read(name.data(), len);
        const auto rank = get_le<std::uint32_t>(in);
        if (rank != 2) {
            throw std::runtime_error("snapshot: unsupported rank for " + name);
        }
        const auto rows = static_cast<Index>(get_le<std::uint64_t>(in));
        const auto cols = static_cast<Index>(get_le<std::uint64_t>(in));
        Matrix<double> m(rows, cols);
        for (Index i = 0; i < m.size(); ++i) {
            m.data()[i] = std::bit_cast<double>(get_le<std::uint64_t>(in));
        }
        params.add(name, std::move(m));
    }
    return params;
}

ParameterStore<double> read_snapshot(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return read_snapshot(in);
}

std::string snapshot_bytes(const ParameterStore<double>& params)
{
    std::ostringstream out(std::ios::binary);
    write_snapshot(out, params);
    return out.str();
}

}  // namespace corank
