#include "lrac/dynamics.hpp"

#include "lrac/error.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <array>
#include <cstring>
#include <fstream>

namespace lrac {

namespace {
constexpr std::array<char, 8> magic{'L', 'R', 'A', 'C', 'T', 'R', 'J', '\0'};
constexpr std::uint32_t version = 1;
constexpr std::uint32_t dtype_f64 = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw Error(ErrorCode::Io, "truncated trajectory file");
    return v;
}
} // namespace

void Trajectory::write_csv(const std::filesystem::path& path) const {
    auto out = fmt::output_file(path.string());
    out.print("t");
    for (int i = 0; i < N; ++i)
        out.print(",u_{}", i);
    out.print("\n");
    for (std::size_t f = 0; f < times.size(); ++f) {
        out.print("{:.17g}", times[f]);
        for (double v : states[f])
            out.print(",{:.17g}", v);
        out.print("\n");
    }
}

void Trajectory::write_binary(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(magic.data(), magic.size());
    put(out, version);
    put(out, static_cast<std::uint32_t>(N));
    put(out, dtype_f64);
    put(out, static_cast<std::uint64_t>(times.size()));
    for (std::size_t f = 0; f < times.size(); ++f) {
        put(out, times[f]);
        out.write(reinterpret_cast<const char*>(states[f].data()),
                  static_cast<std::streamsize>(sizeof(double) * states[f].size()));
    }
}

Trajectory Trajectory::read_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::array<char, 8> m{};
    in.read(m.data(), m.size());
    if (!in || m != magic)
        throw Error(ErrorCode::Io, "bad trajectory magic");
    if (get<std::uint32_t>(in) != version)
        throw Error(ErrorCode::Io, "unsupported trajectory version");
    Trajectory tr;
    tr.N = static_cast<int>(get<std::uint32_t>(in));
    if (get<std::uint32_t>(in) != dtype_f64)
        throw Error(ErrorCode::Io, "unsupported dtype");
    auto frames = get<std::uint64_t>(in);
    tr.h = 1.0 / tr.N;
    for (std::uint64_t f = 0; f < frames; ++f) {
        tr.times.push_back(get<double>(in));
        std::vector<double> s(static_cast<std::size_t>(tr.N));
        if (!in.read(reinterpret_cast<char*>(s.data()), static_cast<std::streamsize>(sizeof(double) * s.size())))
            throw Error(ErrorCode::Io, "truncated trajectory file");
        tr.states.push_back(std::move(s));
    }
    return tr;
}

} // namespace lrac
