#include "fnlslab/snapshot_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fnls {

namespace {

constexpr std::array<char, 4> kMagic = {'F', 'N', 'L', 'S'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> b;
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double x) {
    const auto v = std::bit_cast<std::uint64_t>(x);
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), b.size());
}

std::uint32_t get_u32(std::istream& in) {
    std::array<char, 4> b;
    in.read(b.data(), b.size());
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
}

double get_f64(std::istream& in) {
    std::array<char, 8> b;
    in.read(b.data(), b.size());
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return std::bit_cast<double>(v);
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error("snapshot " + path.string() + ": " + what);
}

} // namespace

void write_snapshot(const std::filesystem::path& path, const SpectralField& field) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(field.grid.modes));
    put_f64(out, field.grid.period);
    put_f64(out, field.time);
    for (const cplx& c : field.coeffs) {
        put_f64(out, c.real());
        put_f64(out, c.imag());
    }
    if (!out) fail(path, "write failed");
}

SpectralField read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    std::array<char, 4> magic;
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) fail(path, "bad magic");
    const std::uint32_t version = get_u32(in);
    if (!in || version != kVersion)
        fail(path, "unsupported format version " + std::to_string(version));
    const std::uint32_t K = get_u32(in);
    const double L = get_f64(in);
    const double t = get_f64(in);
    if (!in) fail(path, "truncated header");
    if (K < 4 || K % 2 != 0 || K > (1u << 24)) fail(path, "implausible mode count");

    SpectralField field(GridSpec(static_cast<int>(K), L), t);
    for (cplx& c : field.coeffs) {
        const double re = get_f64(in);
        const double im = get_f64(in);
        c = cplx{re, im};
        if (!in) fail(path, "truncated payload");
    }
    char extra;
    if (in.read(&extra, 1)) fail(path, "trailing bytes");
    return field;
}

} // namespace fnls
