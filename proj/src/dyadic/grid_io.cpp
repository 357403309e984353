#include "rlab/dyadic/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include "json.hpp"

#include "rlab/common/errors.hpp"

namespace rlab::dyadic {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double x) {
    auto v = std::bit_cast<std::uint64_t>(x);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_le(std::istream& is, int bytes) {
    unsigned char b[8] = {};
    is.read(reinterpret_cast<char*>(b), bytes);
    if (!is) throw ValidationError("truncated RFGF file");
    std::uint64_t v = 0;
    for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

}  // namespace

void write_rfgf(const std::string& path, std::uint32_t dimension, std::uint32_t n,
                const std::vector<cplx>& data) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    os.write("RFGF", 4);
    put_u32(os, dimension);
    put_u32(os, n);
    put_u32(os, 0);
    for (const auto& z : data) {
        put_f64(os, z.real());
        put_f64(os, z.imag());
    }
}

void write_rfgf(const std::string& path, const GridFunction& u) {
    write_rfgf(path, static_cast<std::uint32_t>(u.dim()), static_cast<std::uint32_t>(u.size()),
               u.values());
}

RfgfPayload read_rfgf_raw(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "RFGF", 4) != 0) throw ValidationError(path + ": bad RFGF magic");
    RfgfPayload p;
    p.dimension = static_cast<std::uint32_t>(get_le(is, 4));
    p.n = static_cast<std::uint32_t>(get_le(is, 4));
    get_le(is, 4);
    if (p.dimension < 1 || p.dimension > 2) throw ValidationError(path + ": bad dimension");
    std::size_t count = p.dimension == 1 ? p.n : static_cast<std::size_t>(p.n) * p.n;
    p.data.resize(count);
    for (auto& z : p.data) {
        double re = std::bit_cast<double>(get_le(is, 8));
        double im = std::bit_cast<double>(get_le(is, 8));
        z = {re, im};
    }
    return p;
}

GridFunction read_rfgf(const std::string& path, double period) {
    auto p = read_rfgf_raw(path);
    return GridFunction::from_samples(static_cast<int>(p.dimension), static_cast<int>(p.n),
                                      std::move(p.data), period);
}

std::string to_json(const GridFunction& u) {
    nlohmann::json j;
    j["dimension"] = u.dim();
    j["n"] = u.size();
    j["period"] = u.period();
    std::vector<double> re, im;
    for (const auto& z : u.values()) {
        re.push_back(z.real());
        im.push_back(z.imag());
    }
    j["re"] = re;
    j["im"] = im;
    return j.dump();
}

GridFunction from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    auto re = j.at("re").get<std::vector<double>>();
    auto im = j.at("im").get<std::vector<double>>();
    require(re.size() == im.size(), "re/im length mismatch");
    std::vector<cplx> v(re.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = {re[i], im[i]};
    return GridFunction::from_samples(j.at("dimension").get<int>(), j.at("n").get<int>(), std::move(v),
                                      j.value("period", 1.0));
}

}  // namespace rlab::dyadic
