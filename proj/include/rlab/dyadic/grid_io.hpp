#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlab/dyadic/grid_function.hpp"

namespace rlab::dyadic {

// RFGF binary layout: "RFGF", u32 dimension, u32 N, u32 reserved (0), then
// N^dimension complex samples as little-endian f64 pairs (re, im).
void write_rfgf(const std::string& path, std::uint32_t dimension, std::uint32_t n,
                const std::vector<cplx>& data);
void write_rfgf(const std::string& path, const GridFunction& u);

struct RfgfPayload {
    std::uint32_t dimension = 0;
    std::uint32_t n = 0;
    std::vector<cplx> data;
};
RfgfPayload read_rfgf_raw(const std::string& path);
GridFunction read_rfgf(const std::string& path, double period = 1.0);

// JSON text {"dimension","n","period","re":[...],"im":[...]}; meant for small grids.
std::string to_json(const GridFunction& u);
GridFunction from_json(const std::string& text);

}  // namespace rlab::dyadic
