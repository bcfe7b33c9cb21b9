#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "chromred/number_field.hpp"

namespace chromred {

struct ScanConfig {
    GaussianRational lower_left = GaussianRational(0, -1);
    GaussianRational upper_right = GaussianRational(2, 1);
    std::size_t width = 101;
    std::size_t height = 101;
    int depth = 8;
    double margin = 1e-9;            // strict inequalities must clear 1 by this much
    double analytic_margin = 1e-6;   // for the closed-form region
    GaussianRational y = 0;
    std::size_t state_cap = 20000;   // distinct states kept per pixel
    std::size_t pair_cap = 20000;    // compositions tried per level
    unsigned threads = 1;
};

/// q non-real and |1 - q| > 1 or Re(q) > 3/2, with margins, away from 0, 1, 2.
bool analytic_region(std::complex<double> q, double margin);

enum class PixelClass : std::uint8_t { Unknown, Hard };

struct SearchResult {
    PixelClass cls = PixelClass::Unknown;
    int depth_found = -1;            // level of the first witness
    std::size_t states = 0;
};

/// Levelled search over series/parallel states from a single edge, looking for a state in H*
/// with |y_eff| > 1 or |f_q(y_eff)| > 1, certified by tracked rounding error plus the margin.
/// Each level pairs the sqrt(pair_cap) best new states with the sqrt(pair_cap) best states so far,
/// ranked by max(|y_eff|, |f_q(y_eff)|).
SearchResult search_condition(std::complex<double> q, std::complex<double> y, int depth, double margin,
                              std::size_t state_cap = 20000, std::size_t pair_cap = 20000);

struct ScanResult {
    ScanConfig config;
    std::vector<PixelClass> cls;       // row-major, row 0 at the top (largest imaginary part)
    std::vector<int> depth_found;
    std::vector<bool> analytic;
};

/// Exact coordinates of pixel (col, row): corners are included, a single column sits mid-way.
GaussianRational pixel_q(const ScanConfig& cfg, std::size_t col, std::size_t row);

ScanResult scan(const ScanConfig& cfg);

/// 255 = Hard, 0 = Unknown, 128 = analytic region but not found by the search.
std::string to_pgm(const ScanResult& r);
nlohmann::json scan_summary(const ScanResult& r);

} // namespace chromred
