#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mitotk/image.hpp"
#include "mitotk/rng.hpp"

namespace mitotk {

// Per-pixel 3-vector image of reals (optical densities or stain
// concentrations), interleaved like Patch.
struct RealImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    RealImage() = default;
    RealImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0.0) {}
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

// Rows: hematoxylin, eosin, residual, as unit-norm OD vectors. Built through
// from_rows so the unit-norm and invertibility invariants always hold; the
// transpose inverse used by deconvolve is precomputed.
class StainMatrix {
public:
    // Rows are normalized; an all-zero residual row is replaced by the
    // normalized cross product of the first two.
    static StainMatrix from_rows(const std::array<double, 3>& h, const std::array<double, 3>& e,
                                 const std::array<double, 3>& r = {0, 0, 0});

    // Ruifrok-Johnston H&E vectors with a cross-product residual.
    static StainMatrix default_he();

    double row(int i, int j) const { return m_[i][j]; }
    double inv_t(int i, int j) const { return inv_t_[i][j]; }

private:
    StainMatrix() = default;
    double m_[3][3] = {};
    double inv_t_[3][3] = {};
};

// 3 lines x 3 reals, whitespace separated.
StainMatrix read_stain_matrix(const std::string& path);

struct StainAugConfig {
    double sigma_alpha = 0.05; // scale half-range, in [0, 1)
    double sigma_beta = 0.05;  // shift half-range, OD units, >= 0
    std::uint64_t seed = 0;
    StainMatrix matrix = StainMatrix::default_he();
};

void validate(const StainAugConfig& cfg);

struct Perturbation {
    std::array<double, 3> alpha{1.0, 1.0, 1.0};
    std::array<double, 3> beta{0.0, 0.0, 0.0};
};

// OD(c) = -log10(max(I, 1) / 255); the floor keeps the log finite.
RealImage rgb_to_od(const Patch& p);

// Solve m^T c = od per pixel; negative concentrations are kept.
RealImage deconvolve(const RealImage& od, const StainMatrix& m);

// One (alpha_i, beta_i) pair per stain channel, alpha_i then beta_i,
// channel order H, E, residual.
Perturbation draw_perturbation(const StainAugConfig& cfg, Rng& rng);

// c'_i = alpha_i * c_i + beta_i.
RealImage perturb(const RealImage& conc, const Perturbation& d);

// od = m^T c, the real-valued inverse of deconvolve (no quantization).
RealImage compose_od(const RealImage& conc, const StainMatrix& m);

// I = clamp(round(255 * 10^(-m^T c)), 0, 255).
Patch recompose(const RealImage& conc, const StainMatrix& m);

// Full round trip with the draw derived from (cfg.seed, counter), so batch
// augmentation is reproducible regardless of execution order.
Patch augment(const Patch& p, const StainAugConfig& cfg, std::uint64_t counter = 0);

} // namespace mitotk
