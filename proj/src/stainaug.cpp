#include "mitotk/stainaug.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mitotk/error.hpp"

namespace mitotk {

namespace {

std::array<double, 3> normalized(std::array<double, 3> v, const char* what) {
    double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(n > 0.0) || !std::isfinite(n))
        throw Error(std::string("stain matrix: ") + what + " row is zero or non-finite");
    for (double& x : v)
        x /= n;
    return v;
}

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

} // namespace

StainMatrix StainMatrix::from_rows(const std::array<double, 3>& h, const std::array<double, 3>& e,
                                   const std::array<double, 3>& r) {
    StainMatrix sm;
    std::array<double, 3> rows[3];
    rows[0] = normalized(h, "hematoxylin");
    rows[1] = normalized(e, "eosin");
    if (r[0] == 0.0 && r[1] == 0.0 && r[2] == 0.0)
        rows[2] = normalized(cross(rows[0], rows[1]), "residual (cross product)");
    else
        rows[2] = normalized(r, "residual");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            sm.m_[i][j] = rows[i][j];

    // inverse of m^T via adjugate; m^T columns are the stain rows
    double t[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            t[i][j] = sm.m_[j][i];
    double det = t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
                 t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
                 t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
    if (!(std::fabs(det) > 1e-6))
        throw Error("stain matrix is singular or near-singular");
    double adj[3][3] = {
        {t[1][1] * t[2][2] - t[1][2] * t[2][1], t[0][2] * t[2][1] - t[0][1] * t[2][2],
         t[0][1] * t[1][2] - t[0][2] * t[1][1]},
        {t[1][2] * t[2][0] - t[1][0] * t[2][2], t[0][0] * t[2][2] - t[0][2] * t[2][0],
         t[0][2] * t[1][0] - t[0][0] * t[1][2]},
        {t[1][0] * t[2][1] - t[1][1] * t[2][0], t[0][1] * t[2][0] - t[0][0] * t[2][1],
         t[0][0] * t[1][1] - t[0][1] * t[1][0]},
    };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            sm.inv_t_[i][j] = adj[i][j] / det;
    return sm;
}

StainMatrix StainMatrix::default_he() {
    return from_rows({0.650, 0.704, 0.286}, {0.072, 0.990, 0.105});
}

StainMatrix read_stain_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    std::array<std::array<double, 3>, 3> rows{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!(in >> rows[i][j]))
                throw Error(path + ": expected 9 reals (3 rows x 3)");
    return StainMatrix::from_rows(rows[0], rows[1], rows[2]);
}

void validate(const StainAugConfig& cfg) {
    if (cfg.sigma_alpha < 0.0 || cfg.sigma_alpha >= 1.0)
        throw Error("sigma_alpha must be in [0, 1)");
    if (cfg.sigma_beta < 0.0)
        throw Error("sigma_beta must be >= 0");
}

RealImage rgb_to_od(const Patch& p) {
    if (!p.valid())
        throw Error("rgb_to_od: invalid patch");
    RealImage od(p.width, p.height);
    for (std::size_t i = 0; i < p.data.size(); ++i) {
        double v = p.data[i] < 1 ? 1.0 : static_cast<double>(p.data[i]);
        od.data[i] = -std::log10(v / 255.0);
    }
    return od;
}

RealImage deconvolve(const RealImage& od, const StainMatrix& m) {
    RealImage c(od.width, od.height);
    for (std::size_t px = 0; px < od.pixel_count(); ++px) {
        const double* o = &od.data[px * 3];
        double* out = &c.data[px * 3];
        for (int i = 0; i < 3; ++i)
            out[i] = m.inv_t(i, 0) * o[0] + m.inv_t(i, 1) * o[1] + m.inv_t(i, 2) * o[2];
    }
    return c;
}

Perturbation draw_perturbation(const StainAugConfig& cfg, Rng& rng) {
    Perturbation d;
    for (int i = 0; i < 3; ++i) {
        d.alpha[i] = rng.uniform(1.0 - cfg.sigma_alpha, 1.0 + cfg.sigma_alpha);
        d.beta[i] = rng.uniform(-cfg.sigma_beta, cfg.sigma_beta);
    }
    return d;
}

RealImage perturb(const RealImage& conc, const Perturbation& d) {
    RealImage out(conc.width, conc.height);
    for (std::size_t px = 0; px < conc.pixel_count(); ++px)
        for (int i = 0; i < 3; ++i)
            out.data[px * 3 + i] = d.alpha[i] * conc.data[px * 3 + i] + d.beta[i];
    return out;
}

RealImage compose_od(const RealImage& conc, const StainMatrix& m) {
    RealImage od(conc.width, conc.height);
    for (std::size_t px = 0; px < conc.pixel_count(); ++px) {
        const double* c = &conc.data[px * 3];
        for (int ch = 0; ch < 3; ++ch)
            od.data[px * 3 + ch] = m.row(0, ch) * c[0] + m.row(1, ch) * c[1] + m.row(2, ch) * c[2];
    }
    return od;
}

Patch recompose(const RealImage& conc, const StainMatrix& m) {
    Patch p(conc.width, conc.height);
    for (std::size_t px = 0; px < conc.pixel_count(); ++px) {
        const double* c = &conc.data[px * 3];
        for (int ch = 0; ch < 3; ++ch) {
            double od = m.row(0, ch) * c[0] + m.row(1, ch) * c[1] + m.row(2, ch) * c[2];
            double v = std::round(255.0 * std::pow(10.0, -od));
            p.data[px * 3 + ch] = static_cast<std::uint8_t>(v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v));
        }
    }
    return p;
}

Patch augment(const Patch& p, const StainAugConfig& cfg, std::uint64_t counter) {
    validate(cfg);
    Rng rng(derive_seed(cfg.seed, "stain-aug", counter));
    Perturbation d = draw_perturbation(cfg, rng);
    return recompose(perturb(deconvolve(rgb_to_od(p), cfg.matrix), d), cfg.matrix);
}

} // namespace mitotk
