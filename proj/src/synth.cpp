#include "mitotk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <vector>

#include "mitotk/error.hpp"
#include "mitotk/image.hpp"
#include "mitotk/rng.hpp"

namespace mitotk {

namespace {

struct Lobe {
    double cx, cy, sigma, amp;
};

Patch render_sample(const SynthConfig& cfg, Label label, int type, Rng& rng) {
    int sz = cfg.patch;
    double shift = cfg.domain_shift * type;

    std::vector<Lobe> lobes;
    if (label == Label::NMF) {
        lobes.push_back({rng.uniform(0.35, 0.65) * sz, rng.uniform(0.35, 0.65) * sz,
                         rng.uniform(0.16, 0.22) * sz, rng.uniform(0.85, 1.10)});
    } else {
        int n_lobes = 2 + static_cast<int>(rng.bounded(3));
        for (int i = 0; i < n_lobes; ++i)
            lobes.push_back({rng.uniform(0.25, 0.75) * sz, rng.uniform(0.25, 0.75) * sz,
                             rng.uniform(0.07, 0.11) * sz, rng.uniform(1.45, 1.85)});
    }

    RealImage conc(sz, sz);
    for (int y = 0; y < sz; ++y) {
        for (int x = 0; x < sz; ++x) {
            double tissue = 0.0;
            for (const auto& l : lobes) {
                double dx = x - l.cx, dy = y - l.cy;
                tissue += l.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * l.sigma * l.sigma));
            }
            double* c = &conc.data[(static_cast<std::size_t>(y) * sz + x) * 3];
            c[0] = 0.08 + shift + tissue + rng.uniform(-0.03, 0.03);
            c[1] = 0.15 + 0.5 * shift + 0.30 * tissue + rng.uniform(-0.03, 0.03);
            c[2] = rng.uniform(-0.02, 0.02);
        }
    }
    return recompose(conc, cfg.matrix);
}

} // namespace

Manifest synth_dataset(const SynthConfig& cfg, const std::string& dir) {
    if (cfg.n < 1)
        throw Error("synth: n must be >= 1");
    if (cfg.types < 2)
        throw Error("synth: need >= 2 pseudo types");
    if (cfg.patch < 8)
        throw Error("synth: patch must be >= 8");
    if (!(cfg.amf_fraction > 0.0 && cfg.amf_fraction < 1.0))
        throw Error("synth: amf_fraction must be in (0,1)");

    std::filesystem::path root(dir);
    std::filesystem::create_directories(root / "images");

    // round-robin type assignment, then exact AMF quotas per type by largest
    // remainder, spread evenly inside each type
    std::vector<std::int64_t> type_count(static_cast<std::size_t>(cfg.types), 0);
    for (int i = 0; i < cfg.n; ++i)
        ++type_count[static_cast<std::size_t>(i % cfg.types)];
    std::int64_t total_amf = std::llround(cfg.amf_fraction * cfg.n);
    total_amf = std::clamp<std::int64_t>(total_amf, 1, cfg.n - 1);

    std::vector<std::int64_t> amf_count(static_cast<std::size_t>(cfg.types), 0);
    std::vector<std::pair<double, int>> remainder;
    std::int64_t assigned = 0;
    for (int t = 0; t < cfg.types; ++t) {
        double quota = static_cast<double>(total_amf) * type_count[t] / cfg.n;
        amf_count[t] = static_cast<std::int64_t>(std::floor(quota));
        assigned += amf_count[t];
        remainder.emplace_back(quota - std::floor(quota), t);
    }
    std::sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    for (std::int64_t i = 0; i < total_amf - assigned; ++i)
        ++amf_count[static_cast<std::size_t>(remainder[static_cast<std::size_t>(i)].second)];

    Manifest m;
    m.source_names.push_back("synthetic");
    std::vector<std::int64_t> seen(static_cast<std::size_t>(cfg.types), 0);
    for (int i = 0; i < cfg.n; ++i) {
        int t = i % cfg.types;
        std::int64_t j = seen[static_cast<std::size_t>(t)]++;
        // Bresenham spread: sample j of its type is AMF when the running
        // quota crosses an integer
        std::int64_t a = amf_count[static_cast<std::size_t>(t)];
        std::int64_t nt = type_count[static_cast<std::size_t>(t)];
        Label label = ((j + 1) * a / nt > j * a / nt) ? Label::AMF : Label::NMF;

        Rng rng(derive_seed(cfg.seed, "synth", static_cast<std::uint64_t>(i)));
        Patch patch = render_sample(cfg, label, t, rng);

        char id[32];
        std::snprintf(id, sizeof id, "s%06d", i);
        std::string rel = std::string("images/") + id + ".png";
        write_png_rgb8((root / rel).string(), patch);

        SampleRecord rec;
        rec.sample_id = id;
        rec.cancer_type = "type" + std::to_string(t);
        rec.label = label;
        rec.image_path = rel;
        rec.pixel_digest = pixel_digest(patch);
        m.records.push_back(std::move(rec));
    }
    write_manifest((root / "manifest.csv").string(), m);
    return m;
}

} // namespace mitotk
