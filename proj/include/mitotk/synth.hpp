#pragma once

#include <cstdint>
#include <string>

#include "mitotk/dataset.hpp"
#include "mitotk/stainaug.hpp"

namespace mitotk {

// Two-class blob generator across pseudo cancer types with shifted stain
// baselines: NMF renders one broad soft lobe, AMF a few narrow dense ones,
// both through the stain matrix into 8-bit RGB. Type t adds t*domain_shift
// to every hematoxylin concentration (and half that to eosin), so types are
// the same classification problem in shifted stain coordinates.
struct SynthConfig {
    int n = 1500;
    int types = 3;
    double amf_fraction = 0.156;
    int patch = 48;
    double domain_shift = 0.35;
    std::uint64_t seed = 0;
    StainMatrix matrix = StainMatrix::default_he();
};

// Writes dir/images/*.png and dir/manifest.csv (image_path relative to dir,
// pixel_digest filled in) and returns the manifest. Deterministic per seed;
// AMF labels hit round(n * amf_fraction) exactly, spread evenly over types
// and positions.
Manifest synth_dataset(const SynthConfig& cfg, const std::string& dir);

} // namespace mitotk
