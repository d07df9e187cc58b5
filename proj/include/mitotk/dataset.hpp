#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mitotk {

enum class Label { AMF, NMF };

// "AMF"/"NMF", case-insensitive on parse.
Label parse_label(const std::string& token);
const char* label_name(Label l);

struct SampleRecord {
    std::string sample_id;
    std::string cancer_type;
    Label label = Label::NMF;
    std::string image_path;   // empty when absent
    std::string pixel_digest; // empty when absent
};

struct Manifest {
    std::vector<SampleRecord> records;
    std::vector<std::string> source_names;
};

struct ClassStatsRow {
    std::string cancer_type; // "overall" for the summary row
    std::int64_t total = 0;
    std::int64_t amf = 0;
    std::int64_t nmf = 0;
    double amf_fraction = 0.0;
};

struct ClassStats {
    std::vector<ClassStatsRow> per_type; // input-order of first appearance
    ClassStatsRow overall;
};

// CSV with header sample_id, cancer_type, label and optional image_path,
// pixel_digest. strict: duplicate sample_ids abort; otherwise later
// duplicates are dropped and counted.
struct LoadResult {
    Manifest manifest;
    std::int64_t dropped_duplicate_ids = 0;
};
LoadResult load_manifest(const std::string& path, bool strict = true);

void write_manifest(const std::string& path, const Manifest& m);

// Removes exact pixel-level duplicates (same decoded-pixel digest), keeping
// the first occurrence. Records without a digest get one computed from
// image_path, relative to base_dir when given.
struct DedupResult {
    Manifest manifest;
    std::int64_t removed = 0;
};
DedupResult dedup_manifest(const Manifest& m, const std::string& base_dir = "");

ClassStats class_stats(const Manifest& m);

// stats.csv: cancer_type, total, amf, nmf, amf_pct (one-decimal percent).
std::string stats_csv(const ClassStats& s);
// JSON variant with exact fractions.
std::string stats_json(const ClassStats& s);
// Aligned text table of the same cells.
std::string stats_text(const ClassStats& s);

} // namespace mitotk
