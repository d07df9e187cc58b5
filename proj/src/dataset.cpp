#include "mitotk/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "mitotk/csv.hpp"
#include "mitotk/error.hpp"
#include "mitotk/image.hpp"
#include "mitotk/numfmt.hpp"

namespace mitotk {

namespace {

std::string lower(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// optional column lookup
int find_col(const CsvTable& t, const std::string& name) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name)
            return static_cast<int>(i);
    return -1;
}

} // namespace

Label parse_label(const std::string& token) {
    std::string t = lower(token);
    if (t == "amf")
        return Label::AMF;
    if (t == "nmf")
        return Label::NMF;
    throw Error("unknown label '" + token + "' (expected AMF or NMF)");
}

const char* label_name(Label l) {
    return l == Label::AMF ? "AMF" : "NMF";
}

LoadResult load_manifest(const std::string& path, bool strict) {
    CsvTable t = read_csv(path);
    std::size_t id_col = t.col("sample_id");
    std::size_t type_col = t.col("cancer_type");
    std::size_t label_col = t.col("label");
    int path_col = find_col(t, "image_path");
    int digest_col = find_col(t, "pixel_digest");

    LoadResult out;
    out.manifest.source_names.push_back(path);
    std::unordered_set<std::string> seen;
    seen.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        SampleRecord r;
        r.sample_id = row[id_col];
        if (r.sample_id.empty())
            throw Error(path + ": row " + std::to_string(i + 2) + ": empty sample_id");
        if (!seen.insert(r.sample_id).second) {
            if (strict)
                throw Error(path + ": duplicate sample_id '" + r.sample_id + "'");
            ++out.dropped_duplicate_ids;
            continue;
        }
        r.cancer_type = row[type_col];
        r.label = parse_label(row[label_col]);
        if (path_col >= 0)
            r.image_path = row[static_cast<std::size_t>(path_col)];
        if (digest_col >= 0)
            r.pixel_digest = row[static_cast<std::size_t>(digest_col)];
        out.manifest.records.push_back(std::move(r));
    }
    return out;
}

void write_manifest(const std::string& path, const Manifest& m) {
    CsvTable t;
    t.header = {"sample_id", "cancer_type", "label", "image_path", "pixel_digest"};
    t.rows.reserve(m.records.size());
    for (const auto& r : m.records)
        t.rows.push_back({r.sample_id, r.cancer_type, label_name(r.label), r.image_path,
                          r.pixel_digest});
    write_csv(path, t);
}

DedupResult dedup_manifest(const Manifest& m, const std::string& base_dir) {
    DedupResult out;
    out.manifest.source_names = m.source_names;
    std::unordered_set<std::string> seen;
    seen.reserve(m.records.size());
    for (const auto& r : m.records) {
        std::string digest = r.pixel_digest;
        if (digest.empty()) {
            if (r.image_path.empty())
                throw Error("sample '" + r.sample_id + "' has neither pixel_digest nor image_path");
            std::filesystem::path p(r.image_path);
            if (!base_dir.empty() && p.is_relative())
                p = std::filesystem::path(base_dir) / p;
            digest = pixel_digest(read_png_rgb8(p.string()));
        }
        if (seen.insert(digest).second) {
            SampleRecord kept = r;
            kept.pixel_digest = digest;
            out.manifest.records.push_back(std::move(kept));
        } else {
            ++out.removed;
        }
    }
    return out;
}

ClassStats class_stats(const Manifest& m) {
    if (m.records.empty())
        throw Error("class_stats: empty manifest");
    ClassStats s;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& r : m.records) {
        auto [it, inserted] = index.try_emplace(r.cancer_type, s.per_type.size());
        if (inserted) {
            ClassStatsRow row;
            row.cancer_type = r.cancer_type;
            s.per_type.push_back(row);
        }
        ClassStatsRow& row = s.per_type[it->second];
        ++row.total;
        ++(r.label == Label::AMF ? row.amf : row.nmf);
        ++s.overall.total;
        ++(r.label == Label::AMF ? s.overall.amf : s.overall.nmf);
    }
    s.overall.cancer_type = "overall";
    for (auto& row : s.per_type)
        row.amf_fraction = static_cast<double>(row.amf) / static_cast<double>(row.total);
    s.overall.amf_fraction =
        static_cast<double>(s.overall.amf) / static_cast<double>(s.overall.total);
    return s;
}

std::string stats_csv(const ClassStats& s) {
    CsvTable t;
    t.header = {"cancer_type", "total", "amf", "nmf", "amf_pct"};
    auto push = [&t](const ClassStatsRow& r) {
        t.rows.push_back({r.cancer_type, std::to_string(r.total), std::to_string(r.amf),
                          std::to_string(r.nmf), format_pct1(r.amf_fraction)});
    };
    for (const auto& r : s.per_type)
        push(r);
    push(s.overall);
    return csv_to_string(t);
}

std::string stats_text(const ClassStats& s) {
    std::vector<std::array<std::string, 5>> rows;
    rows.push_back({"cancer_type", "total", "amf", "nmf", "amf_pct"});
    auto push = [&rows](const ClassStatsRow& r) {
        rows.push_back({r.cancer_type, std::to_string(r.total), std::to_string(r.amf),
                        std::to_string(r.nmf), format_pct1(r.amf_fraction)});
    };
    for (const auto& r : s.per_type)
        push(r);
    push(s.overall);

    std::array<std::size_t, 5> width{};
    for (const auto& r : rows)
        for (std::size_t i = 0; i < 5; ++i)
            width[i] = std::max(width[i], r[i].size());
    std::string out;
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < 5; ++i) {
            if (i)
                out += "  ";
            if (i == 0) {
                out += r[i];
                out.append(width[i] - r[i].size(), ' ');
            } else {
                out.append(width[i] - r[i].size(), ' ');
                out += r[i];
            }
        }
        out += '\n';
    }
    return out;
}

std::string stats_json(const ClassStats& s) {
    nlohmann::json j;
    auto row_json = [](const ClassStatsRow& r) {
        nlohmann::json o;
        o["cancer_type"] = r.cancer_type;
        o["total"] = r.total;
        o["amf"] = r.amf;
        o["nmf"] = r.nmf;
        o["amf_fraction"] = r.amf_fraction;
        return o;
    };
    j["per_type"] = nlohmann::json::array();
    for (const auto& r : s.per_type)
        j["per_type"].push_back(row_json(r));
    j["overall"] = row_json(s.overall);
    return j.dump(2) + "\n";
}

} // namespace mitotk
