#include "mitotk/report.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "mitotk/csv.hpp"
#include "mitotk/digest.hpp"
#include "mitotk/error.hpp"
#include "mitotk/numfmt.hpp"

namespace mitotk {

namespace {

const char* kPalette[] = {"#1b6ca8", "#c0392b", "#1e8449", "#8e44ad", "#d68910", "#148f77"};

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path);
    out << content;
    if (!out)
        throw Error("write failed: " + path);
}

struct MetricCells {
    std::string roc_auc, ba, nmf_acc, amf_acc;
};

MetricCells cells_for(const GroupEval& g, const char* undefined) {
    MetricCells c;
    c.roc_auc = g.auc_defined ? format_fixed(g.roc_auc, 3) : undefined;
    c.nmf_acc = g.metrics.specificity_defined ? format_fixed(g.metrics.specificity, 3) : undefined;
    c.amf_acc = g.metrics.sensitivity_defined ? format_fixed(g.metrics.sensitivity, 3) : undefined;
    c.ba = (g.metrics.sensitivity_defined && g.metrics.specificity_defined)
               ? format_ba_cell(g.metrics.sensitivity, g.metrics.specificity)
               : undefined;
    return c;
}

} // namespace

std::string metrics_csv(const EvalReport& report) {
    CsvTable t;
    t.header = {"group", "roc_auc", "ba", "nmf_acc", "amf_acc"};
    for (const auto& g : report.groups) {
        MetricCells c = cells_for(g, "");
        t.rows.push_back({g.group, c.roc_auc, c.ba, c.nmf_acc, c.amf_acc});
    }
    return csv_to_string(t);
}

std::string metrics_text(const EvalReport& report) {
    std::vector<std::array<std::string, 5>> rows;
    rows.push_back({"group", "roc_auc", "ba", "nmf_acc", "amf_acc"});
    for (const auto& g : report.groups) {
        MetricCells c = cells_for(g, "-");
        rows.push_back({g.group, c.roc_auc, c.ba, c.nmf_acc, c.amf_acc});
    }
    std::array<std::size_t, 5> width{};
    for (const auto& r : rows)
        for (std::size_t i = 0; i < 5; ++i)
            width[i] = std::max(width[i], r[i].size());
    std::ostringstream out;
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < 5; ++i) {
            if (i)
                out << "  ";
            if (i == 0)
                out << r[i] << std::string(width[i] - r[i].size(), ' ');
            else
                out << std::string(width[i] - r[i].size(), ' ') << r[i];
        }
        out << '\n';
    }
    return out.str();
}

std::string roc_points_csv(const EvalReport& report) {
    CsvTable t;
    t.header = {"group", "threshold", "fpr", "tpr"};
    for (const auto& g : report.groups)
        for (const auto& p : g.roc_points)
            t.rows.push_back({g.group, format_full(p.threshold), format_full(p.fpr),
                              format_full(p.tpr)});
    return csv_to_string(t);
}

std::string confusion_csv(const EvalReport& report) {
    CsvTable t;
    t.header = {"group", "tp", "fn", "tn", "fp"};
    for (const auto& g : report.groups)
        t.rows.push_back({g.group, std::to_string(g.cm.tp), std::to_string(g.cm.fn),
                          std::to_string(g.cm.tn), std::to_string(g.cm.fp)});
    return csv_to_string(t);
}

std::string render_roc_svg(const EvalReport& report) {
    const double margin = 50.0, size = 400.0;
    auto px = [&](double fpr) { return format_fixed(margin + fpr * size, 2); };
    auto py = [&](double tpr) { return format_fixed(margin + size - tpr * size, 2); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 500 500\" "
         "font-family=\"monospace\" font-size=\"12\">\n";
    s << "<rect x=\"50\" y=\"50\" width=\"400\" height=\"400\" fill=\"none\" "
         "stroke=\"#444444\"/>\n";
    s << "<line x1=\"50\" y1=\"450\" x2=\"450\" y2=\"50\" stroke=\"#aaaaaa\" "
         "stroke-dasharray=\"4 4\"/>\n";
    for (const char* tick : {"0", "0.5", "1"}) {
        double v = std::stod(tick);
        s << "<text x=\"" << px(v) << "\" y=\"468\" text-anchor=\"middle\">" << tick
          << "</text>\n";
        s << "<text x=\"42\" y=\"" << py(v) << "\" text-anchor=\"end\">" << tick << "</text>\n";
    }
    s << "<text x=\"250\" y=\"492\" text-anchor=\"middle\">false positive rate</text>\n";
    s << "<text x=\"14\" y=\"250\" text-anchor=\"middle\" transform=\"rotate(-90 14 250)\">"
         "true positive rate</text>\n";

    int color_idx = 0, legend_row = 0;
    for (const auto& g : report.groups) {
        if (!g.auc_defined)
            continue;
        const char* color = kPalette[color_idx % (sizeof kPalette / sizeof kPalette[0])];
        ++color_idx;
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < g.roc_points.size(); ++i) {
            if (i)
                s << ' ';
            s << px(g.roc_points[i].fpr) << ',' << py(g.roc_points[i].tpr);
        }
        s << "\"/>\n";
        double y = 66.0 + 16.0 * legend_row;
        ++legend_row;
        s << "<line x1=\"60\" y1=\"" << format_fixed(y - 4.0, 2) << "\" x2=\"84\" y2=\""
          << format_fixed(y - 4.0, 2) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        s << "<text x=\"90\" y=\"" << format_fixed(y, 2) << "\">" << g.group << " (auc "
          << format_fixed(g.roc_auc, 3) << ")</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::string metrics_json(const EvalReport& report) {
    nlohmann::json j;
    j["groups"] = nlohmann::json::array();
    for (const auto& g : report.groups) {
        nlohmann::json o;
        o["group"] = g.group;
        o["n"] = g.n;
        o["threshold"] = g.otsu.threshold;
        o["threshold_degenerate"] = g.otsu.degenerate;
        o["confusion"] = {{"tp", g.cm.tp}, {"fn", g.cm.fn}, {"tn", g.cm.tn}, {"fp", g.cm.fp}};
        o["sensitivity"] =
            g.metrics.sensitivity_defined ? nlohmann::json(g.metrics.sensitivity) : nullptr;
        o["specificity"] =
            g.metrics.specificity_defined ? nlohmann::json(g.metrics.specificity) : nullptr;
        o["balanced_accuracy"] = (g.metrics.sensitivity_defined && g.metrics.specificity_defined)
                                     ? nlohmann::json(g.metrics.balanced_accuracy)
                                     : nullptr;
        o["accuracy"] = g.metrics.accuracy;
        o["roc_auc"] = g.auc_defined ? nlohmann::json(g.roc_auc) : nullptr;
        j["groups"].push_back(o);
    }
    return j.dump(2) + "\n";
}

std::vector<std::string> emit_run_report(const RunReport& run, const std::string& dir) {
    std::filesystem::create_directories(dir);
    auto path_of = [&dir](const char* name) {
        return (std::filesystem::path(dir) / name).string();
    };

    std::vector<std::string> artifacts;
    for (const auto& name : run.extra_artifacts) {
        std::string p = (std::filesystem::path(dir) / name).string();
        if (!std::filesystem::exists(p))
            throw Error("run report references missing artifact " + p);
        artifacts.push_back(p);
    }
    auto emit = [&](const char* name, const std::string& content) {
        write_text(path_of(name), content);
        artifacts.push_back(path_of(name));
    };

    if (run.has_stats)
        emit("stats.csv", stats_csv(run.stats));
    if (run.has_eval) {
        emit("metrics.csv", metrics_csv(run.eval));
        emit("metrics.json", metrics_json(run.eval));
        emit("roc_points.csv", roc_points_csv(run.eval));
        emit("roc.svg", render_roc_svg(run.eval));
        emit("confusion.csv", confusion_csv(run.eval));
    }

    std::string config_flat;
    for (const auto& [k, v] : run.config)
        config_flat += k + "=" + v + "\n";

    nlohmann::json j;
    j["seed"] = run.seed;
    j["config"] = run.config;
    j["config_digest"] = sha256_hex(config_flat);
    j["artifacts"] = nlohmann::json::array();
    for (const auto& p : artifacts)
        j["artifacts"].push_back(std::filesystem::path(p).filename().string());
    if (!run.timestamp.empty())
        j["timestamp"] = run.timestamp;
    write_text(path_of("run.json"), j.dump(2) + "\n");
    return artifacts;
}

} // namespace mitotk
