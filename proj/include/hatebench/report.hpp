#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hatebench/attack.hpp"
#include "hatebench/error.hpp"
#include "hatebench/hash.hpp"
#include "hatebench/metrics.hpp"
#include "hatebench/surrogate.hpp"

namespace hatebench {

namespace detail {

inline std::string fmt(double v, int precision = 3) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    return os.str();
}

inline std::string fmt_opt(const std::optional<double>& v, int precision = 3) {
    return v ? fmt(*v, precision) : std::string("-");
}

} // namespace detail

// ---------------------------------------------------------------- manifest

// Every emitted artifact is listed with its content hash so a campaign
// directory can be verified after the fact.
class ArtifactManifest {
public:
    explicit ArtifactManifest(std::uint64_t seed = 0) : seed_(seed) {}

    void add(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("manifest: cannot read " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string content = ss.str();
        entries_.push_back({path.string(), sha256_hex(content), content.size()});
    }

    bool verify() const {
        for (const auto& e : entries_) {
            std::ifstream in(e.path, std::ios::binary);
            if (!in) return false;
            std::stringstream ss;
            ss << in.rdbuf();
            if (sha256_hex(ss.str()) != e.sha256) return false;
        }
        return true;
    }

    void write(const std::filesystem::path& path) const {
        json files = json::array();
        for (const auto& e : entries_)
            files.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
        const json j{{"seed", seed_}, {"files", files}};
        std::ofstream out(path);
        if (!out) throw Error("cannot write manifest " + path.string());
        out << j.dump(2) << '\n';
    }

    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        std::string path;
        std::string sha256;
        std::size_t bytes;
    };
    std::uint64_t seed_;
    std::vector<Entry> entries_;
};

// ---------------------------------------------------------------- metrics tables

// Markdown table in F1 / Acc / Prec / Recall column order.
inline void write_metrics_markdown(const std::vector<MetricsReport>& reports,
                                   const std::filesystem::path& path,
                                   const std::string& row_header = "Group") {
    if (reports.empty()) throw EmptyReport("no metrics to report");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "| " << row_header << " | F1 | Acc | Prec | Recall |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto& r : reports) {
        out << "| " << r.group_key.value_or("all") << " | " << detail::fmt(r.macro_f1) << " | "
            << detail::fmt(r.accuracy) << " | " << detail::fmt(r.precision) << " | "
            << detail::fmt(r.recall) << " |\n";
    }
}

inline void write_metrics_csv(const std::vector<MetricsReport>& reports,
                              const std::filesystem::path& path) {
    if (reports.empty()) throw EmptyReport("no metrics to report");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "group,f1,acc,prec,recall,tp,fp,fn,tn,degenerate,single_class\n";
    for (const auto& r : reports) {
        out << r.group_key.value_or("all") << ',' << detail::fmt(r.macro_f1, 6) << ','
            << detail::fmt(r.accuracy, 6) << ',' << detail::fmt(r.precision, 6) << ','
            << detail::fmt(r.recall, 6) << ',' << r.confusion.tp << ',' << r.confusion.fp << ','
            << r.confusion.fn << ',' << r.confusion.tn << ',' << (r.degenerate ? 1 : 0) << ','
            << (r.single_class ? 1 : 0) << '\n';
    }
}

inline json metrics_to_json(const MetricsReport& r) {
    json j{{"f1", r.macro_f1},
           {"acc", r.accuracy},
           {"prec", r.precision},
           {"recall", r.recall},
           {"confusion",
            {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn},
             {"tn", r.confusion.tn}}},
           {"degenerate", r.degenerate},
           {"single_class", r.single_class}};
    if (r.group_key) j["group"] = *r.group_key;
    if (r.f1_hate) j["f1_hate"] = *r.f1_hate;
    if (r.f1_non_hate) j["f1_non_hate"] = *r.f1_non_hate;
    return j;
}

inline void write_metrics_json(const std::vector<MetricsReport>& reports,
                               const std::filesystem::path& path) {
    if (reports.empty()) throw EmptyReport("no metrics to report");
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(metrics_to_json(r));
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << arr.dump(2) << '\n';
}

// ---------------------------------------------------------------- attack tables

struct AttackSummaryRow {
    std::string victim_id;
    std::string attack_id;
    double asr = 0.0;
    std::optional<double> mean_wmr;
    std::optional<double> mean_use;
    double mean_meteor = 0.0;
    std::optional<double> mean_fluency;
    double mean_queries = 0.0;
    double mean_time_seconds = 0.0;
    std::size_t attempted = 0;
};

inline std::vector<AttackSummaryRow> summarize_attacks(const std::vector<AttackResult>& results) {
    if (results.empty()) throw EmptyReport("no attack results");
    std::map<std::pair<std::string, std::string>, std::vector<const AttackResult*>> groups;
    for (const auto& r : results) groups[{r.victim_id, to_string(r.attack_id)}].push_back(&r);

    std::vector<AttackSummaryRow> rows;
    for (const auto& [key, members] : groups) {
        AttackSummaryRow row;
        row.victim_id = key.first;
        row.attack_id = key.second;
        row.attempted = members.size();
        double wmr_sum = 0.0, use_sum = 0.0, fluency_sum = 0.0;
        std::size_t wmr_n = 0, use_n = 0, fluency_n = 0, success = 0;
        for (const auto* r : members) {
            if (r->success) ++success;
            if (r->wmr) {
                wmr_sum += *r->wmr;
                ++wmr_n;
            }
            if (r->use_sim) {
                use_sum += *r->use_sim;
                ++use_n;
            }
            if (r->fluency) {
                fluency_sum += *r->fluency;
                ++fluency_n;
            }
            row.mean_meteor += r->meteor;
            row.mean_queries += static_cast<double>(r->queries);
            row.mean_time_seconds += std::chrono::duration<double>(r->elapsed).count();
        }
        const double n = static_cast<double>(members.size());
        row.asr = static_cast<double>(success) / n;
        row.mean_meteor /= n;
        row.mean_queries /= n;
        row.mean_time_seconds /= n;
        if (wmr_n > 0) row.mean_wmr = wmr_sum / static_cast<double>(wmr_n);
        if (use_n > 0) row.mean_use = use_sum / static_cast<double>(use_n);
        if (fluency_n > 0) row.mean_fluency = fluency_sum / static_cast<double>(fluency_n);
        rows.push_back(std::move(row));
    }
    return rows;
}

// CSV shaped as ASR / WMR / USE / Meteor / Fluency / #Query / Time.
inline void write_attack_csv(const std::vector<AttackResult>& results,
                             const std::filesystem::path& path) {
    const auto rows = summarize_attacks(results);
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "victim,attack,asr,wmr,use,meteor,fluency,queries,time_s,attempted\n";
    for (const auto& r : rows) {
        out << r.victim_id << ',' << r.attack_id << ',' << detail::fmt(r.asr) << ','
            << detail::fmt_opt(r.mean_wmr) << ',' << detail::fmt_opt(r.mean_use) << ','
            << detail::fmt(r.mean_meteor) << ',' << detail::fmt_opt(r.mean_fluency) << ','
            << detail::fmt(r.mean_queries, 1) << ',' << detail::fmt(r.mean_time_seconds) << ','
            << r.attempted << '\n';
    }
}

inline void write_attack_results_jsonl(const std::vector<AttackResult>& results,
                                       const std::filesystem::path& path) {
    if (results.empty()) throw EmptyReport("no attack results");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& r : results) out << to_json(r).dump() << '\n';
}

// ---------------------------------------------------------------- ablation

inline void write_ablation_csv(const std::vector<AblationRow>& rows,
                               const std::filesystem::path& path) {
    if (rows.empty()) throw EmptyReport("no ablation rows");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "size,agreement,accuracy,asr_s,asr_t,use,queries_s\n";
    for (const auto& r : rows) {
        out << r.size << ',' << detail::fmt(r.agreement) << ','
            << (std::isfinite(r.accuracy) ? detail::fmt(r.accuracy) : std::string("-")) << ','
            << detail::fmt(r.asr_surrogate) << ',' << detail::fmt(r.asr_target) << ','
            << detail::fmt(r.mean_use) << ',' << detail::fmt(r.mean_surrogate_queries, 1) << '\n';
    }
}

// ---------------------------------------------------------------- svg plots

// Static vector-image emission; campaigns produce files, not an app.
inline void write_bar_chart_svg(const std::vector<std::pair<std::string, double>>& bars,
                                const std::string& title, const std::filesystem::path& path) {
    if (bars.empty()) throw EmptyReport("no data to plot");
    const int bar_w = 36, gap = 14, height = 280, margin = 40;
    const int width = margin * 2 + static_cast<int>(bars.size()) * (bar_w + gap);
    double mx = 0.0;
    for (const auto& [label, v] : bars) mx = std::max(mx, v);
    if (mx <= 0.0) mx = 1.0;

    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height + 70 << "\">\n";
    out << "<text x=\"" << margin << "\" y=\"18\" font-size=\"14\">" << title << "</text>\n";
    int x = margin;
    for (const auto& [label, v] : bars) {
        const int h = static_cast<int>(v / mx * height);
        out << "<rect x=\"" << x << "\" y=\"" << 30 + height - h << "\" width=\"" << bar_w
            << "\" height=\"" << h << "\" fill=\"#4472c4\"/>\n";
        out << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << 30 + height - h - 4
            << "\" font-size=\"9\" text-anchor=\"middle\">" << detail::fmt(v, 2) << "</text>\n";
        out << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << 30 + height + 12
            << "\" font-size=\"9\" text-anchor=\"middle\" transform=\"rotate(30 " << x + bar_w / 2
            << ' ' << 30 + height + 12 << ")\">" << label << "</text>\n";
        x += bar_w + gap;
    }
    out << "</svg>\n";
}

inline void write_line_chart_svg(const std::vector<std::pair<double, double>>& points,
                                 const std::string& title, const std::filesystem::path& path) {
    if (points.empty()) throw EmptyReport("no data to plot");
    const int width = 480, height = 280, margin = 45;
    double min_x = points.front().first, max_x = points.front().first;
    double min_y = 0.0, max_y = 0.0;
    for (const auto& [px, py] : points) {
        min_x = std::min(min_x, px);
        max_x = std::max(max_x, px);
        max_y = std::max(max_y, py);
    }
    if (max_x == min_x) max_x = min_x + 1.0;
    if (max_y == 0.0) max_y = 1.0;

    auto sx = [&](double v) {
        return margin + (v - min_x) / (max_x - min_x) * (width - 2 * margin);
    };
    auto sy = [&](double v) {
        return height - margin - (v - min_y) / (max_y - min_y) * (height - 2 * margin);
    };

    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n<text x=\"" << margin << "\" y=\"18\" font-size=\"14\">" << title << "</text>\n";
    out << "<polyline fill=\"none\" stroke=\"#c0504d\" stroke-width=\"2\" points=\"";
    for (const auto& [px, py] : points) out << sx(px) << ',' << sy(py) << ' ';
    out << "\"/>\n";
    for (const auto& [px, py] : points)
        out << "<circle cx=\"" << sx(px) << "\" cy=\"" << sy(py) << "\" r=\"3\" fill=\"#c0504d\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"#333\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"#333\"/>\n";
    out << "</svg>\n";
}

} // namespace hatebench
