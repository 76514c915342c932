#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "hatebench/error.hpp"
#include "hatebench/types.hpp"

namespace hatebench {

using json = nlohmann::json;

// ---------------------------------------------------------------- json mapping

inline json to_json(const Sample& s) {
    json j{{"id", s.id},
           {"text", s.text},
           {"source", s.source.str()},
           {"identity_group", to_string(s.identity_group)},
           {"identity_category", to_string(s.identity_category)},
           {"prompt_kind", s.prompt_kind.str()},
           {"llm_status", to_string(s.llm_status)},
           {"label", to_string(s.label)}};
    if (s.split) j["split"] = *s.split;
    return j;
}

inline Sample sample_from_json(const json& j) {
    Sample s;
    s.id = j.at("id").get<std::string>();
    s.text = j.at("text").get<std::string>();
    s.source = Source::from_string(j.at("source").get<std::string>());
    s.identity_group = identity_group_from_string(j.at("identity_group").get<std::string>());
    s.identity_category = identity_category_from_string(j.at("identity_category").get<std::string>());
    s.prompt_kind = PromptKind::from_string(j.at("prompt_kind").get<std::string>());
    s.llm_status = llm_status_from_string(j.at("llm_status").get<std::string>());
    s.label = label_from_string(j.at("label").get<std::string>());
    if (j.contains("split") && !j.at("split").is_null())
        s.split = j.at("split").get<std::string>();
    s.validate();
    return s;
}

inline json to_json(const Annotation& a) {
    return json{{"sample_id", a.sample_id}, {"annotator_id", a.annotator_id},
                {"label", to_string(a.label)}};
}

inline Annotation annotation_from_json(const json& j) {
    Annotation a;
    a.sample_id = j.at("sample_id").get<std::string>();
    a.annotator_id = j.at("annotator_id").get<std::string>();
    a.label = label_from_string(j.at("label").get<std::string>());
    a.validate();
    return a;
}

// ---------------------------------------------------------------- store

// Reads are shareable once loading is done; mutation goes through the
// single internal writer mutex.
class SampleStore {
public:
    SampleStore() = default;

    SampleStore(const SampleStore& o) {
        std::lock_guard lock(o.write_mutex_);
        samples_ = o.samples_;
        index_ = o.index_;
    }
    SampleStore& operator=(const SampleStore&) = delete;

    void add(Sample s) {
        s.validate();
        std::lock_guard lock(write_mutex_);
        if (index_.count(s.id)) throw DuplicateId("duplicate sample id: " + s.id);
        index_[s.id] = samples_.size();
        samples_.push_back(std::move(s));
    }

    // Insert unless the id is already present; returns false on skip.
    bool add_if_absent(Sample s) {
        s.validate();
        std::lock_guard lock(write_mutex_);
        if (index_.count(s.id)) return false;
        index_[s.id] = samples_.size();
        samples_.push_back(std::move(s));
        return true;
    }

    void set_label(const std::string& id, Label label) {
        std::lock_guard lock(write_mutex_);
        samples_[index_at(id)].label = label;
    }

    bool contains(const std::string& id) const {
        std::lock_guard lock(write_mutex_);
        return index_.count(id) > 0;
    }
    std::size_t size() const {
        std::lock_guard lock(write_mutex_);
        return samples_.size();
    }
    bool empty() const { return size() == 0; }

    // Reference accessors are for the read phase, once writers quiesce.
    const Sample& get(const std::string& id) const { return samples_[index_at(id)]; }
    const std::vector<Sample>& all() const { return samples_; }

    std::vector<Sample> filter(const std::function<bool(const Sample&)>& pred) const {
        std::vector<Sample> out;
        for (const auto& s : samples_)
            if (pred(s)) out.push_back(s);
        return out;
    }

    // na (and unlabeled) samples are excluded from every evaluation set.
    std::vector<Sample> evaluation_set() const {
        return filter([](const Sample& s) {
            return s.label == Label::hate || s.label == Label::non_hate;
        });
    }

    void save_jsonl(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw Error("cannot write " + path.string());
        for (const auto& s : samples_) out << to_json(s).dump() << '\n';
    }

    struct LoadStats {
        std::size_t loaded = 0;
        std::size_t skipped = 0;
    };

    LoadStats load_jsonl(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot read " + path.string());
        LoadStats stats;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                add(sample_from_json(json::parse(line)));
                ++stats.loaded;
            } catch (const DuplicateId&) {
                throw;
            } catch (const std::exception&) {
                ++stats.skipped;
            }
        }
        return stats;
    }

private:
    std::size_t index_at(const std::string& id) const {
        const auto it = index_.find(id);
        if (it == index_.end()) throw InvalidInput("unknown sample id: " + id);
        return it->second;
    }

    std::vector<Sample> samples_;
    std::unordered_map<std::string, std::size_t> index_;
    mutable std::mutex write_mutex_;
};

// ---------------------------------------------------------------- annotations

class AnnotationStore {
public:
    void add(Annotation a) {
        a.validate();
        const std::string key = a.sample_id + "\x1f" + a.annotator_id;
        if (seen_.count(key))
            throw DuplicateId("one label per annotator per sample: " + a.sample_id + "/" +
                              a.annotator_id);
        seen_.insert(key);
        by_sample_[a.sample_id].push_back(a);
        annotations_.push_back(std::move(a));
    }

    const std::vector<Annotation>& all() const { return annotations_; }

    std::vector<Annotation> for_sample(const std::string& sample_id) const {
        const auto it = by_sample_.find(sample_id);
        return it == by_sample_.end() ? std::vector<Annotation>{} : it->second;
    }

    const std::unordered_map<std::string, std::vector<Annotation>>& grouped() const {
        return by_sample_;
    }

    void save_jsonl(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw Error("cannot write " + path.string());
        for (const auto& a : annotations_) out << to_json(a).dump() << '\n';
    }

    std::size_t load_jsonl(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot read " + path.string());
        std::size_t n = 0;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            add(annotation_from_json(json::parse(line)));
            ++n;
        }
        return n;
    }

private:
    std::vector<Annotation> annotations_;
    std::unordered_map<std::string, std::vector<Annotation>> by_sample_;
    std::unordered_set<std::string> seen_;
};

// ---------------------------------------------------------------- external corpora

// Maps a foreign file onto the Sample schema. Rows are JSONL objects or
// delimiter-separated columns depending on the file extension.
struct CorpusDescriptor {
    std::filesystem::path path;
    std::string text_field;
    std::string label_field;
    std::unordered_map<std::string, Label> label_map; // source value -> hate/non_hate
    std::optional<std::string> split_field;           // keep official splits when declared
    std::optional<std::string> id_field;
    char delimiter = '\t'; // for non-JSONL files
};

struct CorpusLoadReport {
    std::size_t loaded = 0;
    std::size_t skipped = 0; // malformed rows
};

namespace detail {

inline std::vector<std::string> split_row(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == delim) {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    return cells;
}

} // namespace detail

// Every loaded sample carries source=human. Unmappable label values are
// hard errors (with the row index); malformed rows are skipped and counted.
inline CorpusLoadReport load_external_corpus(const CorpusDescriptor& desc, SampleStore& store) {
    std::ifstream in(desc.path);
    if (!in) throw Error("cannot read " + desc.path.string());

    CorpusLoadReport report;
    const bool is_jsonl = desc.path.extension() == ".jsonl" || desc.path.extension() == ".json";

    std::vector<std::string> header;
    std::string line;
    std::size_t row = 0;

    auto map_label = [&](const std::string& value, std::size_t at_row) {
        const auto it = desc.label_map.find(value);
        if (it == desc.label_map.end())
            throw LabelMappingError("unmappable label value '" + value + "'", at_row);
        return it->second;
    };

    auto make_sample = [&](std::string id, std::string text, Label label,
                           std::optional<std::string> split) {
        Sample s;
        s.id = std::move(id);
        s.text = std::move(text);
        s.source = Source::human();
        s.identity_group = IdentityGroup::unspecified;
        s.identity_category = IdentityCategory::race;
        s.prompt_kind = PromptKind::from_string("external");
        s.llm_status = LlmStatus::not_applicable;
        s.label = label;
        s.split = std::move(split);
        store.add(std::move(s));
        ++report.loaded;
    };

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!is_jsonl && header.empty()) {
            header = detail::split_row(line, desc.delimiter);
            continue;
        }
        ++row;
        try {
            std::string text, label_value, id;
            std::optional<std::string> split;
            if (is_jsonl) {
                const json j = json::parse(line);
                text = j.at(desc.text_field).get<std::string>();
                const auto& lv = j.at(desc.label_field);
                label_value = lv.is_string() ? lv.get<std::string>() : lv.dump();
                if (desc.split_field && j.contains(*desc.split_field))
                    split = j.at(*desc.split_field).get<std::string>();
                if (desc.id_field && j.contains(*desc.id_field)) {
                    const auto& iv = j.at(*desc.id_field);
                    id = iv.is_string() ? iv.get<std::string>() : iv.dump();
                }
            } else {
                const auto cells = detail::split_row(line, desc.delimiter);
                auto col = [&](const std::string& name) -> const std::string& {
                    for (std::size_t i = 0; i < header.size(); ++i)
                        if (header[i] == name && i < cells.size()) return cells[i];
                    throw Error("missing column " + name);
                };
                text = col(desc.text_field);
                label_value = col(desc.label_field);
                if (desc.split_field) split = col(*desc.split_field);
                if (desc.id_field) id = col(*desc.id_field);
            }
            if (text.empty()) throw Error("empty text");
            if (id.empty()) id = desc.path.stem().string() + "-" + std::to_string(row);
            make_sample(std::move(id), std::move(text), map_label(label_value, row),
                        std::move(split));
        } catch (const LabelMappingError&) {
            throw;
        } catch (const DuplicateId&) {
            throw;
        } catch (const std::exception&) {
            ++report.skipped;
        }
    }
    return report;
}

} // namespace hatebench
