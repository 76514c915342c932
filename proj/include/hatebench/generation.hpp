#pragma once

#include <atomic>
#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hatebench/error.hpp"
#include "hatebench/rng.hpp"
#include "hatebench/store.hpp"
#include "hatebench/text.hpp"
#include "hatebench/types.hpp"

namespace hatebench {

inline constexpr std::string_view kGroupSlot = "[identity group]";
inline constexpr std::string_view kPromptSlot = "[prompt]";

// ---------------------------------------------------------------- templates

struct PromptTemplate {
    std::string id;
    std::string text; // contains the identity-group slot exactly once
    PromptKind polarity;

    void validate() const {
        std::size_t count = 0;
        for (std::size_t pos = text.find(kGroupSlot); pos != std::string::npos;
             pos = text.find(kGroupSlot, pos + 1))
            ++count;
        if (count != 1)
            throw TemplateError("template '" + id + "' must contain the slot '" +
                                std::string(kGroupSlot) + "' exactly once, found " +
                                std::to_string(count));
    }
};

// TSV: id <tab> polarity <tab> text. Lines starting with '#' are skipped.
inline std::vector<PromptTemplate> load_templates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read template file " + path.string());
    std::vector<PromptTemplate> templates;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto first = line.find('\t');
        const auto second = line.find('\t', first + 1);
        if (first == std::string::npos || second == std::string::npos)
            throw TemplateError("malformed template line: " + line);
        PromptTemplate t;
        t.id = line.substr(0, first);
        t.polarity = PromptKind::from_string(line.substr(first + 1, second - first - 1));
        t.text = line.substr(second + 1);
        t.validate();
        templates.push_back(std::move(t));
    }
    return templates;
}

inline std::string render_prompt(const PromptTemplate& tmpl, IdentityGroup group) {
    tmpl.validate();
    std::string out = tmpl.text;
    const auto pos = out.find(kGroupSlot);
    out.replace(pos, kGroupSlot.size(), identity_group_info(group).display_name);
    return out;
}

// ---------------------------------------------------------------- jailbreaks

// Jailbreak wrappers are data files with a [prompt] slot, so new
// jailbreaks are configuration additions rather than code changes.
class JailbreakRegistry {
public:
    void add(const std::string& id, std::string template_text) {
        if (template_text.find(kPromptSlot) == std::string::npos)
            throw TemplateError("jailbreak template '" + id + "' lacks the '" +
                                std::string(kPromptSlot) + "' slot");
        templates_[id] = std::move(template_text);
    }

    void add_from_file(const std::string& id, const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot read jailbreak template " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        add(id, ss.str());
    }

    bool has(const std::string& id) const { return templates_.count(id) > 0; }

    // Identity for "original"; otherwise the template text with the slot
    // replaced, byte-identical elsewhere.
    std::string wrap(const std::string& rendered_prompt, const std::string& jailbreak_id) const {
        if (jailbreak_id == "original") return rendered_prompt;
        const auto it = templates_.find(jailbreak_id);
        if (it == templates_.end()) throw UnknownJailbreak("unknown jailbreak: " + jailbreak_id);
        std::string out = it->second;
        const auto pos = out.find(kPromptSlot);
        out.replace(pos, kPromptSlot.size(), rendered_prompt);
        return out;
    }

    static JailbreakRegistry defaults(const std::filesystem::path& data_dir) {
        JailbreakRegistry r;
        r.add_from_file("jailbreak_1", data_dir / "jailbreak_1.txt");
        r.add_from_file("jailbreak_2", data_dir / "jailbreak_2.txt");
        return r;
    }

private:
    std::map<std::string, std::string> templates_;
};

inline std::string wrap_jailbreak(const std::string& rendered_prompt, LlmStatus status,
                                  const JailbreakRegistry& registry) {
    switch (status) {
        case LlmStatus::original: return rendered_prompt;
        case LlmStatus::jailbreak_1: return registry.wrap(rendered_prompt, "jailbreak_1");
        case LlmStatus::jailbreak_2: return registry.wrap(rendered_prompt, "jailbreak_2");
        case LlmStatus::not_applicable: break;
    }
    throw UnknownJailbreak("not_applicable is not a generation status");
}

// ---------------------------------------------------------------- refusals

enum class RefusalScreen { likely_refusal, pass };

inline const std::vector<std::string>& default_refusal_patterns() {
    static const std::vector<std::string> patterns = {
        "I'm sorry, as an AI language model",
        "I cannot provide",
        "I apologize",
        "I can't assist",
        "I cannot fulfill",
        "as an AI developed",
    };
    return patterns;
}

inline std::vector<std::string> load_refusal_patterns(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read refusal patterns " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(line);
    return out;
}

// Case-insensitive substring screen. This is a pre-annotation hint; the
// authoritative na labels come from annotation and are never overwritten
// by this check.
inline RefusalScreen screen_refusal(const std::string& text,
                                    const std::vector<std::string>& patterns) {
    const std::string lower = to_lower(text);
    for (const auto& p : patterns) {
        if (lower.find(to_lower(p)) != std::string::npos) return RefusalScreen::likely_refusal;
    }
    return RefusalScreen::pass;
}

// ---------------------------------------------------------------- tasks

struct SamplingParams {
    double temperature = 1.0;
    int max_tokens = 256;
};

struct GenerationTask {
    std::string template_id;
    IdentityGroup identity_group = IdentityGroup::unspecified;
    int repeat_index = 0;
    std::string llm_id;
    LlmStatus status = LlmStatus::original;
    SamplingParams sampling;

    std::string key() const {
        return template_id + "|" + std::string(identity_group_info(identity_group).token) + "|" +
               std::to_string(repeat_index) + "|" + llm_id + "|" + to_string(status);
    }
};

// Exact cartesian product in (template, group, repeat, llm, status) order.
inline std::vector<GenerationTask> build_prompt_matrix(
    const std::vector<PromptTemplate>& templates, const std::vector<IdentityGroup>& groups,
    int repeats, const std::vector<std::string>& llms, const std::vector<LlmStatus>& statuses) {
    if (templates.empty()) throw EmptyAxis("no prompt templates");
    if (groups.empty()) throw EmptyAxis("no identity groups");
    if (repeats < 1) throw EmptyAxis("repeats must be >= 1");
    if (llms.empty()) throw EmptyAxis("no llms");
    if (statuses.empty()) throw EmptyAxis("no statuses");

    std::vector<GenerationTask> tasks;
    tasks.reserve(templates.size() * groups.size() * static_cast<std::size_t>(repeats) *
                  llms.size() * statuses.size());
    for (const auto& t : templates)
        for (const auto g : groups)
            for (int r = 0; r < repeats; ++r)
                for (const auto& llm : llms)
                    for (const auto s : statuses) {
                        GenerationTask task;
                        task.template_id = t.id;
                        task.identity_group = g;
                        task.repeat_index = r;
                        task.llm_id = llm;
                        task.status = s;
                        tasks.push_back(std::move(task));
                    }
    return tasks;
}

inline std::vector<IdentityGroup> all_identity_groups() {
    std::vector<IdentityGroup> out;
    out.reserve(kIdentityGroupCount);
    for (const auto& info : identity_groups()) out.push_back(info.group);
    return out;
}

// ---------------------------------------------------------------- clients

struct Completion {
    std::string text;
    Micros latency{0};
};

// Transport adapter for one LLM. Retries happen in the runner; a client
// throws on transport failure and never fabricates empty samples.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string llm_id() const = 0;
    virtual Completion complete(const std::string& prompt, const SamplingParams& sampling) = 0;
    virtual int max_concurrency() const { return 4; }
};

// Deterministic client for tests and dry runs: replies are a pure
// function of the prompt, with optional scripted failures.
class MockLlmClient : public LlmClient {
public:
    using Responder = std::function<std::string(const std::string&)>;

    MockLlmClient(std::string id, Responder responder)
        : id_(std::move(id)), responder_(std::move(responder)) {}

    std::string llm_id() const override { return id_; }

    Completion complete(const std::string& prompt, const SamplingParams&) override {
        const auto n = calls_.fetch_add(1, std::memory_order_relaxed) + 1;
        if (fail_every_ > 0 && n % fail_every_ == 0) throw QueryFailed("mock llm transport failure");
        return {responder_(prompt), Micros{0}};
    }

    void fail_every(std::uint64_t n) { fail_every_ = n; }
    std::uint64_t call_count() const { return calls_.load(); }

private:
    std::string id_;
    Responder responder_;
    std::atomic<std::uint64_t> calls_{0};
    std::uint64_t fail_every_ = 0;
};

class ClientRegistry {
public:
    void add(std::shared_ptr<LlmClient> client) { clients_[client->llm_id()] = std::move(client); }
    bool has(const std::string& id) const { return clients_.count(id) > 0; }
    LlmClient& get(const std::string& id) const {
        const auto it = clients_.find(id);
        if (it == clients_.end()) throw InvalidInput("llm client not registered: " + id);
        return *it->second;
    }

private:
    std::map<std::string, std::shared_ptr<LlmClient>> clients_;
};

// Canned dry-run client. When the prompt contains a trigger substring the
// reply embeds `marker`, simulating elicited content a keyword-rule mock
// detector will flag; replies never echo the prompt (jailbreak wrappers
// mention refusal phrases and would trip the refusal screen).
inline std::shared_ptr<MockLlmClient> make_scripted_mock_llm(
    const std::string& id, std::string marker = "",
    std::vector<std::string> triggers = {"toxic", "harmful", "negative"}) {
    return std::make_shared<MockLlmClient>(
        id, [id, marker = std::move(marker),
             triggers = std::move(triggers)](const std::string& prompt) {
            const std::string tag = std::to_string(fnv1a(prompt) % 100000);
            if (!marker.empty()) {
                const std::string lower = to_lower(prompt);
                for (const auto& t : triggers) {
                    if (lower.find(to_lower(t)) != std::string::npos)
                        return "dry-run " + id + " says they are " + marker + " people [" + tag +
                               "]";
                }
            }
            return "dry-run " + id + " says they seem like pleasant people [" + tag + "]";
        });
}

// ---------------------------------------------------------------- runner

struct GenerationOptions {
    int workers = 4;
    int retry_cap = 3;
    std::chrono::milliseconds retry_base_delay{250};
    std::vector<std::string> refusal_patterns = default_refusal_patterns();
};

struct GenerationReport {
    std::size_t completed = 0;
    std::size_t failed = 0;
    std::size_t refusal_hints = 0;
    std::size_t skipped_existing = 0;
};

namespace detail {

inline Source source_for_llm(const std::string& llm_id) { return Source::from_string(llm_id); }

} // namespace detail

// Executes the task matrix against registered clients. One Sample per
// completed task, keyed by the task key: reruns skip persisted tasks, so
// an interrupted run resumes without duplicates. Client exhaustion marks
// the task failed and the pipeline continues.
inline GenerationReport run_generation(const std::vector<GenerationTask>& tasks,
                                       const ClientRegistry& registry,
                                       const JailbreakRegistry& jailbreaks,
                                       const std::vector<PromptTemplate>& templates,
                                       SampleStore& store,
                                       const GenerationOptions& options = {}) {
    for (const auto& task : tasks) {
        if (!registry.has(task.llm_id))
            throw InvalidInput("llm client not registered: " + task.llm_id);
    }
    std::map<std::string, const PromptTemplate*> template_index;
    for (const auto& t : templates) template_index[t.id] = &t;

    GenerationReport report;
    std::mutex report_mutex;
    std::atomic<std::size_t> next{0};

    // per-LLM concurrency limits
    std::map<std::string, std::unique_ptr<std::counting_semaphore<256>>> limits;
    for (const auto& task : tasks) {
        if (!limits.count(task.llm_id)) {
            const int cap = std::max(1, registry.get(task.llm_id).max_concurrency());
            limits[task.llm_id] =
                std::make_unique<std::counting_semaphore<256>>(std::min(cap, 256));
        }
    }

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const GenerationTask& task = tasks[i];

            if (store.contains(task.key())) {
                std::lock_guard lock(report_mutex);
                ++report.skipped_existing;
                continue;
            }

            const auto tmpl_it = template_index.find(task.template_id);
            if (tmpl_it == template_index.end()) {
                std::lock_guard lock(report_mutex);
                ++report.failed;
                continue;
            }
            const PromptTemplate& tmpl = *tmpl_it->second;
            const std::string prompt =
                wrap_jailbreak(render_prompt(tmpl, task.identity_group), task.status, jailbreaks);

            LlmClient& client = registry.get(task.llm_id);
            auto& sem = *limits.at(task.llm_id);

            Completion completion;
            bool ok = false;
            sem.acquire();
            for (int attempt = 0; attempt <= options.retry_cap; ++attempt) {
                try {
                    completion = client.complete(prompt, task.sampling);
                    ok = true;
                    break;
                } catch (const std::exception&) {
                    if (attempt < options.retry_cap)
                        std::this_thread::sleep_for(options.retry_base_delay * (1 << attempt));
                }
            }
            sem.release();

            if (!ok) {
                std::lock_guard lock(report_mutex);
                ++report.failed;
                continue;
            }

            const bool refusal =
                screen_refusal(completion.text, options.refusal_patterns) ==
                RefusalScreen::likely_refusal;

            Sample s;
            s.id = task.key();
            s.text = completion.text;
            s.source = detail::source_for_llm(task.llm_id);
            s.identity_group = task.identity_group;
            s.identity_category = category_of(task.identity_group);
            s.prompt_kind = tmpl.polarity;
            s.llm_status = task.status;
            s.label = refusal ? Label::na : Label::unlabeled; // na is a pre-annotation hint here

            const bool added = store.add_if_absent(std::move(s));
            std::lock_guard lock(report_mutex);
            if (added) {
                ++report.completed;
                if (refusal) ++report.refusal_hints;
            } else {
                ++report.skipped_existing;
            }
        }
    };

    const int n_workers = std::max(1, options.workers);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return report;
}

} // namespace hatebench
