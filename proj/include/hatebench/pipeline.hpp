#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hatebench/annotate.hpp"
#include "hatebench/attack.hpp"
#include "hatebench/dataset.hpp"
#include "hatebench/detector.hpp"
#include "hatebench/error.hpp"
#include "hatebench/generation.hpp"
#include "hatebench/remote_detector.hpp"
#include "hatebench/remote_llm.hpp"
#include "hatebench/report.hpp"
#include "hatebench/resources.hpp"
#include "hatebench/saliency.hpp"
#include "hatebench/store.hpp"
#include "hatebench/surrogate.hpp"

namespace hatebench {

inline std::filesystem::path default_data_dir() {
#ifdef HATEBENCH_DATA_DIR
    return HATEBENCH_DATA_DIR;
#else
    return "data";
#endif
}

// ---------------------------------------------------------------- config

// One campaign file drives the whole run. CLI flags override keys.
struct CampaignConfig {
    std::string campaign_id = "campaign";
    std::uint64_t seed = kDefaultSeed;
    std::filesystem::path out_dir = "out";
    std::filesystem::path data_dir = default_data_dir();
    json raw; // validated source document

    static CampaignConfig from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file", path.string());
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("invalid JSON: ") + e.what(), path.string());
        }
        return from_json(j);
    }

    static CampaignConfig from_json(const json& j) {
        CampaignConfig c;
        c.raw = j;
        validate(j);
        c.campaign_id = j.value("campaign_id", c.campaign_id);
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        else c.seed = default_seed();
        if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("data_dir")) c.data_dir = j.at("data_dir").get<std::string>();
        return c;
    }

    static void validate(const json& j) {
        if (!j.is_object()) throw ConfigError("config must be a JSON object", "$");
        if (j.contains("detectors")) {
            if (!j.at("detectors").is_array())
                throw ConfigError("detectors must be an array", "detectors");
            std::size_t i = 0;
            for (const auto& d : j.at("detectors")) {
                const std::string at = "detectors[" + std::to_string(i) + "]";
                if (!d.is_object()) throw ConfigError("detector entry must be an object", at);
                if (!d.contains("id")) throw ConfigError("detector needs an id", at + ".id");
                if (d.contains("threshold")) {
                    const double t = d.at("threshold").get<double>();
                    if (t <= 0.0 || t >= 1.0)
                        throw ConfigError("threshold must lie in (0,1)", at + ".threshold");
                }
                const std::string kind = d.value("kind", "mock");
                if (kind != "mock" && kind != "remote_api" && kind != "local_model")
                    throw ConfigError("unknown detector kind '" + kind + "'", at + ".kind");
                if (kind != "mock" && !d.contains("base_url"))
                    throw ConfigError("remote detectors need base_url", at + ".base_url");
                ++i;
            }
        }
        if (j.contains("stages") && !j.at("stages").is_object())
            throw ConfigError("stages must be an object", "stages");
        if (j.contains("dataset") && !j.at("dataset").is_object())
            throw ConfigError("dataset must be an object", "dataset");
    }
};

// ---------------------------------------------------------------- registry building

inline void register_detectors_from_config(const json& detectors, DetectorGateway& gateway) {
    for (const auto& d : detectors) {
        DetectorConfig cfg;
        cfg.detector_id = d.at("id").get<std::string>();
        cfg.threshold = d.value("threshold", 0.5);
        cfg.rate_limit_qps = d.value("rate_limit_qps", 0.0);
        cfg.cache_enabled = d.value("cache_enabled", true);
        cfg.hate_attribute = d.value("hate_attribute", "");
        const std::string kind = d.value("kind", "mock");

        std::unique_ptr<Detector> impl;
        if (kind == "mock") {
            cfg.kind = DetectorKind::mock;
            std::unordered_map<std::string, double> keywords;
            if (d.contains("keywords"))
                for (const auto& [word, score] : d.at("keywords").items())
                    keywords[word] = score.get<double>();
            impl = std::make_unique<MockDetector>(std::move(keywords),
                                                  d.value("default_score", 0.1));
        } else {
            cfg.kind = kind == "remote_api" ? DetectorKind::remote_api : DetectorKind::local_model;
            cfg.timeout = std::chrono::milliseconds(d.value("timeout_ms", 10000));
            RemoteEndpoint ep;
            ep.base_url = d.at("base_url").get<std::string>();
            ep.path = d.value("path", "/");
            ep.style = provider_style_from_string(d.value("style", "simple"));
            ep.hate_attribute = cfg.hate_attribute;
            ep.api_key_env = d.value("api_key_env", "");
            ep.timeout = cfg.timeout;
            impl = std::make_unique<RemoteJsonDetector>(std::move(ep));
        }
        gateway.register_detector(std::move(cfg), std::move(impl));
    }
}

// ---------------------------------------------------------------- pipeline

struct StageOutcome {
    std::string stage;
    bool ran = false;
    bool ok = false;
    std::string error;
};

struct PipelineResult {
    int exit_status = 0;
    std::vector<StageOutcome> stages;
    std::vector<std::filesystem::path> artifacts;
};

// Runs the configured stages in a fixed order, collects emitted files
// into a hashed manifest, and skips stages whose prerequisites failed.
inline PipelineResult run_pipeline(const CampaignConfig& config) {
    PipelineResult result;
    std::filesystem::create_directories(config.out_dir);

    DetectorGateway gateway;
    gateway.set_campaign(config.campaign_id);
    if (config.raw.contains("detectors"))
        register_detectors_from_config(config.raw.at("detectors"), gateway);

    SampleStore store;
    bool dataset_ok = false;
    if (config.raw.contains("dataset")) {
        const json& ds = config.raw.at("dataset");
        if (ds.contains("store")) {
            store.load_jsonl(ds.at("store").get<std::string>());
            dataset_ok = true;
        } else if (ds.contains("corpus")) {
            const json& c = ds.at("corpus");
            CorpusDescriptor desc;
            desc.path = c.at("path").get<std::string>();
            desc.text_field = c.at("text_field").get<std::string>();
            desc.label_field = c.at("label_field").get<std::string>();
            for (const auto& [value, label] : c.at("label_map").items())
                desc.label_map[value] = label_from_string(label.get<std::string>());
            if (c.contains("split_field"))
                desc.split_field = c.at("split_field").get<std::string>();
            load_external_corpus(desc, store);
            dataset_ok = true;
        }
    }

    SynonymResource synonyms;
    IdentityLexicon lexicon;
    bool resources_ok = false;
    try {
        synonyms = SynonymResource::load(config.data_dir);
        lexicon.load(config.data_dir / "identity_lexicon.txt");
        resources_ok = true;
    } catch (const std::exception&) {
        resources_ok = false;
    }

    AttackResources attack_resources;
    attack_resources.synonyms = &synonyms;
    attack_resources.identity_lexicon = &lexicon;
    HashedNgramEncoder encoder;
    attack_resources.quality.encoder = &encoder;
    attack_resources.quality.synonyms = &synonyms;

    ArtifactManifest manifest(config.seed);
    const json stages = config.raw.value("stages", json::object());
    bool upstream_failed = false;

    auto run_stage = [&](const std::string& name, auto&& body) {
        if (!stages.contains(name)) return;
        StageOutcome outcome;
        outcome.stage = name;
        if (upstream_failed) {
            outcome.error = "skipped: an earlier stage failed";
            result.stages.push_back(outcome);
            return;
        }
        outcome.ran = true;
        try {
            body(stages.at(name));
            outcome.ok = true;
        } catch (const std::exception& e) {
            outcome.error = e.what();
            upstream_failed = true;
            result.exit_status = 1;
        }
        result.stages.push_back(outcome);
    };

    auto emit = [&](const std::filesystem::path& p) {
        manifest.add(p);
        result.artifacts.push_back(p);
    };

    auto eval_verdicts = [&](const std::string& detector_id,
                             const std::vector<Sample>& samples) {
        std::unordered_map<std::string, Label> verdicts;
        for (const auto& s : samples) verdicts[s.id] = gateway.classify(detector_id, s.text).label;
        return verdicts;
    };

    run_stage("generate", [&](const json& stage) {
        const auto templates = load_templates(stage.contains("templates")
                                                  ? std::filesystem::path(
                                                        stage.at("templates").get<std::string>())
                                                  : config.data_dir / "prompts_default.tsv");
        std::vector<IdentityGroup> groups;
        if (!stage.contains("groups") || stage.at("groups") == "all") {
            groups = all_identity_groups();
        } else {
            for (const auto& g : stage.at("groups"))
                groups.push_back(identity_group_from_string(g.get<std::string>()));
        }
        std::vector<LlmStatus> statuses;
        for (const auto& s : stage.value("statuses", std::vector<std::string>{"original"}))
            statuses.push_back(llm_status_from_string(s));

        ClientRegistry clients;
        std::vector<std::string> llm_ids;
        for (const auto& l : stage.at("llms")) {
            const std::string id = l.at("id").get<std::string>();
            llm_ids.push_back(id);
            if (l.value("kind", "mock") == "mock") {
                clients.add(make_scripted_mock_llm(
                    id, l.value("hate_marker", ""),
                    l.value("triggers", std::vector<std::string>{"toxic", "harmful", "negative"})));
            } else {
                LlmEndpoint ep;
                ep.llm_id = id;
                ep.base_url = l.at("base_url").get<std::string>();
                ep.path = l.value("path", "/");
                ep.style = l.value("style", "simple") == "openai_chat" ? LlmWireStyle::openai_chat
                                                                       : LlmWireStyle::simple;
                ep.model = l.value("model", "");
                ep.api_key_env = l.value("api_key_env", "");
                clients.add(std::make_shared<RemoteLlmClient>(std::move(ep)));
            }
        }

        const auto tasks = build_prompt_matrix(templates, groups, stage.value("repeats", 1),
                                               llm_ids, statuses);
        const auto jailbreaks = JailbreakRegistry::defaults(config.data_dir);
        GenerationOptions options;
        options.workers = stage.value("workers", 4);
        const auto report = run_generation(tasks, clients, jailbreaks, templates, store, options);
        dataset_ok = store.size() > 0;

        const auto store_path = config.out_dir / "samples.jsonl";
        store.save_jsonl(store_path);
        emit(store_path);
        json summary{{"tasks", tasks.size()},
                     {"completed", report.completed},
                     {"failed", report.failed},
                     {"refusal_hints", report.refusal_hints},
                     {"skipped_existing", report.skipped_existing}};
        std::ofstream out(config.out_dir / "generation.json");
        out << summary.dump(2) << '\n';
        out.close();
        emit(config.out_dir / "generation.json");
    });

    run_stage("annotate", [&](const json& stage) {
        if (!dataset_ok) throw ConfigError("annotate stage needs a dataset", "dataset");
        AnnotationStore annotations;
        annotations.load_jsonl(stage.at("annotations").get<std::string>());
        const double alpha = krippendorff_alpha(annotations);
        const auto report = resolve_labels(store, annotations);

        const auto store_path = config.out_dir / "samples_labeled.jsonl";
        store.save_jsonl(store_path);
        emit(store_path);
        json summary{{"krippendorff_alpha", alpha},
                     {"resolved", report.resolved},
                     {"needs_third", report.needs_third},
                     {"unresolvable", report.unresolvable}};
        std::ofstream out(config.out_dir / "annotation.json");
        out << summary.dump(2) << '\n';
        out.close();
        emit(config.out_dir / "annotation.json");
    });

    run_stage("evaluate", [&](const json& stage) {
        if (!dataset_ok) throw ConfigError("evaluate stage needs a dataset", "dataset");
        const std::string detector = stage.at("detector").get<std::string>();
        const auto samples = store.evaluation_set();
        const auto verdicts = eval_verdicts(detector, samples);

        std::vector<MetricsReport> reports{evaluate(samples, verdicts)};
        reports[0].group_key = "all";
        for (const auto& g : stage.value("group_by", std::vector<std::string>{})) {
            GroupBy by = GroupBy::llm;
            if (g == "status") by = GroupBy::status;
            else if (g == "identity_group") by = GroupBy::identity_group;
            else if (g == "dataset") by = GroupBy::dataset;
            const auto grouped = evaluate_grouped(samples, verdicts, by);
            reports.insert(reports.end(), grouped.begin(), grouped.end());
        }
        write_metrics_json(reports, config.out_dir / "metrics.json");
        write_metrics_csv(reports, config.out_dir / "metrics.csv");
        write_metrics_markdown(reports, config.out_dir / "summary.md");
        emit(config.out_dir / "metrics.json");
        emit(config.out_dir / "metrics.csv");
        emit(config.out_dir / "summary.md");

        if (reports.size() > 1) {
            std::vector<std::pair<std::string, double>> bars;
            for (std::size_t i = 1; i < reports.size(); ++i)
                bars.emplace_back(reports[i].group_key.value_or("?"), reports[i].macro_f1);
            write_bar_chart_svg(bars, "Macro-F1 by group (" + detector + ")",
                                config.out_dir / "group_f1.svg");
            emit(config.out_dir / "group_f1.svg");
        }

        // lexical profile per source, with the shipped profanity lexicon
        if (stage.value("lexical", true)) {
            std::unordered_set<std::string> profanity;
            try {
                profanity = load_profanity_lexicon(config.data_dir / "profanity.txt");
            } catch (const Error&) {
            }
            const auto lexical = lexical_summary_by_source(samples, profanity);
            std::ofstream out(config.out_dir / "lexical.csv");
            out << "source,samples,coleman_liau,type_token_ratio,profanity_rate,word_count\n";
            for (const auto& row : lexical)
                out << row.group << ',' << row.samples << ',' << row.mean_coleman_liau << ','
                    << row.mean_type_token_ratio << ',' << row.profanity_rate << ','
                    << row.mean_word_count << '\n';
            out.close();
            emit(config.out_dir / "lexical.csv");
        }
    });

    run_stage("saliency", [&](const json& stage) {
        if (!dataset_ok) throw ConfigError("saliency stage needs a dataset", "dataset");
        if (!resources_ok) throw ConfigError("saliency stage needs resource files", "data_dir");
        const std::string detector = stage.at("detector").get<std::string>();
        const std::size_t cap = stage.value("max_samples", 50);
        SynonymReplacementSource replacements(synonyms);
        std::vector<SaliencyMap> maps;
        for (const auto& s : store.evaluation_set()) {
            if (maps.size() >= cap) break;
            maps.push_back(saliency_map(gateway, detector, s.text, replacements));
        }
        if (maps.empty()) throw EmptyReport("no samples for saliency");

        json arr = json::array();
        for (const auto& m : maps) arr.push_back(to_json(m));
        {
            std::ofstream out(config.out_dir / "saliency.json");
            out << arr.dump(2) << '\n';
        }
        write_saliency_html(maps, config.out_dir / "saliency.html");
        emit(config.out_dir / "saliency.json");
        emit(config.out_dir / "saliency.html");

        const auto words =
            top_influential_words(maps, stage.value("min_count", 20), stage.value("top_k", 15));
        std::ofstream out(config.out_dir / "influential_words.csv");
        out << "rank,word,mean_final,count\n";
        for (std::size_t i = 0; i < words.size(); ++i)
            out << i + 1 << ',' << words[i].word << ',' << words[i].mean_final << ','
                << words[i].count << '\n';
        out.close();
        emit(config.out_dir / "influential_words.csv");
    });

    run_stage("attack", [&](const json& stage) {
        if (!dataset_ok) throw ConfigError("attack stage needs a dataset", "dataset");
        if (!resources_ok) throw ConfigError("attack stage needs resource files", "data_dir");
        const std::string victim_id = stage.at("victim").get<std::string>();
        AttackConfig cfg;
        cfg.attack_id = attack_id_from_string(stage.value("attack", "textfooler"));
        cfg.protect_identity_terms = stage.value("protect_identity", false);
        cfg.max_wmr_budget = stage.value("max_wmr_budget", cfg.max_wmr_budget);
        cfg.max_candidates_per_word = stage.value("max_candidates_per_word",
                                                  cfg.max_candidates_per_word);
        cfg.seed = config.seed;
        const std::size_t cap = stage.value("max_samples", 120);

        GatewayVictim victim(gateway, victim_id);
        std::vector<AttackResult> results;
        for (const auto& s : store.evaluation_set()) {
            if (results.size() >= cap) break;
            if (s.label != Label::hate) continue;
            try {
                results.push_back(run_attack(cfg, s, victim, attack_resources));
            } catch (const NotApplicable&) {
                continue; // only detected-hate inputs enter the denominator
            }
        }
        if (results.empty()) throw EmptyReport("no attackable samples");
        write_attack_results_jsonl(results, config.out_dir / "attack_results.jsonl");
        write_attack_csv(results, config.out_dir / "attack_summary.csv");
        emit(config.out_dir / "attack_results.jsonl");
        emit(config.out_dir / "attack_summary.csv");
    });

    std::optional<SurrogateBundle> bundle;
    run_stage("steal", [&](const json& stage) {
        if (!dataset_ok) throw ConfigError("steal stage needs a dataset", "dataset");
        const std::string target = stage.at("target").get<std::string>();
        SurrogateTrainConfig train_cfg;
        train_cfg.seed = config.seed;
        train_cfg.learning_rate = stage.value("learning_rate", train_cfg.learning_rate);
        train_cfg.batch_size = stage.value("batch_size", train_cfg.batch_size);
        train_cfg.epochs = stage.value("epochs", train_cfg.epochs);

        const auto balanced_ids = balance_dataset(store, config.seed);
        std::vector<Sample> aux;
        for (const auto& id : balanced_ids) aux.push_back(store.get(id));

        std::unordered_map<std::string, Label> ground_truth;
        for (const auto& s : aux) ground_truth[s.id] = s.label;

        const StealingDataset ds = harvest_pseudo_labels(gateway, target, aux);
        bundle = train_surrogate(ds, train_cfg, &ground_truth);
        bundle->save(config.out_dir / "surrogate");
        emit(config.out_dir / "surrogate" / "weights.json");
        emit(config.out_dir / "surrogate" / "train_config.json");
        emit(config.out_dir / "surrogate" / "metrics.json");
    });

    run_stage("transfer", [&](const json& stage) {
        if (!bundle) throw ConfigError("transfer stage needs the steal stage", "stages.steal");
        if (!resources_ok) throw ConfigError("transfer stage needs resource files", "data_dir");
        const std::string target = stage.value("target", bundle->target_id);
        const TransferMode mode =
            stage.value("mode", "black_box") == "white_box" ? TransferMode::white_box
                                                            : TransferMode::black_box;
        AttackConfig cfg;
        cfg.attack_id = AttackId::textfooler;
        cfg.seed = config.seed;
        const std::size_t cap = stage.value("max_samples", 120);

        json rows = json::array();
        std::size_t s_success = 0, t_success = 0, attempted = 0;
        for (const auto& s : store.evaluation_set()) {
            if (attempted >= cap) break;
            if (s.label != Label::hate) continue;
            if (gateway.classify(target, s.text).label != Label::hate) continue;
            TransferResult r;
            try {
                r = transfer_attack(cfg, s, *bundle, gateway, target, mode, attack_resources);
            } catch (const NotApplicable&) {
                continue;
            }
            ++attempted;
            if (r.surrogate_success) ++s_success;
            if (r.target_success) ++t_success;
            rows.push_back({{"sample_id", s.id},
                            {"surrogate_success", r.surrogate_success},
                            {"target_success", r.target_success},
                            {"target_queries", r.target_queries},
                            {"surrogate_queries", r.surrogate_attack.queries}});
        }
        json summary{{"mode", mode == TransferMode::white_box ? "white_box" : "black_box"},
                     {"attempted", attempted},
                     {"asr_surrogate",
                      attempted ? static_cast<double>(s_success) / attempted : 0.0},
                     {"asr_target", attempted ? static_cast<double>(t_success) / attempted : 0.0},
                     {"per_sample", rows}};
        std::ofstream out(config.out_dir / "transfer.json");
        out << summary.dump(2) << '\n';
        out.close();
        emit(config.out_dir / "transfer.json");
    });

    run_stage("ablate", [&](const json& stage) {
        if (!dataset_ok) throw ConfigError("ablate stage needs a dataset", "dataset");
        if (!resources_ok) throw ConfigError("ablate stage needs resource files", "data_dir");
        const std::string target = stage.at("target").get<std::string>();
        std::vector<std::size_t> sizes;
        for (const auto& v : stage.at("sizes")) sizes.push_back(v.get<std::size_t>());

        SurrogateTrainConfig train_cfg;
        train_cfg.seed = config.seed;
        train_cfg.learning_rate = stage.value("learning_rate", train_cfg.learning_rate);
        train_cfg.epochs = stage.value("epochs", train_cfg.epochs);
        AttackConfig attack_cfg;
        attack_cfg.seed = config.seed;

        const auto balanced_ids = balance_dataset(store, config.seed);
        std::vector<Sample> aux;
        for (const auto& id : balanced_ids) aux.push_back(store.get(id));
        std::vector<Sample> eval_samples;
        const std::size_t cap = stage.value("max_samples", 50);
        for (const auto& s : store.evaluation_set()) {
            if (eval_samples.size() >= cap) break;
            if (s.label == Label::hate) eval_samples.push_back(s);
        }

        const auto rows = ablate_auxiliary_size(sizes, aux, gateway, target, train_cfg, attack_cfg,
                                                eval_samples, attack_resources);
        write_ablation_csv(rows, config.out_dir / "ablation.csv");
        emit(config.out_dir / "ablation.csv");

        std::vector<std::pair<double, double>> agreement_curve, asr_curve;
        for (const auto& r : rows) {
            agreement_curve.emplace_back(static_cast<double>(r.size), r.agreement);
            asr_curve.emplace_back(static_cast<double>(r.size), r.asr_target);
        }
        write_line_chart_svg(agreement_curve, "Agreement vs auxiliary size",
                             config.out_dir / "ablation_agreement.svg");
        write_line_chart_svg(asr_curve, "ASR(T) vs auxiliary size",
                             config.out_dir / "ablation_asr.svg");
        emit(config.out_dir / "ablation_agreement.svg");
        emit(config.out_dir / "ablation_asr.svg");
    });

    manifest.write(config.out_dir / "manifest.json");
    result.artifacts.push_back(config.out_dir / "manifest.json");
    return result;
}

} // namespace hatebench
