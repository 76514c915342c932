// Command-line front end: every campaign stage is also reachable as a
// standalone subcommand over JSONL files.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hatebench/annotate.hpp"
#include "hatebench/attack.hpp"
#include "hatebench/dataset.hpp"
#include "hatebench/detector.hpp"
#include "hatebench/generation.hpp"
#include "hatebench/pipeline.hpp"
#include "hatebench/remote_llm.hpp"
#include "hatebench/remote_scorers.hpp"
#include "hatebench/report.hpp"
#include "hatebench/saliency.hpp"
#include "hatebench/store.hpp"
#include "hatebench/surrogate.hpp"

namespace fs = std::filesystem;
using namespace hatebench;

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    for (char c : s) {
        if (c == ',') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    return json::parse(in);
}

// detectors registry file: {"detectors": [...]} or a bare array
void register_detectors_file(DetectorGateway& gateway, const fs::path& path) {
    const json j = load_json_file(path);
    register_detectors_from_config(j.is_array() ? j : j.at("detectors"), gateway);
}

ClientRegistry build_llm_registry(const fs::path& path) {
    ClientRegistry registry;
    const json j = load_json_file(path);
    const json& arr = j.is_array() ? j : j.at("llms");
    for (const auto& entry : arr) {
        const std::string id = entry.at("id").get<std::string>();
        const std::string kind = entry.value("kind", "mock");
        if (kind == "mock") {
            registry.add(make_scripted_mock_llm(
                id, entry.value("hate_marker", ""),
                entry.value("triggers",
                            std::vector<std::string>{"toxic", "harmful", "negative"})));
        } else {
            LlmEndpoint ep;
            ep.llm_id = id;
            ep.base_url = entry.at("base_url").get<std::string>();
            ep.path = entry.value("path", "/");
            ep.style = entry.value("style", "simple") == "openai_chat" ? LlmWireStyle::openai_chat
                                                                       : LlmWireStyle::simple;
            ep.model = entry.value("model", "");
            ep.api_key_env = entry.value("api_key_env", "");
            ep.concurrency = entry.value("concurrency", 4);
            registry.add(std::make_shared<RemoteLlmClient>(std::move(ep)));
        }
    }
    return registry;
}

std::vector<IdentityGroup> load_groups(const std::string& arg) {
    if (arg.empty() || arg == "all") return all_identity_groups();
    std::vector<IdentityGroup> groups;
    if (fs::exists(arg)) {
        std::ifstream in(arg);
        std::string line;
        while (std::getline(in, line))
            if (!line.empty() && line[0] != '#') groups.push_back(identity_group_from_string(line));
    } else {
        for (const auto& tok : split_csv(arg)) groups.push_back(identity_group_from_string(tok));
    }
    return groups;
}

AttackResources make_attack_resources(const fs::path& data_dir, SynonymResource& synonyms,
                                      IdentityLexicon& lexicon, HashedNgramEncoder& encoder) {
    synonyms = SynonymResource::load(data_dir);
    lexicon.load(data_dir / "identity_lexicon.txt");
    AttackResources r;
    r.synonyms = &synonyms;
    r.identity_lexicon = &lexicon;
    r.quality.encoder = &encoder;
    r.quality.synonyms = &synonyms;
    return r;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hatebench: benchmark hate-speech detectors on LLM-generated content and probe "
                 "their robustness to adversarial and stealthy campaigns"};
    app.require_subcommand(1);

    std::string data_dir = default_data_dir().string();
    app.add_option("--data-dir", data_dir, "resource directory (templates, lexicons, synonyms)");

    // ---------------- generate
    auto* cmd_generate = app.add_subcommand("generate", "build the prompt matrix and run it");
    std::string gen_templates, gen_groups = "all", gen_llms, gen_statuses = "original";
    std::string gen_llm_config, gen_out = "store";
    int gen_repeats = 3;
    cmd_generate->add_option("--templates", gen_templates, "template TSV file")->required();
    cmd_generate->add_option("--groups", gen_groups, "'all', a file, or comma-separated tokens");
    cmd_generate->add_option("--llms", gen_llms, "comma-separated llm ids")->required();
    cmd_generate->add_option("--llm-config", gen_llm_config, "llm endpoint config JSON")->required();
    cmd_generate->add_option("--statuses", gen_statuses, "original,jailbreak_1,jailbreak_2");
    cmd_generate->add_option("--repeats", gen_repeats, "repeats per cell");
    cmd_generate->add_option("--out", gen_out, "output store directory");

    // ---------------- annotate
    auto* cmd_annotate = app.add_subcommand("annotate", "import annotations, resolve labels, report alpha");
    std::string ann_store, ann_annotations, ann_out;
    cmd_annotate->add_option("--store", ann_store, "sample store JSONL")->required();
    cmd_annotate->add_option("--annotations", ann_annotations, "annotation JSONL")->required();
    cmd_annotate->add_option("--out", ann_out, "resolved store output JSONL");

    // ---------------- classify
    auto* cmd_classify = app.add_subcommand("classify", "score texts with one detector");
    std::string cls_detector, cls_in, cls_out, cls_detectors_cfg;
    cmd_classify->add_option("--detector", cls_detector)->required();
    cmd_classify->add_option("--detectors-config", cls_detectors_cfg, "detector registry JSON")->required();
    cmd_classify->add_option("--in", cls_in, "input JSONL with {id,text}")->required();
    cmd_classify->add_option("--out", cls_out, "verdict JSONL")->required();

    // ---------------- evaluate
    auto* cmd_evaluate = app.add_subcommand("evaluate", "classification metrics with breakdowns");
    std::string ev_detector, ev_in, ev_out = "out", ev_groupby, ev_detectors_cfg;
    cmd_evaluate->add_option("--detector", ev_detector)->required();
    cmd_evaluate->add_option("--detectors-config", ev_detectors_cfg)->required();
    cmd_evaluate->add_option("--in", ev_in, "labeled store JSONL")->required();
    cmd_evaluate->add_option("--out", ev_out, "output directory");
    cmd_evaluate->add_option("--group-by", ev_groupby, "llm,status,identity_group");

    // ---------------- saliency
    auto* cmd_saliency = app.add_subcommand("saliency", "leave-one-out saliency maps");
    std::string sal_detector, sal_in, sal_out = "out", sal_detectors_cfg;
    std::size_t sal_max = 50;
    cmd_saliency->add_option("--detector", sal_detector)->required();
    cmd_saliency->add_option("--detectors-config", sal_detectors_cfg)->required();
    cmd_saliency->add_option("--in", sal_in)->required();
    cmd_saliency->add_option("--out", sal_out);
    cmd_saliency->add_option("--max-samples", sal_max);

    // ---------------- attack
    auto* cmd_attack = app.add_subcommand("attack", "adversarial campaign against a detector");
    std::string atk_attack = "textfooler", atk_victim, atk_in, atk_out = "results.jsonl";
    std::string atk_detectors_cfg, atk_paraphraser_cfg, atk_paraphraser;
    bool atk_protect = false;
    std::size_t atk_max = 120;
    cmd_attack->add_option("--attack", atk_attack,
                           "deepwordbug|textbugger|pwws|textfooler|paraphrase");
    cmd_attack->add_option("--victim", atk_victim)->required();
    cmd_attack->add_option("--detectors-config", atk_detectors_cfg)->required();
    cmd_attack->add_option("--in", atk_in, "detected-hate store JSONL")->required();
    cmd_attack->add_flag("--protect-identity", atk_protect, "never modify identity terms");
    cmd_attack->add_option("--out", atk_out, "result JSONL");
    cmd_attack->add_option("--max-samples", atk_max);
    cmd_attack->add_option("--paraphraser-config", atk_paraphraser_cfg,
                           "llm endpoint config (paraphrase attack)");
    cmd_attack->add_option("--paraphraser", atk_paraphraser,
                           "llm id within --paraphraser-config");
    std::string atk_encoder_url, atk_perplexity_url;
    cmd_attack->add_option("--encoder-url", atk_encoder_url,
                           "sentence-encoder service for USE similarity");
    cmd_attack->add_option("--perplexity-url", atk_perplexity_url,
                           "perplexity service for fluency");

    // ---------------- steal
    auto* cmd_steal = app.add_subcommand("steal", "harvest pseudo-labels and train a surrogate");
    std::string steal_target, steal_aux, steal_out = "bundle", steal_detectors_cfg;
    std::string steal_backbone = "bag-mlp";
    double steal_lr = 1e-5;
    int steal_epochs = 10, steal_batch = 24;
    cmd_steal->add_option("--target", steal_target)->required();
    cmd_steal->add_option("--detectors-config", steal_detectors_cfg)->required();
    cmd_steal->add_option("--aux", steal_aux, "auxiliary store JSONL")->required();
    cmd_steal->add_option("--backbone", steal_backbone);
    cmd_steal->add_option("--lr", steal_lr);
    cmd_steal->add_option("--epochs", steal_epochs);
    cmd_steal->add_option("--batch-size", steal_batch);
    cmd_steal->add_option("--out", steal_out, "bundle directory");

    // ---------------- transfer
    auto* cmd_transfer = app.add_subcommand("transfer", "optimize on the surrogate, one target query");
    std::string tr_bundle, tr_in, tr_mode = "black_box", tr_out = "transfer.jsonl";
    std::string tr_target, tr_detectors_cfg;
    cmd_transfer->add_option("--bundle", tr_bundle)->required();
    cmd_transfer->add_option("--target", tr_target)->required();
    cmd_transfer->add_option("--detectors-config", tr_detectors_cfg)->required();
    cmd_transfer->add_option("--in", tr_in)->required();
    cmd_transfer->add_option("--mode", tr_mode, "black_box|white_box");
    cmd_transfer->add_option("--out", tr_out);

    // ---------------- ablate
    auto* cmd_ablate = app.add_subcommand("ablate", "auxiliary-size ablation");
    std::string ab_target, ab_aux, ab_sizes, ab_in, ab_out = "out", ab_detectors_cfg;
    double ab_lr = 0.05;
    int ab_epochs = 20;
    cmd_ablate->add_option("--target", ab_target)->required();
    cmd_ablate->add_option("--detectors-config", ab_detectors_cfg)->required();
    cmd_ablate->add_option("--aux", ab_aux)->required();
    cmd_ablate->add_option("--sizes", ab_sizes, "comma-separated sizes")->required();
    cmd_ablate->add_option("--in", ab_in, "evaluation store JSONL")->required();
    cmd_ablate->add_option("--out", ab_out);
    cmd_ablate->add_option("--lr", ab_lr);
    cmd_ablate->add_option("--epochs", ab_epochs);

    // ---------------- report
    auto* cmd_report = app.add_subcommand("report", "summarize attack results into tables");
    std::string rep_in, rep_out = "out";
    cmd_report->add_option("--in", rep_in, "attack result JSONL")->required();
    cmd_report->add_option("--out", rep_out);

    // ---------------- run (whole campaign from a config file)
    auto* cmd_run = app.add_subcommand("run", "execute a campaign config end to end");
    std::string run_config;
    cmd_run->add_option("--config", run_config, "campaign config JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_generate) {
            const auto templates = load_templates(gen_templates);
            const auto groups = load_groups(gen_groups);
            std::vector<LlmStatus> statuses;
            for (const auto& s : split_csv(gen_statuses)) statuses.push_back(llm_status_from_string(s));
            const auto tasks =
                build_prompt_matrix(templates, groups, gen_repeats, split_csv(gen_llms), statuses);
            std::cout << "task matrix: " << tasks.size() << " tasks\n";

            const auto registry = build_llm_registry(gen_llm_config);
            const auto jailbreaks = JailbreakRegistry::defaults(data_dir);
            fs::create_directories(gen_out);
            SampleStore store;
            const fs::path store_path = fs::path(gen_out) / "samples.jsonl";
            if (fs::exists(store_path)) store.load_jsonl(store_path); // resume
            const auto report = run_generation(tasks, registry, jailbreaks, templates, store);
            store.save_jsonl(store_path);
            std::cout << "completed=" << report.completed << " failed=" << report.failed
                      << " refusal_hints=" << report.refusal_hints
                      << " skipped_existing=" << report.skipped_existing << '\n';
        } else if (*cmd_annotate) {
            SampleStore store;
            store.load_jsonl(ann_store);
            AnnotationStore annotations;
            annotations.load_jsonl(ann_annotations);
            std::cout << "krippendorff_alpha=" << krippendorff_alpha(annotations) << '\n';
            const auto report = resolve_labels(store, annotations);
            std::cout << "resolved=" << report.resolved
                      << " needs_third=" << report.needs_third.size()
                      << " unresolvable=" << report.unresolvable.size() << '\n';
            for (const auto& id : report.unresolvable)
                std::cout << "unresolvable sample (manual adjudication): " << id << '\n';
            if (!ann_out.empty()) store.save_jsonl(ann_out);
        } else if (*cmd_classify) {
            DetectorGateway gateway;
            register_detectors_file(gateway, cls_detectors_cfg);
            std::ifstream in(cls_in);
            if (!in) throw Error("cannot read " + cls_in);
            std::ofstream out(cls_out);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                const json j = json::parse(line);
                const auto v = gateway.classify(cls_detector, j.at("text").get<std::string>());
                out << json{{"id", j.value("id", "")},
                            {"detector", v.detector_id},
                            {"score", v.score},
                            {"label", to_string(v.label)},
                            {"from_cache", v.from_cache},
                            {"text_hash", v.text_hash}}
                           .dump()
                    << '\n';
            }
            const auto snap = gateway.ledger().total(cls_detector);
            std::cout << "remote_calls=" << snap.remote_calls << " cache_hits=" << snap.cache_hits
                      << '\n';
        } else if (*cmd_evaluate) {
            DetectorGateway gateway;
            register_detectors_file(gateway, ev_detectors_cfg);
            SampleStore store;
            store.load_jsonl(ev_in);
            const auto samples = store.evaluation_set();
            std::unordered_map<std::string, Label> verdicts;
            for (const auto& s : samples) verdicts[s.id] = gateway.classify(ev_detector, s.text).label;

            std::vector<MetricsReport> reports{evaluate(samples, verdicts)};
            reports[0].group_key = "all";
            for (const auto& g : split_csv(ev_groupby)) {
                GroupBy by = g == "status" ? GroupBy::status
                             : g == "identity_group" ? GroupBy::identity_group
                             : g == "dataset" ? GroupBy::dataset
                                              : GroupBy::llm;
                const auto grouped = evaluate_grouped(samples, verdicts, by);
                reports.insert(reports.end(), grouped.begin(), grouped.end());
            }
            fs::create_directories(ev_out);
            write_metrics_json(reports, fs::path(ev_out) / "metrics.json");
            write_metrics_csv(reports, fs::path(ev_out) / "metrics.csv");
            write_metrics_markdown(reports, fs::path(ev_out) / "summary.md");

            std::unordered_set<std::string> profanity;
            try {
                profanity = load_profanity_lexicon(fs::path(data_dir) / "profanity.txt");
            } catch (const Error&) {
            }
            const auto lexical = lexical_summary_by_source(samples, profanity);
            std::ofstream lex(fs::path(ev_out) / "lexical.csv");
            lex << "source,samples,coleman_liau,type_token_ratio,profanity_rate,word_count\n";
            for (const auto& row : lexical)
                lex << row.group << ',' << row.samples << ',' << row.mean_coleman_liau << ','
                    << row.mean_type_token_ratio << ',' << row.profanity_rate << ','
                    << row.mean_word_count << '\n';

            std::cout << "f1=" << reports[0].macro_f1 << " acc=" << reports[0].accuracy
                      << " prec=" << reports[0].precision << " recall=" << reports[0].recall
                      << '\n';
        } else if (*cmd_saliency) {
            DetectorGateway gateway;
            register_detectors_file(gateway, sal_detectors_cfg);
            SampleStore store;
            store.load_jsonl(sal_in);
            SynonymResource synonyms = SynonymResource::load(data_dir);
            SynonymReplacementSource replacements(synonyms);
            std::vector<SaliencyMap> maps;
            for (const auto& s : store.all()) {
                if (maps.size() >= sal_max) break;
                maps.push_back(saliency_map(gateway, sal_detector, s.text, replacements));
            }
            fs::create_directories(sal_out);
            json arr = json::array();
            for (const auto& m : maps) arr.push_back(to_json(m));
            std::ofstream(fs::path(sal_out) / "saliency.json") << arr.dump(2) << '\n';
            write_saliency_html(maps, fs::path(sal_out) / "saliency.html");
            const auto words = top_influential_words(maps, 20, 15);
            for (std::size_t i = 0; i < words.size(); ++i)
                std::cout << (i + 1) << ". " << words[i].word << " (" << words[i].mean_final
                          << ")\n";
        } else if (*cmd_attack) {
            DetectorGateway gateway;
            register_detectors_file(gateway, atk_detectors_cfg);
            SampleStore store;
            store.load_jsonl(atk_in);
            SynonymResource synonyms;
            IdentityLexicon lexicon;
            HashedNgramEncoder encoder;
            AttackResources resources = make_attack_resources(data_dir, synonyms, lexicon, encoder);
            std::unique_ptr<RemoteSentenceEncoder> remote_encoder;
            std::unique_ptr<RemotePerplexityScorer> remote_perplexity;
            if (!atk_encoder_url.empty()) {
                remote_encoder = std::make_unique<RemoteSentenceEncoder>(atk_encoder_url, "/encode");
                resources.quality.encoder = remote_encoder.get();
            }
            if (!atk_perplexity_url.empty()) {
                remote_perplexity =
                    std::make_unique<RemotePerplexityScorer>(atk_perplexity_url, "/perplexity");
                resources.quality.perplexity = remote_perplexity.get();
            }

            AttackConfig cfg;
            cfg.attack_id = attack_id_from_string(atk_attack);
            cfg.protect_identity_terms = atk_protect;
            GatewayVictim victim(gateway, atk_victim);

            ClientRegistry paraphraser_registry;
            LlmClient* paraphraser = nullptr;
            if (cfg.attack_id == AttackId::paraphrase) {
                if (atk_paraphraser_cfg.empty() || atk_paraphraser.empty())
                    throw Error("paraphrase attack needs --paraphraser-config and --paraphraser");
                paraphraser_registry = build_llm_registry(atk_paraphraser_cfg);
                paraphraser = &paraphraser_registry.get(atk_paraphraser);
            }

            std::vector<AttackResult> results;
            for (const auto& s : store.all()) {
                if (results.size() >= atk_max) break;
                try {
                    if (cfg.attack_id == AttackId::paraphrase) {
                        // precondition: only keep detected-hate inputs
                        if (gateway.classify(atk_victim, s.text).label != Label::hate) continue;
                        results.push_back(
                            paraphrase_attack(cfg, s, victim, *paraphraser, resources));
                    } else {
                        results.push_back(run_attack(cfg, s, victim, resources));
                    }
                } catch (const NotApplicable&) {
                    continue;
                }
            }
            write_attack_results_jsonl(results, atk_out);
            const auto rows = summarize_attacks(results);
            for (const auto& r : rows)
                std::cout << r.victim_id << '/' << r.attack_id << ": asr=" << r.asr
                          << " queries=" << r.mean_queries << " time_s=" << r.mean_time_seconds
                          << '\n';
        } else if (*cmd_steal) {
            DetectorGateway gateway;
            register_detectors_file(gateway, steal_detectors_cfg);
            SampleStore store;
            store.load_jsonl(steal_aux);
            SurrogateTrainConfig cfg;
            cfg.architecture_id = steal_backbone;
            cfg.learning_rate = steal_lr;
            cfg.epochs = steal_epochs;
            cfg.batch_size = steal_batch;
            std::unordered_map<std::string, Label> ground_truth;
            for (const auto& s : store.all()) ground_truth[s.id] = s.label;
            const auto dataset = harvest_pseudo_labels(gateway, steal_target, store.all());
            if (dataset.degraded)
                std::cerr << "warning: harvest degraded (" << dataset.failed_queries
                          << " failed queries)\n";
            const auto bundle = train_surrogate(dataset, cfg, &ground_truth);
            bundle.save(steal_out);
            std::cout << "agreement=" << bundle.agreement << " accuracy=" << bundle.accuracy
                      << '\n';
        } else if (*cmd_transfer) {
            DetectorGateway gateway;
            register_detectors_file(gateway, tr_detectors_cfg);
            SampleStore store;
            store.load_jsonl(tr_in);
            const auto bundle = SurrogateBundle::load(tr_bundle);
            SynonymResource synonyms;
            IdentityLexicon lexicon;
            HashedNgramEncoder encoder;
            const AttackResources resources =
                make_attack_resources(data_dir, synonyms, lexicon, encoder);

            AttackConfig cfg;
            const TransferMode mode =
                tr_mode == "white_box" ? TransferMode::white_box : TransferMode::black_box;
            std::ofstream out(tr_out);
            std::size_t s_success = 0, t_success = 0, attempted = 0;
            for (const auto& s : store.all()) {
                TransferResult r;
                try {
                    r = transfer_attack(cfg, s, bundle, gateway, tr_target, mode, resources);
                } catch (const NotApplicable&) {
                    continue;
                }
                ++attempted;
                if (r.surrogate_success) ++s_success;
                if (r.target_success) ++t_success;
                out << json{{"sample_id", s.id},
                            {"surrogate_success", r.surrogate_success},
                            {"target_success", r.target_success},
                            {"surrogate_queries", r.surrogate_attack.queries},
                            {"target_queries", r.target_queries}}
                           .dump()
                    << '\n';
            }
            std::cout << "attempted=" << attempted << " asr_s="
                      << (attempted ? static_cast<double>(s_success) / attempted : 0.0)
                      << " asr_t="
                      << (attempted ? static_cast<double>(t_success) / attempted : 0.0) << '\n';
        } else if (*cmd_ablate) {
            DetectorGateway gateway;
            register_detectors_file(gateway, ab_detectors_cfg);
            SampleStore aux_store, eval_store;
            aux_store.load_jsonl(ab_aux);
            eval_store.load_jsonl(ab_in);
            SynonymResource synonyms;
            IdentityLexicon lexicon;
            HashedNgramEncoder encoder;
            const AttackResources resources =
                make_attack_resources(data_dir, synonyms, lexicon, encoder);

            std::vector<std::size_t> sizes;
            for (const auto& s : split_csv(ab_sizes)) sizes.push_back(std::stoull(s));
            SurrogateTrainConfig train_cfg;
            train_cfg.learning_rate = ab_lr;
            train_cfg.epochs = ab_epochs;
            AttackConfig attack_cfg;

            const auto rows = ablate_auxiliary_size(sizes, aux_store.all(), gateway, ab_target,
                                                    train_cfg, attack_cfg, eval_store.all(),
                                                    resources);
            fs::create_directories(ab_out);
            write_ablation_csv(rows, fs::path(ab_out) / "ablation.csv");
            for (const auto& r : rows)
                std::cout << "size=" << r.size << " agreement=" << r.agreement
                          << " asr_t=" << r.asr_target << '\n';
        } else if (*cmd_report) {
            std::ifstream in(rep_in);
            if (!in) throw Error("cannot read " + rep_in);
            std::vector<AttackResult> results;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                const json j = json::parse(line);
                AttackResult r;
                r.sample_id = j.value("sample_id", "");
                r.victim_id = j.value("victim_id", "");
                r.attack_id = attack_id_from_string(j.value("attack_id", "textfooler"));
                r.success = j.value("success", false);
                r.queries = j.value("queries", 0ULL);
                r.elapsed = Micros(j.value("elapsed_us", 0LL));
                r.meteor = j.value("meteor", 0.0);
                if (j.contains("wmr") && !j.at("wmr").is_null()) r.wmr = j.at("wmr").get<double>();
                if (j.contains("use_sim") && !j.at("use_sim").is_null())
                    r.use_sim = j.at("use_sim").get<double>();
                if (j.contains("fluency") && !j.at("fluency").is_null())
                    r.fluency = j.at("fluency").get<double>();
                results.push_back(std::move(r));
            }
            fs::create_directories(rep_out);
            write_attack_csv(results, fs::path(rep_out) / "attack_summary.csv");
            std::cout << "wrote " << (fs::path(rep_out) / "attack_summary.csv").string() << '\n';
        } else if (*cmd_run) {
            CampaignConfig config = CampaignConfig::from_file(run_config);
            if (!data_dir.empty()) config.data_dir = data_dir;
            const PipelineResult result = run_pipeline(config);
            for (const auto& s : result.stages)
                std::cout << s.stage << ": "
                          << (s.ok ? "ok" : (s.ran ? "FAILED: " + s.error : s.error)) << '\n';
            for (const auto& a : result.artifacts) std::cout << "artifact: " << a.string() << '\n';
            return result.exit_status;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
