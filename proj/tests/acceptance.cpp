// Acceptance suite: one line per criterion, PASS / FAIL / SKIP.
// Criteria gated on live APIs or the released dataset run only when the
// corresponding environment variables are present; everything else runs
// against instrumented mocks at desk scale.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hatebench/annotate.hpp"
#include "hatebench/attack.hpp"
#include "hatebench/detector.hpp"
#include "hatebench/generation.hpp"
#include "hatebench/metrics.hpp"
#include "hatebench/pipeline.hpp"
#include "hatebench/saliency.hpp"
#include "hatebench/store.hpp"
#include "hatebench/surrogate.hpp"
#include "oracles.hpp"

using namespace hatebench;

namespace {

struct Outcome {
    enum Kind { pass, fail, skip } kind = fail;
    std::string detail;
};

Outcome ok(std::string detail) { return {Outcome::pass, std::move(detail)}; }
Outcome bad(std::string detail) { return {Outcome::fail, std::move(detail)}; }
Outcome skipped(std::string detail) { return {Outcome::skip, std::move(detail)}; }

double seconds_since(const Clock::time_point& t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
    bool ok = true;
    std::string first_failure;
    void expect(bool condition, const std::string& what) {
        if (!condition && ok) {
            ok = false;
            first_failure = what;
        }
    }
};

// ---- shared fixtures ---------------------------------------------------

std::string synth_sentence(Rng& rng, const std::string& keyword, std::size_t len,
                           std::size_t key_pos) {
    static const char* fillers[] = {"the",   "group", "seems", "quite", "calm",  "today", "and",
                                    "many",  "of",    "them",  "are",   "busy",  "with",  "their",
                                    "daily", "plans", "in",    "town",  "folks", "often"};
    std::string text;
    for (std::size_t k = 0; k < len; ++k) {
        if (!text.empty()) text += ' ';
        text += (k == key_pos && !keyword.empty()) ? keyword : fillers[rng.uniform_index(20)];
    }
    return text;
}

// ---- criteria ----------------------------------------------------------

Outcome c1_metric_oracle() {
    const auto t0 = Clock::now();
    Rng rng(1001);
    Check check;
    for (int round = 0; round < 1000; ++round) {
        const std::size_t n = 1 + rng.uniform_index(50);
        std::vector<Sample> samples;
        std::unordered_map<std::string, Label> verdicts;
        std::vector<bool> truth, pred;
        for (std::size_t i = 0; i < n; ++i) {
            const bool t = rng.uniform01() < 0.5;
            const bool p = rng.uniform01() < 0.5;
            Sample s;
            s.id = "s" + std::to_string(i);
            s.text = "t";
            s.source = Source::human();
            s.label = t ? Label::hate : Label::non_hate;
            samples.push_back(std::move(s));
            verdicts["s" + std::to_string(i)] = p ? Label::hate : Label::non_hate;
            truth.push_back(t);
            pred.push_back(p);
        }
        const auto got = evaluate(samples, verdicts);
        const auto want = oracle::confusion_tally(truth, pred);
        check.expect(got.confusion.tp == want.tp && got.confusion.fp == want.fp &&
                         got.confusion.fn == want.fn && got.confusion.tn == want.tn,
                     "confusion mismatch in round " + std::to_string(round));
        check.expect(got.accuracy == want.accuracy && got.precision == want.precision &&
                         got.recall == want.recall && got.macro_f1 == want.macro_f1,
                     "metric mismatch in round " + std::to_string(round));
        if (!check.ok) break;
    }
    const double secs = seconds_since(t0);
    if (!check.ok) return bad(check.first_failure);
    if (secs >= 10.0) return bad("runtime " + std::to_string(secs) + "s exceeds 10s");
    std::ostringstream os;
    os << "1000 randomized sets exact in " << std::fixed << std::setprecision(2) << secs << "s";
    return ok(os.str());
}

Outcome c2_krippendorff() {
    std::unordered_map<std::string, std::vector<Annotation>> perfect;
    for (int i = 0; i < 12; ++i) {
        const std::string id = "s" + std::to_string(i);
        perfect[id] = {{id, "a", Label::hate}, {id, "b", Label::hate}, {id, "c", Label::hate}};
    }
    if (krippendorff_alpha(perfect) != 1.0) return bad("perfect agreement did not yield exactly 1.0");

    Rng rng(1002);
    static const Label labels[] = {Label::hate, Label::non_hate, Label::na};
    for (int round = 0; round < 100; ++round) {
        std::unordered_map<std::string, std::vector<Annotation>> by_sample;
        std::vector<std::vector<std::string>> units;
        const std::size_t n_units = 2 + rng.uniform_index(10);
        for (std::size_t u = 0; u < n_units; ++u) {
            const std::string id = "u" + std::to_string(u);
            const std::size_t m = 2 + rng.uniform_index(3);
            std::vector<std::string> names;
            for (std::size_t a = 0; a < m; ++a) {
                const Label l = labels[rng.uniform_index(3)];
                by_sample[id].push_back({id, "w" + std::to_string(a), l});
                names.push_back(to_string(l));
            }
            units.push_back(std::move(names));
        }
        const double reference = oracle::krippendorff_pairwise(units);
        const double got = krippendorff_alpha(by_sample);
        if (std::abs(got - reference) > 1e-9)
            return bad("round " + std::to_string(round) + ": " + std::to_string(got) + " vs " +
                       std::to_string(reference));
    }
    return ok("perfect = 1.0 exactly; 100 randomized instances within 1e-9 of the reference");
}

Outcome c3_prompt_matrix() {
    const auto templates =
        load_templates(std::filesystem::path(HATEBENCH_DATA_DIR) / "prompts_default.tsv");
    const auto groups = all_identity_groups();
    const std::vector<std::string> llms = {"gpt35", "gpt4", "vicuna", "baichuan2", "dolly2", "opt"};
    const std::vector<LlmStatus> statuses = {LlmStatus::original, LlmStatus::jailbreak_1,
                                             LlmStatus::jailbreak_2};
    if (templates.size() != 6) return bad("expected 6 shipped templates");
    if (groups.size() != 34) return bad("expected 34 identity groups");
    const auto tasks = build_prompt_matrix(templates, groups, 3, llms, statuses);
    if (tasks.size() != 11016)
        return bad("matrix size " + std::to_string(tasks.size()) + " != 11016");
    return ok("6 x 34 x 3 x 6 x 3 = 11016 tasks, exact");
}

Outcome c4_saliency_contracts() {
    DetectorGateway gateway;
    DetectorConfig cfg;
    cfg.detector_id = "mock";
    cfg.cache_enabled = false;
    auto detector = std::make_unique<MockDetector>(
        std::unordered_map<std::string, double>{{"grisly", 0.9}}, 0.1);
    MockDetector* mock = detector.get();
    gateway.register_detector(cfg, std::move(detector));
    gateway.set_campaign("c4");

    class TwoCandidates : public ReplacementSource {
    public:
        std::vector<std::string> candidates(const std::string& token) const override {
            if (token == "grisly") return {"calm", "plain"};
            if (token == "the" || token == "and") return {"a"};
            return {};
        }
    } replacements;

    Rng rng(1004);
    std::uint64_t expected_calls = 0;
    for (int round = 0; round < 100; ++round) {
        const std::size_t len = 3 + rng.uniform_index(8);
        const std::size_t key_pos = rng.uniform_index(len);
        const std::string text = synth_sentence(rng, "grisly", len, key_pos);

        const auto map = saliency_map(gateway, "mock", text, replacements);
        double sum = 0.0;
        for (double v : map.normalized) sum += v;
        if (std::abs(sum - 1.0) > 1e-6)
            return bad("softmax sum " + std::to_string(sum) + " in round " + std::to_string(round));

        std::size_t argmax = 0;
        for (std::size_t i = 1; i < map.loo_scores.size(); ++i)
            if (map.loo_scores[i] > map.loo_scores[argmax]) argmax = i;
        if (map.tokens[argmax] != "grisly")
            return bad("keyword did not attain max leave-one-out score in round " +
                       std::to_string(round));

        std::size_t candidate_count = 0;
        for (const auto& tok : map.tokens) candidate_count += replacements.candidates(to_lower(tok)).size();
        expected_calls += map.tokens.size() + 1 + candidate_count;
    }
    const auto snap = gateway.ledger().snapshot("mock", "c4");
    if (snap.remote_calls != expected_calls || mock->call_count() != expected_calls)
        return bad("query accounting: ledger " + std::to_string(snap.remote_calls) + ", mock " +
                   std::to_string(mock->call_count()) + ", expected " +
                   std::to_string(expected_calls));
    return ok("softmax within 1e-6 on 100 maps; keyword max LOO 100/100; probes exact (" +
              std::to_string(expected_calls) + " calls)");
}

struct AttackCampaign {
    std::vector<AttackResult> results;
    std::vector<std::function<double(const std::string&)>> victims; // scorers for re-submission
    std::vector<double> thresholds;
    std::size_t provable = 0;
    std::size_t successes = 0;
    bool wmr_bound_ok = true;
    bool ledger_exact = true;
};

AttackCampaign run_keyword_campaign() {
    AttackCampaign campaign;
    Rng rng(1007);
    for (int v = 0; v < 50; ++v) {
        const std::string keyword = "vexing" + std::to_string(v);
        const double keyword_score = 0.7 + 0.25 * rng.uniform01();
        const double default_score = 0.05 + 0.25 * rng.uniform01();

        auto scorer = [keyword, keyword_score, default_score](const std::string& text) {
            for (const auto& tok : word_tokens_lower(text))
                if (tok == keyword) return keyword_score;
            return default_score;
        };

        SynonymResource resource;
        resource.add_neighbors(keyword, "adj", {{"calm", 0.8}, {"plain", 0.75}});

        const std::size_t len = 6 + rng.uniform_index(7);
        const std::size_t key_pos = rng.uniform_index(len);
        Sample sample;
        sample.id = "c7-" + std::to_string(v);
        sample.text = synth_sentence(rng, keyword, len, key_pos);
        sample.source = Source::from_string("gpt35");
        sample.llm_status = LlmStatus::original;
        sample.label = Label::hate;

        // oracle: brute-force enumeration over all single-token
        // substitutions from the same resource proves a flip exists
        ScorerVictim probe("probe", scorer);
        bool flip_exists = false;
        const TokenizedText tokenized = tokenize(sample.text);
        for (std::size_t i = 0; i < tokenized.size() && !flip_exists; ++i) {
            for (const auto& c :
                 word_substitutes(to_lower(tokenized[i].text), resource,
                                  SubstituteStrategy::embedding_topk, 50, false, 0.0)) {
                if (probe.score(tokenized.rebuild({{i, c}})) < 0.5) {
                    flip_exists = true;
                    break;
                }
            }
        }
        if (flip_exists) ++campaign.provable;

        ScorerVictim victim("victim" + std::to_string(v), scorer);
        AttackConfig cfg;
        cfg.attack_id = AttackId::textfooler;
        cfg.pos_match = false;
        AttackResources res;
        res.synonyms = &resource;

        const auto q0 = victim.queries();
        AttackResult result = run_attack(cfg, sample, victim, res);
        if (result.queries != victim.queries() - q0) campaign.ledger_exact = false;
        if (result.success) {
            ++campaign.successes;
            if (!result.wmr || *result.wmr > 0.2) campaign.wmr_bound_ok = false;
        }
        campaign.results.push_back(std::move(result));
        campaign.victims.push_back(scorer);
        campaign.thresholds.push_back(0.5);
    }
    return campaign;
}

Outcome c7_mock_attack_completeness(const AttackCampaign& campaign, double secs) {
    if (campaign.provable != 50)
        return bad("oracle found only " + std::to_string(campaign.provable) +
                   "/50 provable flips; fixture generation is broken");
    if (campaign.successes < 48)
        return bad("only " + std::to_string(campaign.successes) + "/50 attacks succeeded");
    if (!campaign.wmr_bound_ok) return bad("a successful attack exceeded WMR 0.2");
    if (secs >= 120.0) return bad("runtime " + std::to_string(secs) + "s exceeds 2 minutes");
    std::ostringstream os;
    os << campaign.successes << "/50 flips (oracle-verified flips exist on 50/50), WMR <= 0.2, "
       << std::fixed << std::setprecision(2) << secs << "s";
    return ok(os.str());
}

Outcome c5_attack_soundness(const AttackCampaign& campaign) {
    std::size_t checked = 0;
    for (std::size_t i = 0; i < campaign.results.size(); ++i) {
        const auto& r = campaign.results[i];
        if (!r.success) continue;
        // cache-free re-submission through a fresh scorer
        const double score = campaign.victims[i](r.adversarial_text);
        if (score >= campaign.thresholds[i])
            return bad("successful result " + r.sample_id + " re-scored hate (" +
                       std::to_string(score) + ")");
        ++checked;
    }

    // also through a gateway-backed victim with the cache disabled
    DetectorGateway gateway;
    DetectorConfig cfg;
    cfg.detector_id = "mock";
    cfg.cache_enabled = false;
    gateway.register_detector(cfg, std::make_unique<MockDetector>(
                                       std::unordered_map<std::string, double>{{"grisly", 0.9}},
                                       0.1));
    SynonymResource resource;
    resource.add_neighbors("grisly", "adj", {{"calm", 0.8}});
    AttackResources res;
    res.synonyms = &resource;
    AttackConfig attack_cfg;
    attack_cfg.attack_id = AttackId::textfooler;
    attack_cfg.pos_match = false;
    GatewayVictim victim(gateway, "mock");
    Rng rng(1005);
    for (int i = 0; i < 10; ++i) {
        Sample s;
        s.id = "c5-" + std::to_string(i);
        s.text = synth_sentence(rng, "grisly", 8, rng.uniform_index(8));
        s.source = Source::from_string("gpt35");
        s.llm_status = LlmStatus::original;
        s.label = Label::hate;
        const auto result = run_attack(attack_cfg, s, victim, res);
        if (result.success) {
            if (gateway.classify("mock", result.adversarial_text).label != Label::non_hate)
                return bad("gateway re-submission returned hate for " + s.id);
            ++checked;
        }
    }
    if (checked == 0) return bad("no successful attacks to validate");
    return ok(std::to_string(checked) + " successful adversarial texts re-verified non-hate, 100%");
}

Outcome c6_ledger_exactness() {
    DetectorGateway gateway;
    DetectorConfig cfg;
    cfg.detector_id = "mock";
    cfg.cache_enabled = false;
    auto detector = std::make_unique<MockDetector>(
        std::unordered_map<std::string, double>{{"grisly", 0.85}}, 0.1);
    MockDetector* mock = detector.get();
    gateway.register_detector(cfg, std::move(detector));
    gateway.set_campaign("c6");

    SynonymResource resource;
    resource.add_neighbors("grisly", "adj", {{"calm", 0.8}, {"plain", 0.7}});
    AttackResources res;
    res.synonyms = &resource;
    AttackConfig attack_cfg;
    attack_cfg.attack_id = AttackId::textfooler;
    attack_cfg.pos_match = false;

    GatewayVictim victim(gateway, "mock");
    Rng rng(1006);
    std::uint64_t attack_total = 0;
    for (int i = 0; i < 10; ++i) {
        Sample s;
        s.id = "c6-" + std::to_string(i);
        s.text = synth_sentence(rng, "grisly", 6 + rng.uniform_index(5), 2);
        s.source = Source::from_string("gpt35");
        s.llm_status = LlmStatus::original;
        s.label = Label::hate;
        attack_total += run_attack(attack_cfg, s, victim, res).queries;
    }
    const auto after_attacks = gateway.ledger().snapshot("mock", "c6");
    if (after_attacks.remote_calls != mock->call_count())
        return bad("ledger != mock counter after attacks");
    if (attack_total != after_attacks.remote_calls)
        return bad("sum of result queries (" + std::to_string(attack_total) +
                   ") != ledger remote calls (" + std::to_string(after_attacks.remote_calls) + ")");

    class OneCandidate : public ReplacementSource {
    public:
        std::vector<std::string> candidates(const std::string& token) const override {
            return token == "grisly" ? std::vector<std::string>{"calm"} : std::vector<std::string>{};
        }
    } replacements;
    for (int i = 0; i < 5; ++i) {
        const std::string text = synth_sentence(rng, "grisly", 7, 3);
        saliency_map(gateway, "mock", text, replacements);
    }
    const auto final_snap = gateway.ledger().snapshot("mock", "c6");
    if (final_snap.remote_calls != mock->call_count())
        return bad("ledger != mock counter after saliency maps");
    return ok("ledger == instrumented mock counter across attack and saliency runs (" +
              std::to_string(final_snap.remote_calls) + " calls)");
}

Outcome c8_desk_stealing(double& elapsed_out) {
    const auto t0 = Clock::now();
    DetectorGateway gateway;
    DetectorConfig cfg;
    cfg.detector_id = "target";
    cfg.cache_enabled = false;
    gateway.register_detector(
        cfg, std::make_unique<MockDetector>(
                 std::unordered_map<std::string, double>{{"grisly", 0.9}, {"vexing", 0.9}}, 0.1));

    Rng rng(1008);
    std::vector<Sample> aux;
    for (int i = 0; i < 2000; ++i) {
        Sample s;
        s.id = "c8-" + std::to_string(i);
        const bool positive = i % 2 == 0;
        s.text = synth_sentence(rng, positive ? (i % 4 == 0 ? "grisly" : "vexing") : "",
                                5 + rng.uniform_index(7), rng.uniform_index(5));
        s.source = Source::from_string("gpt35");
        s.llm_status = LlmStatus::original;
        s.label = positive ? Label::hate : Label::non_hate;
        aux.push_back(std::move(s));
    }

    const auto dataset = harvest_pseudo_labels(gateway, "target", aux);
    SurrogateTrainConfig train_cfg;
    train_cfg.learning_rate = 0.05;
    train_cfg.epochs = 30;
    train_cfg.seed = 2024;
    const auto bundle = train_surrogate(dataset, train_cfg);

    std::vector<std::string> batch(dataset.texts.begin(), dataset.texts.begin() + 24);
    std::vector<double> targets(dataset.pseudo_labels.begin(), dataset.pseudo_labels.begin() + 24);
    double independent = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double d = bundle.model->score(batch[i]) - targets[i];
        independent += d * d;
    }
    independent /= static_cast<double>(batch.size());
    const double trainer_loss = bundle.model->batch_loss(batch, targets);

    elapsed_out = seconds_since(t0);
    if (bundle.agreement < 0.95)
        return bad("held-out agreement " + std::to_string(bundle.agreement) + " < 0.95");
    if (std::abs(trainer_loss - independent) > 1e-6)
        return bad("trainer loss deviates from independent MSE by " +
                   std::to_string(std::abs(trainer_loss - independent)));
    if (elapsed_out >= 300.0)
        return bad("runtime " + std::to_string(elapsed_out) + "s exceeds 5 minutes");
    std::ostringstream os;
    os << "agreement " << std::fixed << std::setprecision(3) << bundle.agreement
       << " on 2000 pseudo-labeled sentences; loss == MSE within 1e-6; " << std::setprecision(1)
       << elapsed_out << "s";
    return ok(os.str());
}

Outcome c9_one_query_law() {
    DetectorGateway gateway;
    DetectorConfig cfg;
    cfg.detector_id = "target";
    cfg.cache_enabled = false;
    gateway.register_detector(
        cfg, std::make_unique<MockDetector>(
                 std::unordered_map<std::string, double>{{"grisly", 0.9}, {"vexing", 0.9}}, 0.1));
    gateway.set_campaign("c9-harvest");

    Rng rng(1009);
    std::vector<Sample> aux;
    for (int i = 0; i < 700; ++i) {
        Sample s;
        s.id = "c9a-" + std::to_string(i);
        const bool positive = i % 2 == 0;
        s.text = synth_sentence(rng, positive ? (i % 4 == 0 ? "grisly" : "vexing") : "",
                                5 + rng.uniform_index(6), rng.uniform_index(5));
        s.source = Source::from_string("gpt35");
        s.llm_status = LlmStatus::original;
        s.label = positive ? Label::hate : Label::non_hate;
        aux.push_back(std::move(s));
    }
    const auto dataset = harvest_pseudo_labels(gateway, "target", aux);
    SurrogateTrainConfig train_cfg;
    train_cfg.learning_rate = 0.05;
    train_cfg.epochs = 25;
    const auto bundle = train_surrogate(dataset, train_cfg);

    // 100 evaluation samples, detected-hate by construction (keyword present)
    std::vector<Sample> eval_samples;
    for (int i = 0; i < 100; ++i) {
        Sample s;
        s.id = "c9e-" + std::to_string(i);
        s.text = synth_sentence(rng, i % 2 ? "grisly" : "vexing", 6 + rng.uniform_index(6),
                                rng.uniform_index(6));
        s.source = Source::from_string("gpt35");
        s.llm_status = LlmStatus::original;
        s.label = Label::hate;
        eval_samples.push_back(std::move(s));
    }

    SynonymResource resource;
    resource.add_neighbors("grisly", "adj", {{"calm", 0.8}, {"plain", 0.7}});
    resource.add_neighbors("vexing", "adj", {{"mild", 0.8}, {"plain", 0.7}});
    AttackResources res;
    res.synonyms = &resource;
    AttackConfig attack_cfg;
    attack_cfg.attack_id = AttackId::textfooler;
    attack_cfg.pos_match = false;

    gateway.set_campaign("c9-transfer");
    std::size_t surrogate_successes = 0;
    for (const auto& s : eval_samples) {
        const auto r =
            transfer_attack(attack_cfg, s, bundle, gateway, "target", TransferMode::black_box, res);
        if (r.surrogate_success) ++surrogate_successes;
        if (r.target_queries > 1) return bad("a transfer spent more than one target query");
    }
    const auto snap = gateway.ledger().snapshot("target", "c9-transfer");
    if (snap.remote_calls != surrogate_successes)
        return bad("target remote_calls " + std::to_string(snap.remote_calls) +
                   " != surrogate successes " + std::to_string(surrogate_successes));
    return ok("100-sample campaign: target remote_calls == " +
              std::to_string(surrogate_successes) + " surrogate successes, exact");
}

Outcome c10_gradient_validity() {
    DetectorGateway gateway;
    DetectorConfig cfg;
    cfg.detector_id = "target";
    cfg.cache_enabled = false;
    gateway.register_detector(
        cfg, std::make_unique<MockDetector>(
                 std::unordered_map<std::string, double>{{"grisly", 0.9}, {"vexing", 0.9}}, 0.1));

    Rng rng(1010);
    std::vector<Sample> aux;
    for (int i = 0; i < 500; ++i) {
        Sample s;
        s.id = "c10-" + std::to_string(i);
        const bool positive = i % 2 == 0;
        s.text = synth_sentence(rng, positive ? (i % 4 == 0 ? "grisly" : "vexing") : "",
                                5 + rng.uniform_index(6), rng.uniform_index(5));
        s.source = Source::from_string("gpt35");
        s.llm_status = LlmStatus::original;
        s.label = positive ? Label::hate : Label::non_hate;
        aux.push_back(std::move(s));
    }
    const auto dataset = harvest_pseudo_labels(gateway, "target", aux);
    SurrogateTrainConfig train_cfg;
    train_cfg.learning_rate = 0.05;
    train_cfg.epochs = 25;
    const auto bundle = train_surrogate(dataset, train_cfg);

    double corr_sum = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto analytic = bundle.model->embedding_gradient_norms(aux[i].text, 0.0);
        const auto numeric = bundle.model->finite_difference_gradient_norms(aux[i].text, 0.0);
        corr_sum += oracle::spearman(analytic, numeric);
    }
    const double mean_corr = corr_sum / 50.0;
    if (mean_corr <= 0.8)
        return bad("mean rank correlation " + std::to_string(mean_corr) + " <= 0.8");
    std::ostringstream os;
    os << "embedding gradients vs finite differences: mean rank correlation " << std::fixed
       << std::setprecision(3) << mean_corr << " over 50 fixtures";
    return ok(os.str());
}

// Conditional live criteria. They require a live detector registry and
// (for C11) the released dataset; both arrive via environment variables.
Outcome c11_table3_spot_check() {
    const char* dataset_path = std::getenv("HATEBENCHSET_PATH");
    const char* registry_path = std::getenv("HATEBENCH_LIVE_DETECTORS");
    if (dataset_path == nullptr || registry_path == nullptr)
        return skipped("needs HATEBENCHSET_PATH and HATEBENCH_LIVE_DETECTORS (live APIs + "
                       "released dataset)");

    DetectorGateway gateway;
    {
        std::ifstream in(registry_path);
        if (!in) return bad("cannot read " + std::string(registry_path));
        const json j = json::parse(in);
        register_detectors_from_config(j.is_array() ? j : j.at("detectors"), gateway);
    }
    SampleStore store;
    store.load_jsonl(dataset_path);
    auto eval_set = store.evaluation_set();
    if (eval_set.size() > 500) {
        // stratified subset: alternate hate / non-hate in store order
        std::vector<Sample> subset;
        std::size_t want_hate = 250, want_non = 250;
        for (const auto& s : eval_set) {
            if (s.label == Label::hate && want_hate > 0) {
                subset.push_back(s);
                --want_hate;
            } else if (s.label == Label::non_hate && want_non > 0) {
                subset.push_back(s);
                --want_non;
            }
        }
        eval_set = std::move(subset);
    }

    std::ostringstream detail;
    if (!gateway.has_detector("tweethate")) return bad("registry lacks 'tweethate'");
    std::unordered_map<std::string, Label> verdicts;
    for (const auto& s : eval_set) verdicts[s.id] = gateway.classify("tweethate", s.text).label;
    const auto report = evaluate(eval_set, verdicts);
    detail << "tweethate F1 " << report.macro_f1;
    if (std::abs(report.macro_f1 - 0.864) > 0.08)
        return bad("tweethate macro-F1 " + std::to_string(report.macro_f1) +
                   " outside 0.864 +/- 0.08");

    if (gateway.has_detector("perspective")) {
        std::unordered_map<std::string, Label> pv;
        for (const auto& s : eval_set) pv[s.id] = gateway.classify("perspective", s.text).label;
        const auto pr = evaluate(eval_set, pv);
        detail << "; perspective F1 " << pr.macro_f1;
        if (std::abs(pr.macro_f1 - 0.821) > 0.05)
            return bad("perspective macro-F1 " + std::to_string(pr.macro_f1) +
                       " outside 0.821 +/- 0.05");
        // directional degradation check on newer-generation outputs
        std::vector<Sample> gpt35, gpt4;
        for (const auto& s : eval_set) {
            if (s.source.kind == SourceKind::gpt35) gpt35.push_back(s);
            if (s.source.kind == SourceKind::gpt4) gpt4.push_back(s);
        }
        if (!gpt35.empty() && !gpt4.empty()) {
            const double f1_35 = evaluate(gpt35, pv).macro_f1;
            const double f1_4 = evaluate(gpt4, pv).macro_f1;
            detail << "; degradation " << (f1_35 - f1_4);
            if (f1_35 - f1_4 <= 0.1)
                return bad("GPT-3.5 to GPT-4 degradation " + std::to_string(f1_35 - f1_4) +
                           " not > 0.1");
        }
    }
    return ok(detail.str());
}

Outcome c12_live_attack_spot_check() {
    const char* registry_path = std::getenv("HATEBENCH_LIVE_DETECTORS");
    const char* samples_path = std::getenv("HATEBENCH_LIVE_ATTACK_SAMPLES");
    if (registry_path == nullptr || samples_path == nullptr)
        return skipped("needs HATEBENCH_LIVE_DETECTORS and HATEBENCH_LIVE_ATTACK_SAMPLES (live "
                       "APIs)");

    DetectorGateway gateway;
    {
        std::ifstream in(registry_path);
        if (!in) return bad("cannot read " + std::string(registry_path));
        const json j = json::parse(in);
        register_detectors_from_config(j.is_array() ? j : j.at("detectors"), gateway);
    }
    const auto ids = gateway.detector_ids();
    if (ids.empty()) return bad("live registry is empty");
    const std::string victim_id = ids.front();

    SampleStore store;
    store.load_jsonl(samples_path);
    std::vector<Sample> detected;
    for (const auto& s : store.evaluation_set()) {
        if (detected.size() >= 30) break;
        if (s.label != Label::hate) continue;
        if (gateway.classify(victim_id, s.text).label == Label::hate) detected.push_back(s);
    }
    if (detected.size() < 30)
        return bad("found only " + std::to_string(detected.size()) + " detected-hate samples");

    SynonymResource synonyms = SynonymResource::load(HATEBENCH_DATA_DIR);
    AttackResources res;
    res.synonyms = &synonyms;
    AttackConfig cfg;
    cfg.attack_id = AttackId::textfooler;

    GatewayVictim victim(gateway, victim_id);
    std::size_t successes = 0;
    double adversarial_seconds = 0.0;
    std::vector<AttackResult> results;
    for (const auto& s : detected) {
        const auto r = run_attack(cfg, s, victim, res);
        adversarial_seconds += std::chrono::duration<double>(r.elapsed).count();
        if (r.success) ++successes;
        results.push_back(r);
    }
    const double asr = static_cast<double>(successes) / static_cast<double>(detected.size());
    if (asr < 0.85) return bad("live ASR " + std::to_string(asr) + " < 0.85");

    // stealthy speedup: per-sample optimization wholly on a local
    // surrogate trained from the same gateway
    const auto dataset = harvest_pseudo_labels(gateway, victim_id, store.evaluation_set());
    SurrogateTrainConfig train_cfg;
    train_cfg.learning_rate = 0.05;
    train_cfg.epochs = 20;
    const auto bundle = train_surrogate(dataset, train_cfg);
    double stealthy_seconds = 0.0;
    for (const auto& s : detected) {
        const auto t0 = Clock::now();
        try {
            transfer_attack(cfg, s, bundle, gateway, victim_id, TransferMode::white_box, res);
        } catch (const NotApplicable&) {
        }
        stealthy_seconds += seconds_since(t0);
    }
    const double ratio = (adversarial_seconds / detected.size()) /
                         std::max(1e-9, stealthy_seconds / detected.size());
    if (ratio < 5.0)
        return bad("adversarial/stealthy per-sample time ratio " + std::to_string(ratio) +
                   " < 5x");
    std::ostringstream os;
    os << "ASR " << asr << ", per-sample speedup " << ratio << "x";
    return ok(os.str());
}

} // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;

    criteria.emplace_back("C1 metric-oracle-equivalence", c1_metric_oracle);
    criteria.emplace_back("C2 krippendorff-alpha", c2_krippendorff);
    criteria.emplace_back("C3 prompt-matrix-cardinality", c3_prompt_matrix);
    criteria.emplace_back("C4 saliency-contracts", c4_saliency_contracts);

    // C5/C6/C7 share the 50-victim keyword campaign
    const auto campaign_t0 = Clock::now();
    AttackCampaign campaign = run_keyword_campaign();
    const double campaign_secs = seconds_since(campaign_t0);
    criteria.emplace_back("C5 attack-soundness",
                          [&campaign] { return c5_attack_soundness(campaign); });
    criteria.emplace_back("C6 query-ledger-exactness", c6_ledger_exactness);
    criteria.emplace_back("C7 mock-attack-completeness", [&campaign, campaign_secs] {
        return c7_mock_attack_completeness(campaign, campaign_secs);
    });
    criteria.emplace_back("C8 desk-scale-stealing", [] {
        double elapsed = 0.0;
        return c8_desk_stealing(elapsed);
    });
    criteria.emplace_back("C9 transfer-one-query-law", c9_one_query_law);
    criteria.emplace_back("C10 white-box-gradient-validity", c10_gradient_validity);
    criteria.emplace_back("C11 table3-spot-check [conditional]", c11_table3_spot_check);
    criteria.emplace_back("C12 table6-spot-check [conditional]", c12_live_attack_spot_check);

    int failures = 0;
    for (auto& [name, fn] : criteria) {
        Outcome outcome;
        try {
            outcome = fn();
        } catch (const std::exception& e) {
            outcome = bad(std::string("exception: ") + e.what());
        }
        const char* tag = outcome.kind == Outcome::pass ? "PASS"
                          : outcome.kind == Outcome::skip ? "SKIP"
                                                          : "FAIL";
        std::cout << tag << "  " << name << " — " << outcome.detail << '\n';
        if (outcome.kind == Outcome::fail) ++failures;
    }
    if (failures > 0) {
        std::cout << failures << " criteria failed\n";
        return 1;
    }
    std::cout << "all non-skipped criteria passed\n";
    return 0;
}
