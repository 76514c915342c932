#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "hatebench/attack.hpp"
#include "hatebench/detector.hpp"
#include "hatebench/meteor.hpp"
#include "hatebench/quality.hpp"
#include "oracles.hpp"

using namespace hatebench;

namespace {

Sample hate_sample(const std::string& id, const std::string& text) {
    Sample s;
    s.id = id;
    s.text = text;
    s.source = Source::from_string("gpt35");
    s.llm_status = LlmStatus::original;
    s.label = Label::hate;
    return s;
}

// rule: max score over keyword hits, else default
ScorerVictim keyword_victim(std::unordered_map<std::string, double> scores,
                            double default_score = 0.1, const std::string& id = "mock") {
    return ScorerVictim(id, [scores = std::move(scores), default_score](const std::string& text) {
        double best = default_score;
        bool matched = false;
        for (const auto& tok : word_tokens_lower(text)) {
            const auto it = scores.find(tok);
            if (it != scores.end()) {
                best = matched ? std::max(best, it->second) : it->second;
                matched = true;
            }
        }
        return best;
    });
}

SynonymResource test_resource() {
    SynonymResource r;
    r.add_neighbors("inferior", "adj", {{"lesser", 0.84}, {"substandard", 0.8}, {"secondary", 0.72}});
    r.add_synonyms("inferior", "adj", {"substandard", "lesser"});
    r.add_neighbors("weak", "adj", {{"feeble", 0.86}, {"fragile", 0.81}});
    r.add_synonyms("weak", "adj", {"feeble", "frail"});
    r.add_neighbors("stupid", "adj", {{"foolish", 0.85}, {"dumb", 0.83}});
    r.add_synonyms("stupid", "adj", {"foolish", "dense"});
    return r;
}

// brute force over every single-token substitution from the same resource
bool flip_exists_by_enumeration(Victim& victim, const std::string& text,
                                const SynonymResource& resource, double threshold) {
    const TokenizedText tokenized = tokenize(text);
    for (std::size_t i = 0; i < tokenized.size(); ++i) {
        for (const auto& c : word_substitutes(to_lower(tokenized[i].text), resource,
                                              SubstituteStrategy::embedding_topk, 50, false, 0.0)) {
            if (victim.score(tokenized.rebuild({{i, c}})) < threshold) return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("rank_word_importance: the keyword ranks first, n+1 queries issued") {
    auto victim = keyword_victim({{"inferior", 0.9}});
    const TokenizedText tokenized = tokenize("some people are inferior today");
    REQUIRE(tokenized.size() == 5);

    const auto q0 = victim.queries();
    const auto order = rank_word_importance(victim, tokenized, ImportanceMethod::deletion);
    REQUIRE(victim.queries() - q0 == 6); // n + 1

    // deleting "inferior" drops the score by 0.8; every other deletion is flat:
    // the ranking enumerated all deletions against the mock
    REQUIRE(tokenized[order[0]].text == "inferior");

    SECTION("all-equal importances fall back to original positions") {
        auto flat = keyword_victim({}, 0.7);
        const auto tie_order = rank_word_importance(flat, tokenized, ImportanceMethod::deletion);
        for (std::size_t i = 0; i < tie_order.size(); ++i) REQUIRE(tie_order[i] == i);
    }

    SECTION("unk_mask method also singles out the keyword") {
        const auto masked = rank_word_importance(victim, tokenized, ImportanceMethod::unk_mask);
        REQUIRE(tokenized[masked[0]].text == "inferior");
    }
}

TEST_CASE("char_perturb enumerates deterministic candidate sets") {
    SECTION("swaps of 'hate' are the three adjacent transposes") {
        const auto swaps = char_perturb("hate", {CharPerturbKind::swap});
        REQUIRE(swaps == std::vector<std::string>{"ahte", "htae", "haet"});
    }
    SECTION("deletes of 'hate'") {
        const auto deletes = char_perturb("hate", {CharPerturbKind::del});
        REQUIRE(deletes == std::vector<std::string>{"ate", "hte", "hae", "hat"});
    }
    SECTION("homoglyph table maps o to 0") {
        HomoglyphTable table;
        const auto alts = table.alternatives('o');
        REQUIRE(std::find(alts.begin(), alts.end(), "0") != alts.end());
        const auto candidates = char_perturb("o", {CharPerturbKind::homoglyph});
        REQUIRE(std::find(candidates.begin(), candidates.end(), "0") != candidates.end());
    }
    SECTION("one-char word yields only insert and substitute candidates") {
        const auto all = char_perturb("a", all_char_perturb_kinds());
        REQUIRE_FALSE(all.empty());
        for (const auto& c : all) REQUIRE(c != "a");
        REQUIRE(char_perturb("a", {CharPerturbKind::swap, CharPerturbKind::del}).empty());
    }
    SECTION("no candidate ever equals the input word") {
        for (const std::string word : {"hate", "aa", "x", "speech"}) {
            for (const auto& c : char_perturb(word, all_char_perturb_kinds()))
                REQUIRE(c != word);
        }
    }
    SECTION("candidates are deterministic") {
        REQUIRE(char_perturb("speech", all_char_perturb_kinds()) ==
                char_perturb("speech", all_char_perturb_kinds()));
    }
}

TEST_CASE("word_substitutes contracts") {
    SynonymResource shipped = SynonymResource::load(HATEBENCH_DATA_DIR);

    SECTION("out-of-vocabulary token yields an empty list") {
        REQUIRE(word_substitutes("xqzjw", shipped, SubstituteStrategy::embedding_topk, 50, true,
                                 0.5)
                    .empty());
        REQUIRE(word_substitutes("xqzjw", shipped, SubstituteStrategy::wordnet_synonyms, 50, true,
                                 0.5)
                    .empty());
    }
    SECTION("the shipped resource offers the observed trustworthy substitution") {
        const auto candidates =
            word_substitutes("trustworthy", shipped, SubstituteStrategy::embedding_topk, 50, true,
                             0.5);
        REQUIRE(std::find(candidates.begin(), candidates.end(), "assurance") != candidates.end());
    }
    SECTION("k=1 returns the single top-similarity candidate") {
        const auto top = word_substitutes("weak", shipped, SubstituteStrategy::embedding_topk, 1,
                                          true, 0.5);
        REQUIRE(top == std::vector<std::string>{"feeble"});
    }
    SECTION("min_similarity gates the neighbor list") {
        const auto strict = word_substitutes("weak", shipped, SubstituteStrategy::embedding_topk,
                                             50, true, 0.99);
        REQUIRE(strict.empty());
    }
    SECTION("neighbor lists stay sorted by similarity descending") {
        const auto ns = shipped.neighbors("inferior");
        for (std::size_t i = 1; i < ns.size(); ++i)
            REQUIRE(ns[i - 1].similarity >= ns[i].similarity);
    }
}

TEST_CASE("run_attack flips a single-keyword mock with one substitution") {
    auto victim = keyword_victim({{"inferior", 0.9}});
    const SynonymResource resource = test_resource();
    const Sample sample = hate_sample("s1", "these people are inferior");

    // the oracle first proves a label-flipping single substitution exists
    REQUIRE(flip_exists_by_enumeration(victim, sample.text, resource, victim.threshold()));

    AttackResources res;
    res.synonyms = &resource;
    AttackConfig cfg;
    cfg.attack_id = AttackId::textfooler;

    const auto q0 = victim.queries();
    const auto result = run_attack(cfg, sample, victim, res);
    REQUIRE(result.success);
    REQUIRE(result.modified_indices.size() == 1);
    REQUIRE_THAT(*result.wmr, Catch::Matchers::WithinAbs(0.25, 1e-12)); // 1 of 4 tokens
    REQUIRE(result.queries == victim.queries() - q0);

    // soundness: re-submission of x* is non-hate
    REQUIRE(victim.score(result.adversarial_text) < victim.threshold());

    // reported WMR equals the independent token-diff oracle
    REQUIRE_THAT(*result.wmr,
                 Catch::Matchers::WithinAbs(
                     oracle::wmr_oracle(result.original_text, result.adversarial_text), 1e-12));
}

TEST_CASE("run_attack refuses inputs the victim already passes") {
    auto victim = keyword_victim({{"inferior", 0.9}});
    const SynonymResource resource = test_resource();
    AttackResources res;
    res.synonyms = &resource;
    AttackConfig cfg;
    REQUIRE_THROWS_AS(run_attack(cfg, hate_sample("s", "these people are kind"), victim, res),
                      NotApplicable);
}

TEST_CASE("every committed greedy step is the argmin of its evaluated candidates") {
    // two keywords with partial-score candidates force multi-step commits
    auto victim = keyword_victim({{"inferior", 0.45}, {"stupid", 0.45}}, 0.05);
    // two hits -> max is still 0.45; craft a rule where both matter:
    ScorerVictim additive("additive", [](const std::string& text) {
        // requires both keywords gone before the label flips
        double score = 0.05;
        for (const auto& tok : word_tokens_lower(text)) {
            if (tok == "inferior") score += 0.48;
            if (tok == "stupid") score += 0.48;
        }
        return std::min(score, 1.0);
    });
    const SynonymResource resource = test_resource();
    AttackResources res;
    res.synonyms = &resource;
    AttackConfig cfg;
    cfg.attack_id = AttackId::textfooler;

    const Sample sample = hate_sample("s2", "they are stupid and inferior people");
    const auto result = run_attack(cfg, sample, additive, res);
    REQUIRE(result.success);
    REQUIRE(result.modified_indices.size() == 2);

    // replay the transcript: at each step, every candidate the attack saw
    // must score no lower than the one it committed
    const TokenizedText tokenized = tokenize(sample.text);
    std::map<std::size_t, std::string> committed;
    for (const auto& step : result.transcript) {
        const auto candidates =
            word_substitutes(to_lower(tokenized[step.token_index].text), resource,
                             SubstituteStrategy::embedding_topk, cfg.max_candidates_per_word,
                             cfg.pos_match, cfg.min_similarity);
        REQUIRE(step.candidates_evaluated == candidates.size());
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : candidates) {
            auto trial = committed;
            trial[step.token_index] = c;
            best = std::min(best, additive.score(tokenized.rebuild(trial)));
        }
        REQUIRE_THAT(step.score_after, Catch::Matchers::WithinAbs(best, 1e-12));
        committed[step.token_index] = step.replacement;
    }
}

TEST_CASE("WMR budget bounds the number of modified words") {
    ScorerVictim stubborn("stubborn", [](const std::string& text) {
        // score decreases slightly with every replaced token, never flips
        double score = 0.95;
        for (const auto& tok : word_tokens_lower(text))
            if (tok.size() >= 2 && tok[0] == 'f' && tok != "four") score -= 0.01;
        return std::max(score, 0.6);
    });
    SynonymResource resource;
    for (const std::string w : {"one", "two", "three", "four", "five", "six", "seven", "eight",
                                "nine", "ten"})
        resource.add_neighbors(w, "noun", {{"f" + w, 0.9}});

    AttackResources res;
    res.synonyms = &resource;
    AttackConfig cfg;
    cfg.attack_id = AttackId::textfooler;
    cfg.max_wmr_budget = 0.4;
    cfg.pos_match = false;

    const Sample sample = hate_sample("s3", "one two three four five six seven eight nine ten");
    const auto result = run_attack(cfg, sample, stubborn, res);
    REQUIRE_FALSE(result.success);
    REQUIRE(result.modified_indices.size() <= 4); // 0.4 of 10 tokens
    REQUIRE(*result.wmr <= 0.4);
}

TEST_CASE("protect_identity_terms matches single and multi-token spans") {
    IdentityLexicon lexicon;
    lexicon.load(std::filesystem::path(HATEBENCH_DATA_DIR) / "identity_lexicon.txt");

    SECTION("single-token alias") {
        const auto p = protect_identity_terms(tokenize("Asians are weak"), lexicon);
        REQUIRE(p == std::set<std::size_t>{0});
    }
    SECTION("no lexicon words") {
        REQUIRE(protect_identity_terms(tokenize("the weather is nice today"), lexicon).empty());
    }
    SECTION("multi-token spans are covered in full") {
        const auto p = protect_identity_terms(
            tokenize("Native American or Alaska Native people deserve respect"), lexicon);
        // "Native American or Alaska Native" spans tokens 0..4
        REQUIRE(p == std::set<std::size_t>{0, 1, 2, 3, 4});
    }
    SECTION("hand-marked fixture sentences") {
        struct Fixture {
            const char* text;
            std::set<std::size_t> expected;
        };
        const Fixture fixtures[] = {
            {"Asians are weak", {0}},
            {"some say Women complain", {2}},
            {"Jews run things", {0}},
            {"Pacific Islanders keep their islands clean", {0, 1}},
            {"I met Migrant Workers yesterday", {2, 3}},
            {"Undocumented People deserve dignity", {0, 1}},
            {"nothing to see here", {}},
            {"Transgender Women and Transgender Men spoke", {0, 1, 3, 4}},
            {"the Hearing Impaired People arrived", {1, 2, 3}},
            {"Black or African American families", {0, 1, 2, 3}},
            {"White people and Black people", {0, 1, 3, 4}},
            {"Muslims and Christians and Hindus", {0, 2, 4}},
            {"meet the Non-Hispanic White group", {2, 3, 4}},
            {"Bisexuals exist", {0}},
            {"Gay and Lesbian voices", {0, 2}},
            {"a Heterosexual person", {1}},
            {"blind people use canes", {0, 1}},
            {"Deaf people sign", {0, 1}},
            {"Refugees flee conflict", {0}},
            {"People With Mental Health Problems need support", {0, 1, 2, 3, 4}},
        };
        for (const auto& f : fixtures) {
            INFO(f.text);
            REQUIRE(protect_identity_terms(tokenize(f.text), lexicon) == f.expected);
        }
    }
}

TEST_CASE("protected indices are never modified by the attack") {
    IdentityLexicon lexicon;
    lexicon.add("asians");
    SynonymResource resource;
    resource.add_neighbors("asians", "noun", {{"people", 0.7}});
    resource.add_neighbors("weak", "adj", {{"feeble", 0.86}});

    // both words carry score; only the unprotected one may change
    ScorerVictim victim("v", [](const std::string& text) {
        double score = 0.1;
        for (const auto& tok : word_tokens_lower(text)) {
            if (tok == "asians") score += 0.3;
            if (tok == "weak") score += 0.3;
        }
        return score;
    });

    AttackResources res;
    res.synonyms = &resource;
    res.identity_lexicon = &lexicon;
    AttackConfig cfg;
    cfg.attack_id = AttackId::textfooler;
    cfg.protect_identity_terms = true;
    cfg.pos_match = false;

    const auto result = run_attack(cfg, hate_sample("s4", "Asians are weak"), victim, res);
    const auto protected_set = protect_identity_terms(tokenize("Asians are weak"), lexicon);
    for (const auto idx : result.modified_indices) REQUIRE_FALSE(protected_set.count(idx));
    REQUIRE(result.success); // flipping via "weak" alone still works: 0.1+0.3 < 0.5
    REQUIRE(result.adversarial_text.find("Asians") != std::string::npos);
}

TEST_CASE("attack determinism: identical inputs give identical results") {
    const SynonymResource resource = test_resource();
    AttackResources res;
    res.synonyms = &resource;
    AttackConfig cfg;
    cfg.attack_id = AttackId::textfooler;
    const Sample sample = hate_sample("s5", "these weak and inferior words");

    auto v1 = keyword_victim({{"inferior", 0.7}, {"weak", 0.65}});
    auto v2 = keyword_victim({{"inferior", 0.7}, {"weak", 0.65}});
    const auto r1 = run_attack(cfg, sample, v1, res);
    const auto r2 = run_attack(cfg, sample, v2, res);
    REQUIRE(r1.adversarial_text == r2.adversarial_text);
    REQUIRE(r1.success == r2.success);
    REQUIRE(r1.queries == r2.queries);
    REQUIRE(r1.modified_indices == r2.modified_indices);
}

TEST_CASE("gateway victims count exactly the mock's remote calls") {
    DetectorGateway gateway;
    DetectorConfig cfg;
    cfg.detector_id = "mock";
    cfg.cache_enabled = false;
    auto mock = std::make_unique<MockDetector>(
        std::unordered_map<std::string, double>{{"inferior", 0.9}}, 0.1);
    MockDetector* raw = mock.get();
    gateway.register_detector(cfg, std::move(mock));
    gateway.set_campaign("attack-count");

    const SynonymResource resource = test_resource();
    AttackResources res;
    res.synonyms = &resource;
    AttackConfig attack_cfg;
    attack_cfg.attack_id = AttackId::textfooler;

    GatewayVictim victim(gateway, "mock");
    const auto result =
        run_attack(attack_cfg, hate_sample("s6", "they are inferior"), victim, res);

    const auto snap = gateway.ledger().snapshot("mock", "attack-count");
    REQUIRE(result.queries == snap.remote_calls);
    REQUIRE(result.queries == raw->call_count());
}

TEST_CASE("deepwordbug and textbugger flip keyword rules with character bugs") {
    // rule keyed on the exact token: any single character edit breaks the match
    auto victim = keyword_victim({{"inferior", 0.9}});
    SynonymResource empty_resource;
    AttackResources res;
    res.synonyms = &empty_resource;

    AttackConfig dwb;
    dwb.attack_id = AttackId::deepwordbug;
    const auto r1 = run_attack(dwb, hate_sample("s7", "these people are inferior"), victim, res);
    REQUIRE(r1.success);
    REQUIRE(r1.modified_indices.size() == 1);

    AttackConfig tb;
    tb.attack_id = AttackId::textbugger;
    auto victim2 = keyword_victim({{"inferior", 0.9}});
    const auto r2 =
        run_attack(tb, hate_sample("s8", "First sentence is fine. These people are inferior."),
                   victim2, res);
    REQUIRE(r2.success);
}

TEST_CASE("pwws orders by saliency times probability change and flips the mock") {
    auto victim = keyword_victim({{"inferior", 0.9}});
    const SynonymResource resource = test_resource();
    AttackResources res;
    res.synonyms = &resource;
    AttackConfig cfg;
    cfg.attack_id = AttackId::pwws;
    const auto result = run_attack(cfg, hate_sample("s9", "they are inferior"), victim, res);
    REQUIRE(result.success);
    REQUIRE(result.transcript.size() == 1);
    REQUIRE(result.transcript[0].original_token == "inferior");
}

TEST_CASE("paraphrase attack: one query per attempt, budget zero means zero queries") {
    const SynonymResource resource = test_resource();
    AttackResources res;
    res.synonyms = &resource;

    SECTION("a victim that passes everything succeeds after one attempt") {
        ScorerVictim lenient("lenient", [](const std::string&) { return 0.0; });
        MockLlmClient paraphraser("bloomz", [](const std::string& prompt) {
            return "rewritten: " + prompt.substr(prompt.rfind(": ") + 2);
        });
        AttackConfig cfg;
        cfg.max_paraphrase_attempts = 40;
        const auto result =
            paraphrase_attack(cfg, hate_sample("p1", "they are inferior"), lenient, paraphraser, res);
        REQUIRE(result.success);
        REQUIRE(result.queries == 1);
        REQUIRE_FALSE(result.wmr.has_value()); // undefined for paraphrase
    }

    SECTION("zero attempts fail immediately with zero queries") {
        ScorerVictim lenient("lenient", [](const std::string&) { return 0.0; });
        MockLlmClient paraphraser("bloomz", [](const std::string& p) { return p; });
        AttackConfig cfg;
        cfg.max_paraphrase_attempts = 0;
        const auto result =
            paraphrase_attack(cfg, hate_sample("p2", "they are inferior"), lenient, paraphraser, res);
        REQUIRE_FALSE(result.success);
        REQUIRE(result.queries == 0);
    }

    SECTION("stochastic paraphraser retries until a rewrite evades") {
        auto victim = keyword_victim({{"inferior", 0.9}});
        int calls = 0;
        MockLlmClient paraphraser("bloomz", [&calls](const std::string&) {
            ++calls;
            return calls < 4 ? "they are inferior still" : "they are not great";
        });
        AttackConfig cfg;
        cfg.max_paraphrase_attempts = 10;
        const auto result =
            paraphrase_attack(cfg, hate_sample("p3", "they are inferior"), victim, paraphraser, res);
        REQUIRE(result.success);
        REQUIRE(result.queries == 4);
        REQUIRE(result.adversarial_text == "they are not great");
    }

    SECTION("paraphraser failure aborts the attack") {
        ScorerVictim lenient("lenient", [](const std::string&) { return 0.0; });
        auto failing = MockLlmClient("bloomz", [](const std::string& p) { return p; });
        failing.fail_every(1);
        AttackConfig cfg;
        REQUIRE_THROWS_AS(paraphrase_attack(cfg, hate_sample("p4", "they are inferior"), lenient,
                                            failing, res),
                          AttackAborted);
    }
}

// ------------------------------------------------------------------ quality

TEST_CASE("quality metrics: identical texts score wmr 0 and meteor ~1") {
    const auto q =
        quality_metrics("the committee approved the proposal after a long debate today",
                        "the committee approved the proposal after a long debate today");
    REQUIRE(q.wmr == 0.0);
    REQUIRE_THAT(q.meteor, Catch::Matchers::WithinAbs(0.9995, 1e-9)); // frozen oracle value
    REQUIRE_FALSE(q.use_sim.has_value());
    REQUIRE_FALSE(q.fluency.has_value());
}

TEST_CASE("two modified tokens of ten give wmr 0.2") {
    const std::string original = "one two three four five six seven eight nine ten";
    const std::string modified = "one two tree four five six seven ate nine ten";
    const auto q = quality_metrics(original, modified);
    REQUIRE_THAT(q.wmr, Catch::Matchers::WithinAbs(0.2, 1e-12));
    REQUIRE_THAT(q.wmr, Catch::Matchers::WithinAbs(oracle::wmr_oracle(original, modified), 1e-12));
}

TEST_CASE("meteor matches the reference scorer on frozen fixtures") {
    // reference values computed by an independent implementation before the build
    SynonymResource syn;
    syn.add_synonyms("weak", "adj", {"feeble"});
    syn.add_synonyms("quick", "adj", {"fast"});

    REQUIRE_THAT(meteor_score("the committee approved the proposal after a long debate",
                              "the panel approved the proposal following a long debate", &syn),
                 Catch::Matchers::WithinAbs(0.747165532880, 0.01));
    REQUIRE_THAT(meteor_score("these people are weak and useless members of society",
                              "these people are feeble and useless members of society", &syn),
                 Catch::Matchers::WithinAbs(0.999314128944, 0.01));
    REQUIRE_THAT(meteor_score("a quick response prevented further damage to the building",
                              "a fast response prevented damage to the building", &syn),
                 Catch::Matchers::WithinAbs(0.891853932584, 0.01));
    REQUIRE_THAT(meteor_score("running dogs chase cats through gardens",
                              "running dog chases cat through gardens", &syn),
                 Catch::Matchers::WithinAbs(0.997685185185, 0.01));
    REQUIRE_THAT(meteor_score("alpha beta gamma delta", "delta gamma beta alpha", &syn),
                 Catch::Matchers::WithinAbs(0.5, 0.01));
    REQUIRE(meteor_score("one two three", "four five six", &syn) == 0.0);
}

TEST_CASE("porter stemmer matches the reference fixtures") {
    const std::pair<const char*, const char*> fixtures[] = {
        {"running", "run"},       {"cats", "cat"},           {"ponies", "poni"},
        {"caresses", "caress"},   {"feed", "feed"},          {"agreed", "agre"},
        {"plastered", "plaster"}, {"motoring", "motor"},     {"sing", "sing"},
        {"troubled", "troubl"},   {"sized", "size"},         {"hopping", "hop"},
        {"falling", "fall"},      {"hissing", "hiss"},       {"fizzed", "fizz"},
        {"filing", "file"},       {"happy", "happi"},        {"sky", "sky"},
        {"relational", "relat"},  {"conditional", "condit"}, {"rational", "ration"},
        {"digitizer", "digit"},   {"operator", "oper"},      {"feudalism", "feudal"},
        {"formaliti", "formal"},  {"triplicate", "triplic"}, {"formative", "form"},
        {"formalize", "formal"},  {"electrical", "electr"},  {"hopeful", "hope"},
        {"goodness", "good"},     {"revival", "reviv"},      {"allowance", "allow"},
        {"inference", "infer"},   {"adjustable", "adjust"},  {"replacement", "replac"},
        {"adoption", "adopt"},    {"communism", "commun"},   {"activate", "activ"},
        {"effective", "effect"},  {"rate", "rate"},          {"cease", "ceas"},
        {"generated", "gener"},   {"trustworthy", "trustworthi"},
    };
    for (const auto& [word, expected] : fixtures) {
        INFO(word);
        REQUIRE(porter_stem(word) == expected);
    }
}

TEST_CASE("hashed n-gram encoder gives high similarity to near-identical texts") {
    HashedNgramEncoder encoder;
    const auto a = encoder.encode("these people are inferior and unkind");
    const auto b = encoder.encode("these people are lesser and unkind");
    const auto c = encoder.encode("completely unrelated gibberish zebra quantum");
    REQUIRE(cosine_similarity(a, a) == Catch::Approx(1.0));
    REQUIRE(cosine_similarity(a, b) > cosine_similarity(a, c));
}

TEST_CASE("tokenizer round-trips and rebuilds preserve surrounding text") {
    const std::string text = "Hello, world! This is  spaced_text; truly.";
    const TokenizedText t = tokenize(text);
    REQUIRE(t.detokenize() == text);

    Rng rng(55);
    for (int round = 0; round < 40; ++round) {
        std::string s;
        const std::size_t len = rng.uniform_index(80);
        for (std::size_t i = 0; i < len; ++i)
            s.push_back(static_cast<char>(32 + rng.uniform_index(95)));
        REQUIRE(tokenize(s).detokenize() == s);
    }
}
