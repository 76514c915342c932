#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "hatebench/attack.hpp"
#include "hatebench/dataset.hpp"
#include "hatebench/detector.hpp"
#include "hatebench/error.hpp"
#include "hatebench/hash.hpp"
#include "hatebench/rng.hpp"
#include "hatebench/text.hpp"
#include "hatebench/types.hpp"

namespace hatebench {

// ---------------------------------------------------------------- stealing dataset

// D_S: auxiliary texts paired with the target's pseudo-labels, built by
// exactly one target query per text (failed queries are excluded).
struct StealingDataset {
    std::vector<std::string> texts;
    std::vector<double> pseudo_labels; // {0,1}, or raw scores in soft mode
    std::vector<std::string> source_ids;
    std::string target_id;
    bool soft_labels = false;
    std::size_t failed_queries = 0;
    bool degraded = false; // more than 10% of queries failed

    std::string fingerprint() const {
        std::string blob = target_id;
        for (std::size_t i = 0; i < texts.size(); ++i)
            blob += "\x1e" + texts[i] + "\x1f" + std::to_string(pseudo_labels[i]);
        return sha256_hex(blob);
    }
};

// Harvesting fans out through the thread-safe gateway; results keep the
// auxiliary order regardless of worker interleaving.
inline StealingDataset harvest_pseudo_labels(DetectorGateway& gateway,
                                             const std::string& target_id,
                                             const std::vector<Sample>& aux,
                                             bool soft_labels = false, int workers = 1) {
    if (aux.empty()) throw InvalidInput("auxiliary dataset is empty");
    StealingDataset ds;
    ds.target_id = target_id;
    ds.soft_labels = soft_labels;
    const double threshold = gateway.threshold(target_id);

    std::vector<std::optional<double>> slots(aux.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= aux.size()) return;
            try {
                const DetectorVerdict v = gateway.classify(target_id, aux[i].text);
                slots[i] = soft_labels ? v.score : (v.score >= threshold ? 1.0 : 0.0);
            } catch (const std::exception&) {
                failures.fetch_add(1);
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < aux.size(); ++i) {
        if (!slots[i]) continue;
        ds.texts.push_back(aux[i].text);
        ds.source_ids.push_back(aux[i].id);
        ds.pseudo_labels.push_back(*slots[i]);
    }
    ds.failed_queries = failures.load();
    ds.degraded = ds.failed_queries * 10 > aux.size();
    return ds;
}

// ---------------------------------------------------------------- train config

struct SurrogateTrainConfig {
    std::string architecture_id = "bag-mlp";
    double learning_rate = 1e-5;
    int batch_size = 24;
    int epochs = 10;
    std::string loss = "mse";
    std::string optimizer = "adam";
    double train_fraction = 0.8;
    std::uint64_t seed = kDefaultSeed;
    int embedding_dim = 16;
    int hidden_dim = 32;
    std::optional<std::string> target_architecture_id; // surrogate must differ from the target

    json to_json() const {
        json j{{"architecture_id", architecture_id}, {"learning_rate", learning_rate},
               {"batch_size", batch_size},           {"epochs", epochs},
               {"loss", loss},                       {"optimizer", optimizer},
               {"train_fraction", train_fraction},   {"seed", seed},
               {"embedding_dim", embedding_dim},     {"hidden_dim", hidden_dim}};
        if (target_architecture_id) j["target_architecture_id"] = *target_architecture_id;
        return j;
    }

    static SurrogateTrainConfig from_json(const json& j) {
        SurrogateTrainConfig c;
        c.architecture_id = j.value("architecture_id", c.architecture_id);
        c.learning_rate = j.value("learning_rate", c.learning_rate);
        c.batch_size = j.value("batch_size", c.batch_size);
        c.epochs = j.value("epochs", c.epochs);
        c.loss = j.value("loss", c.loss);
        c.optimizer = j.value("optimizer", c.optimizer);
        c.train_fraction = j.value("train_fraction", c.train_fraction);
        c.seed = j.value("seed", c.seed);
        c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
        c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
        if (j.contains("target_architecture_id"))
            c.target_architecture_id = j.at("target_architecture_id").get<std::string>();
        return c;
    }
};

// ---------------------------------------------------------------- minimal backbone

// Bag-of-embeddings classifier with a per-token hidden layer:
//   u_i = softplus(W1 e_i + b1),  p = mean_i u_i,  score = sigmoid(w2.p + b2)
// Trained with per-batch mean squared error against pseudo-labels and
// Adam updates. The per-token nonlinearity is what makes the
// input-embedding gradients carry token-level signal.
class MinimalTextClassifier {
public:
    MinimalTextClassifier() = default;

    MinimalTextClassifier(const std::vector<std::string>& corpus, int embedding_dim,
                          int hidden_dim, std::uint64_t seed)
        : d_(embedding_dim), h_(hidden_dim) {
        vocab_["<unk>"] = 0;
        for (const auto& text : corpus) {
            for (const auto& tok : word_tokens_lower(text)) {
                if (!vocab_.count(tok)) {
                    const std::size_t id = vocab_.size();
                    vocab_[tok] = id;
                }
            }
        }
        Rng rng = Rng(seed).derive("surrogate-init");
        const double e_scale = 0.1;
        const double w1_scale = 1.0 / std::sqrt(static_cast<double>(d_));
        const double w2_scale = 1.0 / std::sqrt(static_cast<double>(h_));
        embeddings_.assign(vocab_.size() * static_cast<std::size_t>(d_), 0.0);
        for (auto& v : embeddings_) v = rng.normal(0.0, e_scale);
        w1_.assign(static_cast<std::size_t>(h_) * d_, 0.0);
        for (auto& v : w1_) v = rng.normal(0.0, w1_scale);
        b1_.assign(static_cast<std::size_t>(h_), 0.0);
        w2_.assign(static_cast<std::size_t>(h_), 0.0);
        for (auto& v : w2_) v = rng.normal(0.0, w2_scale);
        b2_ = 0.0;
    }

    bool has_gradients() const { return true; }
    std::size_t vocab_size() const { return vocab_.size(); }

    double score(const std::string& text) const {
        const auto ids = token_ids(text);
        return forward(ids).score;
    }

    // L2 norms of d(score - target)^2 / d e_i, one per token occurrence.
    std::vector<double> embedding_gradient_norms(const std::string& text, double target) const {
        const auto ids = token_ids(text);
        const Forward f = forward(ids);
        const double g0 = 2.0 * (f.score - target) * f.score * (1.0 - f.score);
        const double inv_n = 1.0 / static_cast<double>(ids.size());

        std::vector<double> norms;
        norms.reserve(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            // dL/dz_i = g0 * (w2 / n) .* sigmoid(z_i); dL/de_i = W1^T dL/dz_i
            std::vector<double> dz(static_cast<std::size_t>(h_));
            for (int j = 0; j < h_; ++j)
                dz[static_cast<std::size_t>(j)] =
                    g0 * inv_n * w2_[static_cast<std::size_t>(j)] * sigmoid(f.z[i][static_cast<std::size_t>(j)]);
            double norm_sq = 0.0;
            for (int k = 0; k < d_; ++k) {
                double g = 0.0;
                for (int j = 0; j < h_; ++j)
                    g += w1_[static_cast<std::size_t>(j) * d_ + k] * dz[static_cast<std::size_t>(j)];
                norm_sq += g * g;
            }
            norms.push_back(std::sqrt(norm_sq));
        }
        return norms;
    }

    // Numerical double-check of the same quantity via central differences.
    // The perturbation applies to the embedding as used at one position,
    // so repeated tokens get per-occurrence derivatives like the
    // analytic path.
    std::vector<double> finite_difference_gradient_norms(const std::string& text, double target,
                                                         double step = 1e-4) const {
        const auto ids = token_ids(text);
        std::vector<double> norms;
        norms.reserve(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            double norm_sq = 0.0;
            for (int k = 0; k < d_; ++k) {
                const double up = perturbed_loss(ids, i, k, step, target);
                const double down = perturbed_loss(ids, i, k, -step, target);
                const double g = (up - down) / (2.0 * step);
                norm_sq += g * g;
            }
            norms.push_back(std::sqrt(norm_sq));
        }
        return norms;
    }

    // Mean squared error over one batch: (1/n) sum (score(x_k) - y_k)^2.
    double batch_loss(const std::vector<std::string>& texts,
                      const std::vector<double>& targets) const {
        if (texts.size() != targets.size() || texts.empty())
            throw InvalidInput("batch_loss requires equally sized non-empty batches");
        double sum = 0.0;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            const double diff = score(texts[i]) - targets[i];
            sum += diff * diff;
        }
        return sum / static_cast<double>(texts.size());
    }

    // One Adam step on a batch; returns the pre-update batch loss.
    double train_batch(const std::vector<std::string>& texts, const std::vector<double>& targets,
                       double lr) {
        Grad grad = zero_grad();
        double loss = 0.0;
        const double inv_b = 1.0 / static_cast<double>(texts.size());
        for (std::size_t s = 0; s < texts.size(); ++s) {
            const auto ids = token_ids(texts[s]);
            const Forward f = forward(ids);
            const double diff = f.score - targets[s];
            loss += diff * diff;
            const double g0 = inv_b * 2.0 * diff * f.score * (1.0 - f.score);
            const double inv_n = 1.0 / static_cast<double>(ids.size());

            for (int j = 0; j < h_; ++j) {
                grad.w2[static_cast<std::size_t>(j)] += g0 * f.pooled[static_cast<std::size_t>(j)];
            }
            grad.b2 += g0;

            for (std::size_t i = 0; i < ids.size(); ++i) {
                for (int j = 0; j < h_; ++j) {
                    const double dz = g0 * inv_n * w2_[static_cast<std::size_t>(j)] *
                                      sigmoid(f.z[i][static_cast<std::size_t>(j)]);
                    if (dz == 0.0) continue;
                    grad.b1[static_cast<std::size_t>(j)] += dz;
                    const double* e = &embeddings_[ids[i] * static_cast<std::size_t>(d_)];
                    for (int k = 0; k < d_; ++k)
                        grad.w1[static_cast<std::size_t>(j) * d_ + k] += dz * e[k];
                    for (int k = 0; k < d_; ++k)
                        grad.emb[ids[i] * static_cast<std::size_t>(d_) + k] +=
                            dz * w1_[static_cast<std::size_t>(j) * d_ + k];
                }
            }
        }
        adam_step(grad, lr);
        return loss * inv_b;
    }

    json to_json() const {
        json vocab = json::object();
        for (const auto& [tok, id] : vocab_) vocab[tok] = id;
        return json{{"architecture", "bag-mlp"},
                    {"embedding_dim", d_},
                    {"hidden_dim", h_},
                    {"vocab", vocab},
                    {"embeddings", embeddings_},
                    {"w1", w1_},
                    {"b1", b1_},
                    {"w2", w2_},
                    {"b2", b2_}};
    }

    static MinimalTextClassifier from_json(const json& j) {
        MinimalTextClassifier m;
        m.d_ = j.at("embedding_dim").get<int>();
        m.h_ = j.at("hidden_dim").get<int>();
        for (const auto& [tok, id] : j.at("vocab").items())
            m.vocab_[tok] = id.get<std::size_t>();
        m.embeddings_ = j.at("embeddings").get<std::vector<double>>();
        m.w1_ = j.at("w1").get<std::vector<double>>();
        m.b1_ = j.at("b1").get<std::vector<double>>();
        m.w2_ = j.at("w2").get<std::vector<double>>();
        m.b2_ = j.at("b2").get<double>();
        return m;
    }

private:
    struct Forward {
        double score = 0.0;
        std::vector<double> pooled;           // h
        std::vector<std::vector<double>> z;   // per token, h
    };

    struct Grad {
        std::vector<double> emb, w1, b1, w2;
        double b2 = 0.0;
    };

    static double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
    static double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

    std::vector<std::size_t> token_ids(const std::string& text) const {
        std::vector<std::size_t> ids;
        for (const auto& tok : word_tokens_lower(text)) {
            const auto it = vocab_.find(tok);
            ids.push_back(it == vocab_.end() ? 0 : it->second);
        }
        if (ids.empty()) ids.push_back(0);
        return ids;
    }

    Forward forward(const std::vector<std::size_t>& ids) const {
        Forward f;
        f.pooled.assign(static_cast<std::size_t>(h_), 0.0);
        f.z.resize(ids.size());
        const double inv_n = 1.0 / static_cast<double>(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            f.z[i].assign(static_cast<std::size_t>(h_), 0.0);
            const double* e = &embeddings_[ids[i] * static_cast<std::size_t>(d_)];
            for (int j = 0; j < h_; ++j) {
                double z = b1_[static_cast<std::size_t>(j)];
                const double* w = &w1_[static_cast<std::size_t>(j) * d_];
                for (int k = 0; k < d_; ++k) z += w[k] * e[k];
                f.z[i][static_cast<std::size_t>(j)] = z;
                f.pooled[static_cast<std::size_t>(j)] += softplus(z) * inv_n;
            }
        }
        double logit = b2_;
        for (int j = 0; j < h_; ++j)
            logit += w2_[static_cast<std::size_t>(j)] * f.pooled[static_cast<std::size_t>(j)];
        f.score = sigmoid(logit);
        return f;
    }

    // loss with e[position][dim] shifted by delta
    double perturbed_loss(const std::vector<std::size_t>& ids, std::size_t position, int dim,
                          double delta, double target) const {
        std::vector<double> pooled(static_cast<std::size_t>(h_), 0.0);
        const double inv_n = 1.0 / static_cast<double>(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const double* e = &embeddings_[ids[i] * static_cast<std::size_t>(d_)];
            for (int j = 0; j < h_; ++j) {
                double z = b1_[static_cast<std::size_t>(j)];
                const double* w = &w1_[static_cast<std::size_t>(j) * d_];
                for (int k = 0; k < d_; ++k) z += w[k] * e[k];
                if (i == position) z += w[dim] * delta;
                pooled[static_cast<std::size_t>(j)] += softplus(z) * inv_n;
            }
        }
        double logit = b2_;
        for (int j = 0; j < h_; ++j)
            logit += w2_[static_cast<std::size_t>(j)] * pooled[static_cast<std::size_t>(j)];
        const double diff = sigmoid(logit) - target;
        return diff * diff;
    }

    Grad zero_grad() const {
        Grad g;
        g.emb.assign(embeddings_.size(), 0.0);
        g.w1.assign(w1_.size(), 0.0);
        g.b1.assign(b1_.size(), 0.0);
        g.w2.assign(w2_.size(), 0.0);
        return g;
    }

    void adam_step(const Grad& grad, double lr) {
        if (m_emb_.empty()) {
            m_emb_.assign(embeddings_.size(), 0.0);
            v_emb_.assign(embeddings_.size(), 0.0);
            m_w1_.assign(w1_.size(), 0.0);
            v_w1_.assign(w1_.size(), 0.0);
            m_b1_.assign(b1_.size(), 0.0);
            v_b1_.assign(b1_.size(), 0.0);
            m_w2_.assign(w2_.size(), 0.0);
            v_w2_.assign(w2_.size(), 0.0);
        }
        ++step_;
        const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        const double bc1 = 1.0 - std::pow(beta1, step_);
        const double bc2 = 1.0 - std::pow(beta2, step_);
        auto update = [&](std::vector<double>& param, const std::vector<double>& g,
                          std::vector<double>& m, std::vector<double>& v) {
            for (std::size_t i = 0; i < param.size(); ++i) {
                if (g[i] == 0.0 && m[i] == 0.0 && v[i] == 0.0) continue;
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                param[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
            }
        };
        update(embeddings_, grad.emb, m_emb_, v_emb_);
        update(w1_, grad.w1, m_w1_, v_w1_);
        update(b1_, grad.b1, m_b1_, v_b1_);
        update(w2_, grad.w2, m_w2_, v_w2_);
        m_b2_ = 0.9 * m_b2_ + 0.1 * grad.b2;
        v_b2_ = 0.999 * v_b2_ + 0.001 * grad.b2 * grad.b2;
        b2_ -= lr * (m_b2_ / bc1) / (std::sqrt(v_b2_ / bc2) + eps);
    }

    int d_ = 16;
    int h_ = 32;
    std::unordered_map<std::string, std::size_t> vocab_;
    std::vector<double> embeddings_, w1_, b1_, w2_;
    double b2_ = 0.0;

    // Adam state
    std::vector<double> m_emb_, v_emb_, m_w1_, v_w1_, m_b1_, v_b1_, m_w2_, v_w2_;
    double m_b2_ = 0.0, v_b2_ = 0.0;
    long step_ = 0;
};

// ---------------------------------------------------------------- bundle

struct SurrogateBundle {
    std::shared_ptr<MinimalTextClassifier> model;
    SurrogateTrainConfig config;
    std::string target_id;
    double agreement = 0.0; // label match rate vs pseudo-labels, held-out 20%
    double accuracy = 0.0;  // vs ground truth when available, else NaN
    std::vector<double> epoch_losses;
    std::string dataset_fingerprint;
    double threshold = 0.5;
    bool architecture_matches_target = false;

    double score(const std::string& text) const { return model->score(text); }
    Label label(const std::string& text) const {
        return score(text) >= threshold ? Label::hate : Label::non_hate;
    }

    void save(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        {
            std::ofstream out(dir / "weights.json");
            out << model->to_json().dump();
        }
        {
            std::ofstream out(dir / "train_config.json");
            out << config.to_json().dump(2);
        }
        {
            json metrics{{"target_id", target_id},
                         {"agreement", agreement},
                         {"epoch_losses", epoch_losses},
                         {"dataset_fingerprint", dataset_fingerprint},
                         {"threshold", threshold}};
            // accuracy is NaN when no ground truth was supplied
            if (std::isfinite(accuracy)) metrics["accuracy"] = accuracy;
            std::ofstream out(dir / "metrics.json");
            out << metrics.dump(2);
        }
    }

    static SurrogateBundle load(const std::filesystem::path& dir) {
        SurrogateBundle b;
        {
            std::ifstream in(dir / "weights.json");
            if (!in) throw Error("cannot read " + (dir / "weights.json").string());
            b.model = std::make_shared<MinimalTextClassifier>(
                MinimalTextClassifier::from_json(json::parse(in)));
        }
        {
            std::ifstream in(dir / "train_config.json");
            if (!in) throw Error("cannot read " + (dir / "train_config.json").string());
            b.config = SurrogateTrainConfig::from_json(json::parse(in));
        }
        {
            std::ifstream in(dir / "metrics.json");
            if (!in) throw Error("cannot read " + (dir / "metrics.json").string());
            const json m = json::parse(in);
            b.target_id = m.value("target_id", "");
            b.agreement = m.value("agreement", 0.0);
            b.accuracy = m.contains("accuracy") && m.at("accuracy").is_number()
                             ? m.at("accuracy").get<double>()
                             : std::numeric_limits<double>::quiet_NaN();
            b.epoch_losses = m.value("epoch_losses", std::vector<double>{});
            b.dataset_fingerprint = m.value("dataset_fingerprint", "");
            b.threshold = m.value("threshold", 0.5);
        }
        return b;
    }
};

// Minimizes the mean squared error between surrogate scores and
// pseudo-labels over the 80% split; agreement and accuracy come from the
// held-out 20%.
inline SurrogateBundle train_surrogate(
    const StealingDataset& dataset, const SurrogateTrainConfig& config,
    const std::unordered_map<std::string, Label>* ground_truth = nullptr) {
    if (dataset.texts.size() < 5) throw InvalidInput("stealing dataset too small to split");
    bool has_pos = false, has_neg = false;
    for (double y : dataset.pseudo_labels) (y >= 0.5 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw DegenerateDataset("pseudo-labels contain a single class; surrogate would be constant");

    // seeded 80/20 split
    std::vector<std::size_t> order(dataset.texts.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng = Rng(config.seed).derive("surrogate-split");
    rng.shuffle(order);
    const std::size_t n_train =
        static_cast<std::size_t>(config.train_fraction * static_cast<double>(order.size()));

    std::vector<std::string> train_texts, held_texts;
    std::vector<double> train_y, held_y;
    std::vector<std::string> held_ids;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t k = order[i];
        if (i < n_train) {
            train_texts.push_back(dataset.texts[k]);
            train_y.push_back(dataset.pseudo_labels[k]);
        } else {
            held_texts.push_back(dataset.texts[k]);
            held_y.push_back(dataset.pseudo_labels[k]);
            held_ids.push_back(dataset.source_ids[k]);
        }
    }
    if (train_texts.empty() || held_texts.empty())
        throw InvalidInput("train/held-out split produced an empty side");

    SurrogateBundle bundle;
    bundle.config = config;
    bundle.target_id = dataset.target_id;
    bundle.dataset_fingerprint = dataset.fingerprint();
    bundle.architecture_matches_target =
        config.target_architecture_id && *config.target_architecture_id == config.architecture_id;
    bundle.model = std::make_shared<MinimalTextClassifier>(train_texts, config.embedding_dim,
                                                           config.hidden_dim, config.seed);

    Rng shuffle_rng = Rng(config.seed).derive("surrogate-batches");
    std::vector<std::size_t> idx(train_texts.size());
    std::iota(idx.begin(), idx.end(), 0);
    const std::size_t batch = static_cast<std::size_t>(std::max(1, config.batch_size));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(idx);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < idx.size(); start += batch) {
            const std::size_t end = std::min(start + batch, idx.size());
            std::vector<std::string> bt;
            std::vector<double> by;
            for (std::size_t i = start; i < end; ++i) {
                bt.push_back(train_texts[idx[i]]);
                by.push_back(train_y[idx[i]]);
            }
            epoch_loss += bundle.model->train_batch(bt, by, config.learning_rate);
            ++batches;
        }
        bundle.epoch_losses.push_back(epoch_loss / static_cast<double>(batches));
    }

    std::size_t agree = 0, gt_total = 0, gt_correct = 0;
    for (std::size_t i = 0; i < held_texts.size(); ++i) {
        const bool pred = bundle.model->score(held_texts[i]) >= bundle.threshold;
        if (pred == (held_y[i] >= 0.5)) ++agree;
        if (ground_truth != nullptr) {
            const auto it = ground_truth->find(held_ids[i]);
            if (it != ground_truth->end() &&
                (it->second == Label::hate || it->second == Label::non_hate)) {
                ++gt_total;
                if (pred == (it->second == Label::hate)) ++gt_correct;
            }
        }
    }
    bundle.agreement = static_cast<double>(agree) / static_cast<double>(held_texts.size());
    bundle.accuracy = gt_total > 0
                          ? static_cast<double>(gt_correct) / static_cast<double>(gt_total)
                          : std::numeric_limits<double>::quiet_NaN();
    return bundle;
}

// ---------------------------------------------------------------- white-box ranking

// Importance of token i = L2 norm of the loss gradient w.r.t. its input
// embedding, loss taken against the non-hate target. Costs zero
// surrogate queries.
inline std::vector<std::size_t> white_box_rank(const SurrogateBundle& bundle,
                                               const TokenizedText& tokenized) {
    if (!bundle.model || !bundle.model->has_gradients())
        throw UnsupportedBackbone("surrogate backbone does not expose input gradients");
    const auto norms = bundle.model->embedding_gradient_norms(tokenized.original(), 0.0);
    std::vector<double> importance(tokenized.size(), 0.0);
    for (std::size_t i = 0; i < std::min(importance.size(), norms.size()); ++i)
        importance[i] = norms[i];
    return order_by_importance(importance);
}

// ---------------------------------------------------------------- transfer

enum class TransferMode { black_box, white_box };

struct TransferResult {
    AttackResult surrogate_attack; // the optimization ran wholly on H'
    bool surrogate_success = false;
    bool target_success = false;
    std::uint64_t target_queries = 0; // 0 or 1
    double target_score = 0.0;
    TransferMode mode = TransferMode::black_box;
};

// Precondition (from evaluation-set construction): the target currently
// labels the sample hate. Not re-checked here, because the check itself
// would spend the one allowed target query.
inline TransferResult transfer_attack(const AttackConfig& config, const Sample& sample,
                                      const SurrogateBundle& bundle, DetectorGateway& gateway,
                                      const std::string& target_id, TransferMode mode,
                                      const AttackResources& resources) {
    TransferResult out;
    out.mode = mode;

    ScorerVictim surrogate_victim(
        "surrogate(" + bundle.target_id + ")",
        [&bundle](const std::string& text) { return bundle.score(text); }, bundle.threshold);

    AttackConfig cfg = config;
    if (cfg.attack_id == AttackId::paraphrase)
        throw InvalidInput("transfer campaigns use token-substitution attacks");

    if (mode == TransferMode::white_box) {
        const TokenizedText tokenized = tokenize(sample.text);
        const auto order = white_box_rank(bundle, tokenized);
        out.surrogate_attack = run_attack(cfg, sample, surrogate_victim, resources, &order);
    } else {
        out.surrogate_attack = run_attack(cfg, sample, surrogate_victim, resources);
    }
    out.surrogate_success = out.surrogate_attack.success;

    if (out.surrogate_success) {
        const auto before = gateway.ledger().snapshot(target_id, gateway.campaign());
        const DetectorVerdict v = gateway.classify(target_id, out.surrogate_attack.adversarial_text);
        const auto after = gateway.ledger().snapshot(target_id, gateway.campaign());
        out.target_queries = after.remote_calls - before.remote_calls;
        out.target_score = v.score;
        out.target_success = v.label == Label::non_hate;
    }
    return out;
}

// ---------------------------------------------------------------- ablation

struct AblationRow {
    std::size_t size = 0;
    double agreement = 0.0;
    double accuracy = 0.0;
    double asr_surrogate = 0.0;
    double asr_target = 0.0;
    double mean_use = 0.0;
    double mean_surrogate_queries = 0.0;
};

// For each auxiliary size: seeded subsample, harvest (cache-assisted),
// train, transfer. The full size reproduces the non-ablated pipeline.
inline std::vector<AblationRow> ablate_auxiliary_size(
    const std::vector<std::size_t>& sizes, const std::vector<Sample>& aux,
    DetectorGateway& gateway, const std::string& target_id,
    const SurrogateTrainConfig& train_config, const AttackConfig& attack_config,
    const std::vector<Sample>& eval_samples, const AttackResources& resources,
    TransferMode mode = TransferMode::black_box) {
    std::vector<AblationRow> rows;
    for (const std::size_t size : sizes) {
        if (size > aux.size()) throw InvalidInput("ablation size exceeds auxiliary dataset");
        std::vector<Sample> subset;
        if (size == aux.size()) {
            subset = aux;
        } else {
            std::vector<std::size_t> order(aux.size());
            std::iota(order.begin(), order.end(), 0);
            Rng rng = Rng(train_config.seed).derive("ablate-" + std::to_string(size));
            rng.shuffle(order);
            order.resize(size);
            std::sort(order.begin(), order.end());
            for (std::size_t i : order) subset.push_back(aux[i]);
        }

        const StealingDataset ds = harvest_pseudo_labels(gateway, target_id, subset);
        const SurrogateBundle bundle = train_surrogate(ds, train_config);

        AblationRow row;
        row.size = size;
        row.agreement = bundle.agreement;
        row.accuracy = bundle.accuracy;

        std::size_t s_success = 0, t_success = 0, attempted = 0;
        double use_sum = 0.0, query_sum = 0.0;
        std::size_t use_n = 0;
        for (const auto& sample : eval_samples) {
            TransferResult r;
            try {
                r = transfer_attack(attack_config, sample, bundle, gateway, target_id, mode,
                                    resources);
            } catch (const NotApplicable&) {
                continue;
            }
            ++attempted;
            if (r.surrogate_success) ++s_success;
            if (r.target_success) ++t_success;
            query_sum += static_cast<double>(r.surrogate_attack.queries);
            if (r.surrogate_attack.use_sim) {
                use_sum += *r.surrogate_attack.use_sim;
                ++use_n;
            }
        }
        if (attempted > 0) {
            row.asr_surrogate = static_cast<double>(s_success) / static_cast<double>(attempted);
            row.asr_target = static_cast<double>(t_success) / static_cast<double>(attempted);
            row.mean_surrogate_queries = query_sum / static_cast<double>(attempted);
            row.mean_use = use_n > 0 ? use_sum / static_cast<double>(use_n) : 0.0;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace hatebench
