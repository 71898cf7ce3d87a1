// Copyright 2026 the hashscreen authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hashscreen/trainer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "hashscreen/error.hpp"
#include "hashscreen/rng.hpp"

namespace hashscreen {

namespace {

constexpr std::uint64_t kShuffleSalt = 2;
constexpr std::uint64_t kValidationSalt = 3;

// Visits (slot, parameter array, gradient array) in a fixed order.
template <class Fn>
void for_each_array(DualEncoder& model, const DualGradients& grads, Fn&& fn) {
    std::size_t slot = 0;
    auto visit = [&](EncoderParams& params, const EncoderGradients& g) {
        for (std::size_t l = 0; l < params.layers.size(); ++l) {
            fn(slot++, params.layers[l].weight, g.layers[l].weight);
            fn(slot++, params.layers[l].bias, g.layers[l].bias);
        }
    };
    visit(model.protein, grads.protein);
    visit(model.molecule, grads.molecule);
}

void add_scaled(LossReport& acc, const LossReport& r) {
    acc.contrastive += r.contrastive;
    acc.hash += r.hash;
    acc.total += r.total;
    acc.protein_side += r.protein_side;
    acc.molecule_side += r.molecule_side;
}

LossReport divided(LossReport r, std::size_t n) {
    if (n == 0) {
        return r;
    }
    const double s = 1.0 / static_cast<double>(n);
    r.contrastive *= s;
    r.hash *= s;
    r.total *= s;
    r.protein_side *= s;
    r.molecule_side *= s;
    return r;
}

PairBatch gather(const PairDataset& data, std::span<const std::size_t> rows) {
    PairBatch b{Matrix(rows.size(), data.proteins.cols), Matrix(rows.size(), data.molecules.cols)};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto p = data.proteins.row(rows[i]);
        auto m = data.molecules.row(rows[i]);
        std::copy(p.begin(), p.end(), b.proteins.row(i).begin());
        std::copy(m.begin(), m.end(), b.molecules.row(i).begin());
    }
    return b;
}

std::string describe(const LossReport& r) {
    return "contrastive=" + std::to_string(r.contrastive) + " hash=" + std::to_string(r.hash) +
           " total=" + std::to_string(r.total);
}

}  // namespace

void TrainingConfig::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        fail(ErrorType::kInvalidInput, "tau must be positive");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        fail(ErrorType::kInvalidInput, "lambda must be non-negative");
    }
    if (batch_size == 0 || code_bits == 0 || epochs == 0 || accumulation_steps == 0) {
        fail(ErrorType::kInvalidInput,
             "batch_size, code_length, epochs and accumulation_steps must be positive");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        fail(ErrorType::kInvalidInput, "learning rate must be non-negative");
    }
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) ||
        !(adam_epsilon > 0.0)) {
        fail(ErrorType::kInvalidInput, "Adam needs beta1, beta2 in [0, 1) and epsilon > 0");
    }
    if (!(bedroc_alpha > 0.0)) {
        fail(ErrorType::kInvalidInput, "BEDROC alpha must be positive");
    }
}

DualGradients DualGradients::zeros_like(const DualEncoder& model) {
    return DualGradients{EncoderGradients::zeros_like(model.protein),
                         EncoderGradients::zeros_like(model.molecule)};
}

void DualGradients::set_zero() {
    protein.set_zero();
    molecule.set_zero();
}

AdamOptimizer::AdamOptimizer(const DualEncoder& model, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
    for (const EncoderParams* side : {&model.protein, &model.molecule}) {
        for (const auto& layer : side->layers) {
            m_.emplace_back(layer.weight.size(), 0.0);
            m_.emplace_back(layer.bias.size(), 0.0);
        }
    }
    v_ = m_;
}

void AdamOptimizer::step(DualEncoder& model, const DualGradients& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for_each_array(model, grads, [&](std::size_t slot, std::vector<double>& p, const std::vector<double>& g) {
        auto& m = m_.at(slot);
        auto& v = v_.at(slot);
        if (m.size() != p.size() || g.size() != p.size()) {
            fail(ErrorType::kShapeMismatch, "optimizer state does not match the model");
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
            p[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
        }
    });
}

LossReport accumulate_gradients(const DualEncoder& model, const PairBatch& batch,
                                const TrainingConfig& config, DualGradients& grads) {
    if (batch.proteins.rows != batch.molecules.rows || batch.proteins.rows == 0) {
        fail(ErrorType::kShapeMismatch, "batch sides must hold the same positive number of rows");
    }
    const Matrix yp = encode_batch(model.protein, batch.proteins, config.threads);
    const Matrix ym = encode_batch(model.molecule, batch.molecules, config.threads);
    const auto bp = update_codes(yp);
    const auto bm = update_codes(ym);

    Matrix gp(yp.rows, yp.cols);
    Matrix gm(ym.rows, ym.cols);
    LossReport report = contrastive_loss_grad(yp, ym, config.tau, gp, gm);
    if (config.lambda != 0.0) {
        report.hash = hash_loss_grad(yp, ym, bp, bm, config.lambda, gp, gm);
    } else {
        report.hash = hash_loss(yp, ym, bp, bm);
    }
    report.total = report.contrastive + config.lambda * report.hash;
    if (!std::isfinite(report.total)) {
        fail(ErrorType::kTrainingDiverged, "non-finite training loss: " + describe(report));
    }

    for (std::size_t k = 0; k < yp.rows; ++k) {
        backward_accumulate(model.protein, batch.proteins.row(k), gp.row(k), grads.protein);
        backward_accumulate(model.molecule, batch.molecules.row(k), gm.row(k), grads.molecule);
    }
    return report;
}

LossReport train_step(DualEncoder& model, AdamOptimizer& optimizer, const PairBatch& batch,
                      const TrainingConfig& config) {
    auto grads = DualGradients::zeros_like(model);
    const auto report = accumulate_gradients(model, batch, config, grads);
    optimizer.step(model, grads);
    return report;
}

LossReport evaluate_loss(const DualEncoder& model, const PairDataset& data,
                         const TrainingConfig& config) {
    if (data.size() == 0) {
        fail(ErrorType::kInvalidInput, "empty evaluation set");
    }
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(config.seed, kValidationSalt));
    rng.shuffle(std::span<std::size_t>(order));
    const std::size_t bs = std::min(config.batch_size, data.size());
    const std::size_t batches = data.size() / bs;
    LossReport sum;
    for (std::size_t b = 0; b < batches; ++b) {
        const auto batch = gather(data, std::span(order).subspan(b * bs, bs));
        const Matrix yp = encode_batch(model.protein, batch.proteins, config.threads);
        const Matrix ym = encode_batch(model.molecule, batch.molecules, config.threads);
        add_scaled(sum, total_loss(yp, ym, update_codes(yp), update_codes(ym), config.lambda, config.tau));
    }
    return divided(sum, batches);
}

MetricReport evaluate_retrieval(const DualEncoder& model, const PairDataset& data, double alpha) {
    const auto queries = update_codes(encode_batch(model.protein, data.proteins));
    const auto targets = update_codes(encode_batch(model.molecule, data.molecules));
    std::vector<QueryMetrics> rows;
    std::vector<std::uint8_t> active(data.size());
    for (std::size_t q = 0; q < data.size(); ++q) {
        std::size_t n_active = 0;
        for (std::size_t j = 0; j < data.size(); ++j) {
            active[j] = data.has_labels() ? data.labels[j] == data.labels[q] : j == q;
            n_active += active[j];
        }
        if (n_active == 0 || n_active == data.size()) {
            continue;
        }
        rows.push_back({std::to_string(q), evaluate_screen(queries[q], targets, active,
                                                           ScreenMode::kHamming, alpha)});
    }
    if (rows.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return MetricReport{nan, nan, nan, nan, nan};
    }
    return mean_report(rows);
}

TrainingResult train(const PairDataset& train_set, const PairDataset* validation,
                     const TrainingConfig& config) {
    config.validate();
    if (train_set.size() == 0) {
        fail(ErrorType::kInvalidInput, "training set is empty");
    }
    if (train_set.size() < config.batch_size) {
        fail(ErrorType::kInvalidInput, "training set has " + std::to_string(train_set.size()) +
                                           " pairs, fewer than one batch of " +
                                           std::to_string(config.batch_size));
    }
    if (validation != nullptr && validation->size() == 0) {
        validation = nullptr;
    }

    EncoderConfig protein_cfg{train_set.proteins.cols, config.hidden_dim, config.code_bits,
                              Activation::kTanh};
    EncoderConfig molecule_cfg{train_set.molecules.cols, config.hidden_dim, config.code_bits,
                               Activation::kTanh};
    TrainingResult result;
    DualEncoder model = init_dual(protein_cfg, molecule_cfg, config.seed);
    AdamOptimizer optimizer(model, config.learning_rate, config.adam_beta1, config.adam_beta2,
                            config.adam_epsilon);
    auto grads = DualGradients::zeros_like(model);
    Rng shuffle_rng(derive_seed(config.seed, kShuffleSalt));

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t steps_per_epoch = train_set.size() / config.batch_size;
    double best_bedroc = -std::numeric_limits<double>::infinity();
    result.best = model;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        shuffle_rng.shuffle(std::span<std::size_t>(order));
        EpochRecord record;
        record.epoch = epoch;
        LossReport sum;
        std::size_t pending = 0;
        for (std::size_t s = 0; s < steps_per_epoch; ++s) {
            const auto batch =
                gather(train_set, std::span(order).subspan(s * config.batch_size, config.batch_size));
            LossReport r;
            try {
                r = accumulate_gradients(model, batch, config, grads);
            } catch (const Error& e) {
                if (e.type() == ErrorType::kTrainingDiverged || e.type() == ErrorType::kDegenerateInput) {
                    fail(ErrorType::kTrainingDiverged, "training diverged at epoch " +
                                                           std::to_string(epoch) + " step " +
                                                           std::to_string(s + 1) + ": " + e.what());
                }
                throw;
            }
            add_scaled(sum, r);
            if (++pending == config.accumulation_steps) {
                optimizer.step(model, grads);
                grads.set_zero();
                pending = 0;
            }
        }
        if (pending > 0) {
            optimizer.step(model, grads);
            grads.set_zero();
        }
        record.steps = steps_per_epoch;
        result.total_steps += steps_per_epoch;
        record.train = divided(sum, steps_per_epoch);

        if (validation != nullptr) {
            record.validation = evaluate_loss(model, *validation, config);
            record.val_bedroc = evaluate_retrieval(model, *validation, config.bedroc_alpha).bedroc;
            if (record.val_bedroc > best_bedroc) {
                best_bedroc = record.val_bedroc;
                result.best = model;
                result.best_epoch = epoch;
            }
        }
        result.curve.push_back(record);
    }
    result.final_model = model;
    if (validation == nullptr || result.best_epoch == 0) {
        result.best = model;
        result.best_epoch = config.epochs;
    }
    return result;
}

void write_training_csv(const std::filesystem::path& path, std::span<const EpochRecord> curve) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        fail(ErrorType::kIo, "cannot open for writing: " + path.string());
    }
    out.precision(17);
    out << "epoch,contrastive,hash,total,val_bedroc,val_contrastive,val_hash,val_total\n";
    for (const auto& r : curve) {
        out << r.epoch << ',' << r.train.contrastive << ',' << r.train.hash << ',' << r.train.total
            << ',' << r.val_bedroc << ',' << r.validation.contrastive << ',' << r.validation.hash
            << ',' << r.validation.total << '\n';
    }
    if (!out) {
        fail(ErrorType::kIo, "failed writing " + path.string());
    }
}

}  // namespace hashscreen
