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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "hashscreen/dataio.hpp"
#include "hashscreen/encoder.hpp"
#include "hashscreen/loss.hpp"
#include "hashscreen/matrix.hpp"
#include "hashscreen/metrics.hpp"

namespace hashscreen {

struct TrainingConfig {
    double lambda = 0.2;
    double tau = 0.07;
    std::size_t batch_size = 48;
    std::size_t code_bits = 128;
    std::size_t hidden_dim = 64;
    std::size_t epochs = 20;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    /// Sub-batches whose gradients are summed before each optimizer update.
    std::size_t accumulation_steps = 1;
    double bedroc_alpha = kDefaultBedrocAlpha;
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    void validate() const;
};

/// n aligned pairs; row k of each side forms the positive pair.
struct PairBatch {
    Matrix proteins;
    Matrix molecules;
};

struct DualGradients {
    EncoderGradients protein;
    EncoderGradients molecule;

    static DualGradients zeros_like(const DualEncoder& model);
    void set_zero();
};

/// Adam over every parameter array of both encoders.
class AdamOptimizer {
 public:
    AdamOptimizer(const DualEncoder& model, double learning_rate, double beta1 = 0.9,
                  double beta2 = 0.999, double epsilon = 1e-8);

    void step(DualEncoder& model, const DualGradients& grads);
    std::size_t steps_taken() const noexcept { return t_; }

 private:
    double lr_;
    double beta1_;
    double beta2_;
    double eps_;
    std::size_t t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

/// Encodes the batch, fixes codes = sign(embeddings), and adds the gradient
/// of the total loss (codes constant) into `grads`. Throws kTrainingDiverged
/// on a non-finite loss.
LossReport accumulate_gradients(const DualEncoder& model, const PairBatch& batch,
                                const TrainingConfig& config, DualGradients& grads);

/// One alternation: code update, then one optimizer step on the encoders.
LossReport train_step(DualEncoder& model, AdamOptimizer& optimizer, const PairBatch& batch,
                      const TrainingConfig& config);

/// Mean loss over fixed batches of a held-out set.
LossReport evaluate_loss(const DualEncoder& model, const PairDataset& data,
                         const TrainingConfig& config);

/// Mean hashed-retrieval metrics: each protein queries all molecules by
/// Hamming distance; molecules sharing its label (or its own partner when
/// unlabeled) are the actives. Queries with an undefined metric are skipped.
MetricReport evaluate_retrieval(const DualEncoder& model, const PairDataset& data,
                                double alpha = kDefaultBedrocAlpha);

struct EpochRecord {
    std::size_t epoch = 0;
    std::size_t steps = 0;
    LossReport train;
    LossReport validation;
    double val_bedroc = std::numeric_limits<double>::quiet_NaN();
};

struct TrainingResult {
    DualEncoder best;
    DualEncoder final_model;
    std::size_t best_epoch = 0;
    std::size_t total_steps = 0;
    std::vector<EpochRecord> curve;
};

/// Shuffled epochs of full batches (the last partial batch is dropped).
/// Returns the parameters of the epoch with the best validation BEDROC, or the
/// final parameters when there is no validation set.
TrainingResult train(const PairDataset& train_set, const PairDataset* validation,
                     const TrainingConfig& config);

/// epoch,contrastive,hash,total,val_bedroc,val_contrastive,val_hash,val_total
void write_training_csv(const std::filesystem::path& path, std::span<const EpochRecord> curve);

}  // namespace hashscreen
