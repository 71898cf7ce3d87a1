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
#include <span>
#include <vector>

#include "hashscreen/codes.hpp"
#include "hashscreen/matrix.hpp"

namespace hashscreen {

/// Loss components for one batch. `protein_side` and `molecule_side` are the
/// per-side sums over k of the InfoNCE terms; contrastive is their mean.
struct LossReport {
    double contrastive = 0.0;
    double hash = 0.0;
    double total = 0.0;
    double protein_side = 0.0;
    double molecule_side = 0.0;
};

/// Bidirectional InfoNCE over the n x n cosine similarity matrix scaled by
/// 1/tau; row k of both matrices is the positive pair. Only the contrastive
/// and side fields of the report are filled.
LossReport contrastive_loss(const Matrix& proteins, const Matrix& molecules, double tau);

/// As contrastive_loss, also adding d(loss)/d(embedding) into the gradients.
LossReport contrastive_loss_grad(const Matrix& proteins, const Matrix& molecules, double tau,
                                 Matrix& protein_grad, Matrix& molecule_grad);

/// Mean squared distance between embeddings and their +-1 codes, normalised by n*d
/// and summed over both modalities.
double hash_loss(const Matrix& proteins, const Matrix& molecules,
                 std::span<const BinaryCode> protein_codes,
                 std::span<const BinaryCode> molecule_codes);

/// Adds scale * d(hash_loss)/d(embedding) with the codes held constant.
double hash_loss_grad(const Matrix& proteins, const Matrix& molecules,
                      std::span<const BinaryCode> protein_codes,
                      std::span<const BinaryCode> molecule_codes, double scale,
                      Matrix& protein_grad, Matrix& molecule_grad);

/// contrastive + lambda * hash.
LossReport total_loss(const Matrix& proteins, const Matrix& molecules,
                      std::span<const BinaryCode> protein_codes,
                      std::span<const BinaryCode> molecule_codes, double lambda, double tau);

/// Closed-form code update: the sign of every current embedding row.
std::vector<BinaryCode> update_codes(const Matrix& embeddings);

}  // namespace hashscreen
