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
#include <span>
#include <vector>

#include "hashscreen/codes.hpp"
#include "hashscreen/matrix.hpp"

namespace hashscreen {

using FeatureVector = std::vector<double>;

enum class Activation : std::uint32_t { kTanh = 0, kLinear = 1 };

enum class Modality { kProtein, kMolecule };

struct EncoderConfig {
    std::size_t input_dim = 0;
    /// 0 means a single affine layer straight to the code length.
    std::size_t hidden_dim = 64;
    std::size_t code_bits = 128;
    Activation hidden_activation = Activation::kTanh;
};

/// y = W x + b with W stored row-major as out_dim x in_dim.
struct AffineLayer {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::vector<double> weight;
    std::vector<double> bias;

    AffineLayer() = default;
    AffineLayer(std::size_t in, std::size_t out)
        : in_dim(in), out_dim(out), weight(in * out, 0.0), bias(out, 0.0) {}

    friend bool operator==(const AffineLayer&, const AffineLayer&) = default;
};

/// One modality's encoder: affine layers with the hidden activation between
/// them and a linear output head.
struct EncoderParams {
    std::vector<AffineLayer> layers;
    Activation hidden_activation = Activation::kTanh;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out_dim; }
    std::size_t parameter_count() const;

    /// Throws if the layer shapes do not chain or a parameter is non-finite.
    void validate() const;

    friend bool operator==(const EncoderParams&, const EncoderParams&) = default;
};

/// Gradients with the same layer shapes as the parameters, plus the input gradient.
struct EncoderGradients {
    std::vector<AffineLayer> layers;
    std::vector<double> input;

    static EncoderGradients zeros_like(const EncoderParams& params);
    void set_zero();
    void add(const EncoderGradients& other);
};

/// Separate parameter sets for the protein and molecule sides.
struct DualEncoder {
    EncoderParams protein;
    EncoderParams molecule;

    EncoderParams& side(Modality m) { return m == Modality::kProtein ? protein : molecule; }
    const EncoderParams& side(Modality m) const {
        return m == Modality::kProtein ? protein : molecule;
    }

    friend bool operator==(const DualEncoder&, const DualEncoder&) = default;
};

/// Xavier-uniform weights in [-s, s], s = sqrt(6 / (fan_in + fan_out)); zero biases.
EncoderParams init_params(const EncoderConfig& config, std::uint64_t seed);

/// Both modalities, each from its own stream derived from `seed`.
DualEncoder init_dual(const EncoderConfig& protein, const EncoderConfig& molecule,
                      std::uint64_t seed);

Embedding encode(const EncoderParams& params, std::span<const double> x);

/// Row-wise encode; rows may be processed on several threads but the result
/// is identical to the sequential path.
Matrix encode_batch(const EncoderParams& params, const Matrix& xs, std::size_t threads = 1);

/// Same, for a list of feature vectors. A wrong-length item fails the whole
/// batch and the message names its index.
Matrix encode_batch(const EncoderParams& params, std::span<const FeatureVector> xs,
                    std::size_t threads = 1);

/// Gradient of dot(encode(x), upstream) with respect to every parameter and to x.
EncoderGradients backward(const EncoderParams& params, std::span<const double> x,
                          std::span<const double> upstream);

/// Accumulating form of backward; `grads` must come from zeros_like(params).
void backward_accumulate(const EncoderParams& params, std::span<const double> x,
                         std::span<const double> upstream, EncoderGradients& grads);

void save_checkpoint(const std::filesystem::path& path, const DualEncoder& model);
DualEncoder load_checkpoint(const std::filesystem::path& path);

}  // namespace hashscreen
