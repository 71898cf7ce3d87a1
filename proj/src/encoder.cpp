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

#include "hashscreen/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "hashscreen/binary_io.hpp"
#include "hashscreen/error.hpp"
#include "hashscreen/parallel.hpp"
#include "hashscreen/rng.hpp"

namespace hashscreen {

namespace {

constexpr char kCheckpointMagic[4] = {'D', 'H', 'C', 'K'};
constexpr std::uint16_t kCheckpointVersion = 1;

double activate(Activation a, double z) { return a == Activation::kTanh ? std::tanh(z) : z; }

// Derivative expressed through the activation output h = act(z).
double activate_grad(Activation a, double h) { return a == Activation::kTanh ? 1.0 - h * h : 1.0; }

void affine(const AffineLayer& layer, std::span<const double> in, std::span<double> out) {
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
        const double* w = layer.weight.data() + o * layer.in_dim;
        double acc = layer.bias[o];
        for (std::size_t i = 0; i < layer.in_dim; ++i) {
            acc += w[i] * in[i];
        }
        out[o] = acc;
    }
}

void check_input(const EncoderParams& params, std::size_t size) {
    if (params.layers.empty()) {
        fail(ErrorType::kInvalidInput, "encoder has no layers");
    }
    if (size != params.input_dim()) {
        fail(ErrorType::kShapeMismatch, "feature vector has " + std::to_string(size) +
                                            " entries, encoder expects " +
                                            std::to_string(params.input_dim()));
    }
}

// activations[0] = x, activations[l+1] = output of layer l (post-activation
// for hidden layers, raw for the head).
std::vector<std::vector<double>> forward(const EncoderParams& params, std::span<const double> x) {
    check_input(params, x.size());
    std::vector<std::vector<double>> acts;
    acts.reserve(params.layers.size() + 1);
    acts.emplace_back(x.begin(), x.end());
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& layer = params.layers[l];
        std::vector<double> out(layer.out_dim);
        affine(layer, acts.back(), out);
        if (l + 1 < params.layers.size()) {
            for (auto& v : out) {
                v = activate(params.hidden_activation, v);
            }
        }
        acts.push_back(std::move(out));
    }
    return acts;
}

}  // namespace

std::size_t EncoderParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) {
        n += l.weight.size() + l.bias.size();
    }
    return n;
}

void EncoderParams::validate() const {
    if (layers.empty()) {
        fail(ErrorType::kInvalidInput, "encoder has no layers");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        if (layer.in_dim == 0 || layer.out_dim == 0 ||
            layer.weight.size() != layer.in_dim * layer.out_dim ||
            layer.bias.size() != layer.out_dim) {
            fail(ErrorType::kShapeMismatch, "layer " + std::to_string(l) + " has inconsistent shape");
        }
        if (l > 0 && layers[l - 1].out_dim != layer.in_dim) {
            fail(ErrorType::kShapeMismatch,
                 "layer " + std::to_string(l) + " input does not match previous output");
        }
        for (double v : layer.weight) {
            if (!std::isfinite(v)) {
                fail(ErrorType::kInvalidInput, "non-finite weight in layer " + std::to_string(l));
            }
        }
        for (double v : layer.bias) {
            if (!std::isfinite(v)) {
                fail(ErrorType::kInvalidInput, "non-finite bias in layer " + std::to_string(l));
            }
        }
    }
}

EncoderGradients EncoderGradients::zeros_like(const EncoderParams& params) {
    EncoderGradients g;
    g.layers.reserve(params.layers.size());
    for (const auto& l : params.layers) {
        g.layers.emplace_back(l.in_dim, l.out_dim);
    }
    g.input.assign(params.input_dim(), 0.0);
    return g;
}

void EncoderGradients::set_zero() {
    for (auto& l : layers) {
        std::fill(l.weight.begin(), l.weight.end(), 0.0);
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
    std::fill(input.begin(), input.end(), 0.0);
}

void EncoderGradients::add(const EncoderGradients& other) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        for (std::size_t i = 0; i < layers[l].weight.size(); ++i) {
            layers[l].weight[i] += other.layers[l].weight[i];
        }
        for (std::size_t i = 0; i < layers[l].bias.size(); ++i) {
            layers[l].bias[i] += other.layers[l].bias[i];
        }
    }
    for (std::size_t i = 0; i < input.size(); ++i) {
        input[i] += other.input[i];
    }
}

EncoderParams init_params(const EncoderConfig& config, std::uint64_t seed) {
    if (config.input_dim == 0 || config.code_bits == 0) {
        fail(ErrorType::kInvalidInput, "encoder dimensions must be positive");
    }
    std::vector<std::size_t> dims{config.input_dim};
    if (config.hidden_dim > 0) {
        dims.push_back(config.hidden_dim);
    }
    dims.push_back(config.code_bits);

    Rng rng(seed);
    EncoderParams params;
    params.hidden_activation = config.hidden_activation;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        AffineLayer layer(dims[l], dims[l + 1]);
        const double s = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
        for (auto& w : layer.weight) {
            w = rng.uniform(-s, s);
        }
        params.layers.push_back(std::move(layer));
    }
    return params;
}

DualEncoder init_dual(const EncoderConfig& protein, const EncoderConfig& molecule,
                      std::uint64_t seed) {
    if (protein.code_bits != molecule.code_bits) {
        fail(ErrorType::kShapeMismatch, "protein and molecule encoders must share the code length");
    }
    return DualEncoder{init_params(protein, derive_seed(seed, 0)),
                       init_params(molecule, derive_seed(seed, 1))};
}

Embedding encode(const EncoderParams& params, std::span<const double> x) {
    return std::move(forward(params, x).back());
}

Matrix encode_batch(const EncoderParams& params, const Matrix& xs, std::size_t threads) {
    check_input(params, xs.cols);
    Matrix out(xs.rows, params.output_dim());
    parallel_ranges(xs.rows, threads, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto y = encode(params, xs.row(i));
            std::copy(y.begin(), y.end(), out.row(i).begin());
        }
    });
    return out;
}

Matrix encode_batch(const EncoderParams& params, std::span<const FeatureVector> xs,
                    std::size_t threads) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i].size() != params.input_dim()) {
            fail(ErrorType::kShapeMismatch, "batch item " + std::to_string(i) + " has " +
                                                std::to_string(xs[i].size()) +
                                                " features, encoder expects " +
                                                std::to_string(params.input_dim()));
        }
    }
    Matrix out(xs.size(), params.output_dim());
    parallel_ranges(xs.size(), threads, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto y = encode(params, xs[i]);
            std::copy(y.begin(), y.end(), out.row(i).begin());
        }
    });
    return out;
}

void backward_accumulate(const EncoderParams& params, std::span<const double> x,
                         std::span<const double> upstream, EncoderGradients& grads) {
    if (upstream.size() != params.output_dim()) {
        fail(ErrorType::kShapeMismatch, "upstream gradient has " + std::to_string(upstream.size()) +
                                            " entries, encoder outputs " +
                                            std::to_string(params.output_dim()));
    }
    const auto acts = forward(params, x);
    std::vector<double> g(upstream.begin(), upstream.end());
    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const auto& layer = params.layers[l];
        auto& gl = grads.layers[l];
        const auto& in = acts[l];
        for (std::size_t o = 0; o < layer.out_dim; ++o) {
            gl.bias[o] += g[o];
            double* gw = gl.weight.data() + o * layer.in_dim;
            for (std::size_t i = 0; i < layer.in_dim; ++i) {
                gw[i] += g[o] * in[i];
            }
        }
        std::vector<double> g_in(layer.in_dim, 0.0);
        for (std::size_t o = 0; o < layer.out_dim; ++o) {
            const double* w = layer.weight.data() + o * layer.in_dim;
            for (std::size_t i = 0; i < layer.in_dim; ++i) {
                g_in[i] += w[i] * g[o];
            }
        }
        if (l > 0) {
            for (std::size_t i = 0; i < layer.in_dim; ++i) {
                g_in[i] *= activate_grad(params.hidden_activation, in[i]);
            }
        }
        g = std::move(g_in);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        grads.input[i] += g[i];
    }
}

EncoderGradients backward(const EncoderParams& params, std::span<const double> x,
                          std::span<const double> upstream) {
    auto grads = EncoderGradients::zeros_like(params);
    backward_accumulate(params, x, upstream, grads);
    return grads;
}

// Checkpoint layout (all little-endian):
//   "DHCK" | u16 version | u16 reserved
//   per modality (protein, then molecule):
//     u32 hidden_activation | u32 layer_count | layer_count x (u32 in_dim, u32 out_dim)
//     per layer: f64 weight[out_dim * in_dim] (row-major) | f64 bias[out_dim]
void save_checkpoint(const std::filesystem::path& path, const DualEncoder& model) {
    model.protein.validate();
    model.molecule.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorType::kIo, "cannot open checkpoint for writing: " + path.string());
    }
    out.write(kCheckpointMagic, 4);
    io::put<std::uint16_t>(out, kCheckpointVersion);
    io::put<std::uint16_t>(out, 0);
    for (const EncoderParams* side : {&model.protein, &model.molecule}) {
        io::put<std::uint32_t>(out, static_cast<std::uint32_t>(side->hidden_activation));
        io::put<std::uint32_t>(out, static_cast<std::uint32_t>(side->layers.size()));
        for (const auto& layer : side->layers) {
            io::put<std::uint32_t>(out, static_cast<std::uint32_t>(layer.in_dim));
            io::put<std::uint32_t>(out, static_cast<std::uint32_t>(layer.out_dim));
        }
        for (const auto& layer : side->layers) {
            for (double w : layer.weight) {
                io::put_f64(out, w);
            }
            for (double b : layer.bias) {
                io::put_f64(out, b);
            }
        }
    }
    out.flush();
    if (!out) {
        fail(ErrorType::kIo, "failed writing checkpoint: " + path.string());
    }
}

DualEncoder load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorType::kNotFound, "cannot open checkpoint: " + path.string());
    }
    auto corrupt = [&](const std::string& what) {
        fail(ErrorType::kParse, "corrupt checkpoint " + path.string() + ": " + what);
    };
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
        corrupt("bad magic");
    }
    std::uint16_t version = 0;
    std::uint16_t reserved = 0;
    if (!io::get(in, version) || !io::get(in, reserved)) {
        corrupt("truncated header");
    }
    if (version != kCheckpointVersion) {
        corrupt("unsupported version " + std::to_string(version));
    }
    DualEncoder model;
    for (EncoderParams* side : {&model.protein, &model.molecule}) {
        std::uint32_t act = 0;
        std::uint32_t count = 0;
        if (!io::get(in, act) || !io::get(in, count)) {
            corrupt("truncated encoder header");
        }
        if (act > static_cast<std::uint32_t>(Activation::kLinear)) {
            corrupt("unknown activation tag " + std::to_string(act));
        }
        if (count == 0 || count > 64) {
            corrupt("implausible layer count " + std::to_string(count));
        }
        side->hidden_activation = static_cast<Activation>(act);
        for (std::uint32_t l = 0; l < count; ++l) {
            std::uint32_t in_dim = 0;
            std::uint32_t out_dim = 0;
            if (!io::get(in, in_dim) || !io::get(in, out_dim)) {
                corrupt("truncated layer shape");
            }
            if (in_dim == 0 || out_dim == 0 ||
                std::uint64_t{in_dim} * out_dim > (std::uint64_t{1} << 32)) {
                corrupt("implausible layer shape");
            }
            side->layers.emplace_back(in_dim, out_dim);
        }
        for (auto& layer : side->layers) {
            for (auto& w : layer.weight) {
                if (!io::get_f64(in, w)) {
                    corrupt("truncated weights");
                }
            }
            for (auto& b : layer.bias) {
                if (!io::get_f64(in, b)) {
                    corrupt("truncated biases");
                }
            }
        }
        side->validate();
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        corrupt("trailing bytes");
    }
    if (model.protein.output_dim() != model.molecule.output_dim()) {
        corrupt("protein and molecule code lengths differ");
    }
    return model;
}

}  // namespace hashscreen
