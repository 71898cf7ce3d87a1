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

#include "hashscreen/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hashscreen/error.hpp"

namespace hashscreen {

namespace {

void check_pair_shapes(const Matrix& p, const Matrix& m) {
    if (p.rows != m.rows || p.cols != m.cols) {
        fail(ErrorType::kShapeMismatch,
             "protein embeddings are " + std::to_string(p.rows) + "x" + std::to_string(p.cols) +
                 " but molecule embeddings are " + std::to_string(m.rows) + "x" +
                 std::to_string(m.cols));
    }
    if (p.rows == 0 || p.cols == 0) {
        fail(ErrorType::kInvalidInput, "empty embedding batch");
    }
}

void check_codes(const Matrix& y, std::span<const BinaryCode> codes, const char* side) {
    if (codes.size() != y.rows) {
        fail(ErrorType::kShapeMismatch, std::string(side) + " codes: " +
                                            std::to_string(codes.size()) + " for " +
                                            std::to_string(y.rows) + " embeddings");
    }
    for (const auto& c : codes) {
        if (c.n_bits() != y.cols) {
            fail(ErrorType::kShapeMismatch, std::string(side) + " code has " +
                                                std::to_string(c.n_bits()) + " bits, embeddings have " +
                                                std::to_string(y.cols) + " dimensions");
        }
    }
}

std::vector<double> row_norms(const Matrix& y, const char* side) {
    std::vector<double> norms(y.rows);
    for (std::size_t i = 0; i < y.rows; ++i) {
        double s = 0.0;
        for (double v : y.row(i)) {
            s += v * v;
        }
        norms[i] = std::sqrt(s);
        if (!(norms[i] >= kMinNorm)) {
            fail(ErrorType::kDegenerateInput,
                 std::string(side) + " embedding row " + std::to_string(i) + " has near-zero norm");
        }
    }
    return norms;
}

// log(sum(exp(v))) split as max + log(sum(exp(v - max))), so that a loss
// term (lse - x) can be formed as (max - x) + log_sum without cancellation.
struct LogSumExp {
    double max = 0.0;
    double log_sum = 0.0;

    double value() const { return max + log_sum; }
    double minus(double x) const { return (max - x) + log_sum; }
};

LogSumExp log_sum_exp(std::span<const double> v) {
    const double hi = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) {
        s += std::exp(x - hi);
    }
    return {hi, std::log(s)};
}

struct Similarities {
    Matrix cosine;  // n x n, (i, j) = sim(protein i, molecule j)
    std::vector<double> protein_norms;
    std::vector<double> molecule_norms;
    std::vector<LogSumExp> row_lse;  // over molecules for each protein
    std::vector<LogSumExp> col_lse;  // over proteins for each molecule
};

Similarities similarities(const Matrix& p, const Matrix& m, double tau) {
    check_pair_shapes(p, m);
    if (!(tau > 0.0)) {
        fail(ErrorType::kInvalidInput, "temperature must be positive");
    }
    const std::size_t n = p.rows;
    Similarities s;
    s.protein_norms = row_norms(p, "protein");
    s.molecule_norms = row_norms(m, "molecule");
    s.cosine = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double dot = 0.0;
            auto a = p.row(i);
            auto b = m.row(j);
            for (std::size_t t = 0; t < p.cols; ++t) {
                dot += a[t] * b[t];
            }
            s.cosine(i, j) =
                std::clamp(dot / (s.protein_norms[i] * s.molecule_norms[j]), -1.0, 1.0);
        }
    }
    s.row_lse.resize(n);
    s.col_lse.resize(n);
    std::vector<double> buf(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            buf[i] = s.cosine(k, i) / tau;
        }
        s.row_lse[k] = log_sum_exp(buf);
        for (std::size_t i = 0; i < n; ++i) {
            buf[i] = s.cosine(i, k) / tau;
        }
        s.col_lse[k] = log_sum_exp(buf);
    }
    return s;
}

// Mean taken about the first term, so a batch of equal terms averages exactly.
double shifted_mean(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double x : xs) {
        acc += x - xs.front();
    }
    return xs.front() + acc / static_cast<double>(xs.size());
}

LossReport report_from(const Similarities& s, double tau) {
    const std::size_t n = s.cosine.rows;
    std::vector<double> protein(n);
    std::vector<double> molecule(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double pos = s.cosine(k, k) / tau;
        protein[k] = s.row_lse[k].minus(pos);
        molecule[k] = s.col_lse[k].minus(pos);
    }
    LossReport r;
    r.protein_side = shifted_mean(protein);
    r.molecule_side = shifted_mean(molecule);
    r.contrastive = 0.5 * (r.protein_side + r.molecule_side);
    r.total = r.contrastive;
    return r;
}

}  // namespace

LossReport contrastive_loss(const Matrix& proteins, const Matrix& molecules, double tau) {
    return report_from(similarities(proteins, molecules, tau), tau);
}

LossReport contrastive_loss_grad(const Matrix& proteins, const Matrix& molecules, double tau,
                                 Matrix& protein_grad, Matrix& molecule_grad) {
    const auto s = similarities(proteins, molecules, tau);
    const std::size_t n = proteins.rows;
    const std::size_t d = proteins.cols;
    if (protein_grad.rows != n || protein_grad.cols != d || molecule_grad.rows != n ||
        molecule_grad.cols != d) {
        fail(ErrorType::kShapeMismatch, "gradient buffers do not match embedding shape");
    }

    // dL/dcos(i, j) = (softmax over row i + softmax over column j - 2*delta) / (2 n tau)
    const double scale = 1.0 / (2.0 * static_cast<double>(n) * tau);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double z = s.cosine(i, j) / tau;
            double g = std::exp(z - s.row_lse[i].value()) + std::exp(z - s.col_lse[j].value());
            if (i == j) {
                g -= 2.0;
            }
            a(i, j) = g * scale;
        }
    }

    // d cos(p, m) / dp = m / (|p||m|) - cos * p / |p|^2
    for (std::size_t i = 0; i < n; ++i) {
        auto p = proteins.row(i);
        auto gp = protein_grad.row(i);
        const double np = s.protein_norms[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) {
                continue;
            }
            auto m = molecules.row(j);
            const double nm = s.molecule_norms[j];
            const double cij = s.cosine(i, j);
            auto gm = molecule_grad.row(j);
            for (std::size_t t = 0; t < d; ++t) {
                gp[t] += aij * (m[t] / (np * nm) - cij * p[t] / (np * np));
                gm[t] += aij * (p[t] / (np * nm) - cij * m[t] / (nm * nm));
            }
        }
    }
    return report_from(s, tau);
}

double hash_loss(const Matrix& proteins, const Matrix& molecules,
                 std::span<const BinaryCode> protein_codes,
                 std::span<const BinaryCode> molecule_codes) {
    Matrix gp(proteins.rows, proteins.cols);
    Matrix gm(molecules.rows, molecules.cols);
    return hash_loss_grad(proteins, molecules, protein_codes, molecule_codes, 0.0, gp, gm);
}

double hash_loss_grad(const Matrix& proteins, const Matrix& molecules,
                      std::span<const BinaryCode> protein_codes,
                      std::span<const BinaryCode> molecule_codes, double scale,
                      Matrix& protein_grad, Matrix& molecule_grad) {
    check_pair_shapes(proteins, molecules);
    check_codes(proteins, protein_codes, "protein");
    check_codes(molecules, molecule_codes, "molecule");
    const double norm = 1.0 / static_cast<double>(proteins.rows * proteins.cols);
    double sum = 0.0;
    auto accumulate = [&](const Matrix& y, std::span<const BinaryCode> codes, Matrix& grad) {
        for (std::size_t k = 0; k < y.rows; ++k) {
            auto row = y.row(k);
            auto g = grad.row(k);
            const auto& code = codes[k];
            for (std::size_t t = 0; t < y.cols; ++t) {
                const double diff = row[t] - (code.bit(t) ? 1.0 : -1.0);
                sum += diff * diff;
                if (scale != 0.0) {
                    g[t] += scale * 2.0 * diff * norm;
                }
            }
        }
    };
    accumulate(proteins, protein_codes, protein_grad);
    accumulate(molecules, molecule_codes, molecule_grad);
    return sum * norm;
}

LossReport total_loss(const Matrix& proteins, const Matrix& molecules,
                      std::span<const BinaryCode> protein_codes,
                      std::span<const BinaryCode> molecule_codes, double lambda, double tau) {
    if (!(lambda >= 0.0)) {
        fail(ErrorType::kInvalidInput, "lambda must be non-negative");
    }
    auto r = contrastive_loss(proteins, molecules, tau);
    r.hash = hash_loss(proteins, molecules, protein_codes, molecule_codes);
    r.total = r.contrastive + lambda * r.hash;
    return r;
}

std::vector<BinaryCode> update_codes(const Matrix& embeddings) {
    std::vector<BinaryCode> codes;
    codes.reserve(embeddings.rows);
    for (std::size_t k = 0; k < embeddings.rows; ++k) {
        codes.push_back(sign_quantize(embeddings.row(k)));
    }
    return codes;
}

}  // namespace hashscreen
