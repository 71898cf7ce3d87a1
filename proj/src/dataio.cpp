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

#include "hashscreen/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "hashscreen/error.hpp"
#include "hashscreen/rng.hpp"

namespace hashscreen {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

std::string where(const std::filesystem::path& path, std::size_t line_no) {
    return path.string() + ":" + std::to_string(line_no);
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

FeatureTable load_features(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorType::kNotFound, "cannot open feature file: " + path.string());
    }
    FeatureTable table;
    std::size_t width = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            fail(ErrorType::kParse, where(path, line_no) + ": empty line");
        }
        const auto fields = split_tabs(line);
        if (fields.size() < 2) {
            fail(ErrorType::kParse, where(path, line_no) + ": expected an id and at least one feature");
        }
        const std::size_t f = fields.size() - 1;
        if (table.ids.empty()) {
            width = f;
        } else if (f != width) {
            fail(ErrorType::kParse, where(path, line_no) + ": row has " + std::to_string(f) +
                                        " features, earlier rows have " + std::to_string(width));
        }
        if (fields[0].empty()) {
            fail(ErrorType::kParse, where(path, line_no) + ": empty id");
        }
        table.ids.emplace_back(fields[0]);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            double v = 0.0;
            const auto field = fields[i];
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
                fail(ErrorType::kParse, where(path, line_no) + ": field " + std::to_string(i + 1) +
                                            " is not a number: '" + std::string(field) + "'");
            }
            if (!std::isfinite(v)) {
                fail(ErrorType::kParse, where(path, line_no) + ": field " + std::to_string(i + 1) +
                                            " is not finite");
            }
            table.values.data.push_back(v);
        }
    }
    table.values.rows = table.ids.size();
    table.values.cols = width;
    return table;
}

CodeTable load_code_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorType::kNotFound, "cannot open code file: " + path.string());
    }
    CodeTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const auto fields = split_tabs(line);
        if (fields.size() != 2 || fields[0].empty()) {
            fail(ErrorType::kParse, where(path, line_no) + ": expected id<TAB>bits");
        }
        BinaryCode code;
        try {
            code = parse_bit_string(fields[1]);
        } catch (const Error& e) {
            fail(ErrorType::kParse, where(path, line_no) + ": " + e.what());
        }
        if (!table.codes.empty() && code.n_bits() != table.codes.front().n_bits()) {
            fail(ErrorType::kParse, where(path, line_no) + ": code has " +
                                        std::to_string(code.n_bits()) + " bits, earlier codes have " +
                                        std::to_string(table.codes.front().n_bits()));
        }
        table.ids.emplace_back(fields[0]);
        table.codes.push_back(std::move(code));
    }
    return table;
}

void write_features(const std::filesystem::path& path, const FeatureTable& table) {
    if (table.ids.size() != table.values.rows) {
        fail(ErrorType::kInvalidInput, "feature table has mismatched ids and rows");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorType::kIo, "cannot open for writing: " + path.string());
    }
    for (std::size_t r = 0; r < table.values.rows; ++r) {
        out << table.ids[r];
        for (double v : table.values.row(r)) {
            out << '\t' << format_double(v);
        }
        out << '\n';
    }
    if (!out) {
        fail(ErrorType::kIo, "failed writing " + path.string());
    }
}

PairDataset PairDataset::subset(std::span<const std::size_t> rows) const {
    PairDataset out;
    out.proteins = Matrix(rows.size(), proteins.cols);
    out.molecules = Matrix(rows.size(), molecules.cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows[i];
        std::copy(proteins.row(r).begin(), proteins.row(r).end(), out.proteins.row(i).begin());
        std::copy(molecules.row(r).begin(), molecules.row(r).end(), out.molecules.row(i).begin());
        if (!protein_ids.empty()) {
            out.protein_ids.push_back(protein_ids[r]);
        }
        if (!molecule_ids.empty()) {
            out.molecule_ids.push_back(molecule_ids[r]);
        }
        if (!labels.empty()) {
            out.labels.push_back(labels[r]);
        }
    }
    return out;
}

PairDataset load_pairs(const std::filesystem::path& protein_file,
                       const std::filesystem::path& molecule_file) {
    auto proteins = load_features(protein_file);
    auto molecules = load_features(molecule_file);
    if (proteins.ids.size() != molecules.ids.size()) {
        fail(ErrorType::kShapeMismatch,
             "pair files differ in row count: " + protein_file.string() + " has " +
                 std::to_string(proteins.ids.size()) + " rows, " + molecule_file.string() + " has " +
                 std::to_string(molecules.ids.size()));
    }
    PairDataset d;
    d.proteins = std::move(proteins.values);
    d.molecules = std::move(molecules.values);
    d.protein_ids = std::move(proteins.ids);
    d.molecule_ids = std::move(molecules.ids);
    return d;
}

std::unordered_map<std::string, std::string> load_labels(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorType::kNotFound, "cannot open label file: " + path.string());
    }
    std::unordered_map<std::string, std::string> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const auto fields = split_tabs(line);
        if (fields.size() != 2 || fields[0].empty()) {
            fail(ErrorType::kParse, where(path, line_no) + ": expected id<TAB>label");
        }
        if (!labels.emplace(std::string(fields[0]), std::string(fields[1])).second) {
            fail(ErrorType::kParse, where(path, line_no) + ": duplicate id '" + std::string(fields[0]) + "'");
        }
    }
    return labels;
}

void write_labels(const std::filesystem::path& path, std::span<const std::string> ids,
                  std::span<const std::int64_t> labels) {
    if (ids.size() != labels.size()) {
        fail(ErrorType::kInvalidInput, "ids and labels differ in length");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorType::kIo, "cannot open for writing: " + path.string());
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i] << '\t' << labels[i] << '\n';
    }
    if (!out) {
        fail(ErrorType::kIo, "failed writing " + path.string());
    }
}

void attach_labels(PairDataset& dataset, const std::unordered_map<std::string, std::string>& labels) {
    std::map<std::string, std::int64_t> codes;
    std::vector<std::int64_t> out;
    std::vector<std::string> missing;
    out.reserve(dataset.size());
    for (const auto& id : dataset.protein_ids) {
        auto it = labels.find(id);
        if (it == labels.end()) {
            missing.push_back(id);
            continue;
        }
        auto [pos, inserted] = codes.emplace(it->second, static_cast<std::int64_t>(codes.size()));
        out.push_back(pos->second);
    }
    if (!missing.empty()) {
        std::string msg = "labels missing for " + std::to_string(missing.size()) + " ids:";
        for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 10); ++i) {
            msg += " " + missing[i];
        }
        fail(ErrorType::kInvalidInput, msg);
    }
    dataset.labels = std::move(out);
}

void SynthSpec::validate() const {
    if (num_clusters == 0 || pairs_per_cluster == 0 || protein_dim == 0 || molecule_dim == 0 ||
        latent_dim == 0) {
        fail(ErrorType::kInvalidInput, "synthetic spec sizes must be positive");
    }
    if (!(center_scale > 0.0) || !(noise >= 0.0) || !std::isfinite(center_scale) ||
        !std::isfinite(noise)) {
        fail(ErrorType::kInvalidInput, "synthetic spec needs center_scale > 0 and noise >= 0");
    }
}

PairDataset generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t L = spec.latent_dim;

    auto random_map = [&](std::size_t out_dim) {
        Matrix a(out_dim, L);
        const double s = 1.0 / std::sqrt(static_cast<double>(L));
        for (auto& v : a.data) {
            v = rng.normal() * s;
        }
        return a;
    };
    const Matrix protein_map = random_map(spec.protein_dim);
    const Matrix molecule_map = random_map(spec.molecule_dim);

    Matrix centers(spec.num_clusters, L);
    for (auto& v : centers.data) {
        v = rng.normal() * spec.center_scale;
    }

    const std::size_t n = spec.num_clusters * spec.pairs_per_cluster;
    PairDataset d;
    d.proteins = Matrix(n, spec.protein_dim);
    d.molecules = Matrix(n, spec.molecule_dim);
    std::vector<double> z(L);
    auto project = [&](const Matrix& map, std::span<double> out) {
        for (std::size_t f = 0; f < map.rows; ++f) {
            double acc = 0.0;
            for (std::size_t t = 0; t < L; ++t) {
                acc += map(f, t) * z[t];
            }
            out[f] = acc + spec.noise * rng.normal();
        }
    };
    std::size_t row = 0;
    for (std::size_t c = 0; c < spec.num_clusters; ++c) {
        for (std::size_t p = 0; p < spec.pairs_per_cluster; ++p, ++row) {
            for (std::size_t t = 0; t < L; ++t) {
                z[t] = centers(c, t) + spec.noise * rng.normal();
            }
            project(protein_map, d.proteins.row(row));
            project(molecule_map, d.molecules.row(row));
            d.protein_ids.push_back("p" + std::to_string(row));
            d.molecule_ids.push_back("m" + std::to_string(row));
            d.labels.push_back(static_cast<std::int64_t>(c));
        }
    }
    return d;
}

DatasetSplit split(const PairDataset& dataset, std::array<double, 3> fractions, std::uint64_t seed) {
    double sum = 0.0;
    for (double f : fractions) {
        if (!(f >= 0.0)) {
            fail(ErrorType::kInvalidInput, "split fractions must be non-negative");
        }
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        fail(ErrorType::kInvalidInput, "split fractions must sum to 1");
    }

    std::map<std::int64_t, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        strata[dataset.has_labels() ? dataset.labels[i] : 0].push_back(i);
    }
    Rng rng(seed);
    std::array<std::vector<std::size_t>, 3> parts;
    for (auto& [label, members] : strata) {
        rng.shuffle(std::span<std::size_t>(members));
        const std::size_t size = members.size();
        auto n_train = static_cast<std::size_t>(std::llround(fractions[0] * static_cast<double>(size)));
        auto n_val = static_cast<std::size_t>(std::llround(fractions[1] * static_cast<double>(size)));
        n_train = std::min(n_train, size);
        n_val = std::min(n_val, size - n_train);
        if (fractions[2] == 0.0) {
            // Leftover from rounding goes to the last part that is wanted.
            (fractions[1] > 0.0 ? n_val : n_train) = size - (fractions[1] > 0.0 ? n_train : n_val);
        }
        parts[0].insert(parts[0].end(), members.begin(), members.begin() + n_train);
        parts[1].insert(parts[1].end(), members.begin() + n_train, members.begin() + n_train + n_val);
        parts[2].insert(parts[2].end(), members.begin() + n_train + n_val, members.end());
    }
    static constexpr const char* kNames[3] = {"train", "validation", "test"};
    for (std::size_t p = 0; p < 3; ++p) {
        if (fractions[p] > 0.0 && parts[p].empty()) {
            fail(ErrorType::kInvalidInput, std::string("split fraction for ") + kNames[p] +
                                               " is positive but the part is empty");
        }
        std::sort(parts[p].begin(), parts[p].end());
    }
    return DatasetSplit{dataset.subset(parts[0]), dataset.subset(parts[1]), dataset.subset(parts[2])};
}

}  // namespace hashscreen
