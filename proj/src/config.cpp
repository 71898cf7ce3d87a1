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

#include "hashscreen/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "hashscreen/error.hpp"

namespace hashscreen {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(std::string_view key, std::string_view v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        fail(ErrorType::kInvalidInput, std::string(key) + ": not a number: '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        fail(ErrorType::kInvalidInput,
             std::string(key) + ": not a non-negative integer: '" + std::string(v) + "'");
    }
    return out;
}

std::string real_text(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

struct Field {
    const char* key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field size_field(const char* key, T RunConfig::*group, std::size_t T::*member) {
    return {key,
            [=](RunConfig& c, std::string_view v) {
                (c.*group).*member = static_cast<std::size_t>(parse_uint(key, v));
            },
            [=](const RunConfig& c) { return std::to_string((c.*group).*member); }};
}

template <class T>
Field u64_field(const char* key, T RunConfig::*group, std::uint64_t T::*member) {
    return {key, [=](RunConfig& c, std::string_view v) { (c.*group).*member = parse_uint(key, v); },
            [=](const RunConfig& c) { return std::to_string((c.*group).*member); }};
}

template <class T>
Field real_field(const char* key, T RunConfig::*group, double T::*member) {
    return {key, [=](RunConfig& c, std::string_view v) { (c.*group).*member = parse_real(key, v); },
            [=](const RunConfig& c) { return real_text((c.*group).*member); }};
}

Field path_field(const char* key, std::filesystem::path RunConfig::*member) {
    return {key, [=](RunConfig& c, std::string_view v) { c.*member = std::filesystem::path(v); },
            [=](const RunConfig& c) { return (c.*member).string(); }};
}

const std::vector<Field>& fields() {
    using TC = TrainingConfig;
    using SS = SynthSpec;
    constexpr auto T = &RunConfig::training;
    constexpr auto S = &RunConfig::synthetic;
    static const std::vector<Field> table = {
        real_field<TC>("lambda", T, &TC::lambda),
        real_field<TC>("tau", T, &TC::tau),
        size_field<TC>("batch_size", T, &TC::batch_size),
        size_field<TC>("code_length", T, &TC::code_bits),
        size_field<TC>("hidden_dim", T, &TC::hidden_dim),
        size_field<TC>("epochs", T, &TC::epochs),
        real_field<TC>("lr", T, &TC::learning_rate),
        real_field<TC>("adam_beta1", T, &TC::adam_beta1),
        real_field<TC>("adam_beta2", T, &TC::adam_beta2),
        real_field<TC>("adam_epsilon", T, &TC::adam_epsilon),
        size_field<TC>("accumulation_steps", T, &TC::accumulation_steps),
        real_field<TC>("bedroc_alpha", T, &TC::bedroc_alpha),
        u64_field<TC>("seed", T, &TC::seed),
        size_field<TC>("threads", T, &TC::threads),
        path_field("protein_features", &RunConfig::protein_features),
        path_field("molecule_features", &RunConfig::molecule_features),
        path_field("labels", &RunConfig::labels),
        {"split",
         [](RunConfig& c, std::string_view v) {
             std::array<double, 3> f{};
             std::size_t i = 0;
             std::size_t start = 0;
             while (true) {
                 const auto comma = v.find(',', start);
                 const auto part = trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start));
                 if (i >= 3) {
                     fail(ErrorType::kInvalidInput, "split: expected three comma-separated fractions");
                 }
                 f[i++] = parse_real("split", part);
                 if (comma == std::string_view::npos) {
                     break;
                 }
                 start = comma + 1;
             }
             if (i != 3) {
                 fail(ErrorType::kInvalidInput, "split: expected three comma-separated fractions");
             }
             c.split = f;
         },
         [](const RunConfig& c) {
             return real_text(c.split[0]) + "," + real_text(c.split[1]) + "," + real_text(c.split[2]);
         }},
        size_field<SS>("synthetic.clusters", S, &SS::num_clusters),
        size_field<SS>("synthetic.pairs_per_cluster", S, &SS::pairs_per_cluster),
        size_field<SS>("synthetic.protein_dim", S, &SS::protein_dim),
        size_field<SS>("synthetic.molecule_dim", S, &SS::molecule_dim),
        size_field<SS>("synthetic.latent_dim", S, &SS::latent_dim),
        real_field<SS>("synthetic.center_scale", S, &SS::center_scale),
        real_field<SS>("synthetic.noise", S, &SS::noise),
        u64_field<SS>("synthetic.seed", S, &SS::seed),
    };
    return table;
}

}  // namespace

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
    if (key == "code_bits") {
        key = "code_length";
    }
    for (const auto& f : fields()) {
        if (key == f.key) {
            f.set(config, trim(value));
            return;
        }
    }
    fail(ErrorType::kInvalidInput, "unknown config key '" + std::string(key) + "'");
}

RunConfig parse_run_config(std::string_view text, const std::string& source_name,
                           const std::filesystem::path& base_dir) {
    RunConfig config;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        const auto raw = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorType::kParse, source_name + ":" + std::to_string(line_no) + ": expected key = value");
        }
        try {
            apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const Error& e) {
            fail(ErrorType::kParse, source_name + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!base_dir.empty()) {
        for (auto* p : {&config.protein_features, &config.molecule_features, &config.labels}) {
            if (!p->empty() && p->is_relative()) {
                *p = base_dir / *p;
            }
        }
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorType::kNotFound, "cannot open config file: " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path.string(), path.parent_path());
}

std::string format_run_config(const RunConfig& config) {
    std::string out;
    for (const auto& f : fields()) {
        const auto v = f.get(config);
        if (v.empty()) {
            continue;
        }
        out += std::string(f.key) + " = " + v + "\n";
    }
    return out;
}

std::vector<std::string> run_config_keys() {
    std::vector<std::string> keys;
    for (const auto& f : fields()) {
        keys.emplace_back(f.key);
    }
    return keys;
}

}  // namespace hashscreen
