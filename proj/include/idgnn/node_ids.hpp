#pragma once

// Random node identifiers (RNI) and input assembly H^(0) = [X || I].

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "idgnn/tensor.hpp"

namespace idgnn {

enum class IdMode { None, Constant, Rni };
enum class IdDist { Uniform, Normal };

inline IdMode id_mode_from_string(const std::string& s) {
    if (s == "none") return IdMode::None;
    if (s == "constant") return IdMode::Constant;
    if (s == "rni") return IdMode::Rni;
    throw std::invalid_argument("unknown id_mode: " + s);
}

inline std::string to_string(IdMode m) {
    switch (m) {
        case IdMode::None: return "none";
        case IdMode::Constant: return "constant";
        case IdMode::Rni: return "rni";
    }
    return "?";
}

struct IdAssignment {
    Tensor values;      // n x r
    std::size_t r = 0;
    std::uint64_t seed_info = 0;
};

// i.i.d. draws with an explicit distinct-rows check; collision means a broken RNG.
inline IdAssignment sample_ids(std::size_t n, std::size_t r, std::mt19937_64& rng,
                               IdDist dist = IdDist::Uniform) {
    if (n < 1 || r < 1) throw std::invalid_argument("sample_ids requires n >= 1 and r >= 1");
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> norm(0.0, 1.0);
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::vector<double> vals(n * r);
        for (auto& v : vals) v = dist == IdDist::Uniform ? uni(rng) : norm(rng);
        std::set<std::vector<double>> rows;
        bool distinct = true;
        for (std::size_t i = 0; i < n && distinct; ++i)
            distinct = rows.emplace(vals.begin() + i * r, vals.begin() + (i + 1) * r).second;
        if (distinct) return IdAssignment{Tensor({n, r}, std::move(vals)), r, rng()};
    }
    throw std::runtime_error("sample_ids: duplicate ID rows after 3 retries (broken RNG?)");
}

// Column order is fixed: [X || I]. Featureless graphs get a constant-1 X column.
inline Tensor assemble_input(const std::optional<Tensor>& features,
                             const std::optional<IdAssignment>& ids, IdMode mode,
                             std::size_t num_nodes) {
    Tensor x = features ? *features : Tensor::full({num_nodes, 1}, 1.0);
    switch (mode) {
        case IdMode::None:
            return x;
        case IdMode::Constant:
            return concat({x, Tensor::full({num_nodes, 1}, 1.0)}, 1);
        case IdMode::Rni:
            if (!ids) throw std::invalid_argument("assemble_input: rni mode without ids");
            return concat({x, ids->values}, 1);
    }
    throw std::logic_error("unreachable");
}

// Model input width for a given raw feature dimension (0 = featureless).
inline std::size_t assembled_dim(std::size_t feature_dim, IdMode mode, std::size_t id_dim) {
    const std::size_t d = feature_dim == 0 ? 1 : feature_dim;
    switch (mode) {
        case IdMode::None: return d;
        case IdMode::Constant: return d + 1;
        case IdMode::Rni: return d + id_dim;
    }
    return d;
}

}  // namespace idgnn
