#include "sgdiff/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace sgdiff {

MixtureModel::MixtureModel(std::vector<MixtureComponent> components,
                           std::map<std::string, std::vector<int>> concepts)
    : components_(std::move(components)), concepts_(std::move(concepts)) {
    if (components_.empty()) {
        throw std::invalid_argument("mixture model: needs at least one component");
    }
    dim_ = static_cast<int>(components_.front().mean.size());
    if (dim_ == 0) {
        throw std::invalid_argument("mixture model: component means must be nonempty");
    }
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight > 0.0)) {
            throw std::invalid_argument("mixture model: component weights must be positive");
        }
        if (!(c.variance > 0.0)) {
            throw std::invalid_argument("mixture model: component variances must be positive");
        }
        if (static_cast<int>(c.mean.size()) != dim_) {
            throw std::invalid_argument("mixture model: component means must share one dimension");
        }
        total += c.weight;
    }
    for (auto& c : components_) {
        c.weight /= total;
    }
    for (const auto& [id, indices] : concepts_) {
        if (indices.empty()) {
            throw std::invalid_argument("mixture model: concept '" + id + "' maps to no components");
        }
        for (int idx : indices) {
            if (idx < 0 || idx >= static_cast<int>(components_.size())) {
                throw std::invalid_argument("mixture model: concept '" + id +
                                            "' references component " + std::to_string(idx) +
                                            " out of range");
            }
        }
    }
}

const std::vector<int>& MixtureModel::concept_components(const std::string& id) const {
    auto it = concepts_.find(id);
    if (it == concepts_.end()) {
        throw std::invalid_argument("unknown concept '" + id + "'");
    }
    return it->second;
}

MixtureModel MixtureModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open model file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("model file " + path.string() + ": " + e.what());
    }
    try {
        std::vector<MixtureComponent> components;
        for (const auto& jc : j.at("components")) {
            MixtureComponent c;
            c.weight = jc.at("weight").get<double>();
            c.mean = jc.at("mean").get<std::vector<double>>();
            c.variance = jc.at("variance").get<double>();
            components.push_back(std::move(c));
        }
        std::map<std::string, std::vector<int>> concepts;
        if (j.contains("concepts")) {
            for (const auto& [id, indices] : j.at("concepts").items()) {
                concepts[id] = indices.get<std::vector<int>>();
            }
        }
        return MixtureModel(std::move(components), std::move(concepts));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("model file " + path.string() + ": " + e.what());
    }
}

void MixtureModel::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["components"] = nlohmann::json::array();
    for (const auto& c : components_) {
        j["components"].push_back({{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}});
    }
    j["concepts"] = nlohmann::json::object();
    for (const auto& [id, indices] : concepts_) {
        j["concepts"][id] = indices;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write model file: " + path.string());
    }
    out << j.dump(2) << "\n";
}

namespace {

const std::vector<int>* select_components(const MixtureModel& model, const Condition& condition,
                                          std::vector<int>& all_storage) {
    if (condition.tag == ConditionTag::Unconditional || !condition.concept_id.has_value()) {
        all_storage.resize(model.components().size());
        for (std::size_t i = 0; i < all_storage.size(); ++i) {
            all_storage[i] = static_cast<int>(i);
        }
        return &all_storage;
    }
    return &model.concept_components(*condition.concept_id);
}

}  // namespace

Tensor mixture_noise_prediction(const MixtureModel& model, const Tensor& z, double sigma,
                                const Condition& condition) {
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("mixture_noise_prediction: sigma must be >= 0");
    }
    if (static_cast<int>(z.size()) != model.dim()) {
        throw std::invalid_argument("mixture_noise_prediction: latent has " +
                                    std::to_string(z.size()) + " entries, model dimension is " +
                                    std::to_string(model.dim()));
    }

    std::vector<int> all_storage;
    const std::vector<int>& active = *select_components(model, condition, all_storage);
    const auto& comps = model.components();
    const int d = model.dim();

    // log responsibilities of the sigma-diffused restricted mixture
    std::vector<double> log_terms(active.size());
    double log_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < active.size(); ++k) {
        const auto& c = comps[active[k]];
        double v = c.variance + sigma * sigma;
        double sq = 0.0;
        for (int i = 0; i < d; ++i) {
            double diff = z[i] - c.mean[i];
            sq += diff * diff;
        }
        log_terms[k] = std::log(c.weight) - 0.5 * d * std::log(2.0 * std::numbers::pi * v) -
                       sq / (2.0 * v);
        log_max = std::max(log_max, log_terms[k]);
    }
    double denom = 0.0;
    for (double lt : log_terms) {
        denom += std::exp(lt - log_max);
    }

    // eps = sigma * sum_k r_k (z - m_k) / v_k
    std::vector<double> out(d, 0.0);
    for (std::size_t k = 0; k < active.size(); ++k) {
        const auto& c = comps[active[k]];
        double v = c.variance + sigma * sigma;
        double r = std::exp(log_terms[k] - log_max) / denom;
        double f = sigma * r / v;
        for (int i = 0; i < d; ++i) {
            out[i] += f * (z[i] - c.mean[i]);
        }
    }
    return Tensor(z.shape(), std::move(out));
}

double mode_fraction(const std::vector<Tensor>& samples, const MixtureModel& model,
                     const std::string& concept_id) {
    if (samples.empty()) {
        throw std::invalid_argument("mode_fraction: sample list is empty");
    }
    const std::vector<int>& subset = model.concept_components(concept_id);
    const auto& comps = model.components();
    const int d = model.dim();

    std::size_t hits = 0;
    for (const Tensor& s : samples) {
        if (static_cast<int>(s.size()) != d) {
            throw std::invalid_argument("mode_fraction: sample dimension mismatch");
        }
        int nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < comps.size(); ++k) {
            double sq = 0.0;
            for (int i = 0; i < d; ++i) {
                double diff = s[i] - comps[k].mean[i];
                sq += diff * diff;
            }
            if (sq < best) {  // ties keep the lowest component index
                best = sq;
                nearest = static_cast<int>(k);
            }
        }
        if (std::find(subset.begin(), subset.end(), nearest) != subset.end()) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace sgdiff
