#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgdiff/tensor.hpp"

namespace sgdiff {

enum class ConditionTag { Unconditional, Prompt, Safety };

// Conditioning channel of a noise prediction. The optional concept id selects
// a component subset of the mixture; without one the full mixture is used.
// The unconditional channel never carries a concept.
struct Condition {
    ConditionTag tag = ConditionTag::Unconditional;
    std::optional<std::string> concept_id;

    static Condition unconditional() { return {ConditionTag::Unconditional, std::nullopt}; }
    static Condition prompt(std::string concept_id) {
        return {ConditionTag::Prompt, std::move(concept_id)};
    }
    static Condition safety(std::string concept_id) {
        return {ConditionTag::Safety, std::move(concept_id)};
    }
};

// Abstract conditional noise predictor: the seam where a learned model would
// plug into the sampling loop.
class NoisePredictor {
public:
    virtual ~NoisePredictor() = default;
    virtual Tensor predict(const Tensor& z, double sigma, const Condition& condition) const = 0;
    virtual std::vector<int> latent_shape() const = 0;
};

struct MixtureComponent {
    double weight = 1.0;
    std::vector<double> mean;
    double variance = 1.0;  // isotropic
};

// Isotropic Gaussian mixture over the latent space with named component
// subsets ("concepts"). Weights are normalized at construction.
class MixtureModel {
public:
    MixtureModel(std::vector<MixtureComponent> components,
                 std::map<std::string, std::vector<int>> concepts);

    int dim() const { return dim_; }
    const std::vector<MixtureComponent>& components() const { return components_; }
    const std::map<std::string, std::vector<int>>& concepts() const { return concepts_; }
    const std::vector<int>& concept_components(const std::string& id) const;

    // JSON model file, schema:
    //   {"components": [{"weight": w, "mean": [...], "variance": v}, ...],
    //    "concepts": {"name": [component indices], ...}}
    static MixtureModel load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

private:
    std::vector<MixtureComponent> components_;
    std::map<std::string, std::vector<int>> concepts_;
    int dim_ = 0;
};

// Analytic noise estimate of the sigma-diffused mixture restricted to the
// condition's components: eps = -sigma * grad_z log p_sigma(z), where the
// diffused component variances are (variance + sigma^2). Computed via
// log-sum-exp responsibilities for stability.
Tensor mixture_noise_prediction(const MixtureModel& model, const Tensor& z, double sigma,
                                const Condition& condition);

class MixturePredictor final : public NoisePredictor {
public:
    explicit MixturePredictor(MixtureModel model) : model_(std::move(model)) {}

    const MixtureModel& model() const { return model_; }

    Tensor predict(const Tensor& z, double sigma, const Condition& condition) const override {
        return mixture_noise_prediction(model_, z, sigma, condition);
    }
    std::vector<int> latent_shape() const override { return {model_.dim()}; }

private:
    MixtureModel model_;
};

// Fraction of samples whose nearest component mean (Euclidean, ties to the
// lowest component index) belongs to the concept's subset.
double mode_fraction(const std::vector<Tensor>& samples, const MixtureModel& model,
                     const std::string& concept_id);

}  // namespace sgdiff
