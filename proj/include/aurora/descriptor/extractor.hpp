#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <aurora/descriptor/autoencoder.hpp>
#include <aurora/descriptor/latent_model.hpp>
#include <aurora/descriptor/pca.hpp>
#include <aurora/tasks/task.hpp>

namespace aurora {

enum class ExtractorKind { hand_coded, genotype, pca, autoencoder, sensory };

const char* to_string(ExtractorKind kind);

/// Maps an evaluated controller to its behavioural descriptor.
/// `describe` is const and safe to call concurrently.
class DescriptorExtractor {
public:
    virtual ~DescriptorExtractor() = default;

    virtual ExtractorKind kind() const = 0;
    virtual std::size_t dim() const = 0;
    virtual Vector describe(const Genotype& g, std::span<const double> sensory) const = 0;

    /// True when the extractor is refitted during the run.
    virtual bool trainable() const { return false; }
    virtual void fit(const Dataset& data, Rng& rng);
    /// Fewest rows `fit` accepts.
    virtual std::size_t min_fit_rows() const { return 1; }

    /// Descriptor box used to derive the archive threshold.
    virtual Bounds descriptor_bounds() const = 0;

    /// Fitted model, for extractors that have one.
    virtual const LatentModel* model() const { return nullptr; }
};

class HandCodedExtractor final : public DescriptorExtractor {
public:
    explicit HandCodedExtractor(std::shared_ptr<const tasks::Task> task);

    ExtractorKind kind() const override { return ExtractorKind::hand_coded; }
    std::size_t dim() const override { return _task->ground_truth_bounds().size(); }
    Vector describe(const Genotype& g, std::span<const double> sensory) const override;
    Bounds descriptor_bounds() const override { return _task->ground_truth_bounds(); }

private:
    std::shared_ptr<const tasks::Task> _task;
};

class GenotypeExtractor final : public DescriptorExtractor {
public:
    explicit GenotypeExtractor(Bounds bounds) : _bounds(std::move(bounds)) {}

    ExtractorKind kind() const override { return ExtractorKind::genotype; }
    std::size_t dim() const override { return _bounds.size(); }
    Vector describe(const Genotype& g, std::span<const double>) const override { return g.values; }
    Bounds descriptor_bounds() const override { return _bounds; }

private:
    Bounds _bounds;
};

/// Identity on the 100-D sensory vector (CVT containers).
class SensoryExtractor final : public DescriptorExtractor {
public:
    explicit SensoryExtractor(Bounds bounds) : _bounds(std::move(bounds)) {}

    ExtractorKind kind() const override { return ExtractorKind::sensory; }
    std::size_t dim() const override { return kSensoryDim; }
    Vector describe(const Genotype&, std::span<const double> sensory) const override
    {
        return Vector(sensory.begin(), sensory.end());
    }
    Bounds descriptor_bounds() const override { return _bounds; }

private:
    Bounds _bounds;
};

enum class LatentMode { incremental, pretrained };

/// PCA or auto-encoder projection of the sensory vector.
class LatentExtractor final : public DescriptorExtractor {
public:
    LatentExtractor(ExtractorKind kind, LatentMode mode, AeTrainConfig ae_cfg = {});

    ExtractorKind kind() const override { return _kind; }
    std::size_t dim() const override { return 2; }
    Vector describe(const Genotype& g, std::span<const double> sensory) const override;
    bool trainable() const override { return _mode == LatentMode::incremental; }
    void fit(const Dataset& data, Rng& rng) override;
    std::size_t min_fit_rows() const override { return _kind == ExtractorKind::pca ? 2 : 8; }
    Bounds descriptor_bounds() const override;
    const LatentModel* model() const override { return _model.get(); }

    LatentMode mode() const { return _mode; }
    std::size_t fit_count() const { return _fit_count; }
    const std::vector<TrainReport>& last_reports() const { return _reports; }
    void set_model(std::unique_ptr<LatentModel> model);

private:
    ExtractorKind _kind;
    LatentMode _mode;
    AeTrainConfig _ae_cfg;
    std::unique_ptr<LatentModel> _model;
    Bounds _fit_bounds;
    std::vector<TrainReport> _reports;
    std::size_t _fit_count = 0;
};

} // namespace aurora
