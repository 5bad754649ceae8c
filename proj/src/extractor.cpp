#include <aurora/descriptor/extractor.hpp>

namespace aurora {

const char* to_string(ExtractorKind kind)
{
    switch (kind) {
    case ExtractorKind::hand_coded:
        return "hand_coded";
    case ExtractorKind::genotype:
        return "genotype";
    case ExtractorKind::pca:
        return "pca";
    case ExtractorKind::autoencoder:
        return "autoencoder";
    case ExtractorKind::sensory:
        return "sensory";
    }
    return "?";
}

void DescriptorExtractor::fit(const Dataset&, Rng&) {}

HandCodedExtractor::HandCodedExtractor(std::shared_ptr<const tasks::Task> task) : _task(std::move(task))
{
    if (!_task->has_ground_truth())
        throw ContractViolation(std::string("hand-coded descriptor undefined for task ") + std::string(_task->name()));
}

Vector HandCodedExtractor::describe(const Genotype& g, std::span<const double> sensory) const
{
    return _task->ground_truth(g, tasks::unflatten(sensory));
}

LatentExtractor::LatentExtractor(ExtractorKind kind, LatentMode mode, AeTrainConfig ae_cfg)
    : _kind(kind), _mode(mode), _ae_cfg(ae_cfg)
{
    if (kind != ExtractorKind::pca && kind != ExtractorKind::autoencoder)
        throw ContractViolation("LatentExtractor: kind must be pca or autoencoder");
}

Vector LatentExtractor::describe(const Genotype&, std::span<const double> sensory) const
{
    if (!_model)
        throw std::logic_error("LatentExtractor: model used before fitting");
    return _model->project(sensory);
}

void LatentExtractor::fit(const Dataset& data, Rng& rng)
{
    if (_kind == ExtractorKind::pca) {
        _model = std::make_unique<PcaModel>(pca_fit(data, 2));
    }
    else {
        const auto* previous = dynamic_cast<const AeModel*>(_model.get());
        const AeNetwork* init = _ae_cfg.warm_start && previous ? &previous->network() : nullptr;
        AeFitResult r = ae_fit(data, _ae_cfg, rng, init);
        _reports = std::move(r.reports);
        _model = std::make_unique<AeModel>(std::move(r.model));
    }
    const Eigen::MatrixXd z = _model->project_all(data);
    _fit_bounds.assign(2, Interval{});
    for (Eigen::Index c = 0; c < 2; ++c)
        _fit_bounds[static_cast<std::size_t>(c)] = {z.col(c).minCoeff(), z.col(c).maxCoeff()};
    ++_fit_count;
}

void LatentExtractor::set_model(std::unique_ptr<LatentModel> model)
{
    if (!model || model->latent_dim() != 2 || model->input_dim() != kSensoryDim)
        throw ContractViolation("LatentExtractor::set_model: expected a 100 -> 2 model");
    _model = std::move(model);
}

Bounds LatentExtractor::descriptor_bounds() const
{
    if (!_model)
        throw std::logic_error("LatentExtractor: bounds requested before fitting");
    return _fit_bounds;
}

} // namespace aurora
