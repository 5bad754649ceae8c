#pragma once

#include <aurora/descriptor/latent_model.hpp>

namespace aurora {

/// Linear projection onto the top principal directions of the fit data.
class PcaModel final : public LatentModel {
public:
    PcaModel(Eigen::VectorXd mean, Eigen::MatrixXd components, Eigen::VectorXd explained_variance);

    std::string_view kind() const override { return "pca"; }
    std::size_t input_dim() const override { return static_cast<std::size_t>(_mean.size()); }
    std::size_t latent_dim() const override { return static_cast<std::size_t>(_components.rows()); }

    Vector project(std::span<const double> sensory) const override;
    Vector reconstruct(std::span<const double> latent) const override;
    Eigen::MatrixXd project_all(const Dataset& data) const override;
    Dataset reconstruct_all(const Dataset& data) const override;

    nlohmann::json to_json() const override;
    static PcaModel from_json(const nlohmann::json& j);
    std::uint64_t fingerprint() const override;
    std::unique_ptr<LatentModel> clone() const override { return std::make_unique<PcaModel>(*this); }

    const Eigen::VectorXd& mean() const { return _mean; }
    /// k x d, orthonormal rows.
    const Eigen::MatrixXd& components() const { return _components; }
    const Eigen::VectorXd& explained_variance() const { return _explained_variance; }
    double total_variance() const { return _total_variance; }
    void set_total_variance(double v) { _total_variance = v; }

private:
    Eigen::VectorXd _mean;
    Eigen::MatrixXd _components;
    Eigen::VectorXd _explained_variance;
    double _total_variance = 0.0;
};

/// Mean-centres the data and keeps the `k` leading right singular vectors.
/// Component signs are fixed so each row's largest-magnitude entry is positive.
PcaModel pca_fit(const Dataset& data, std::size_t k = 2);

inline Vector pca_project(const PcaModel& m, std::span<const double> sensory) { return m.project(sensory); }
inline Vector pca_reconstruct(const PcaModel& m, std::span<const double> latent) { return m.reconstruct(latent); }

} // namespace aurora
