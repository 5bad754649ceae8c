#include <aurora/descriptor/pca.hpp>

#include <cmath>

#include <Eigen/SVD>

namespace aurora {

PcaModel::PcaModel(Eigen::VectorXd mean, Eigen::MatrixXd components, Eigen::VectorXd explained_variance)
    : _mean(std::move(mean)), _components(std::move(components)), _explained_variance(std::move(explained_variance))
{
    if (_components.cols() != _mean.size() || _explained_variance.size() != _components.rows())
        throw ContractViolation("PcaModel: inconsistent shapes");
}

Vector PcaModel::project(std::span<const double> sensory) const
{
    if (sensory.size() != input_dim())
        throw ContractViolation("PcaModel::project: input dimensionality mismatch");
    Eigen::Map<const Eigen::VectorXd> x(sensory.data(), static_cast<Eigen::Index>(sensory.size()));
    const Eigen::VectorXd z = _components * (x - _mean);
    return Vector(z.data(), z.data() + z.size());
}

Vector PcaModel::reconstruct(std::span<const double> latent) const
{
    if (latent.size() != latent_dim())
        throw ContractViolation("PcaModel::reconstruct: latent dimensionality mismatch");
    Eigen::Map<const Eigen::VectorXd> z(latent.data(), static_cast<Eigen::Index>(latent.size()));
    const Eigen::VectorXd x = _mean + _components.transpose() * z;
    return Vector(x.data(), x.data() + x.size());
}

Eigen::MatrixXd PcaModel::project_all(const Dataset& data) const
{
    return (data.rowwise() - _mean.transpose()) * _components.transpose();
}

Dataset PcaModel::reconstruct_all(const Dataset& data) const
{
    Dataset out = (project_all(data) * _components).rowwise() + _mean.transpose();
    return out;
}

nlohmann::json PcaModel::to_json() const
{
    nlohmann::json comps = nlohmann::json::array();
    for (Eigen::Index r = 0; r < _components.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(_components.cols()));
        for (Eigen::Index c = 0; c < _components.cols(); ++c)
            row[static_cast<std::size_t>(c)] = _components(r, c);
        comps.push_back(row);
    }
    return {
        {"kind", "pca"},
        {"architecture", {{"input_dim", input_dim()}, {"latent_dim", latent_dim()}}},
        {"mean", std::vector<double>(_mean.data(), _mean.data() + _mean.size())},
        {"components", comps},
        {"explained_variance",
            std::vector<double>(_explained_variance.data(), _explained_variance.data() + _explained_variance.size())},
        {"total_variance", _total_variance},
    };
}

PcaModel PcaModel::from_json(const nlohmann::json& j)
{
    if (j.at("kind") != "pca")
        throw ContractViolation("PcaModel::from_json: kind is not pca");
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto comps = j.at("components").get<std::vector<std::vector<double>>>();
    const auto ev = j.at("explained_variance").get<std::vector<double>>();
    Eigen::MatrixXd c(static_cast<Eigen::Index>(comps.size()), static_cast<Eigen::Index>(mean.size()));
    for (std::size_t r = 0; r < comps.size(); ++r) {
        if (comps[r].size() != mean.size())
            throw ContractViolation("PcaModel::from_json: component length mismatch");
        for (std::size_t k = 0; k < mean.size(); ++k)
            c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = comps[r][k];
    }
    PcaModel m(Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size())), c,
        Eigen::Map<const Eigen::VectorXd>(ev.data(), static_cast<Eigen::Index>(ev.size())));
    m._total_variance = j.value("total_variance", 0.0);
    return m;
}

std::uint64_t PcaModel::fingerprint() const
{
    std::uint64_t h = fnv1a({_mean.data(), static_cast<std::size_t>(_mean.size())});
    h = fnv1a({_components.data(), static_cast<std::size_t>(_components.size())}, h);
    return fnv1a({_explained_variance.data(), static_cast<std::size_t>(_explained_variance.size())}, h);
}

PcaModel pca_fit(const Dataset& data, std::size_t k)
{
    const auto n = static_cast<std::size_t>(data.rows());
    const auto d = data.cols();
    if (k == 0 || n < k)
        throw ContractViolation("pca_fit: need at least k rows");
    if (static_cast<Eigen::Index>(k) > d)
        throw ContractViolation("pca_fit: k exceeds the input dimensionality");
    if (!data.allFinite())
        throw ContractViolation("pca_fit: non-finite data");

    const Eigen::VectorXd mean = data.colwise().mean().transpose();
    const Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
    const double denom = static_cast<double>(std::max<std::size_t>(n - 1, 1));

    Eigen::MatrixXd components(static_cast<Eigen::Index>(k), d);
    Eigen::VectorXd variance(static_cast<Eigen::Index>(k));

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const Eigen::MatrixXd& v = svd.matrixV();
    const Eigen::VectorXd& s = svd.singularValues();
    for (std::size_t i = 0; i < k; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        if (ii < v.cols()) {
            components.row(ii) = v.col(ii).transpose();
            variance(ii) = s(ii) * s(ii) / denom;
        }
        else {
            components.row(ii).setZero();
            variance(ii) = 0.0;
        }
    }
    // Rows beyond the data rank come back as zeros when n < d; complete them
    // into an orthonormal set.
    for (Eigen::Index i = 0; i < components.rows(); ++i) {
        if (components.row(i).norm() > 0.5)
            continue;
        for (Eigen::Index axis = 0; axis < d; ++axis) {
            Eigen::VectorXd cand = Eigen::VectorXd::Unit(d, axis);
            for (Eigen::Index j = 0; j < components.rows(); ++j)
                if (j != i && components.row(j).norm() > 0.5)
                    cand -= components.row(j).dot(cand) * components.row(j).transpose();
            if (cand.norm() > 1e-6) {
                components.row(i) = cand.normalized().transpose();
                break;
            }
        }
    }
    for (Eigen::Index i = 0; i < components.rows(); ++i) {
        Eigen::Index arg = 0;
        components.row(i).cwiseAbs().maxCoeff(&arg);
        if (components(i, arg) < 0.0)
            components.row(i) *= -1.0;
    }

    PcaModel model(mean, components, variance);
    model.set_total_variance(centered.squaredNorm() / denom);
    return model;
}

} // namespace aurora
