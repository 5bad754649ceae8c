#include <aurora/descriptor/latent_model.hpp>

#include <cstring>

#include <aurora/descriptor/autoencoder.hpp>
#include <aurora/descriptor/pca.hpp>

namespace aurora {

Eigen::MatrixXd LatentModel::project_all(const Dataset& data) const
{
    Eigen::MatrixXd out(data.rows(), static_cast<Eigen::Index>(latent_dim()));
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        const Vector z = project({data.row(r).data(), static_cast<std::size_t>(data.cols())});
        for (std::size_t c = 0; c < z.size(); ++c)
            out(r, static_cast<Eigen::Index>(c)) = z[c];
    }
    return out;
}

Dataset LatentModel::reconstruct_all(const Dataset& data) const
{
    Dataset out(data.rows(), static_cast<Eigen::Index>(input_dim()));
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        const Vector z = project({data.row(r).data(), static_cast<std::size_t>(data.cols())});
        const Vector x = reconstruct(z);
        for (std::size_t c = 0; c < x.size(); ++c)
            out(r, static_cast<Eigen::Index>(c)) = x[c];
    }
    return out;
}

std::unique_ptr<LatentModel> latent_model_from_json(const nlohmann::json& j)
{
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "pca")
        return std::make_unique<PcaModel>(PcaModel::from_json(j));
    if (kind == "autoencoder")
        return std::make_unique<AeModel>(AeModel::from_json(j));
    throw ContractViolation("latent_model_from_json: unknown model kind '" + kind + "'");
}

std::uint64_t fnv1a(std::span<const double> values, std::uint64_t seed)
{
    std::uint64_t h = seed;
    for (double v : values) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ull;
        }
    }
    return h;
}

} // namespace aurora
