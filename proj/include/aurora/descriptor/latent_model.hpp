#pragma once

#include <memory>
#include <span>
#include <string_view>

#include <json.hpp>

#include <aurora/common.hpp>

namespace aurora {

/// A fitted dimensionality-reduction model: sensory vector <-> latent code.
/// Projection and reconstruction are const and safe to call concurrently.
class LatentModel {
public:
    virtual ~LatentModel() = default;

    virtual std::string_view kind() const = 0;
    virtual std::size_t input_dim() const = 0;
    virtual std::size_t latent_dim() const = 0;

    virtual Vector project(std::span<const double> sensory) const = 0;
    virtual Vector reconstruct(std::span<const double> latent) const = 0;

    /// Latent codes of every row, one row per sample.
    virtual Eigen::MatrixXd project_all(const Dataset& data) const;
    /// Reconstructions (original units) of every row.
    virtual Dataset reconstruct_all(const Dataset& data) const;

    virtual nlohmann::json to_json() const = 0;
    /// Hash of every parameter bit; changes whenever the model does.
    virtual std::uint64_t fingerprint() const = 0;
    virtual std::unique_ptr<LatentModel> clone() const = 0;
};

/// Dispatches on the `kind` tag.
std::unique_ptr<LatentModel> latent_model_from_json(const nlohmann::json& j);

/// FNV-1a over raw bytes, chained through `seed`.
std::uint64_t fnv1a(std::span<const double> values, std::uint64_t seed = 1469598103934665603ull);

} // namespace aurora
