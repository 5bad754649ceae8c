#pragma once

#include <aurora/descriptor/latent_model.hpp>

namespace aurora {

/// Layer geometry of the trajectory auto-encoder.
///
/// Encoder: 1-D convolution over the 50-step, 2-channel input (kernel 5,
/// stride 2, zero padding 2) giving 2 feature maps of length 25, then dense
/// 50 -> 5 and dense 5 -> 2 (latent). Decoder: dense 2 -> 5, transposed
/// convolution reading those 5 units as a 1-channel sequence (kernel 5,
/// stride 5) giving 2 feature maps of length 25, then dense 50 -> 100.
/// Hidden layers use tanh; latent and output are linear.
struct AeArchitecture {
    static constexpr std::size_t steps = kTrajectorySteps;
    static constexpr std::size_t channels = 2;
    static constexpr std::size_t input = steps * channels;
    static constexpr std::size_t kernel = 5;
    static constexpr std::size_t conv_stride = 2;
    static constexpr std::size_t conv_pad = 2;
    static constexpr std::size_t feature_maps = 2;
    static constexpr std::size_t conv_len = 25;
    static constexpr std::size_t conv_out = feature_maps * conv_len;
    static constexpr std::size_t enc_hidden = 5;
    static constexpr std::size_t latent = 2;
    static constexpr std::size_t dec_hidden = 5;
    static constexpr std::size_t deconv_stride = 5;
    static constexpr std::size_t deconv_out = feature_maps * conv_len;
    static constexpr std::size_t output = input;

    // Offsets into the flat parameter vector.
    static constexpr std::size_t conv_w = 0;
    static constexpr std::size_t conv_b = conv_w + feature_maps * channels * kernel;
    static constexpr std::size_t enc1_w = conv_b + feature_maps;
    static constexpr std::size_t enc1_b = enc1_w + enc_hidden * conv_out;
    static constexpr std::size_t enc2_w = enc1_b + enc_hidden;
    static constexpr std::size_t enc2_b = enc2_w + latent * enc_hidden;
    static constexpr std::size_t dec1_w = enc2_b + latent;
    static constexpr std::size_t dec1_b = dec1_w + dec_hidden * latent;
    static constexpr std::size_t deconv_w = dec1_b + dec_hidden;
    static constexpr std::size_t deconv_b = deconv_w + feature_maps * kernel;
    static constexpr std::size_t out_w = deconv_b + feature_maps;
    static constexpr std::size_t out_b = out_w + output * deconv_out;
    static constexpr std::size_t parameter_count = out_b + output;

    static_assert(conv_len * conv_stride == steps);
    static_assert(dec_hidden * deconv_stride == conv_len);
};

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// The raw network, operating on already-standardised inputs.
class AeNetwork {
public:
    using Arch = AeArchitecture;

    /// All-zero parameters.
    AeNetwork();
    explicit AeNetwork(Eigen::VectorXd params);

    /// Glorot-uniform weights, zero biases.
    static AeNetwork random(Rng& rng);

    const Eigen::VectorXd& params() const { return _params; }
    Eigen::VectorXd& params() { return _params; }

    struct Output {
        Vector latent;
        Vector reconstruction;
    };
    Output forward(std::span<const double> x) const;

    /// Latent codes for every row of `x` (rows are samples).
    Eigen::MatrixXd encode(const Dataset& x) const;
    /// Reconstructions for every latent row.
    Dataset decode(const Eigen::MatrixXd& z) const;

    /// 0.5 * mean over rows of ||x - reconstruction(x)||^2.
    double loss(const Dataset& x) const;
    /// Same loss; writes its exact gradient with respect to params() into `grad`.
    double loss_and_gradient(const Dataset& x, Eigen::VectorXd& grad) const;

    struct Workspace;

private:
    void check_finite() const;
    Eigen::VectorXd _params;
};

/// Exact gradient of the mean reconstruction loss for one batch.
Eigen::VectorXd ae_gradients(const AeNetwork& net, const Dataset& batch);

/// Network plus the per-dimension standardisation applied to its inputs.
class AeModel final : public LatentModel {
public:
    AeModel(AeNetwork net, Eigen::VectorXd mean, Eigen::VectorXd scale);

    std::string_view kind() const override { return "autoencoder"; }
    std::size_t input_dim() const override { return AeArchitecture::input; }
    std::size_t latent_dim() const override { return AeArchitecture::latent; }

    Vector project(std::span<const double> sensory) const override;
    Vector reconstruct(std::span<const double> latent) const override;
    Eigen::MatrixXd project_all(const Dataset& data) const override;
    Dataset reconstruct_all(const Dataset& data) const override;

    nlohmann::json to_json() const override;
    static AeModel from_json(const nlohmann::json& j);
    std::uint64_t fingerprint() const override;
    std::unique_ptr<LatentModel> clone() const override { return std::make_unique<AeModel>(*this); }

    const AeNetwork& network() const { return _net; }
    Dataset standardize(const Dataset& data) const;
    const Eigen::VectorXd& mean() const { return _mean; }
    const Eigen::VectorXd& scale() const { return _scale; }

private:
    AeNetwork _net;
    Eigen::VectorXd _mean;
    Eigen::VectorXd _scale;
};

struct AeTrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 20000;
    /// Early stop when the mean validation error of a window of this many
    /// epochs exceeds that of the previous window.
    std::size_t window = 500;
    std::size_t repeats = 5;
    double validation_fraction = 0.25;
    double std_floor = 1e-8;
    /// Epoch interval at which the full training error is recorded.
    std::size_t curve_interval = 100;
    /// Incremental refits start from the previous network instead of a
    /// fresh random one.
    bool warm_start = false;
};

struct TrainReport {
    std::size_t epochs_run = 0;
    double final_train_error = 0.0;
    double final_validation_error = 0.0;
    std::uint64_t split_seed = 0;
    std::size_t train_rows = 0;
    std::size_t validation_rows = 0;
    /// Full training error sampled every `curve_interval` epochs.
    std::vector<double> train_curve;
};

struct AeFitResult {
    AeModel model;
    std::vector<TrainReport> reports;
    std::size_t selected = 0;
};

/// Trains `repeats` networks from fresh initialisations on different
/// train/validation splits and keeps the one with the lowest final
/// validation error. Errors are per-element mean squared errors in
/// standardised units.
/// `init`, when given, replaces the random initial weights of every repeat.
AeFitResult ae_fit(const Dataset& data, const AeTrainConfig& cfg, Rng& rng, const AeNetwork* init = nullptr);

} // namespace aurora
