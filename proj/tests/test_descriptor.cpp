#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include <aurora/descriptor/autoencoder.hpp>
#include <aurora/descriptor/extractor.hpp>
#include <aurora/descriptor/pca.hpp>
#include <aurora/descriptor/schedule.hpp>
#include <aurora/metrics.hpp>
#include <aurora/tasks/airhockey.hpp>
#include <aurora/tasks/ballistic.hpp>
#include <aurora/variation.hpp>

using namespace aurora;

namespace {
Dataset gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng, double sd = 1.0)
{
    std::normal_distribution<double> n(0.0, sd);
    Dataset d(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            d(i, j) = n(rng);
    return d;
}

Dataset rank_two(Eigen::Index rows, Rng& rng)
{
    const Dataset z = gaussian(rows, 2, rng);
    const Dataset map = gaussian(2, 100, rng);
    Dataset d = z * map;
    d.rowwise() += gaussian(1, 100, rng).row(0);
    return d;
}

Vector row(const Dataset& d, Eigen::Index i) { return Vector(d.row(i).data(), d.row(i).data() + d.cols()); }

Dataset ballistic_sensory(std::size_t n, Rng& rng)
{
    const tasks::BallisticTask task;
    Dataset d(static_cast<Eigen::Index>(n), 100);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = tasks::sensory_vector(task.simulate(random_genotype(task.genotype_bounds(), rng)));
        for (std::size_t j = 0; j < 100; ++j)
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s[j];
    }
    return d;
}

/// Random network whose convolution ignores the input: the reconstruction is
/// then the same for every row.
AeNetwork input_blind(Rng& rng)
{
    using A = AeArchitecture;
    AeNetwork net = AeNetwork::random(rng);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (std::size_t i = A::conv_w; i < A::conv_b; ++i)
        net.params()[static_cast<Eigen::Index>(i)] = 0.0;
    for (std::size_t i = A::conv_b; i < A::enc1_w; ++i)
        net.params()[static_cast<Eigen::Index>(i)] = u(rng);
    for (std::size_t i = A::out_b; i < A::parameter_count; ++i)
        net.params()[static_cast<Eigen::Index>(i)] = u(rng);
    return net;
}
} // namespace

TEST_CASE("pca: rank-1 data concentrates the variance")
{
    Rng rng(1);
    std::normal_distribution<double> n;
    const Dataset dir = gaussian(1, 100, rng);
    Dataset d(200, 100);
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        d.row(i) = 3.0 + n(rng) * dir.row(0).array();
    const PcaModel m = pca_fit(d);
    CHECK(m.explained_variance()[0] / m.total_variance() >= 0.99999);
    const Eigen::VectorXd mean = d.colwise().mean().transpose();
    const auto z = m.project(std::span<const double>(mean.data(), 100));
    CHECK(std::abs(z[0]) < 1e-10);
    CHECK(std::abs(z[1]) < 1e-10);
}

TEST_CASE("pca: projection examples and orthonormal components")
{
    Rng rng(2);
    const Dataset d = gaussian(300, 100, rng);
    const PcaModel m = pca_fit(d);
    const Eigen::MatrixXd gram = m.components() * m.components().transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.explained_variance()[0] >= m.explained_variance()[1]);

    const auto at_mean = m.project(std::span<const double>(m.mean().data(), 100));
    CHECK(std::abs(at_mean[0]) < 1e-12);
    CHECK(std::abs(at_mean[1]) < 1e-12);
    const Eigen::VectorXd shifted = m.mean() + m.components().row(0).transpose();
    const auto e0 = m.project(std::span<const double>(shifted.data(), 100));
    CHECK(e0[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e0[1]) < 1e-12);

    const Vector origin{0.0, 0.0};
    const auto back = m.reconstruct(origin);
    for (std::size_t j = 0; j < 100; ++j)
        CHECK(back[j] == doctest::Approx(m.mean()[static_cast<Eigen::Index>(j)]).epsilon(1e-14));

    for (int t = 0; t < 20; ++t) {
        const Vector x = row(gaussian(1, 100, rng, 5.0), 0);
        const auto z1 = m.project(x);
        const auto z2 = m.project(m.reconstruct(z1));
        CHECK(std::abs(z1[0] - z2[0]) < 1e-10);
        CHECK(std::abs(z1[1] - z2[1]) < 1e-10);
    }
    CHECK_THROWS_AS(pca_fit(gaussian(1, 100, rng)), ContractViolation);
    CHECK_THROWS_AS(m.project(Vector(99, 0.0)), ContractViolation);
}

TEST_CASE("pca: rank-2 data is recovered exactly and beats the mean baseline")
{
    Rng rng(3);
    const Dataset d = rank_two(500, rng);
    const PcaModel m = pca_fit(d);
    CHECK(metrics::reconstruction_rmse(m, d) < 1e-8);
    const Dataset r = m.reconstruct_all(d);
    CHECK((r - d).cwiseAbs().maxCoeff() < 1e-8);

    const Dataset noisy = gaussian(400, 100, rng);
    const PcaModel n = pca_fit(noisy);
    const Eigen::RowVectorXd mean = noisy.colwise().mean();
    const double baseline = std::sqrt((noisy.rowwise() - mean).squaredNorm() / static_cast<double>(noisy.size()));
    CHECK(metrics::reconstruction_rmse(n, noisy) <= baseline);

    // Batch and single-row paths agree.
    const Eigen::MatrixXd z = n.project_all(noisy);
    const auto z5 = n.project(row(noisy, 5));
    CHECK(z(5, 0) == doctest::Approx(z5[0]).epsilon(1e-12));
    CHECK(z(5, 1) == doctest::Approx(z5[1]).epsilon(1e-12));
}

TEST_CASE("pca: json round trip is bit-exact")
{
    Rng rng(4);
    const Dataset d = gaussian(100, 100, rng);
    const PcaModel m = pca_fit(d);
    const auto text = m.to_json().dump();
    const auto back = latent_model_from_json(nlohmann::json::parse(text));
    REQUIRE(back->kind() == "pca");
    CHECK(back->fingerprint() == m.fingerprint());
    const auto a = m.project(row(d, 0));
    const auto b = back->project(row(d, 0));
    CHECK(a == b);
}

TEST_CASE("autoencoder: architecture")
{
    CHECK(AeArchitecture::parameter_count == 5416);
    AeNetwork zero;
    CHECK(zero.params().size() == 5416);
    const auto out = zero.forward(Vector(100, 0.7));
    CHECK(out.latent == Vector{0.0, 0.0});
    CHECK(out.reconstruction == Vector(100, 0.0));
    CHECK_THROWS_AS(AeNetwork(Eigen::VectorXd::Zero(10)), ContractViolation);
    CHECK_THROWS_AS(zero.forward(Vector(99, 0.0)), ContractViolation);
}

TEST_CASE("autoencoder: same seed, same network")
{
    Rng a(9), b(9);
    const AeNetwork n1 = AeNetwork::random(a), n2 = AeNetwork::random(b);
    CHECK(n1.params() == n2.params());
    Rng rng(10);
    const Vector x = row(gaussian(1, 100, rng), 0);
    CHECK(n1.forward(x).reconstruction == n2.forward(x).reconstruction);
}

TEST_CASE("autoencoder: analytic gradient matches central differences")
{
    Rng rng(11);
    AeNetwork net = AeNetwork::random(rng);
    // Non-zero biases so every bias gradient is exercised.
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (auto& p : net.params())
        if (p == 0.0)
            p = u(rng);
    const Dataset batch = gaussian(4, 100, rng);
    const Eigen::VectorXd g = ae_gradients(net, batch);
    REQUIRE(g.size() == 5416);

    const double eps = 1e-5;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        AeNetwork plus = net, minus = net;
        plus.params()[i] += eps;
        minus.params()[i] -= eps;
        const double fd = (plus.loss(batch) - minus.loss(batch)) / (2.0 * eps);
        // Absolute floor for gradients that vanish up to rounding.
        const double rel = std::abs(fd - g[i]) / std::max({std::abs(fd), std::abs(g[i]), 1e-6});
        worst = std::max(worst, rel);
    }
    CHECK(worst < 1e-4);

    Eigen::VectorXd g2;
    const double l = net.loss_and_gradient(batch, g2);
    CHECK(l == doctest::Approx(net.loss(batch)).epsilon(1e-14));
    CHECK((g2 - g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("autoencoder: gradient examples on the output layer")
{
    using A = AeArchitecture;
    Rng rng(12);
    const AeNetwork net = input_blind(rng);
    const Vector r = net.forward(Vector(100, 0.0)).reconstruction;

    Dataset exact(1, 100);
    for (Eigen::Index j = 0; j < 100; ++j)
        exact(0, j) = r[static_cast<std::size_t>(j)];
    CHECK(ae_gradients(net, exact).cwiseAbs().maxCoeff() == 0.0);

    std::normal_distribution<double> n;
    Dataset one(1, 100), two(1, 100);
    for (Eigen::Index j = 0; j < 100; ++j) {
        const double offset = n(rng);
        one(0, j) = r[static_cast<std::size_t>(j)] + offset;
        two(0, j) = r[static_cast<std::size_t>(j)] + 2.0 * offset;
    }
    const Eigen::VectorXd g1 = ae_gradients(net, one).segment(A::out_b, A::output);
    const Eigen::VectorXd g2 = ae_gradients(net, two).segment(A::out_b, A::output);
    CHECK((g2 - 2.0 * g1).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g1 + (one.row(0).transpose() - Eigen::Map<const Eigen::VectorXd>(r.data(), 100))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ae_fit: reports, splits and a constant dataset")
{
    AeTrainConfig cfg;
    cfg.max_epochs = 20;
    cfg.window = 5;
    cfg.curve_interval = 5;
    Rng rng(13);
    const Dataset d = ballistic_sensory(41, rng);
    const AeFitResult fit = ae_fit(d, cfg, rng);
    REQUIRE(fit.reports.size() == 5);
    for (const auto& r : fit.reports) {
        CHECK(r.validation_rows == 10);
        CHECK(r.train_rows == 31);
        CHECK(r.epochs_run <= 20);
        CHECK(std::isfinite(r.final_validation_error));
    }
    CHECK(fit.selected < 5);
    for (const auto& r : fit.reports)
        CHECK(fit.reports[fit.selected].final_validation_error <= r.final_validation_error);

    Dataset constant(16, 100);
    for (Eigen::Index i = 0; i < 16; ++i)
        constant.row(i) = d.row(3);
    cfg.max_epochs = 200;
    cfg.window = 50;
    const AeFitResult c = ae_fit(constant, cfg, rng);
    CHECK(metrics::reconstruction_rmse(c.model, constant) < 1e-3);

    CHECK_THROWS_AS(ae_fit(d.topRows(7), cfg, rng), ContractViolation);
    cfg.repeats = 0;
    CHECK_THROWS_AS(ae_fit(d, cfg, rng), ContractViolation);
}

TEST_CASE("ae_fit: deterministic for a fixed seed, json round trip")
{
    AeTrainConfig cfg;
    cfg.max_epochs = 10;
    cfg.window = 5;
    cfg.repeats = 2;
    Rng data_rng(14);
    const Dataset d = ballistic_sensory(40, data_rng);
    Rng a(15), b(15);
    const AeFitResult f1 = ae_fit(d, cfg, a), f2 = ae_fit(d, cfg, b);
    CHECK(f1.model.fingerprint() == f2.model.fingerprint());

    const auto back = latent_model_from_json(nlohmann::json::parse(f1.model.to_json().dump()));
    REQUIRE(back->kind() == "autoencoder");
    const auto z1 = f1.model.project(row(d, 7));
    const auto z2 = back->project(row(d, 7));
    CHECK(std::abs(z1[0] - z2[0]) < 1e-12);
    CHECK(std::abs(z1[1] - z2[1]) < 1e-12);
    const auto r1 = f1.model.reconstruct(z1);
    const auto r2 = back->reconstruct(z1);
    for (std::size_t j = 0; j < 100; ++j)
        CHECK(std::abs(r1[j] - r2[j]) < 1e-12);

    const Eigen::MatrixXd za = f1.model.project_all(d);
    CHECK(za(7, 0) == doctest::Approx(z1[0]).epsilon(1e-12));
}

TEST_CASE("update schedule")
{
    const UpdateSchedule s;
    CHECK(update_due(s, 0));
    CHECK(update_due(s, 50));
    CHECK_FALSE(update_due(s, 51));
    CHECK(update_due(s, 3150));
    CHECK_FALSE(update_due(s, 4999));
    CHECK(UpdateSchedule::exponential(50, 5000).batches() == s.batches());
    CHECK_THROWS_AS(UpdateSchedule({5, 5}), ContractViolation);
}

TEST_CASE("extractors")
{
    auto ballistic = std::make_shared<tasks::BallisticTask>();
    const Genotype g{{0.8, 6.0}};
    const auto traj = ballistic->simulate(g);
    const auto s = tasks::sensory_vector(traj);

    GenotypeExtractor ge(ballistic->genotype_bounds());
    CHECK(ge.describe(g, s) == g.values);
    CHECK_FALSE(ge.trainable());

    HandCodedExtractor hb(ballistic);
    const auto apex = tasks::ballistic_ground_truth(g, ballistic->config());
    CHECK(hb.describe(g, s) == Vector{apex.x, apex.y});
    // The sampled apex agrees within the sampling bound.
    const auto sampled = tasks::sampled_apex(traj);
    CHECK(std::abs(sampled.y - apex.y) <= 9.81 * (5.0 / 49.0) * (5.0 / 49.0) / 8.0);

    auto hockey = std::make_shared<tasks::AirHockeyTask>();
    HandCodedExtractor hh(hockey);
    const Genotype a{{0.1, 0.2, -0.3, 0.4, -0.5, 0.6, 0.7, -0.8}};
    const auto ht = hockey->simulate(a);
    CHECK(hh.describe(a, tasks::sensory_vector(ht)) == Vector{ht.back().x, ht.back().y});

    SensoryExtractor se(ballistic->sensory_bounds());
    CHECK(se.describe(g, s) == s);
    CHECK(se.dim() == 100);

    CHECK_THROWS_AS(LatentExtractor(ExtractorKind::genotype, LatentMode::incremental), ContractViolation);
    LatentExtractor unfit(ExtractorKind::pca, LatentMode::incremental);
    CHECK_THROWS(unfit.describe(g, s));
    CHECK_THROWS(unfit.descriptor_bounds());
}

TEST_CASE("latent extractor: fit bounds, refits and pretrained models")
{
    Rng rng(16);
    const Dataset d = ballistic_sensory(300, rng);
    LatentExtractor inc(ExtractorKind::pca, LatentMode::incremental);
    CHECK(inc.trainable());
    inc.fit(d, rng);
    CHECK(inc.fit_count() == 1);
    const Eigen::MatrixXd z = inc.model()->project_all(d);
    const Bounds b = inc.descriptor_bounds();
    CHECK(b[0].lower == z.col(0).minCoeff());
    CHECK(b[1].upper == z.col(1).maxCoeff());
    const auto before = inc.model()->fingerprint();
    inc.fit(d.topRows(150), rng);
    CHECK(inc.model()->fingerprint() != before);

    LatentExtractor pre(ExtractorKind::pca, LatentMode::pretrained);
    CHECK_FALSE(pre.trainable());
    pre.set_model(std::make_unique<PcaModel>(pca_fit(d)));
    const auto fp = pre.model()->fingerprint();
    const auto s = row(d, 0);
    const auto first = pre.describe(Genotype{}, s);
    for (int i = 0; i < 100; ++i)
        CHECK(pre.describe(Genotype{}, row(d, i)).size() == 2);
    CHECK(pre.describe(Genotype{}, s) == first);
    CHECK(pre.model()->fingerprint() == fp);
}

TEST_CASE("ae_fit: a warm start begins every repeat from the given network")
{
    Rng rng(21);
    std::normal_distribution<double> n;
    Dataset d(16, 100);
    for (Eigen::Index i = 0; i < d.size(); ++i)
        d.data()[i] = n(rng);
    const AeNetwork init = AeNetwork::random(rng);
    AeTrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.max_epochs = 3;
    cfg.window = 1;
    cfg.repeats = 2;
    const auto fit = ae_fit(d, cfg, rng, &init);
    CHECK(fit.model.network().params() == init.params());

    cfg.learning_rate = 1e-3;
    Rng a(5), b(5);
    const auto cold = ae_fit(d, cfg, a);
    const auto warm = ae_fit(d, cfg, b, &init);
    CHECK(cold.model.network().params() != warm.model.network().params());
}
