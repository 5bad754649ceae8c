#include <doctest.h>

#include <sstream>

#include <aurora/config.hpp>

using namespace aurora;

namespace {
RunConfig parse(const std::string& text)
{
    std::istringstream is(text);
    return parse_config(is);
}
} // namespace

TEST_CASE("config: defaults and overrides")
{
    const RunConfig d = parse("");
    CHECK(d.task == "ballistic");
    CHECK(d.batches == 5000);
    CHECK(d.engine.batch_size == 200);
    CHECK(d.engine.schedule.batches() == UpdateSchedule().batches());
    CHECK(d.ae.max_epochs == 20000);

    const RunConfig c = parse(R"(
# comment
[run]
task = airhockey
variant = pca_inc
batches = 12
seed = 99
batch_size = 8
schedule = 0, 4, 9
spatial_index = false

[curiosity]
penalty = -1.5

[airhockey]
links = 0.1, 0.2, 0.3, 0.4
friction = 0.5

[autoencoder]
max_epochs = 300
window = 30
warm_start = true

[metrics]
diversity_bins = 20

[suite]
variants = hand_coded, ae_inc
)");
    CHECK(c.task == "airhockey");
    CHECK(c.variant == Variant::pca_inc);
    CHECK(c.batches == 12);
    CHECK(c.seed == 99);
    CHECK(c.engine.batch_size == 8);
    CHECK(c.engine.schedule.batches() == std::vector<std::size_t>{0, 4, 9});
    CHECK_FALSE(c.engine.spatial_index);
    CHECK(c.engine.curiosity.penalty == -1.5);
    CHECK(c.airhockey.links[3] == 0.4);
    CHECK(c.airhockey.friction == 0.5);
    CHECK(c.ae.max_epochs == 300);
    CHECK(c.ae.window == 30);
    CHECK(c.ae.warm_start);
    CHECK_FALSE(d.ae.warm_start);
    CHECK(c.metrics.diversity_bins == 20);
    CHECK(c.suite_variants == std::vector<Variant>{Variant::hand_coded, Variant::ae_inc});
}

TEST_CASE("config: write then parse reproduces every setting")
{
    RunConfig c = parse("[run]\ntask = ballistic\nvariant = cvt_blind\nsigma_fraction = 0.0123456789\n[cvt]\nblind_k = 77\ncache_dir = /tmp/x\n[ballistic]\ngravity = 3.7\n");
    std::ostringstream first;
    write_config(first, c);
    const RunConfig back = parse(first.str());
    std::ostringstream second;
    write_config(second, back);
    CHECK(first.str() == second.str());
    CHECK(back.engine.sigma_fraction == 0.0123456789);
    CHECK(back.cvt.blind_k == 77);
    CHECK(back.cvt.cache_dir == "/tmp/x");
    CHECK(back.ballistic.gravity == 3.7);
}

TEST_CASE("config: errors")
{
    CHECK_THROWS_AS(parse("[run]\nbogus = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[nowhere]\nx = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("batches = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[run]\nbatches = many\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[run]\nbatches = -3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[run]\nvariant = magic\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[run]\ntask = chess\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[run]\nspatial_index = maybe\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[airhockey]\nlinks = 0.2, 0.2\n"), std::invalid_argument);
    // Prior knowledge only exists for the ballistic task.
    CHECK_THROWS_AS(parse("[run]\ntask = airhockey\nvariant = pca_pre\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("[run]\ntask = airhockey\nvariant = cvt_prior\n"), std::invalid_argument);
    CHECK_NOTHROW(parse("[run]\ntask = airhockey\nvariant = cvt_blind\n"));
    CHECK_THROWS(load_config("/nonexistent/config.ini"));
}

TEST_CASE("variant names")
{
    for (auto v : {Variant::hand_coded, Variant::genotype, Variant::pca_pre, Variant::pca_inc, Variant::ae_pre,
                   Variant::ae_inc, Variant::cvt_prior, Variant::cvt_blind})
        CHECK(parse_variant(to_string(v)) == v);
    CHECK(needs_prior(Variant::ae_pre));
    CHECK_FALSE(needs_prior(Variant::cvt_blind));
}
