#include <algorithm>

#include "doctest.h"
#include "ergan/errors.hpp"
#include "ergan/eval.hpp"
#include "ergan/fixture.hpp"
#include "ergan/pipeline.hpp"

using namespace ergan;

namespace {

PipelineConfig tiny_config(std::size_t fixed_k, std::uint64_t seed) {
    PipelineConfig cfg;
    cfg.fixed_k = fixed_k;
    cfg.seed = seed;
    cfg.train.epochs = 4;
    cfg.train.batch_size = 16;
    cfg.train.hidden = 2;
    cfg.train.layers = 1;
    cfg.synth_count = 30;
    return cfg;
}

}  // namespace

TEST_CASE("pipeline produces a full artifact set with fixed K") {
    const FixtureSpec spec[] = {{Archetype::MorningPeak, 12, 0.05},
                                {Archetype::EveningPeak, 12, 0.05}};
    Dataset train = fixture_generate(spec, 51);
    PipelineResult r = run_pipeline(train, tiny_config(2, 51));
    CHECK(r.selection.candidates.empty());
    CHECK(r.clusters.k == 2);
    CHECK(r.gans.size() == 2);
    CHECK(r.gans[0].cluster_index == 0);
    CHECK(r.gans[1].cluster_index == 1);
    CHECK(r.plan.total == 30);
    CHECK(r.synthetic.size() == 30);
    // proportion preservation: 12/12 split -> 15/15 allocation
    CHECK(r.plan.allocation == std::vector<std::size_t>{15, 15});
    std::size_t k0 = 0;
    for (const auto& p : r.synthetic.profiles) {
        if (p.source_id.starts_with("synth_k0_")) ++k0;
    }
    CHECK(k0 == 15);
}

TEST_CASE("pipeline selects K by the DB index when not fixed") {
    const FixtureSpec spec[] = {{Archetype::MorningPeak, 14, 0.05},
                                {Archetype::EveningPeak, 14, 0.05},
                                {Archetype::FlatNight, 14, 0.05}};
    Dataset train = fixture_generate(spec, 52);
    PipelineConfig cfg = tiny_config(0, 52);
    cfg.k_lo = 2;
    cfg.k_hi = 5;
    PipelineResult r = run_pipeline(train, cfg);
    CHECK(r.selection.candidates.size() == 4);
    CHECK(r.selection.chosen_k == 3);
    CHECK(r.clusters.k == 3);
    CHECK(r.gans.size() == 3);
}

TEST_CASE("K=1 pipeline is the single-GAN baseline path") {
    const FixtureSpec spec[] = {{Archetype::DualPeak, 16, 0.1}};
    Dataset train = fixture_generate(spec, 53);
    PipelineResult r = run_pipeline(train, tiny_config(1, 53));
    CHECK(r.clusters.k == 1);
    CHECK(r.gans.size() == 1);
    CHECK(std::isnan(r.clusters.db_index));
    CHECK(r.plan.alpha == std::vector<double>{1.0});
    CHECK(r.synthetic.size() == 30);
}

TEST_CASE("pipeline outputs are identical regardless of the job count") {
    const FixtureSpec spec[] = {{Archetype::MorningPeak, 10, 0.05},
                                {Archetype::EveningPeak, 10, 0.05}};
    Dataset train = fixture_generate(spec, 54);
    PipelineConfig cfg = tiny_config(2, 54);
    cfg.jobs = 1;
    PipelineResult serial = run_pipeline(train, cfg);
    cfg.jobs = 4;
    PipelineResult parallel = run_pipeline(train, cfg);
    REQUIRE(serial.synthetic.size() == parallel.synthetic.size());
    for (std::size_t i = 0; i < serial.synthetic.size(); ++i) {
        CHECK(serial.synthetic.profiles[i].values == parallel.synthetic.profiles[i].values);
        CHECK(serial.synthetic.profiles[i].source_id == parallel.synthetic.profiles[i].source_id);
    }
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(serial.gans[k].gen.params == parallel.gans[k].gen.params);
        CHECK(serial.gans[k].loss_history == parallel.gans[k].loss_history);
    }
}

TEST_CASE("pipeline rejects unusable inputs") {
    CHECK_THROWS_AS(run_pipeline(Dataset{}, tiny_config(1, 1)), DataError);
    const FixtureSpec spec[] = {{Archetype::DualPeak, 3, 0.1}};
    Dataset small = fixture_generate(spec, 55);
    PipelineConfig cfg = tiny_config(0, 55);
    cfg.k_lo = 4;
    cfg.k_hi = 6;
    CHECK_THROWS_AS(run_pipeline(small, cfg), DataError);
}
