#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "trustsc/harness.hpp"
#include "trustsc/metrics.hpp"
#include "trustsc/rng.hpp"

using namespace trustsc;

namespace {

PipelineResult single_trade_pipeline(const Scenario& s) {
    // wraps the worked example's one-trade outcome
    PipelineResult r;
    ClusterRun run;
    run.outcome.p_left = 9;
    run.outcome.p_right = 6;
    run.outcome.right = run_zone_auction(s, fixtures::rscz_requesters(),
                                         fixtures::rscz_executors(), 9);
    r.clusters.push_back(run);
    r.completed.assign(run.outcome.right.trades.size(), true);
    return r;
}

}  // namespace

TEST_CASE("social welfare sums the winning asks") {
    Scenario s = fixtures::reference_market();
    SUBCASE("single-trade outcome") {
        PipelineResult r = single_trade_pipeline(s);
        CHECK(social_welfare(all_trades(r), s) == 6);
    }
    SUBCASE("no trades") { CHECK(social_welfare({}, s) == 0); }
    SUBCASE("three trades") {
        std::vector<Trade> trades = {{43, 4, 12, 9}, {22, 2, 12, 9}, {42, 4, 12, 9}};
        CHECK(social_welfare(trades, s) == 19);  // asks 4 + 6 + 9
    }
}

TEST_CASE("feasible trade volume") {
    CHECK(trade_volume(2, 3) == 2);
    CHECK(trade_volume(0, 7) == 0);
    CHECK(trade_volume(4, 4) == 4);
    CHECK_THROWS_AS(trade_volume(-1, 2), std::invalid_argument);
}

TEST_CASE("aggregate report") {
    Scenario s = fixtures::reference_market();

    SUBCASE("empty outcome") {
        PipelineResult r;
        MetricsReport rep = aggregate_report(r, s);
        CHECK(rep.social_welfare == 0);
        CHECK(rep.total_payment == 0);
        CHECK(rep.trade_count == 0);
        CHECK(!rep.tsr.has_value());
    }
    SUBCASE("single-trade outcome") {
        MetricsReport rep = aggregate_report(single_trade_pipeline(s), s);
        CHECK(rep.total_payment == 9);
        CHECK(rep.total_requester_utility == 1);
        CHECK(rep.total_executor_utility == 3);
        CHECK(rep.social_welfare == 6);
        CHECK(rep.trade_count == 1);
        REQUIRE(rep.tsr.has_value());
        CHECK(*rep.tsr == doctest::Approx(100.0));
    }
    SUBCASE("randomized report equals a recomputation from the trades") {
        ExperimentConfig cfg;
        Scenario rnd = generate_scenario(cfg, 20, 80, 404);
        TrustScParams params{3, 4, 8, 0.7, 1};
        PipelineResult r = run_trust_sc(rnd, params, 404);
        MetricsReport rep = aggregate_report(r, rnd);

        Money payment = 0, welfare = 0, req_u = 0, exec_u = 0;
        for (const Trade& t : all_trades(r)) {
            Money ask = 0;
            for (const Offer& o : rnd.find_executor(t.executor_id)->offers)
                if (o.task_id == t.task_id) ask = o.ask;
            payment += t.price;
            welfare += ask;
            req_u += rnd.task(t.task_id).budget - t.price;
            exec_u += t.price - ask;
        }
        CHECK(rep.total_payment == payment);
        CHECK(rep.social_welfare == welfare);
        CHECK(rep.total_requester_utility == req_u);
        CHECK(rep.total_executor_utility == exec_u);
        CHECK(rep.gains_from_trade == req_u + exec_u);
        // payments collected equal receipts disbursed plus utilities
        CHECK(rep.total_payment == welfare + exec_u);
    }
}

TEST_CASE("splitting concentration against the analytic bound") {
    ExperimentConfig cfg;
    cfg.tasks_per_requester_min = cfg.tasks_per_requester_max = 1;
    cfg.capacity_min = cfg.capacity_max = 1;

    SUBCASE("huge threshold never exceeds") {
        Scenario s = generate_scenario(cfg, 50, 50, 1);
        ConcentrationResult r = splitting_concentration_experiment(s, 17, 500, 1e9, 1);
        CHECK(r.exceedance_rate == doctest::Approx(0.0));
        CHECK(r.retention_rate == doctest::Approx(1.0));
    }
    SUBCASE("unit-demand market at the documented threshold") {
        Scenario s = generate_scenario(cfg, 200, 200, 2);
        REQUIRE(s.task_types * s.per_type_cap == 1);
        ConcentrationResult r = splitting_concentration_experiment(s, 17, 10000, 30.0, 2);
        CHECK(r.bound == doctest::Approx(2.0 * std::exp(-2.0 * 900.0 / 400.0)));
        CHECK(r.exceedance_rate <= r.bound);
        CHECK(r.retention_rate >= r.retention_bound);
    }
    SUBCASE("exceedance never beats the bound across thresholds") {
        Scenario s = generate_scenario(cfg, 100, 100, 3);
        for (double t : {10.0, 15.0, 20.0}) {
            ConcentrationResult r = splitting_concentration_experiment(s, 17, 10000, t, 3);
            CHECK(r.exceedance_rate <= r.bound + 0.01);
        }
    }
}

// Tracks a published trend that does not replicate here: partitioning the
// market can only drop cross-cluster offers and adds split noise, so the
// clustered run never beats the single-cluster run on mean welfare at any
// legal (radius, k) combination (best case is parity at very local offers).
// The assertion stays as stated so the gap is visible on every run.
TEST_CASE("clustering does not cost welfare on average" * doctest::may_fail()) {
    ExperimentConfig cfg;
    const int seeds = 30;
    double with_clusters = 0.0, single = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
        std::uint64_t sd = derive_seed(10, "welfare-trend", seed);
        Scenario s = generate_scenario(cfg, 100, 400, sd);
        TrustScParams clustered{6, 4, 8, 0.7, 1};
        TrustScParams flat{1, 4, 8, 0.7, 1};
        with_clusters += static_cast<double>(
            aggregate_report(run_trust_sc(s, clustered, sd), s).social_welfare);
        single += static_cast<double>(
            aggregate_report(run_trust_sc(s, flat, sd), s).social_welfare);
    }
    MESSAGE("mean welfare clustered=", with_clusters / seeds, " single=", single / seeds);
    CHECK(with_clusters / seeds >= single / seeds);
}
