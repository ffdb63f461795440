#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "trustsc/quality.hpp"
#include "trustsc/rng.hpp"

using namespace trustsc;

TEST_CASE("worked voting rounds") {
    auto rounds = fixtures::voting_rounds();

    SUBCASE("first round: clear plurality winner") {
        PreferenceProfile p{rounds[0].candidates, rounds[0].voters, rounds[0].rankings};
        VotingResult r = run_voting_round(p);
        CHECK(r.winner == 4);
        CHECK(r.round_vote_counts.size() == 1);
        CHECK(r.round_vote_counts[0].at(4) == 5);
        CHECK(r.round_vote_counts[0].at(3) == 2);
        CHECK(r.round_vote_counts[0].at(7) == 1);
        CHECK(r.round_vote_counts[0].at(2) == 0);
    }
    SUBCASE("second round") {
        PreferenceProfile p{rounds[1].candidates, rounds[1].voters, rounds[1].rankings};
        VotingResult r = run_voting_round(p);
        CHECK(r.winner == 11);
        CHECK(r.round_vote_counts[0].at(11) == 4);
        CHECK(r.round_vote_counts[0].at(9) == 3);
    }
    SUBCASE("third round: four-way tie resolved at the second depth") {
        PreferenceProfile p{rounds[2].candidates, rounds[2].voters, rounds[2].rankings};
        VotingResult r = run_voting_round(p);
        CHECK(r.winner == 12);
        REQUIRE(r.round_vote_counts.size() == 2);
        for (AgentId c : rounds[2].candidates) CHECK(r.round_vote_counts[0].at(c) == 2);
        CHECK(r.round_vote_counts[1].at(12) == 4);
    }
}

TEST_CASE("single candidate wins regardless of voters") {
    PreferenceProfile p{{9}, {1, 2, 3}, {{9}, {9}, {9}}};
    CHECK(run_voting_round(p).winner == 9);
}

TEST_CASE("malformed rankings are rejected") {
    PreferenceProfile p{{1, 2}, {5}, {{1, 1}}};
    CHECK_THROWS_AS(run_voting_round(p), std::invalid_argument);
    PreferenceProfile q{{1, 2}, {5}, {{1}}};
    CHECK_THROWS_AS(run_voting_round(q), std::invalid_argument);
}

TEST_CASE("scripted selection reproduces the three-round outcome") {
    std::vector<AgentId> all;
    for (AgentId i = 1; i <= 12; ++i) all.push_back(i);
    fixtures::ScriptedSource source(fixtures::voting_rounds());
    SelectionResult r = select_quality_executors(all, 4, 8, source, 1);
    CHECK(r.winners == std::vector<AgentId>{4, 11, 12});
    CHECK(r.rounds.size() == 3);
    CHECK(r.warnings.empty());
}

TEST_CASE("winner count identity") {
    UniformProfileSource source;
    for (int m = 1; m <= 50; ++m) {
        std::vector<AgentId> ids;
        for (int i = 1; i <= m; ++i) ids.push_back(static_cast<AgentId>(i));
        for (int f = 1; f <= 10; ++f) {
            SelectionResult r = select_quality_executors(ids, f, 3, source,
                                                         derive_seed(7, "wc", m * 100 + f));
            CHECK(static_cast<int>(r.winners.size()) == (m + f - 1) / f);
        }
    }
}

TEST_CASE("degenerate selection rounds") {
    UniformProfileSource source;

    SUBCASE("m = f leaves nobody to vote") {
        std::vector<AgentId> ids = {3, 5, 8};
        SelectionResult r = select_quality_executors(ids, 3, 4, source, 11);
        CHECK(r.winners.size() == 1);
        CHECK(!r.warnings.empty());
    }
    SUBCASE("voter pool smaller than g shrinks with a warning") {
        std::vector<AgentId> ids = {1, 2, 3, 4, 5};
        SelectionResult r = select_quality_executors(ids, 4, 8, source, 11);
        CHECK(r.winners.size() == 2);
        CHECK(!r.warnings.empty());
    }
    SUBCASE("empty pool yields empty winner set") {
        SelectionResult r = select_quality_executors({}, 4, 8, source, 11);
        CHECK(r.winners.empty());
    }
}

TEST_CASE("noisy profile first-place rates") {
    std::vector<std::pair<AgentId, double>> cands = {{1, 0.4}, {2, 0.9}, {3, 0.5}, {4, 0.6}};

    SUBCASE("perfect voters always put the best first") {
        std::vector<AgentId> voters;
        for (int i = 0; i < 500; ++i) voters.push_back(static_cast<AgentId>(100 + i));
        PreferenceProfile p = noisy_profile(cands, voters, 1.0, 3);
        for (const auto& ranking : p.rankings) CHECK(ranking[0] == 2);
    }
    SUBCASE("first-place frequencies match the mixture") {
        const int voters_n = 1'000'000;
        std::vector<AgentId> voters;
        voters.reserve(voters_n);
        for (int i = 0; i < voters_n; ++i) voters.push_back(static_cast<AgentId>(100 + i));
        PreferenceProfile p = noisy_profile(cands, voters, 0.7, 99);
        std::map<AgentId, int> firsts;
        for (const auto& ranking : p.rankings) ++firsts[ranking[0]];
        CHECK(static_cast<double>(firsts[2]) / voters_n ==
              doctest::Approx(0.7).epsilon(0.002 / 0.7));
        for (AgentId other : {1u, 3u, 4u})
            CHECK(static_cast<double>(firsts[other]) / voters_n ==
                  doctest::Approx(0.1).epsilon(0.02));
    }
    SUBCASE("tied quality maxima are rejected") {
        std::vector<std::pair<AgentId, double>> tied = {{1, 0.9}, {2, 0.9}};
        CHECK_THROWS_AS(noisy_profile(tied, {5}, 0.7, 1), std::invalid_argument);
    }
}

TEST_CASE("selection probability estimates") {
    SUBCASE("noiseless voters select the best always") {
        CHECK(estimate_selection_probability(4, 5, 1.0, 500, 1) == doctest::Approx(1.0));
    }
    SUBCASE("monotone in the number of voters") {
        double prev = 0.0;
        for (int g : {3, 5, 7, 9, 11, 13, 15}) {
            double est = estimate_selection_probability(4, g, 0.7, 10000, 42);
            CHECK(est >= prev - 0.015);
            prev = est;
        }
    }
    SUBCASE("estimates dominate the analytic lower bound") {
        for (double p : {0.6, 0.7, 0.8})
            for (int g = 3; g <= 15; ++g) {
                double est = estimate_selection_probability(4, g, p, 10000,
                                                            derive_seed(5, "dom", g));
                double lower = 1.0 - selection_failure_bound(g, p);
                CHECK(est >= lower - 0.02);
            }
    }
}

TEST_CASE("failure bound closed form") {
    CHECK(selection_failure_bound(9, 0.7) == doctest::Approx(std::exp(-0.72)));
    CHECK(1.0 - selection_failure_bound(9, 0.7) == doctest::Approx(0.5132).epsilon(0.001));
    CHECK(1.0 - selection_failure_bound(15, 0.7) == doctest::Approx(0.699).epsilon(0.001));
    CHECK(selection_failure_bound(10, 0.5 + 1e-9) == doctest::Approx(1.0));
    CHECK_THROWS_AS(selection_failure_bound(10, 0.5), std::domain_error);
    CHECK_THROWS_AS(selection_failure_bound(10, 0.3), std::domain_error);
}

TEST_CASE("task success rate") {
    CHECK(task_success_rate(10, 10) == doctest::Approx(100.0));
    CHECK(task_success_rate(0, 10) == doctest::Approx(0.0));
    CHECK_THROWS_AS(task_success_rate(0, 0), std::domain_error);
    CHECK_THROWS_AS(task_success_rate(5, 4), std::invalid_argument);

    // Bernoulli completions concentrate on 100 p_q
    Rng rng(12);
    const int assigned = 10000;
    int completed = 0;
    for (int i = 0; i < assigned; ++i) completed += rng.bernoulli(0.9) ? 1 : 0;
    CHECK(task_success_rate(completed, assigned) == doctest::Approx(90.0).epsilon(1.0 / 90.0));
}

TEST_CASE("exhaustive two-candidate oracle") {
    // all 2^3 first-preference patterns for f = 2, g = 3
    for (int mask = 0; mask < 8; ++mask) {
        PreferenceProfile p;
        p.candidates = {1, 2};
        p.voters = {10, 11, 12};
        for (int v = 0; v < 3; ++v) {
            bool one_first = (mask >> v) & 1;
            p.rankings.push_back(one_first ? std::vector<AgentId>{1, 2}
                                           : std::vector<AgentId>{2, 1});
        }
        int ones = 0;
        for (int v = 0; v < 3; ++v) ones += (mask >> v) & 1;
        AgentId expected = ones >= 2 ? 1 : 2;  // brute-force plurality, no ties with odd g
        CHECK(run_voting_round(p).winner == expected);
    }
}

TEST_CASE("quality-selected pools raise the success rate") {
    const int seeds = 30;
    int ordered = 0;
    double mean_w = 0, mean_rand = 0;
    for (int seed = 0; seed < seeds; ++seed) {
        Rng rng(derive_seed(3, "tsr-order", seed));
        std::map<AgentId, double> quality;
        std::vector<AgentId> pool;
        for (AgentId e = 1; e <= 40; ++e) {
            pool.push_back(e);
            quality[e] = rng.uniform_real(0.3, 0.95);
        }
        QualityProfileSource source(quality, 0.8);
        SelectionResult sel = select_quality_executors(pool, 4, 8, source, seed);

        double pool_mean = 0;
        for (AgentId e : pool) pool_mean += quality[e];
        pool_mean /= pool.size();
        double w_mean = 0;
        for (AgentId e : sel.winners) w_mean += quality[e];
        w_mean /= sel.winners.size();

        // simulate task completion by each pool over the same workload
        const int tasks = 400;
        int done_w = 0, done_rand = 0;
        for (int t = 0; t < tasks; ++t) {
            AgentId w = sel.winners[t % sel.winners.size()];
            AgentId r = pool[rng.uniform_u32(static_cast<std::uint32_t>(pool.size()))];
            done_w += rng.bernoulli(quality[w]) ? 1 : 0;
            done_rand += rng.bernoulli(quality[r]) ? 1 : 0;
        }
        mean_w += task_success_rate(done_w, tasks);
        mean_rand += task_success_rate(done_rand, tasks);
        if (w_mean > pool_mean) ++ordered;
    }
    mean_w /= seeds;
    mean_rand /= seeds;
    CHECK(ordered >= 28);  // voting should lift the winner pool's mean quality
    CHECK(mean_w > mean_rand);
}
