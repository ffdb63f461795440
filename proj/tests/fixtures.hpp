#pragma once

// Shared hand-built market and voting fixtures used across the suites.

#include <vector>

#include "trustsc/model.hpp"
#include "trustsc/quality.hpp"

namespace fixtures {

using namespace trustsc;

// Four requesters with three tasks each and three executors bidding on
// specific tasks. Task ids encode owner and position as 10*i + j.
inline Scenario reference_market() {
    Scenario s;
    s.region_side = 10.0;
    s.task_types = 1;
    s.per_type_cap = 4;
    s.seed = 0;

    struct Row {
        AgentId owner;
        TaskId id;
        Money budget;
    };
    const std::vector<Row> tasks = {
        {1, 11, 12}, {1, 12, 9},  {1, 13, 5},  {2, 21, 15}, {2, 22, 10}, {2, 23, 6},
        {3, 31, 10}, {3, 32, 12}, {3, 33, 4},  {4, 41, 5},  {4, 42, 4},  {4, 43, 7},
    };
    for (const Row& t : tasks) s.tasks.push_back({t.id, t.owner, {0.0, 0.0}, t.budget});
    for (AgentId r = 1; r <= 4; ++r) {
        Requester req;
        req.id = r;
        for (const Row& t : tasks)
            if (t.owner == r) req.task_ids.push_back(t.id);
        s.requesters.push_back(req);
    }

    Executor e4;
    e4.id = 4;
    e4.capacity = 3;
    e4.offers = {{11, 10}, {31, 9}, {33, 9}};
    Executor e11;
    e11.id = 11;
    e11.capacity = 2;
    e11.offers = {{41, 4}, {23, 8}};
    Executor e12;
    e12.id = 12;
    e12.capacity = 4;
    e12.offers = {{21, 10}, {42, 9}, {22, 6}, {43, 4}};
    s.executors = {e4, e11, e12};
    return s;
}

inline std::vector<AgentId> lscz_requesters() { return {1, 3}; }
inline std::vector<AgentId> lscz_executors() { return {4, 11}; }
inline std::vector<AgentId> rscz_requesters() { return {2, 4}; }
inline std::vector<AgentId> rscz_executors() { return {12}; }

// Ten task locations that the clustering example walks through.
inline std::vector<Task> cluster_tasks() {
    const std::vector<Location> pts = {{4, 1}, {3, 3}, {3, 2}, {2, 2}, {1, 5},
                                       {2, 3}, {1, 1}, {3, 5}, {4, 2}, {5, 3}};
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < pts.size(); ++i)
        tasks.push_back({static_cast<TaskId>(i + 1), 1, pts[i], 10});
    return tasks;
}

struct VotingRoundFixture {
    std::vector<AgentId> candidates;
    std::vector<AgentId> voters;
    std::vector<std::vector<AgentId>> rankings;
};

// Three voting rounds over twelve executors with the exact preference lists.
inline std::vector<VotingRoundFixture> voting_rounds() {
    std::vector<VotingRoundFixture> rounds(3);
    rounds[0].candidates = {3, 7, 4, 2};
    rounds[0].voters = {1, 5, 6, 8, 9, 10, 11, 12};
    rounds[0].rankings = {
        {4, 3, 7, 2}, {3, 2, 4, 7}, {4, 3, 7, 2}, {4, 3, 2, 7},
        {3, 7, 4, 2}, {4, 3, 2, 7}, {4, 2, 3, 7}, {7, 4, 2, 3},
    };
    rounds[1].candidates = {9, 8, 10, 11};
    rounds[1].voters = {1, 2, 3, 4, 5, 6, 7, 12};
    rounds[1].rankings = {
        {9, 11, 8, 10}, {11, 9, 8, 10}, {11, 8, 10, 9}, {9, 10, 8, 11},
        {8, 11, 10, 9}, {11, 9, 10, 8}, {9, 10, 8, 11}, {11, 8, 10, 9},
    };
    rounds[2].candidates = {1, 5, 12, 6};
    rounds[2].voters = {2, 3, 4, 7, 8, 9, 10, 11};
    rounds[2].rankings = {
        {12, 6, 5, 1}, {12, 1, 5, 6}, {6, 5, 12, 1}, {5, 12, 1, 6},
        {6, 12, 1, 5}, {1, 6, 5, 12}, {5, 12, 6, 1}, {1, 12, 5, 6},
    };
    return rounds;
}

// Replays the scripted rounds instead of drawing them.
class ScriptedSource : public ProfileSource {
public:
    explicit ScriptedSource(std::vector<VotingRoundFixture> rounds)
        : rounds_(std::move(rounds)) {}

    void pick_round(const std::vector<AgentId>&, const std::vector<AgentId>&, int, int, Rng&,
                    std::vector<AgentId>& candidates,
                    std::vector<AgentId>& voters) const override {
        const VotingRoundFixture& r = rounds_.at(next_);
        candidates = r.candidates;
        voters = r.voters;
    }

    PreferenceProfile make_profile(const std::vector<AgentId>& candidates,
                                   const std::vector<AgentId>& voters, Rng&) const override {
        const VotingRoundFixture& r = rounds_.at(next_++);
        PreferenceProfile p;
        p.candidates = candidates;
        p.voters = voters;
        p.rankings = r.rankings;
        return p;
    }

private:
    std::vector<VotingRoundFixture> rounds_;
    mutable std::size_t next_ = 0;
};

}  // namespace fixtures
