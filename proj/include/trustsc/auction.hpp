#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "trustsc/clustering.hpp"
#include "trustsc/model.hpp"
#include "trustsc/quality.hpp"

namespace trustsc {

struct ZoneAssignment {
    std::vector<AgentId> left_requesters;
    std::vector<AgentId> left_executors;
    std::vector<AgentId> right_requesters;
    std::vector<AgentId> right_executors;
};

// Independent fair coin per agent; a zone left without one side simply
// produces no trades (the split is never resampled, so the coin pattern
// cannot depend on anyone's report).
ZoneAssignment split_market(const std::vector<AgentId>& requesters,
                            const std::vector<AgentId>& executors, std::uint64_t seed);

struct PricePoint {
    Money price = 0;
    int demand = 0;
    int supply = 0;
};

struct EquilibriumResult {
    Money price = 0;
    std::vector<PricePoint> trajectory;
};

// Scans prices 0, eps, 2*eps, ... until supply >= demand, then returns the
// scanned price maximizing min(demand, supply), ties to the lower price.
// An exact demand = supply crossing wins automatically under this rule.
EquilibriumResult zone_equilibrium_price(const Scenario& s,
                                         const std::vector<AgentId>& zone_requesters,
                                         const std::vector<AgentId>& zone_executors,
                                         Money epsilon);

struct ZoneDemandSupply {
    int demand = 0;
    int supply = 0;
    std::vector<AgentId> active_requesters;
    std::vector<AgentId> active_executors;
};

// Zone-wide demand and supply evaluated at the opposite zone's price.
ZoneDemandSupply cross_zone_demand_supply(const Scenario& s,
                                          const std::vector<AgentId>& zone_requesters,
                                          const std::vector<AgentId>& zone_executors,
                                          Money opposite_price);

struct Trade {
    TaskId task_id = 0;
    AgentId requester_id = 0;
    AgentId executor_id = 0;
    Money price = 0;
};

struct ZoneOutcome {
    std::vector<Trade> trades;
    std::vector<AgentId> winning_requesters;
    std::vector<AgentId> winning_executors;
    int demand = 0;  // at the trading price
    int supply = 0;
    Money price = 0;
};

// Winner determination at the fixed price p: a task can trade only when its
// owner demands it and some zone executor offers it. The short side trades
// weakly feasible; when the zones are unbalanced the long side is rationed
// with a strict price test, queued by ascending agent id (then list order).
// Duplicate offers on one task resolve to the earliest-queued feasible
// executor. Every trade settles at p.
ZoneOutcome determine_winners_and_payments(const Scenario& s,
                                           const std::vector<AgentId>& zone_requesters,
                                           const std::vector<AgentId>& zone_executors,
                                           Money opposite_price,
                                           const ZoneDemandSupply& snapshot);

ZoneOutcome run_zone_auction(const Scenario& s, const std::vector<AgentId>& zone_requesters,
                             const std::vector<AgentId>& zone_executors, Money opposite_price);

struct AuctionOutcome {
    ZoneAssignment zones;
    Money p_left = 0;
    Money p_right = 0;
    ZoneOutcome left;   // trades at p_right
    ZoneOutcome right;  // trades at p_left
    std::map<AgentId, Money> requester_utilities;
    std::map<AgentId, Money> executor_utilities;
};

// Split, price both zones, then trade each zone at the opposite price.
AuctionOutcome run_cluster_auction(const Scenario& s, const std::vector<AgentId>& requesters,
                                   const std::vector<AgentId>& executors, Money epsilon,
                                   std::uint64_t seed);

struct ClusterRun {
    Cluster cluster;
    SelectionResult selection;
    AuctionOutcome outcome;
};

struct PhaseTimings {
    double cluster_ms = 0.0;
    double select_ms = 0.0;
    double auction_ms = 0.0;
};

struct PipelineResult {
    std::vector<ClusterRun> clusters;
    int clustering_iterations = 0;
    PhaseTimings timings;
    // completion draws for the success-rate metric, one flag per trade in
    // cluster-then-zone order (left first)
    std::vector<bool> completed;
};

struct TrustScParams {
    int k = 2;
    int f = 4;
    int g = 8;
    double voter_accuracy = 0.7;
    Money epsilon = 1;
};

// The full three-tier mechanism: cluster tasks and attach executors, keep
// only voting winners, then run the split-market auction per cluster.
PipelineResult run_trust_sc(const Scenario& s, const TrustScParams& params, std::uint64_t seed);

}  // namespace trustsc
