#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace trustsc {

// All prices, budgets, asks and payments are exact integer minor-currency
// units. Utilities are signed differences of these, so they share the type.
using Money = std::int64_t;

using AgentId = std::uint32_t;
using TaskId = std::uint32_t;

struct Location {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Location& a, const Location& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct Task {
    TaskId id = 0;
    AgentId requester_id = 0;
    Location location;
    Money budget = 0;  // requester's private per-task valuation
};

struct Requester {
    AgentId id = 0;
    std::vector<TaskId> task_ids;
};

struct Offer {
    TaskId task_id = 0;
    Money ask = 0;  // minimum acceptable payment
};

struct Executor {
    AgentId id = 0;
    Location location;
    std::vector<Offer> offers;
    int capacity = 1;             // max tasks this executor can take on
    double latent_quality = 1.0;  // simulation-only ground truth in [0, 1]
};

struct Scenario {
    double region_side = 100.0;
    int task_types = 1;    // distinct task types
    int per_type_cap = 1;  // max units of one type an agent can hold
    std::uint64_t seed = 0;
    std::vector<Requester> requesters;
    std::vector<Executor> executors;
    std::vector<Task> tasks;  // kept sorted by id

    const Task& task(TaskId id) const;         // throws std::invalid_argument on unknown id
    const Task* find_task(TaskId id) const;    // nullptr on unknown id
    const Requester* find_requester(AgentId id) const;
    const Executor* find_executor(AgentId id) const;
};

// Referential integrity and field invariants; throws std::invalid_argument.
void validate(const Scenario& s);

struct DemandResult {
    int count = 0;
    std::vector<TaskId> task_ids;
};

// Tasks of this requester worth buying at `price` (budget >= price), in
// task-list order. Realizes the additive-valuation demand oracle.
DemandResult demand_of_requester(const Requester& r, const Scenario& s, Money price);

// Offers of this executor profitable at `price` (ask <= price), truncated to
// capacity, in offer order.
DemandResult supply_of_executor(const Executor& e, Money price);

inline Money requester_utility(Money budget, Money trade_price, bool won) {
    return won ? budget - trade_price : 0;
}

inline Money executor_utility(Money ask, Money trade_price, bool won) {
    return won ? trade_price - ask : 0;
}

struct BundleChoice {
    std::vector<std::size_t> chosen;  // indices into the item lists
    Money utility = 0;
};

// Utility-maximizing bundle under additive valuations: every item with
// value >= price is taken (indifference resolves toward inclusion). Raising
// one item's price never evicts another item, i.e. gross substitutes holds
// by construction.
BundleChoice bundle_demand(const std::vector<Money>& item_values,
                           const std::vector<Money>& item_prices);

// Single-document JSON round trip; field names mirror the structs, money is
// encoded as integers. Deterministic output (ordered keys).
std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace trustsc
