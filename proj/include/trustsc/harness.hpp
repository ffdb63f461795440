#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "trustsc/auction.hpp"
#include "trustsc/model.hpp"

namespace trustsc {

struct ExperimentConfig {
    std::vector<int> n_values{50};
    std::vector<int> m_values{200};
    std::vector<int> k_values{4};
    int f = 4;
    int g = 8;
    double voter_accuracy = 0.7;
    Money epsilon = 1;
    Money valuation_min = 8;
    Money valuation_max = 30;
    Money cost_min = 5;
    Money cost_max = 25;
    int repetitions = 30;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    double region_side = 100.0;
    int tasks_per_requester_min = 1;
    int tasks_per_requester_max = 5;
    int capacity_min = 2;
    int capacity_max = 6;
    double offer_radius_fraction = 0.25;  // of the region side
    double quality_min = 0.3;
    double quality_max = 0.95;

    Money posted_price() const {  // midpoint of the valuation and cost ranges
        return (valuation_min + valuation_max + cost_min + cost_max) / 4;
    }
};

void validate(const ExperimentConfig& c);

// Flat key = value text; unknown keys are rejected. Lists are comma separated.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

// Uniform task/executor placement on the region, integer budgets and asks
// from the configured ranges, offers restricted to tasks within the offer
// radius. Pure function of (config, n, m, seed).
Scenario generate_scenario(const ExperimentConfig& c, int n, int m, std::uint64_t seed);

enum class AgentKind { requester, executor };

// Mechanism-agnostic settled trade: prices may be half-units (trade
// reduction), values always resolve against the true scenario.
struct GenericTrade {
    AgentId requester_id = 0;
    TaskId buyer_task = 0;
    AgentId executor_id = 0;
    TaskId seller_task = 0;
    double buyer_pays = 0.0;
    double seller_gets = 0.0;
};

struct MechanismRun {
    std::vector<GenericTrade> trades;
};

using MechanismFn = std::function<MechanismRun(const Scenario& reported, std::uint64_t seed)>;

MechanismRun trust_sc_mechanism(const Scenario& s, const TrustScParams& params,
                                std::uint64_t seed);
MechanismRun mcafee_mechanism(const Scenario& s, std::uint64_t seed);
MechanismRun posted_price_mechanism(const Scenario& s, Money price, std::uint64_t seed);
MechanismRun muda_mechanism(const Scenario& s, Money epsilon, std::uint64_t seed);
// deliberately manipulable: winners pay their own bid at a report-dependent
// threshold; exists so the deviation detector can prove it detects
MechanismRun strawman_pay_as_bid(const Scenario& s, std::uint64_t seed);

double true_utility(const MechanismRun& run, const Scenario& truth, AgentKind kind, AgentId id);

// Trade dump in the pipeline's outcome schema with a mechanism column in
// front; mechanisms without clusters or zones leave those fields blank.
void write_mechanism_outcome_csv(std::ostream& out, const std::string& mechanism,
                                 const MechanismRun& run, const Scenario& s);

struct Deviation {
    AgentKind kind = AgentKind::requester;
    AgentId agent = 0;
    TaskId field_task = 0;       // which budget/ask was misreported
    Money truthful_value = 0;
    Money misreport = 0;
    double truthful_utility = 0.0;
    double deviant_utility = 0.0;
};

// Replays the mechanism (seed held fixed) with every grid misreport of the
// agent's budgets/asks, one field at a time plus joint pairs for two-field
// agents, and returns every strictly profitable deviation.
std::vector<Deviation> deviation_test(const Scenario& truth, const MechanismFn& mechanism,
                                      AgentKind kind, AgentId agent,
                                      const std::vector<Money>& report_grid,
                                      std::uint64_t seed);

// Full sweep over (n, m, k, repetition) cells: runs the mechanism and the
// baselines, writes one CSV per cell (atomically, skipping finished cells),
// then merges report and per-k summary CSVs and emits gnuplot scripts.
// Returns 0, or 2 on an invariant violation, or 3 on an I/O failure.
int run_experiment(const ExperimentConfig& c);

}  // namespace trustsc
