#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "trustsc/auction.hpp"
#include "trustsc/model.hpp"

namespace trustsc {

struct MetricsReport {
    Money social_welfare = 0;     // sum of winning executors' asks over traded tasks
    Money gains_from_trade = 0;   // sum of (budget - ask) over trades
    Money total_requester_utility = 0;
    Money total_executor_utility = 0;
    Money total_payment = 0;
    int trade_count = 0;
    std::optional<double> tsr;    // empty when nothing was assigned
    double avg_intra_cluster_distance = 0.0;
    PhaseTimings wall_times;
};

Money social_welfare(const std::vector<Trade>& trades, const Scenario& s);

inline int trade_volume(int demand, int supply) {
    if (demand < 0 || supply < 0) throw std::invalid_argument("negative volume");
    return std::min(demand, supply);
}

std::vector<Trade> all_trades(const PipelineResult& result);

MetricsReport aggregate_report(const PipelineResult& result, const Scenario& s);

struct ConcentrationResult {
    double exceedance_rate = 0.0;   // fraction of splits with |imbalance_L - imbalance/2| >= t
    double bound = 0.0;             // 2 exp(-2 t^2 / ((n+m)(chi beta)^2))
    double retention_rate = 0.0;    // fraction with W_L + W_R >= W - 2t
    double retention_bound = 0.0;   // 1 - 4 exp(-2 t^2 / ((n+m)(chi beta)^2))
    int full_volume = 0;            // W at the probed price
};

// Random-splitting concentration probe at a fixed price: repeatedly halve
// the market and compare each half's imbalance and feasible volume against
// the full-market values.
ConcentrationResult splitting_concentration_experiment(const Scenario& s, Money price,
                                                       int trials, double t,
                                                       std::uint64_t seed);

}  // namespace trustsc
