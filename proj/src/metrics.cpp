#include "trustsc/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "trustsc/rng.hpp"

namespace trustsc {

namespace {

Money ask_of(const Scenario& s, AgentId executor_id, TaskId task_id) {
    const Executor* e = s.find_executor(executor_id);
    if (e == nullptr) throw std::invalid_argument("unknown executor");
    for (const Offer& o : e->offers)
        if (o.task_id == task_id) return o.ask;
    throw std::invalid_argument("executor has no offer for task");
}

}  // namespace

Money social_welfare(const std::vector<Trade>& trades, const Scenario& s) {
    Money w = 0;
    for (const Trade& t : trades) w += ask_of(s, t.executor_id, t.task_id);
    return w;
}

std::vector<Trade> all_trades(const PipelineResult& result) {
    std::vector<Trade> out;
    for (const ClusterRun& run : result.clusters) {
        out.insert(out.end(), run.outcome.left.trades.begin(), run.outcome.left.trades.end());
        out.insert(out.end(), run.outcome.right.trades.begin(), run.outcome.right.trades.end());
    }
    return out;
}

MetricsReport aggregate_report(const PipelineResult& result, const Scenario& s) {
    MetricsReport report;
    report.wall_times = result.timings;

    std::vector<Trade> trades = all_trades(result);
    report.trade_count = static_cast<int>(trades.size());
    for (const Trade& t : trades) {
        Money ask = ask_of(s, t.executor_id, t.task_id);
        Money budget = s.task(t.task_id).budget;
        report.social_welfare += ask;
        report.gains_from_trade += budget - ask;
        report.total_requester_utility += budget - t.price;
        report.total_executor_utility += t.price - ask;
        report.total_payment += t.price;
    }

    if (!trades.empty()) {
        int completed = 0;
        for (bool c : result.completed) completed += c ? 1 : 0;
        report.tsr = 100.0 * static_cast<double>(completed) / static_cast<double>(trades.size());
    }

    double dist_sum = 0.0;
    int populated = 0;
    for (const ClusterRun& run : result.clusters) {
        if (run.cluster.task_ids.empty()) continue;
        dist_sum += intra_cluster_distance(run.cluster, s);
        ++populated;
    }
    report.avg_intra_cluster_distance = populated > 0 ? dist_sum / populated : 0.0;
    return report;
}

ConcentrationResult splitting_concentration_experiment(const Scenario& s, Money price,
                                                       int trials, double t,
                                                       std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (t <= 0.0) throw std::invalid_argument("t must be positive");

    // per-agent contributions at the probed price
    std::vector<int> req_demand, exec_supply;
    int total_demand = 0, total_supply = 0;
    for (const Requester& r : s.requesters) {
        int d = demand_of_requester(r, s, price).count;
        req_demand.push_back(d);
        total_demand += d;
    }
    for (const Executor& e : s.executors) {
        int su = supply_of_executor(e, price).count;
        exec_supply.push_back(su);
        total_supply += su;
    }
    const double half_imbalance = static_cast<double>(total_demand - total_supply) / 2.0;
    const int full_volume = std::min(total_demand, total_supply);

    int exceed = 0, retained = 0;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(derive_seed(seed, "conc-trial", static_cast<std::uint64_t>(trial)));
        int dl = 0, sl = 0;
        for (int d : req_demand)
            if (rng.bernoulli(0.5)) dl += d;
        for (int su : exec_supply)
            if (rng.bernoulli(0.5)) sl += su;
        int dr = total_demand - dl;
        int sr = total_supply - sl;
        double gamma_left = static_cast<double>(dl - sl);
        if (std::abs(gamma_left - half_imbalance) >= t) ++exceed;
        int wl = std::min(dl, sl);
        int wr = std::min(dr, sr);
        if (static_cast<double>(wl + wr) >= static_cast<double>(full_volume) - 2.0 * t)
            ++retained;
    }

    const double agents = static_cast<double>(s.requesters.size() + s.executors.size());
    const double unit = static_cast<double>(s.task_types) * static_cast<double>(s.per_type_cap);
    const double expo = std::exp(-2.0 * t * t / (agents * unit * unit));

    ConcentrationResult out;
    out.exceedance_rate = static_cast<double>(exceed) / trials;
    out.bound = 2.0 * expo;
    out.retention_rate = static_cast<double>(retained) / trials;
    out.retention_bound = 1.0 - 4.0 * expo;
    out.full_volume = full_volume;
    return out;
}

}  // namespace trustsc
