#include "trustsc/auction.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <stdexcept>

#include "trustsc/rng.hpp"

namespace trustsc {

namespace {

// The coin for each agent hangs off (seed, id) alone, so no report and no
// list ordering can move anyone across the split.
bool coin_left(std::uint64_t seed, const char* side, AgentId id) {
    Rng rng(derive_seed(seed, side, id));
    return rng.bernoulli(0.5);
}

Money max_budget(const Scenario& s, const std::vector<AgentId>& zone_requesters) {
    Money m = 0;
    for (AgentId rid : zone_requesters) {
        const Requester* r = s.find_requester(rid);
        if (r == nullptr) throw std::invalid_argument("unknown requester in zone");
        for (TaskId tid : r->task_ids) m = std::max(m, s.task(tid).budget);
    }
    return m;
}

struct TaskClaim {
    TaskId task_id;
    AgentId requester_id;
    Money budget;
};

struct OfferClaim {
    AgentId executor_id;
    Money ask;
};

}  // namespace

ZoneAssignment split_market(const std::vector<AgentId>& requesters,
                            const std::vector<AgentId>& executors, std::uint64_t seed) {
    if (requesters.empty() && executors.empty())
        throw std::invalid_argument("cannot split an empty market");
    ZoneAssignment z;
    for (AgentId id : requesters)
        (coin_left(seed, "split-requester", id) ? z.left_requesters : z.right_requesters)
            .push_back(id);
    for (AgentId id : executors)
        (coin_left(seed, "split-executor", id) ? z.left_executors : z.right_executors)
            .push_back(id);
    return z;
}

EquilibriumResult zone_equilibrium_price(const Scenario& s,
                                         const std::vector<AgentId>& zone_requesters,
                                         const std::vector<AgentId>& zone_executors,
                                         Money epsilon) {
    if (epsilon < 1) throw std::invalid_argument("epsilon must be at least one minor unit");
    EquilibriumResult result;
    if (zone_requesters.empty() && zone_executors.empty()) return result;  // price 0, no trajectory

    Money price_cap = max_budget(s, zone_requesters) + epsilon;
    for (Money p = 0;; p += epsilon) {
        int d = 0, su = 0;
        for (AgentId rid : zone_requesters)
            d += demand_of_requester(*s.find_requester(rid), s, p).count;
        for (AgentId eid : zone_executors) {
            const Executor* e = s.find_executor(eid);
            if (e == nullptr) throw std::invalid_argument("unknown executor in zone");
            su += supply_of_executor(*e, p).count;
        }
        result.trajectory.push_back({p, d, su});
        if (su >= d || p > price_cap) break;
    }

    int best_min = -1;
    for (const PricePoint& pt : result.trajectory) {
        int m = std::min(pt.demand, pt.supply);
        if (m > best_min) {  // ties keep the earlier, lower price
            best_min = m;
            result.price = pt.price;
        }
    }
    return result;
}

ZoneDemandSupply cross_zone_demand_supply(const Scenario& s,
                                          const std::vector<AgentId>& zone_requesters,
                                          const std::vector<AgentId>& zone_executors,
                                          Money opposite_price) {
    if (opposite_price < 0) throw std::invalid_argument("negative price");
    ZoneDemandSupply out;
    for (AgentId rid : zone_requesters) {
        const Requester* r = s.find_requester(rid);
        if (r == nullptr) throw std::invalid_argument("unknown requester in zone");
        int c = demand_of_requester(*r, s, opposite_price).count;
        if (c > 0) {
            out.demand += c;
            out.active_requesters.push_back(rid);
        }
    }
    for (AgentId eid : zone_executors) {
        const Executor* e = s.find_executor(eid);
        if (e == nullptr) throw std::invalid_argument("unknown executor in zone");
        int c = supply_of_executor(*e, opposite_price).count;
        if (c > 0) {
            out.supply += c;
            out.active_executors.push_back(eid);
        }
    }
    return out;
}

ZoneOutcome determine_winners_and_payments(const Scenario& s,
                                           const std::vector<AgentId>& zone_requesters,
                                           const std::vector<AgentId>& zone_executors,
                                           Money opposite_price,
                                           const ZoneDemandSupply& snapshot) {
    const Money p = opposite_price;
    ZoneDemandSupply fresh = cross_zone_demand_supply(s, zone_requesters, zone_executors, p);
    if (fresh.demand != snapshot.demand || fresh.supply != snapshot.supply)
        throw std::invalid_argument("demand/supply snapshot does not match the zone state");

    ZoneOutcome out;
    out.demand = snapshot.demand;
    out.supply = snapshot.supply;
    out.price = p;

    // demanded tasks in queue order: ascending requester id, then list order
    std::vector<AgentId> req_sorted = zone_requesters;
    std::sort(req_sorted.begin(), req_sorted.end());
    std::vector<TaskClaim> demanded;
    for (AgentId rid : req_sorted) {
        const Requester* r = s.find_requester(rid);
        if (r == nullptr) throw std::invalid_argument("unknown requester in zone");
        for (TaskId tid : demand_of_requester(*r, s, p).task_ids)
            demanded.push_back({tid, rid, s.task(tid).budget});
    }

    // per-task offers, the smallest executor id first
    std::vector<AgentId> exec_sorted = zone_executors;
    std::sort(exec_sorted.begin(), exec_sorted.end());
    std::map<TaskId, std::vector<OfferClaim>> offered;
    for (AgentId eid : exec_sorted) {
        const Executor* e = s.find_executor(eid);
        if (e == nullptr) throw std::invalid_argument("unknown executor in zone");
        for (TaskId tid : supply_of_executor(*e, p).task_ids) {
            Money ask = 0;
            for (const Offer& o : e->offers)
                if (o.task_id == tid) ask = o.ask;
            offered[tid].push_back({eid, ask});
        }
    }

    // A task trades only when demanded by its owner and offered by someone
    // here. The long side faces the strict price test; the cap mirrors the
    // rationing count (it cannot bind below the matchable volume).
    const bool excess_demand = snapshot.demand > snapshot.supply;
    const bool excess_supply = snapshot.demand < snapshot.supply;
    const int cap = excess_demand  ? snapshot.supply
                    : excess_supply ? snapshot.demand
                                    : snapshot.demand;

    for (const TaskClaim& claim : demanded) {
        if (static_cast<int>(out.trades.size()) >= cap) break;
        if (excess_demand && !(claim.budget > p)) continue;
        auto it = offered.find(claim.task_id);
        if (it == offered.end()) continue;
        const OfferClaim* pick = nullptr;
        for (const OfferClaim& oc : it->second) {
            if (excess_supply && !(oc.ask < p)) continue;
            pick = &oc;
            break;
        }
        if (pick == nullptr) continue;
        out.trades.push_back({claim.task_id, claim.requester_id, pick->executor_id, p});
    }

    std::set<AgentId> wr, we;
    for (const Trade& t : out.trades) {
        wr.insert(t.requester_id);
        we.insert(t.executor_id);
    }
    out.winning_requesters.assign(wr.begin(), wr.end());
    out.winning_executors.assign(we.begin(), we.end());
    return out;
}

ZoneOutcome run_zone_auction(const Scenario& s, const std::vector<AgentId>& zone_requesters,
                             const std::vector<AgentId>& zone_executors, Money opposite_price) {
    ZoneDemandSupply snap =
        cross_zone_demand_supply(s, zone_requesters, zone_executors, opposite_price);
    return determine_winners_and_payments(s, zone_requesters, zone_executors, opposite_price,
                                          snap);
}

namespace {

Money ask_of(const Scenario& s, AgentId executor_id, TaskId task_id) {
    const Executor* e = s.find_executor(executor_id);
    if (e == nullptr) throw std::invalid_argument("unknown executor");
    for (const Offer& o : e->offers)
        if (o.task_id == task_id) return o.ask;
    throw std::invalid_argument("executor has no offer for task");
}

void accumulate_utilities(const Scenario& s, const ZoneOutcome& zone, AuctionOutcome& out) {
    for (const Trade& t : zone.trades) {
        out.requester_utilities[t.requester_id] +=
            requester_utility(s.task(t.task_id).budget, t.price, true);
        out.executor_utilities[t.executor_id] +=
            executor_utility(ask_of(s, t.executor_id, t.task_id), t.price, true);
    }
}

}  // namespace

AuctionOutcome run_cluster_auction(const Scenario& s, const std::vector<AgentId>& requesters,
                                   const std::vector<AgentId>& executors, Money epsilon,
                                   std::uint64_t seed) {
    AuctionOutcome out;
    if (requesters.empty() && executors.empty()) return out;
    out.zones = split_market(requesters, executors, seed);

    out.p_left = zone_equilibrium_price(s, out.zones.left_requesters, out.zones.left_executors,
                                        epsilon)
                     .price;
    out.p_right = zone_equilibrium_price(s, out.zones.right_requesters,
                                         out.zones.right_executors, epsilon)
                      .price;

    // each zone trades at the other zone's price
    out.left = run_zone_auction(s, out.zones.left_requesters, out.zones.left_executors,
                                out.p_right);
    out.right = run_zone_auction(s, out.zones.right_requesters, out.zones.right_executors,
                                 out.p_left);

    for (AgentId rid : requesters) out.requester_utilities[rid] = 0;
    for (AgentId eid : executors) out.executor_utilities[eid] = 0;
    accumulate_utilities(s, out.left, out);
    accumulate_utilities(s, out.right, out);
    return out;
}

namespace {

// Restricts the market to one cluster: only the cluster's tasks are up for
// trade, requesters appear with their in-cluster tasks, attached executors
// keep only offers on in-cluster tasks.
Scenario cluster_view(const Scenario& s, const Cluster& cluster) {
    Scenario view;
    view.region_side = s.region_side;
    view.task_types = s.task_types;
    view.per_type_cap = s.per_type_cap;
    view.seed = s.seed;

    std::set<TaskId> in_cluster(cluster.task_ids.begin(), cluster.task_ids.end());
    for (const Task& t : s.tasks)
        if (in_cluster.count(t.id)) view.tasks.push_back(t);

    for (const Requester& r : s.requesters) {
        Requester rv;
        rv.id = r.id;
        for (TaskId tid : r.task_ids)
            if (in_cluster.count(tid)) rv.task_ids.push_back(tid);
        if (!rv.task_ids.empty()) view.requesters.push_back(std::move(rv));
    }

    std::set<AgentId> attached(cluster.executor_ids.begin(), cluster.executor_ids.end());
    for (const Executor& e : s.executors) {
        if (!attached.count(e.id)) continue;
        Executor ev = e;
        ev.offers.clear();
        for (const Offer& o : e.offers)
            if (in_cluster.count(o.task_id)) ev.offers.push_back(o);
        view.executors.push_back(std::move(ev));
    }
    return view;
}

double elapsed_ms(std::chrono::steady_clock::time_point from) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - from)
        .count();
}

}  // namespace

PipelineResult run_trust_sc(const Scenario& s, const TrustScParams& params, std::uint64_t seed) {
    PipelineResult result;

    auto t0 = std::chrono::steady_clock::now();
    ClusteringResult clustering =
        form_clusters(s.tasks, params.k, derive_seed(seed, "tier1-cluster"));
    attach_executors(clustering.clusters, s.executors);
    result.clustering_iterations = clustering.iterations;
    result.timings.cluster_ms = elapsed_ms(t0);

    std::map<AgentId, double> qualities;
    for (const Executor& e : s.executors) qualities[e.id] = e.latent_quality;
    QualityProfileSource grading(qualities, params.voter_accuracy);

    for (std::size_t c = 0; c < clustering.clusters.size(); ++c) {
        ClusterRun run;
        run.cluster = clustering.clusters[c];
        std::sort(run.cluster.executor_ids.begin(), run.cluster.executor_ids.end());

        auto t1 = std::chrono::steady_clock::now();
        if (!run.cluster.executor_ids.empty())
            run.selection = select_quality_executors(run.cluster.executor_ids, params.f,
                                                     params.g, grading,
                                                     derive_seed(seed, "tier2-select", c));
        result.timings.select_ms += elapsed_ms(t1);

        auto t2 = std::chrono::steady_clock::now();
        Scenario view = cluster_view(s, run.cluster);
        std::vector<AgentId> cluster_requesters;
        for (const Requester& r : view.requesters) cluster_requesters.push_back(r.id);
        std::vector<AgentId> quality_executors = run.selection.winners;
        std::sort(quality_executors.begin(), quality_executors.end());
        if (!cluster_requesters.empty() || !quality_executors.empty())
            run.outcome = run_cluster_auction(view, cluster_requesters, quality_executors,
                                              params.epsilon, derive_seed(seed, "tier3-auction", c));
        result.timings.auction_ms += elapsed_ms(t2);

        result.clusters.push_back(std::move(run));
    }

    // completion draws for the success-rate metric
    Rng completion(derive_seed(seed, "completion"));
    for (const ClusterRun& run : result.clusters) {
        for (const ZoneOutcome* zone : {&run.outcome.left, &run.outcome.right})
            for (const Trade& t : zone->trades) {
                const Executor* e = s.find_executor(t.executor_id);
                result.completed.push_back(completion.bernoulli(e->latent_quality));
            }
    }
    return result;
}

}  // namespace trustsc
