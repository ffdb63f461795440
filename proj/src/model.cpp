#include "trustsc/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace trustsc {

namespace {

const Task* lookup(const std::vector<Task>& tasks, TaskId id) {
    auto it = std::lower_bound(tasks.begin(), tasks.end(), id,
                               [](const Task& t, TaskId v) { return t.id < v; });
    if (it == tasks.end() || it->id != id) return nullptr;
    return &*it;
}

}  // namespace

const Task* Scenario::find_task(TaskId id) const { return lookup(tasks, id); }

const Task& Scenario::task(TaskId id) const {
    const Task* t = find_task(id);
    if (t == nullptr)
        throw std::invalid_argument("unknown task id " + std::to_string(id));
    return *t;
}

const Requester* Scenario::find_requester(AgentId id) const {
    for (const auto& r : requesters)
        if (r.id == id) return &r;
    return nullptr;
}

const Executor* Scenario::find_executor(AgentId id) const {
    for (const auto& e : executors)
        if (e.id == id) return &e;
    return nullptr;
}

void validate(const Scenario& s) {
    if (s.requesters.empty() || s.executors.empty())
        throw std::invalid_argument("scenario needs at least one requester and one executor");
    if (s.task_types < 1 || s.per_type_cap < 1)
        throw std::invalid_argument("task_types and per_type_cap must be positive");
    if (!std::is_sorted(s.tasks.begin(), s.tasks.end(),
                        [](const Task& a, const Task& b) { return a.id < b.id; }))
        throw std::invalid_argument("tasks must be sorted by id");
    std::set<TaskId> task_ids;
    for (const Task& t : s.tasks) {
        if (!task_ids.insert(t.id).second)
            throw std::invalid_argument("duplicate task id " + std::to_string(t.id));
        if (t.budget < 0) throw std::invalid_argument("negative budget");
        if (!std::isfinite(t.location.x) || !std::isfinite(t.location.y))
            throw std::invalid_argument("non-finite task location");
    }
    std::set<AgentId> rids;
    for (const Requester& r : s.requesters) {
        if (!rids.insert(r.id).second)
            throw std::invalid_argument("duplicate requester id");
        if (r.task_ids.empty())
            throw std::invalid_argument("requester without tasks");
        for (TaskId tid : r.task_ids) {
            const Task* t = lookup(s.tasks, tid);
            if (t == nullptr)
                throw std::invalid_argument("requester references unknown task");
            if (t->requester_id != r.id)
                throw std::invalid_argument("task owner mismatch");
        }
    }
    std::set<AgentId> eids;
    for (const Executor& e : s.executors) {
        if (!eids.insert(e.id).second)
            throw std::invalid_argument("duplicate executor id");
        if (e.capacity < 1) throw std::invalid_argument("capacity must be positive");
        if (static_cast<int>(e.offers.size()) > e.capacity)
            throw std::invalid_argument("offer list exceeds capacity");
        std::set<TaskId> seen;
        for (const Offer& o : e.offers) {
            if (lookup(s.tasks, o.task_id) == nullptr)
                throw std::invalid_argument("offer references unknown task");
            if (!seen.insert(o.task_id).second)
                throw std::invalid_argument("duplicate task in offer list");
            if (o.ask < 0) throw std::invalid_argument("negative ask");
        }
    }
}

DemandResult demand_of_requester(const Requester& r, const Scenario& s, Money price) {
    if (price < 0) throw std::invalid_argument("negative price");
    DemandResult out;
    for (TaskId tid : r.task_ids) {
        const Task& t = s.task(tid);
        if (t.budget >= price) out.task_ids.push_back(tid);
    }
    out.count = static_cast<int>(out.task_ids.size());
    return out;
}

DemandResult supply_of_executor(const Executor& e, Money price) {
    if (price < 0) throw std::invalid_argument("negative price");
    DemandResult out;
    for (const Offer& o : e.offers) {
        if (static_cast<int>(out.task_ids.size()) >= e.capacity) break;
        if (o.ask <= price) out.task_ids.push_back(o.task_id);
    }
    out.count = static_cast<int>(out.task_ids.size());
    return out;
}

BundleChoice bundle_demand(const std::vector<Money>& item_values,
                           const std::vector<Money>& item_prices) {
    if (item_values.size() != item_prices.size())
        throw std::invalid_argument("value/price lists differ in length");
    BundleChoice out;
    for (std::size_t i = 0; i < item_values.size(); ++i) {
        if (item_values[i] >= item_prices[i]) {
            out.chosen.push_back(i);
            out.utility += item_values[i] - item_prices[i];
        }
    }
    return out;
}

using json = nlohmann::ordered_json;

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["region"] = {{"side", s.region_side},
                   {"task_types", s.task_types},
                   {"per_type_cap", s.per_type_cap}};
    j["requesters"] = json::array();
    for (const Requester& r : s.requesters)
        j["requesters"].push_back({{"id", r.id}, {"task_ids", r.task_ids}});
    j["executors"] = json::array();
    for (const Executor& e : s.executors) {
        json offers = json::array();
        for (const Offer& o : e.offers)
            offers.push_back({{"task_id", o.task_id}, {"ask", o.ask}});
        j["executors"].push_back({{"id", e.id},
                                  {"location", {{"x", e.location.x}, {"y", e.location.y}}},
                                  {"offers", std::move(offers)},
                                  {"capacity", e.capacity},
                                  {"latent_quality", e.latent_quality}});
    }
    j["tasks"] = json::array();
    for (const Task& t : s.tasks)
        j["tasks"].push_back({{"id", t.id},
                              {"requester_id", t.requester_id},
                              {"location", {{"x", t.location.x}, {"y", t.location.y}}},
                              {"budget", t.budget}});
    j["seed"] = s.seed;
    return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
    json j = json::parse(text);
    Scenario s;
    s.region_side = j.at("region").at("side").get<double>();
    s.task_types = j.at("region").value("task_types", 1);
    s.per_type_cap = j.at("region").value("per_type_cap", 1);
    s.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jr : j.at("requesters")) {
        Requester r;
        r.id = jr.at("id").get<AgentId>();
        r.task_ids = jr.at("task_ids").get<std::vector<TaskId>>();
        s.requesters.push_back(std::move(r));
    }
    for (const auto& je : j.at("executors")) {
        Executor e;
        e.id = je.at("id").get<AgentId>();
        e.location.x = je.at("location").at("x").get<double>();
        e.location.y = je.at("location").at("y").get<double>();
        e.capacity = je.at("capacity").get<int>();
        e.latent_quality = je.at("latent_quality").get<double>();
        for (const auto& jo : je.at("offers"))
            e.offers.push_back({jo.at("task_id").get<TaskId>(), jo.at("ask").get<Money>()});
        s.executors.push_back(std::move(e));
    }
    for (const auto& jt : j.at("tasks")) {
        Task t;
        t.id = jt.at("id").get<TaskId>();
        t.requester_id = jt.at("requester_id").get<AgentId>();
        t.location.x = jt.at("location").at("x").get<double>();
        t.location.y = jt.at("location").at("y").get<double>();
        t.budget = jt.at("budget").get<Money>();
        s.tasks.push_back(std::move(t));
    }
    std::sort(s.tasks.begin(), s.tasks.end(),
              [](const Task& a, const Task& b) { return a.id < b.id; });
    return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << scenario_to_json(s);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return scenario_from_json(ss.str());
}

}  // namespace trustsc
