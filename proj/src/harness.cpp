#include "trustsc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "trustsc/baselines.hpp"
#include "trustsc/metrics.hpp"
#include "trustsc/rng.hpp"

namespace trustsc {

namespace fs = std::filesystem;

void validate(const ExperimentConfig& c) {
    if (c.n_values.empty() || c.m_values.empty() || c.k_values.empty())
        throw std::invalid_argument("n, m and k lists must be non-empty");
    if (c.valuation_min <= 0 || c.valuation_max < c.valuation_min)
        throw std::invalid_argument("bad valuation range");
    if (c.cost_min <= 0 || c.cost_max < c.cost_min)
        throw std::invalid_argument("bad cost range");
    if (c.repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
    if (c.f < 1 || c.g < 1) throw std::invalid_argument("f and g must be at least 1");
    if (c.epsilon < 1) throw std::invalid_argument("epsilon must be at least 1");
    if (c.tasks_per_requester_min < 1 || c.tasks_per_requester_max < c.tasks_per_requester_min)
        throw std::invalid_argument("bad tasks-per-requester range");
    if (c.capacity_min < 1 || c.capacity_max < c.capacity_min)
        throw std::invalid_argument("bad capacity range");
    if (!(c.voter_accuracy > 0.5) || c.voter_accuracy > 1.0)
        throw std::invalid_argument("voter accuracy must lie in (0.5, 1]");
    if (c.region_side <= 0.0) throw std::invalid_argument("region side must be positive");
}

namespace {

std::vector<int> parse_int_list(const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key == "n") c.n_values = parse_int_list(value);
        else if (key == "m") c.m_values = parse_int_list(value);
        else if (key == "k") c.k_values = parse_int_list(value);
        else if (key == "f") c.f = std::stoi(value);
        else if (key == "g") c.g = std::stoi(value);
        else if (key == "voter_accuracy") c.voter_accuracy = std::stod(value);
        else if (key == "epsilon") c.epsilon = std::stoll(value);
        else if (key == "valuation_min") c.valuation_min = std::stoll(value);
        else if (key == "valuation_max") c.valuation_max = std::stoll(value);
        else if (key == "cost_min") c.cost_min = std::stoll(value);
        else if (key == "cost_max") c.cost_max = std::stoll(value);
        else if (key == "repetitions") c.repetitions = std::stoi(value);
        else if (key == "seed") c.seed = std::stoull(value);
        else if (key == "out_dir") c.out_dir = value;
        else if (key == "region_side") c.region_side = std::stod(value);
        else if (key == "tasks_per_requester_min") c.tasks_per_requester_min = std::stoi(value);
        else if (key == "tasks_per_requester_max") c.tasks_per_requester_max = std::stoi(value);
        else if (key == "capacity_min") c.capacity_min = std::stoi(value);
        else if (key == "capacity_max") c.capacity_max = std::stoi(value);
        else if (key == "offer_radius_fraction") c.offer_radius_fraction = std::stod(value);
        else if (key == "quality_min") c.quality_min = std::stod(value);
        else if (key == "quality_max") c.quality_max = std::stod(value);
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Scenario generate_scenario(const ExperimentConfig& c, int n, int m, std::uint64_t seed) {
    validate(c);
    if (n < 1 || m < 1) throw std::invalid_argument("n and m must be at least 1");
    Scenario s;
    s.region_side = c.region_side;
    s.task_types = 1;
    s.per_type_cap = std::max(c.tasks_per_requester_max, c.capacity_max);
    s.seed = seed;

    Rng rng(derive_seed(seed, "scenario-gen"));
    TaskId next_task = 1;
    for (int i = 1; i <= n; ++i) {
        Requester r;
        r.id = static_cast<AgentId>(i);
        int count = static_cast<int>(
            rng.uniform_int(c.tasks_per_requester_min, c.tasks_per_requester_max));
        for (int t = 0; t < count; ++t) {
            Task task;
            task.id = next_task++;
            task.requester_id = r.id;
            task.location = {rng.uniform_real(0.0, c.region_side),
                             rng.uniform_real(0.0, c.region_side)};
            task.budget = rng.uniform_int(c.valuation_min, c.valuation_max);
            r.task_ids.push_back(task.id);
            s.tasks.push_back(task);
        }
        s.requesters.push_back(std::move(r));
    }

    const double radius = c.offer_radius_fraction * c.region_side;
    for (int j = 1; j <= m; ++j) {
        Executor e;
        e.id = static_cast<AgentId>(j);
        e.location = {rng.uniform_real(0.0, c.region_side),
                      rng.uniform_real(0.0, c.region_side)};
        e.capacity = static_cast<int>(rng.uniform_int(c.capacity_min, c.capacity_max));
        e.latent_quality = rng.uniform_real(c.quality_min, c.quality_max);
        std::vector<TaskId> nearby;
        for (const Task& t : s.tasks)
            if (distance(t.location, e.location) <= radius) nearby.push_back(t.id);
        rng.shuffle(nearby);
        int want = std::min<int>(e.capacity, static_cast<int>(nearby.size()));
        std::sort(nearby.begin(), nearby.begin() + want);
        for (int t = 0; t < want; ++t)
            e.offers.push_back({nearby[t], rng.uniform_int(c.cost_min, c.cost_max)});
        s.executors.push_back(std::move(e));
    }
    validate(s);
    return s;
}

MechanismRun trust_sc_mechanism(const Scenario& s, const TrustScParams& params,
                                std::uint64_t seed) {
    PipelineResult pipeline = run_trust_sc(s, params, seed);
    MechanismRun run;
    for (const Trade& t : all_trades(pipeline))
        run.trades.push_back({t.requester_id, t.task_id, t.executor_id, t.task_id,
                              static_cast<double>(t.price), static_cast<double>(t.price)});
    return run;
}

namespace {

struct BidUnit {
    AgentId requester_id;
    TaskId task_id;
};
struct AskUnit {
    AgentId executor_id;
    TaskId task_id;
};

void flatten_units(const Scenario& s, std::vector<BidUnit>& bids, std::vector<AskUnit>& asks) {
    for (const Task& t : s.tasks) bids.push_back({t.requester_id, t.id});
    for (const Executor& e : s.executors)
        for (const Offer& o : e.offers) asks.push_back({e.id, o.task_id});
}

MechanismRun map_baseline(const BaselineOutcome& outcome, const std::vector<BidUnit>& bids,
                          const std::vector<AskUnit>& asks) {
    MechanismRun run;
    for (const BaselineTrade& t : outcome.trades) {
        const BidUnit& b = bids[static_cast<std::size_t>(t.buyer)];
        const AskUnit& a = asks[static_cast<std::size_t>(t.seller)];
        run.trades.push_back({b.requester_id, b.task_id, a.executor_id, a.task_id,
                              t.buyer_pays, t.seller_gets});
    }
    return run;
}

}  // namespace

MechanismRun mcafee_mechanism(const Scenario& s, std::uint64_t) {
    std::vector<BidUnit> bids;
    std::vector<AskUnit> asks;
    flatten_units(s, bids, asks);
    return map_baseline(mcafee(flatten(s)), bids, asks);
}

MechanismRun posted_price_mechanism(const Scenario& s, Money price, std::uint64_t) {
    std::vector<BidUnit> bids;
    std::vector<AskUnit> asks;
    flatten_units(s, bids, asks);
    return map_baseline(posted_price(flatten(s), price), bids, asks);
}

MechanismRun muda_mechanism(const Scenario& s, Money epsilon, std::uint64_t seed) {
    std::vector<BidUnit> bids;
    std::vector<AskUnit> asks;
    flatten_units(s, bids, asks);
    return map_baseline(muda_single(flatten(s), epsilon, seed), bids, asks);
}

MechanismRun strawman_pay_as_bid(const Scenario& s, std::uint64_t) {
    std::vector<BidUnit> bids;
    std::vector<AskUnit> asks;
    flatten_units(s, bids, asks);
    SingleTypeMarket market = flatten(s);
    MechanismRun run;
    if (market.bids.empty() || market.asks.empty()) return run;
    Money top_bid = *std::max_element(market.bids.begin(), market.bids.end());
    Money low_ask = *std::min_element(market.asks.begin(), market.asks.end());
    double threshold = (static_cast<double>(top_bid) + static_cast<double>(low_ask)) / 2.0;
    std::vector<int> eligible_buyers, eligible_sellers;
    for (std::size_t i = 0; i < market.bids.size(); ++i)
        if (static_cast<double>(market.bids[i]) >= threshold)
            eligible_buyers.push_back(static_cast<int>(i));
    for (std::size_t i = 0; i < market.asks.size(); ++i)
        if (static_cast<double>(market.asks[i]) <= threshold)
            eligible_sellers.push_back(static_cast<int>(i));
    std::size_t trades = std::min(eligible_buyers.size(), eligible_sellers.size());
    for (std::size_t i = 0; i < trades; ++i) {
        const BidUnit& b = bids[static_cast<std::size_t>(eligible_buyers[i])];
        const AskUnit& a = asks[static_cast<std::size_t>(eligible_sellers[i])];
        run.trades.push_back({b.requester_id, b.task_id, a.executor_id, a.task_id,
                              static_cast<double>(market.bids[eligible_buyers[i]]),
                              static_cast<double>(market.asks[eligible_sellers[i]])});
    }
    return run;
}

void write_mechanism_outcome_csv(std::ostream& out, const std::string& mechanism,
                                 const MechanismRun& run, const Scenario& s) {
    out << "mechanism,cluster_id,zone,task_id,requester_id,executor_id,price,"
           "requester_utility,executor_utility\n";
    for (const GenericTrade& t : run.trades) {
        Money budget = s.task(t.buyer_task).budget;
        Money ask = 0;
        for (const Offer& o : s.find_executor(t.executor_id)->offers)
            if (o.task_id == t.seller_task) ask = o.ask;
        out << mechanism << ",,," << t.buyer_task << ',' << t.requester_id << ','
            << t.executor_id << ',' << t.buyer_pays << ','
            << static_cast<double>(budget) - t.buyer_pays << ','
            << t.seller_gets - static_cast<double>(ask) << '\n';
    }
}

double true_utility(const MechanismRun& run, const Scenario& truth, AgentKind kind, AgentId id) {
    double u = 0.0;
    if (kind == AgentKind::requester) {
        for (const GenericTrade& t : run.trades)
            if (t.requester_id == id)
                u += static_cast<double>(truth.task(t.buyer_task).budget) - t.buyer_pays;
    } else {
        const Executor* e = truth.find_executor(id);
        if (e == nullptr) throw std::invalid_argument("unknown executor");
        for (const GenericTrade& t : run.trades) {
            if (t.executor_id != id) continue;
            Money ask = 0;
            bool found = false;
            for (const Offer& o : e->offers)
                if (o.task_id == t.seller_task) {
                    ask = o.ask;
                    found = true;
                }
            if (!found) throw std::invalid_argument("trade on a task the executor never offered");
            u += t.seller_gets - static_cast<double>(ask);
        }
    }
    return u;
}

namespace {

std::vector<TaskId> report_fields(const Scenario& s, AgentKind kind, AgentId agent) {
    std::vector<TaskId> fields;
    if (kind == AgentKind::requester) {
        const Requester* r = s.find_requester(agent);
        if (r == nullptr) throw std::invalid_argument("unknown requester");
        fields = r->task_ids;
    } else {
        const Executor* e = s.find_executor(agent);
        if (e == nullptr) throw std::invalid_argument("unknown executor");
        for (const Offer& o : e->offers) fields.push_back(o.task_id);
    }
    return fields;
}

Money get_field(const Scenario& s, AgentKind kind, AgentId agent, TaskId field) {
    if (kind == AgentKind::requester) return s.task(field).budget;
    for (const Offer& o : s.find_executor(agent)->offers)
        if (o.task_id == field) return o.ask;
    throw std::invalid_argument("no such offer");
}

void set_field(Scenario& s, AgentKind kind, AgentId agent, TaskId field, Money value) {
    if (kind == AgentKind::requester) {
        for (Task& t : s.tasks)
            if (t.id == field) {
                t.budget = value;
                return;
            }
        throw std::invalid_argument("no such task");
    }
    for (Executor& e : s.executors) {
        if (e.id != agent) continue;
        for (Offer& o : e.offers)
            if (o.task_id == field) {
                o.ask = value;
                return;
            }
    }
    throw std::invalid_argument("no such offer");
}

}  // namespace

std::vector<Deviation> deviation_test(const Scenario& truth, const MechanismFn& mechanism,
                                      AgentKind kind, AgentId agent,
                                      const std::vector<Money>& report_grid,
                                      std::uint64_t seed) {
    std::vector<Deviation> violations;
    const double truthful = true_utility(mechanism(truth, seed), truth, kind, agent);
    const std::vector<TaskId> fields = report_fields(truth, kind, agent);

    auto probe = [&](const std::vector<std::pair<TaskId, Money>>& misreports) {
        bool all_truthful = true;
        for (const auto& [field, value] : misreports)
            all_truthful = all_truthful && value == get_field(truth, kind, agent, field);
        if (all_truthful) return;
        Scenario reported = truth;
        for (const auto& [field, value] : misreports)
            set_field(reported, kind, agent, field, value);
        double u = true_utility(mechanism(reported, seed), truth, kind, agent);
        if (u > truthful + 1e-9) {
            Deviation d;
            d.kind = kind;
            d.agent = agent;
            d.field_task = misreports.front().first;
            d.truthful_value = get_field(truth, kind, agent, misreports.front().first);
            d.misreport = misreports.front().second;
            d.truthful_utility = truthful;
            d.deviant_utility = u;
            violations.push_back(d);
        }
    };

    for (TaskId field : fields)
        for (Money v : report_grid) probe({{field, v}});
    if (fields.size() == 2)
        for (Money v1 : report_grid)
            for (Money v2 : report_grid) probe({{fields[0], v1}, {fields[1], v2}});
    return violations;
}

namespace {

struct Row {
    int n, m, k, rep;
    std::uint64_t seed;
    std::string mechanism;
    double welfare, gains, req_util, exec_util, payment;
    int trades;
    std::string tsr;  // blank when undefined
    std::string intra;
    std::string cluster_ms, select_ms, auction_ms;  // blank for the flat baselines
    double runtime_ms;
};

std::string row_csv(const Row& r) {
    std::ostringstream os;
    os << r.n << ',' << r.m << ',' << r.k << ',' << r.rep << ',' << r.seed << ','
       << r.mechanism << ',' << r.welfare << ',' << r.gains << ',' << r.req_util << ','
       << r.exec_util << ',' << r.payment << ',' << r.trades << ',' << r.tsr << ','
       << r.intra << ',' << r.cluster_ms << ',' << r.select_ms << ',' << r.auction_ms << ','
       << r.runtime_ms;
    return os.str();
}

const char* kReportHeader =
    "n,m,k,rep,seed,mechanism,social_welfare,gains_from_trade,requester_utility,"
    "executor_utility,total_payment,trades,tsr,avg_intra_cluster_distance,cluster_ms,"
    "select_ms,auction_ms,runtime_ms";

Row baseline_row(const Scenario& s, const MechanismRun& run, const char* name, int n, int m,
                 int k, int rep, std::uint64_t seed, double runtime_ms) {
    Row row{};
    row.n = n;
    row.m = m;
    row.k = k;
    row.rep = rep;
    row.seed = seed;
    row.mechanism = name;
    for (const GenericTrade& t : run.trades) {
        const Executor* e = s.find_executor(t.executor_id);
        Money ask = 0;
        for (const Offer& o : e->offers)
            if (o.task_id == t.seller_task) ask = o.ask;
        Money budget = s.task(t.buyer_task).budget;
        row.welfare += static_cast<double>(ask);
        row.gains += static_cast<double>(budget) - static_cast<double>(ask);
        row.req_util += static_cast<double>(budget) - t.buyer_pays;
        row.exec_util += t.seller_gets - static_cast<double>(ask);
        row.payment += t.buyer_pays;
    }
    row.trades = static_cast<int>(run.trades.size());
    row.runtime_ms = runtime_ms;
    return row;
}

bool check_ir_and_balance(const Scenario& s, const PipelineResult& result, std::string& why) {
    Money paid = 0, received = 0;
    for (const ClusterRun& run : result.clusters) {
        for (const auto& [id, u] : run.outcome.requester_utilities)
            if (u < 0) {
                why = "requester " + std::to_string(id) + " has negative utility";
                return false;
            }
        for (const auto& [id, u] : run.outcome.executor_utilities)
            if (u < 0) {
                why = "executor " + std::to_string(id) + " has negative utility";
                return false;
            }
        for (const ZoneOutcome* zone : {&run.outcome.left, &run.outcome.right})
            for (const Trade& t : zone->trades) {
                paid += t.price;
                received += t.price;
                if (s.task(t.task_id).budget < t.price) {
                    why = "trade above budget on task " + std::to_string(t.task_id);
                    return false;
                }
                Money ask = -1;
                for (const Offer& o : s.find_executor(t.executor_id)->offers)
                    if (o.task_id == t.task_id) ask = o.ask;
                if (ask < 0 || ask > t.price) {
                    why = "trade below ask on task " + std::to_string(t.task_id);
                    return false;
                }
            }
    }
    if (paid != received) {
        why = "payments and receipts differ";
        return false;
    }
    return true;
}

class AtomicFile {
public:
    AtomicFile(const fs::path& target) : target_(target), tmp_(target) {
        tmp_ += ".tmp";
        out_.open(tmp_, std::ios::binary | std::ios::trunc);
    }
    std::ofstream& stream() { return out_; }
    bool commit() {
        out_.close();
        std::error_code ec;
        fs::rename(tmp_, target_, ec);
        return !ec;
    }

private:
    fs::path target_;
    fs::path tmp_;
    std::ofstream out_;
};

void write_plot_scripts(const fs::path& dir) {
    struct Script {
        const char* file;
        const char* body;
    };
    const Script scripts[] = {
        {"welfare_vs_m.gp",
         "set datafile separator ','\n"
         "set xlabel 'task executors'\nset ylabel 'social welfare'\n"
         "set terminal pngcairo size 800,600\nset output 'welfare_vs_m.png'\n"
         "plot 'report.csv' skip 1 using 2:(strcol(6) eq 'trust-sc' ? $7 : 1/0) with points title 'trust-sc', \\\n"
         "     'report.csv' skip 1 using 2:(strcol(6) eq 'mcafee' ? $7 : 1/0) with points title 'mcafee'\n"},
        {"payment_vs_m.gp",
         "set datafile separator ','\n"
         "set xlabel 'task executors'\nset ylabel 'total payment'\n"
         "set terminal pngcairo size 800,600\nset output 'payment_vs_m.png'\n"
         "plot 'report.csv' skip 1 using 2:(strcol(6) eq 'trust-sc' ? $11 : 1/0) with points title 'trust-sc', \\\n"
         "     'report.csv' skip 1 using 2:(strcol(6) eq 'ppm' ? $11 : 1/0) with points title 'ppm', \\\n"
         "     'report.csv' skip 1 using 2:(strcol(6) eq 'mcafee' ? $11 : 1/0) with points title 'mcafee', \\\n"
         "     'report.csv' skip 1 using 2:(strcol(6) eq 'muda' ? $11 : 1/0) with points title 'muda'\n"},
        {"intra_vs_k.gp",
         "set datafile separator ','\n"
         "set xlabel 'clusters'\nset ylabel 'avg intra-cluster distance'\n"
         "set terminal pngcairo size 800,600\nset output 'intra_vs_k.png'\n"
         "plot 'report.csv' skip 1 using 3:(strcol(6) eq 'trust-sc' ? $14 : 1/0) with points notitle\n"},
        {"runtime_vs_agents.gp",
         "set datafile separator ','\n"
         "set xlabel 'agents (n+m)'\nset ylabel 'runtime (ms)'\n"
         "set terminal pngcairo size 800,600\nset output 'runtime_vs_agents.png'\n"
         "plot 'report.csv' skip 1 using ($1+$2):(strcol(6) eq 'trust-sc' ? $18 : 1/0) with points title 'trust-sc', \\\n"
         "     'report.csv' skip 1 using ($1+$2):(strcol(6) eq 'mcafee' ? $18 : 1/0) with points title 'mcafee', \\\n"
         "     'report.csv' skip 1 using ($1+$2):(strcol(6) eq 'muda' ? $18 : 1/0) with points title 'muda', \\\n"
         "     'report.csv' skip 1 using ($1+$2):(strcol(6) eq 'ppm' ? $18 : 1/0) with points title 'ppm'\n"},
    };
    for (const Script& s : scripts) {
        std::ofstream out(dir / s.file, std::ios::binary | std::ios::trunc);
        out << s.body;
    }
}

}  // namespace

int run_experiment(const ExperimentConfig& c) {
    validate(c);
    std::error_code ec;
    fs::create_directories(fs::path(c.out_dir) / "cells", ec);
    if (ec) {
        std::fprintf(stderr, "cannot create output directory %s\n", c.out_dir.c_str());
        return 3;
    }

    std::vector<std::string> rows;
    for (int n : c.n_values)
        for (int m : c.m_values)
            for (int k : c.k_values)
                for (int rep = 0; rep < c.repetitions; ++rep) {
                    std::uint64_t cell_seed = derive_seed(
                        derive_seed(derive_seed(derive_seed(c.seed, "n", n), "m", m), "k", k),
                        "rep", rep);
                    std::ostringstream name;
                    name << "cell_n" << n << "_m" << m << "_k" << k << "_r" << rep << ".csv";
                    fs::path cell_path = fs::path(c.out_dir) / "cells" / name.str();

                    if (!fs::exists(cell_path)) {
                        Scenario s = generate_scenario(c, n, m, cell_seed);
                        TrustScParams params{k, c.f, c.g, c.voter_accuracy, c.epsilon};

                        auto t0 = std::chrono::steady_clock::now();
                        PipelineResult pipeline = run_trust_sc(s, params, cell_seed);
                        double trust_ms = std::chrono::duration<double, std::milli>(
                                              std::chrono::steady_clock::now() - t0)
                                              .count();
                        std::string why;
                        if (!check_ir_and_balance(s, pipeline, why)) {
                            std::fprintf(stderr,
                                         "invariant violation in cell n=%d m=%d k=%d rep=%d "
                                         "seed=%llu: %s\n",
                                         n, m, k, rep,
                                         static_cast<unsigned long long>(cell_seed),
                                         why.c_str());
                            return 2;
                        }
                        MetricsReport report = aggregate_report(pipeline, s);

                        AtomicFile cell(cell_path);
                        Row trust_row{};
                        trust_row.n = n;
                        trust_row.m = m;
                        trust_row.k = k;
                        trust_row.rep = rep;
                        trust_row.seed = cell_seed;
                        trust_row.mechanism = "trust-sc";
                        trust_row.welfare = static_cast<double>(report.social_welfare);
                        trust_row.gains = static_cast<double>(report.gains_from_trade);
                        trust_row.req_util = static_cast<double>(report.total_requester_utility);
                        trust_row.exec_util = static_cast<double>(report.total_executor_utility);
                        trust_row.payment = static_cast<double>(report.total_payment);
                        trust_row.trades = report.trade_count;
                        if (report.tsr) trust_row.tsr = std::to_string(*report.tsr);
                        trust_row.intra = std::to_string(report.avg_intra_cluster_distance);
                        trust_row.cluster_ms = std::to_string(report.wall_times.cluster_ms);
                        trust_row.select_ms = std::to_string(report.wall_times.select_ms);
                        trust_row.auction_ms = std::to_string(report.wall_times.auction_ms);
                        trust_row.runtime_ms = trust_ms;
                        cell.stream() << row_csv(trust_row) << '\n';

                        struct Named {
                            const char* name;
                            MechanismRun run;
                            double ms;
                        };
                        std::vector<Named> baselines;
                        auto timed = [&](const char* bname, auto&& fn) {
                            auto b0 = std::chrono::steady_clock::now();
                            MechanismRun r = fn();
                            double ms = std::chrono::duration<double, std::milli>(
                                            std::chrono::steady_clock::now() - b0)
                                            .count();
                            baselines.push_back({bname, std::move(r), ms});
                        };
                        timed("mcafee", [&] { return mcafee_mechanism(s, cell_seed); });
                        timed("muda", [&] { return muda_mechanism(s, c.epsilon, cell_seed); });
                        timed("ppm", [&] {
                            return posted_price_mechanism(s, c.posted_price(), cell_seed);
                        });
                        for (const Named& b : baselines)
                            cell.stream() << row_csv(baseline_row(s, b.run, b.name, n, m, k, rep,
                                                                  cell_seed, b.ms))
                                          << '\n';
                        if (!cell.commit()) {
                            std::fprintf(stderr, "cannot write %s\n", cell_path.string().c_str());
                            return 3;
                        }
                    }

                    std::ifstream in(cell_path);
                    std::string line;
                    while (std::getline(in, line))
                        if (!line.empty()) rows.push_back(line);
                }

    AtomicFile report_file(fs::path(c.out_dir) / "report.csv");
    report_file.stream() << kReportHeader << '\n';
    for (const std::string& r : rows) report_file.stream() << r << '\n';
    if (!report_file.commit()) return 3;

    // per-k summaries: means across repetitions per (n, m, mechanism); the
    // runtime column is a median so scheduler noise cannot skew it
    for (int k : c.k_values) {
        struct Slot {
            int count = 0;
            std::vector<double> sums;
            std::vector<double> runtimes;
        };
        std::map<std::string, Slot> acc;
        for (const std::string& line : rows) {
            std::stringstream ss(line);
            std::string item;
            std::vector<std::string> cols;
            while (std::getline(ss, item, ',')) cols.push_back(item);
            if (std::stoi(cols[2]) != k) continue;
            std::string key = cols[0] + "," + cols[1] + "," + cols[5];
            Slot& slot = acc[key];
            std::vector<double> vals = {std::stod(cols[6]), std::stod(cols[7]),
                                        std::stod(cols[8]), std::stod(cols[9]),
                                        std::stod(cols[10]), std::stod(cols[11])};
            if (slot.count == 0) slot.sums.assign(vals.size(), 0.0);
            for (std::size_t i = 0; i < vals.size(); ++i) slot.sums[i] += vals[i];
            slot.runtimes.push_back(std::stod(cols[17]));
            ++slot.count;
        }
        AtomicFile summary(fs::path(c.out_dir) / ("summary_k" + std::to_string(k) + ".csv"));
        summary.stream() << "n,m,mechanism,social_welfare,gains_from_trade,requester_utility,"
                            "executor_utility,total_payment,trades,median_runtime_ms\n";
        for (auto& [key, slot] : acc) {
            summary.stream() << key;
            for (double v : slot.sums) summary.stream() << ',' << v / slot.count;
            std::sort(slot.runtimes.begin(), slot.runtimes.end());
            summary.stream() << ',' << slot.runtimes[slot.runtimes.size() / 2] << '\n';
        }
        if (!summary.commit()) return 3;
    }

    write_plot_scripts(c.out_dir);
    return 0;
}

}  // namespace trustsc
