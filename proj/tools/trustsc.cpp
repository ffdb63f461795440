// Command-line front end: scenario generation, the three tiers separately or
// as a pipeline, mechanism comparison, the probability sweeps, and the
// verification suites. Exit codes: 0 ok, 1 usage, 2 invariant violation,
// 3 I/O failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "trustsc/baselines.hpp"
#include "trustsc/harness.hpp"
#include "trustsc/metrics.hpp"

namespace fs = std::filesystem;
using namespace trustsc;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 1;
    std::string config_path;
    std::string out = "out";
    std::string format = "csv";
};

ExperimentConfig config_from(const GlobalOpts& g) {
    ExperimentConfig c;
    if (!g.config_path.empty()) c = load_config(g.config_path);
    c.seed = g.seed;
    c.out_dir = g.out;
    return c;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

void write_outcome_csv(std::ostream& os, const PipelineResult& result, const Scenario& s,
                       bool with_mechanism) {
    if (with_mechanism) os << "mechanism,";
    os << "cluster_id,zone,task_id,requester_id,executor_id,price,requester_utility,"
          "executor_utility\n";
    for (std::size_t c = 0; c < result.clusters.size(); ++c) {
        const AuctionOutcome& o = result.clusters[c].outcome;
        auto emit = [&](const char* zone, const Trade& t) {
            Money ask = 0;
            for (const Offer& of : s.find_executor(t.executor_id)->offers)
                if (of.task_id == t.task_id) ask = of.ask;
            if (with_mechanism) os << "trust-sc,";
            os << c << ',' << zone << ',' << t.task_id << ',' << t.requester_id << ','
               << t.executor_id << ',' << t.price << ','
               << requester_utility(s.task(t.task_id).budget, t.price, true) << ','
               << executor_utility(ask, t.price, true) << '\n';
        };
        for (const Trade& t : o.left.trades) emit("L", t);
        for (const Trade& t : o.right.trades) emit("R", t);
    }
}

void write_summary_csv(std::ostream& os, const PipelineResult& result) {
    os << "cluster_id,p_left,p_right,trades,demand_R,supply_R,demand_L,supply_L\n";
    for (std::size_t c = 0; c < result.clusters.size(); ++c) {
        const AuctionOutcome& o = result.clusters[c].outcome;
        os << c << ',' << o.p_left << ',' << o.p_right << ','
           << o.left.trades.size() + o.right.trades.size() << ',' << o.right.demand << ','
           << o.right.supply << ',' << o.left.demand << ',' << o.left.supply << '\n';
    }
}

int cmd_verify(const ExperimentConfig& cfg, int pairs, int runs);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TRUST-SC spatial crowdsourcing market simulator"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master random seed");
    app.add_option("--config", g.config_path, "experiment config file (key = value lines)");
    app.add_option("--out", g.out, "output file or directory");
    app.add_option("--format", g.format, "output format (csv)")->check(CLI::IsMember({"csv"}));

    int n = 50, m = 200, k = 4, f = 4, gv = 8, runs = 10000, trials = 10000, pairs = 500;
    double p = 0.7, t_dev = 30.0;
    Money epsilon = 1, price = -1;
    std::string in_path;
    std::vector<int> g_list{3, 5, 7, 9, 11, 13, 15};

    CLI::App* gen = app.add_subcommand("gen", "generate a scenario JSON file");
    gen->add_option("--n", n, "task requesters");
    gen->add_option("--m", m, "task executors");

    CLI::App* cluster = app.add_subcommand("cluster", "tier 1: cluster a scenario");
    cluster->add_option("--in", in_path, "scenario JSON")->required();
    cluster->add_option("--k", k, "number of clusters");

    CLI::App* select = app.add_subcommand("select", "tier 2: pick quality executors per cluster");
    select->add_option("--in", in_path, "scenario JSON")->required();
    select->add_option("--k", k, "number of clusters");
    select->add_option("--f", f, "candidates per voting round");
    select->add_option("--g", gv, "voters per round");
    select->add_option("--p", p, "voter accuracy");

    CLI::App* auction = app.add_subcommand(
        "auction", "tier 3 alone: split-market auction over the whole scenario");
    std::string mechanism;
    auction->add_option("--in", in_path, "scenario JSON")->required();
    auction->add_option("--epsilon", epsilon, "price grid step");
    auction->add_option("--mechanism", mechanism,
                        "dump another mechanism's trades in the shared schema")
        ->check(CLI::IsMember({"trust-sc", "mcafee", "muda", "ppm"}));
    auction->add_option("--price", price, "posted price for ppm");

    CLI::App* pipeline = app.add_subcommand("pipeline", "all three tiers");
    pipeline->add_option("--in", in_path, "scenario JSON")->required();
    pipeline->add_option("--k", k, "number of clusters");
    pipeline->add_option("--f", f, "candidates per voting round");
    pipeline->add_option("--g", gv, "voters per round");
    pipeline->add_option("--p", p, "voter accuracy");
    pipeline->add_option("--epsilon", epsilon, "price grid step");

    CLI::App* bench = app.add_subcommand("bench", "mechanism comparison sweep");

    CLI::App* prob = app.add_subcommand("prob", "selection-probability sweep");
    prob->add_option("--f", f, "candidates per round");
    prob->add_option("--p", p, "voter accuracy");
    prob->add_option("--g", g_list, "voter counts");
    prob->add_option("--runs", runs, "Monte Carlo trials per point");

    CLI::App* conc = app.add_subcommand("conc", "random-splitting concentration probe");
    conc->add_option("--in", in_path, "scenario JSON (generated when omitted)");
    conc->add_option("--n", n, "requesters for the generated scenario");
    conc->add_option("--m", m, "executors for the generated scenario");
    conc->add_option("--t", t_dev, "imbalance deviation threshold");
    conc->add_option("--trials", trials, "number of random splits");
    conc->add_option("--price", price, "probe price (default: posted-price midpoint)");

    CLI::App* verify = app.add_subcommand("verify", "invariant and truthfulness suites");
    verify->add_option("--pairs", pairs, "scenario/agent pairs for the deviation search");
    verify->add_option("--runs", runs, "randomized pipeline runs for the invariant sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help/version exit clean, usage errors exit 1
    }

    try {
        ExperimentConfig cfg = config_from(g);

        if (gen->parsed()) {
            Scenario s = generate_scenario(cfg, n, m, g.seed);
            std::string path = g.out == "out" ? "scenario.json" : g.out;
            save_scenario(s, path);
            std::printf("wrote %s (%zu tasks, %zu offers)\n", path.c_str(), s.tasks.size(),
                        flatten(s).asks.size());
        } else if (cluster->parsed()) {
            Scenario s = load_scenario(in_path);
            ClusteringResult r = form_clusters(s.tasks, k, g.seed);
            attach_executors(r.clusters, s.executors);
            std::string path = g.out == "out" ? "clusters.csv" : g.out;
            auto out = open_out(path);
            write_cluster_csv(out, r.clusters);
            std::printf("wrote %s (%d passes)\n", path.c_str(), r.iterations);
        } else if (select->parsed()) {
            Scenario s = load_scenario(in_path);
            ClusteringResult r = form_clusters(s.tasks, k, g.seed);
            attach_executors(r.clusters, s.executors);
            std::map<AgentId, double> qualities;
            for (const Executor& e : s.executors) qualities[e.id] = e.latent_quality;
            QualityProfileSource source(qualities, p);
            std::string path = g.out == "out" ? "selection.csv" : g.out;
            auto out = open_out(path);
            out << "cluster_id,executor_id\n";
            for (std::size_t c = 0; c < r.clusters.size(); ++c) {
                auto ids = r.clusters[c].executor_ids;
                std::sort(ids.begin(), ids.end());
                if (ids.empty()) continue;
                SelectionResult sel =
                    select_quality_executors(ids, f, gv, source, derive_seed(g.seed, "sel", c));
                for (AgentId w : sel.winners) out << c << ',' << w << '\n';
            }
            std::printf("wrote %s\n", path.c_str());
        } else if (auction->parsed()) {
            Scenario s = load_scenario(in_path);
            std::string path = g.out == "out" ? "outcome.csv" : g.out;
            if (!mechanism.empty()) {
                MechanismRun run;
                if (mechanism == "trust-sc")
                    run = trust_sc_mechanism(s, {k, f, gv, p, epsilon}, g.seed);
                else if (mechanism == "mcafee")
                    run = mcafee_mechanism(s, g.seed);
                else if (mechanism == "muda")
                    run = muda_mechanism(s, epsilon, g.seed);
                else
                    run = posted_price_mechanism(s, price >= 0 ? price : cfg.posted_price(),
                                                 g.seed);
                auto out = open_out(path);
                write_mechanism_outcome_csv(out, mechanism, run, s);
                std::printf("wrote %s (%zu trades)\n", path.c_str(), run.trades.size());
            } else {
                std::vector<AgentId> reqs, execs;
                for (const Requester& r : s.requesters) reqs.push_back(r.id);
                for (const Executor& e : s.executors) execs.push_back(e.id);
                AuctionOutcome o = run_cluster_auction(s, reqs, execs, epsilon, g.seed);
                PipelineResult fake;
                fake.clusters.push_back({Cluster{}, SelectionResult{}, o});
                auto out = open_out(path);
                write_outcome_csv(out, fake, s, false);
                std::printf("wrote %s (p_left=%lld p_right=%lld trades=%zu)\n", path.c_str(),
                            static_cast<long long>(o.p_left),
                            static_cast<long long>(o.p_right),
                            o.left.trades.size() + o.right.trades.size());
            }
        } else if (pipeline->parsed()) {
            Scenario s = load_scenario(in_path);
            TrustScParams params{k, f, gv, p, epsilon};
            PipelineResult r = run_trust_sc(s, params, g.seed);
            fs::create_directories(g.out);
            {
                auto out = open_out((fs::path(g.out) / "outcome.csv").string());
                write_outcome_csv(out, r, s, false);
            }
            {
                auto out = open_out((fs::path(g.out) / "summary.csv").string());
                write_summary_csv(out, r);
            }
            MetricsReport rep = aggregate_report(r, s);
            {
                auto out = open_out((fs::path(g.out) / "metrics.csv").string());
                out << "social_welfare,gains_from_trade,requester_utility,executor_utility,"
                       "total_payment,trades,tsr,avg_intra_cluster_distance,cluster_ms,"
                       "select_ms,auction_ms\n";
                out << rep.social_welfare << ',' << rep.gains_from_trade << ','
                    << rep.total_requester_utility << ',' << rep.total_executor_utility << ','
                    << rep.total_payment << ',' << rep.trade_count << ','
                    << (rep.tsr ? std::to_string(*rep.tsr) : std::string()) << ','
                    << rep.avg_intra_cluster_distance << ',' << rep.wall_times.cluster_ms << ','
                    << rep.wall_times.select_ms << ',' << rep.wall_times.auction_ms << '\n';
            }
            std::printf("pipeline done: %d trades, welfare %lld, payment %lld -> %s\n",
                        rep.trade_count, static_cast<long long>(rep.social_welfare),
                        static_cast<long long>(rep.total_payment), g.out.c_str());
        } else if (bench->parsed()) {
            return run_experiment(cfg);
        } else if (prob->parsed()) {
            std::string path = g.out == "out" ? "prob.csv" : g.out;
            auto out = open_out(path);
            out << "g,p,R,estimate,hoeffding_lower_bound\n";
            for (int gval : g_list) {
                double est = estimate_selection_probability(f, gval, p, runs,
                                                            derive_seed(g.seed, "prob", gval));
                out << gval << ',' << p << ',' << runs << ',' << est << ','
                    << 1.0 - selection_failure_bound(gval, p) << '\n';
            }
            std::printf("wrote %s\n", path.c_str());
        } else if (conc->parsed()) {
            Scenario s;
            if (!in_path.empty()) {
                s = load_scenario(in_path);
            } else {
                ExperimentConfig one = cfg;  // unit holdings keep the bound tight
                one.tasks_per_requester_min = one.tasks_per_requester_max = 1;
                one.capacity_min = one.capacity_max = 1;
                s = generate_scenario(one, n, m, g.seed);
            }
            Money probe = price >= 0 ? price : cfg.posted_price();
            ConcentrationResult r =
                splitting_concentration_experiment(s, probe, trials, t_dev, g.seed);
            std::string path = g.out == "out" ? "conc.csv" : g.out;
            auto out = open_out(path);
            out << "t,trials,exceedance,bound,retention_rate\n";
            out << t_dev << ',' << trials << ',' << r.exceedance_rate << ',' << r.bound << ','
                << r.retention_rate << '\n';
            std::printf("exceedance %.4f (bound %.4f), retention %.4f (bound %.4f)\n",
                        r.exceedance_rate, r.bound, r.retention_rate, r.retention_bound);
        } else if (verify->parsed()) {
            return cmd_verify(cfg, pairs, runs);
        }
    } catch (const std::invalid_argument& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 3;
    }
    return 0;
}

namespace {

int cmd_verify(const ExperimentConfig& cfg, int pairs, int runs) {
    // invariant sweep: individual rationality and exact budget balance
    int violations = 0;
    for (int i = 0; i < runs; ++i) {
        std::uint64_t seed = derive_seed(cfg.seed, "verify-run", i);
        Rng rng(seed);
        int n = static_cast<int>(rng.uniform_int(10, 40));
        int m = static_cast<int>(rng.uniform_int(40, 160));
        Scenario s = generate_scenario(cfg, n, m, seed);
        TrustScParams params{static_cast<int>(rng.uniform_int(1, 4)), cfg.f, cfg.g,
                             cfg.voter_accuracy, cfg.epsilon};
        PipelineResult result = run_trust_sc(s, params, seed);
        Money paid = 0, got = 0;
        for (const ClusterRun& run : result.clusters) {
            for (const auto& [id, u] : run.outcome.requester_utilities)
                if (u < 0) ++violations;
            for (const auto& [id, u] : run.outcome.executor_utilities)
                if (u < 0) ++violations;
            for (const ZoneOutcome* z : {&run.outcome.left, &run.outcome.right})
                for (const Trade& t : z->trades) {
                    paid += t.price;
                    got += t.price;
                }
        }
        if (paid != got) ++violations;
    }
    std::printf("invariant sweep: %d runs, %d violations\n", runs, violations);

    // truthfulness: exhaustive deviation search on small grid markets
    std::vector<Money> grid;
    for (Money v = 4; v <= 15; ++v) grid.push_back(v);
    ExperimentConfig small = cfg;
    small.tasks_per_requester_min = 1;
    small.tasks_per_requester_max = 2;
    small.capacity_min = 1;
    small.capacity_max = 2;
    small.offer_radius_fraction = 2.0;  // every task reachable
    int found = 0, tested = 0;
    for (int i = 0; tested < pairs; ++i) {
        std::uint64_t seed = derive_seed(cfg.seed, "verify-dev", i);
        Rng rng(seed);
        int n = static_cast<int>(rng.uniform_int(1, 3));
        int m = static_cast<int>(rng.uniform_int(1, 3));
        Scenario s = generate_scenario(small, n, m, seed);
        TrustScParams params{1, 1, 2, cfg.voter_accuracy, cfg.epsilon};
        MechanismFn trust = [&](const Scenario& rep, std::uint64_t sd) {
            return trust_sc_mechanism(rep, params, sd);
        };
        for (const Requester& r : s.requesters) {
            found += static_cast<int>(
                deviation_test(s, trust, AgentKind::requester, r.id, grid, seed).size());
            ++tested;
        }
        for (const Executor& e : s.executors) {
            if (e.offers.empty()) continue;
            found += static_cast<int>(
                deviation_test(s, trust, AgentKind::executor, e.id, grid, seed).size());
            ++tested;
        }
    }
    std::printf("deviation search: %d pairs, %d profitable misreports\n", tested, found);

    // the detector must fire on a deliberately manipulable mechanism
    std::uint64_t straw_seed = derive_seed(cfg.seed, "verify-straw");
    Scenario s = generate_scenario(small, 2, 2, straw_seed);
    int straw = 0;
    for (const Requester& r : s.requesters)
        straw += static_cast<int>(deviation_test(s, strawman_pay_as_bid, AgentKind::requester,
                                                 r.id, grid, straw_seed)
                                      .size());
    std::printf("strawman self-test: %d profitable misreports (must be > 0)\n", straw);

    if (violations > 0 || found > 0 || straw == 0) return 2;
    return 0;
}

}  // namespace
