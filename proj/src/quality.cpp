#include "trustsc/quality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trustsc {

VotingResult run_voting_round(const PreferenceProfile& profile) {
    const auto& cands = profile.candidates;
    if (cands.empty()) throw std::invalid_argument("no candidates");
    if (profile.voters.empty()) throw std::invalid_argument("no voters");
    if (profile.rankings.size() != profile.voters.size())
        throw std::invalid_argument("one ranking per voter required");
    for (const auto& ranking : profile.rankings) {
        if (ranking.size() != cands.size())
            throw std::invalid_argument("ranking is not a permutation of the candidates");
        for (AgentId c : cands)
            if (std::find(ranking.begin(), ranking.end(), c) == ranking.end())
                throw std::invalid_argument("ranking is not a permutation of the candidates");
    }

    VotingResult result;
    std::map<AgentId, int> counts;
    for (AgentId c : cands) counts[c] = 0;
    for (const auto& ranking : profile.rankings) ++counts[ranking[0]];
    result.round_vote_counts.push_back(counts);

    int max_votes = 0;
    for (const auto& [id, v] : counts) max_votes = std::max(max_votes, v);
    std::vector<AgentId> tied;
    for (AgentId c : cands)
        if (counts[c] == max_votes) tied.push_back(c);

    // runoff depths: fresh counts among the tied set only
    for (std::size_t depth = 1; tied.size() > 1 && depth < cands.size(); ++depth) {
        std::map<AgentId, int> dc;
        for (AgentId c : tied) dc[c] = 0;
        for (const auto& ranking : profile.rankings) {
            AgentId pick = ranking[depth];
            auto it = dc.find(pick);
            if (it != dc.end()) ++it->second;
        }
        result.round_vote_counts.push_back(dc);
        int m = 0;
        for (const auto& [id, v] : dc) m = std::max(m, v);
        std::vector<AgentId> next;
        for (AgentId c : tied)
            if (dc[c] == m) next.push_back(c);
        tied = std::move(next);
    }

    result.winner = *std::min_element(tied.begin(), tied.end());
    return result;
}

void ProfileSource::pick_round(const std::vector<AgentId>& pool, const std::vector<AgentId>& all,
                               int f, int g, Rng& rng, std::vector<AgentId>& candidates,
                               std::vector<AgentId>& voters) const {
    candidates = rng.sample(pool, static_cast<std::size_t>(f));
    std::vector<AgentId> rest;
    for (AgentId id : all)
        if (std::find(candidates.begin(), candidates.end(), id) == candidates.end())
            rest.push_back(id);
    voters = rng.sample(rest, static_cast<std::size_t>(g));
}

PreferenceProfile UniformProfileSource::make_profile(const std::vector<AgentId>& candidates,
                                                     const std::vector<AgentId>& voters,
                                                     Rng& rng) const {
    PreferenceProfile p;
    p.candidates = candidates;
    p.voters = voters;
    for (std::size_t i = 0; i < voters.size(); ++i) {
        std::vector<AgentId> ranking = candidates;
        rng.shuffle(ranking);
        p.rankings.push_back(std::move(ranking));
    }
    return p;
}

PreferenceProfile QualityProfileSource::make_profile(const std::vector<AgentId>& candidates,
                                                     const std::vector<AgentId>& voters,
                                                     Rng& rng) const {
    std::vector<std::pair<AgentId, double>> with_quality;
    with_quality.reserve(candidates.size());
    for (AgentId c : candidates) {
        auto it = quality_.find(c);
        if (it == quality_.end())
            throw std::invalid_argument("no latent quality for candidate " + std::to_string(c));
        with_quality.emplace_back(c, it->second);
    }
    return noisy_profile(with_quality, voters, accuracy_, rng.next_u64());
}

SelectionResult select_quality_executors(const std::vector<AgentId>& executor_ids, int f, int g,
                                         const ProfileSource& source, std::uint64_t seed) {
    if (f < 1) throw std::invalid_argument("f must be at least 1");
    if (g < 1) throw std::invalid_argument("g must be at least 1");
    SelectionResult result;
    if (executor_ids.empty()) return result;

    Rng rng(derive_seed(seed, "quality-select"));
    std::vector<AgentId> pool = executor_ids;  // still unevaluated
    while (!pool.empty()) {
        SelectionRound round;
        int want = std::min<int>(f, static_cast<int>(pool.size()));
        source.pick_round(pool, executor_ids, want, g, rng, round.candidates, round.voters);

        if (static_cast<int>(round.voters.size()) < g)
            result.warnings.push_back("round " + std::to_string(result.rounds.size() + 1) +
                                      ": only " + std::to_string(round.voters.size()) +
                                      " voters available");

        AgentId winner;
        if (round.voters.empty()) {
            // nobody left to grade the final candidates
            winner = *std::min_element(round.candidates.begin(), round.candidates.end());
            result.warnings.push_back("round " + std::to_string(result.rounds.size() + 1) +
                                      ": no voters, winner by lowest id");
        } else {
            PreferenceProfile profile = source.make_profile(round.candidates, round.voters, rng);
            round.result = run_voting_round(profile);
            winner = round.result.winner;
        }

        result.winners.push_back(winner);
        for (AgentId c : round.candidates)
            pool.erase(std::remove(pool.begin(), pool.end(), c), pool.end());
        result.rounds.push_back(std::move(round));
    }
    return result;
}

PreferenceProfile noisy_profile(const std::vector<std::pair<AgentId, double>>& candidates_with_quality,
                                const std::vector<AgentId>& voters, double p, std::uint64_t seed) {
    if (candidates_with_quality.empty()) throw std::invalid_argument("no candidates");
    std::size_t best = 0;
    int best_count = 1;
    for (std::size_t i = 1; i < candidates_with_quality.size(); ++i) {
        if (candidates_with_quality[i].second > candidates_with_quality[best].second) {
            best = i;
            best_count = 1;
        } else if (candidates_with_quality[i].second == candidates_with_quality[best].second) {
            ++best_count;
        }
    }
    if (best_count > 1 && candidates_with_quality.size() > 1)
        throw std::invalid_argument("latent quality maximum is not unique");

    PreferenceProfile profile;
    for (const auto& [id, q] : candidates_with_quality) profile.candidates.push_back(id);
    profile.voters = voters;
    AgentId star = profile.candidates[best];

    Rng rng(derive_seed(seed, "noisy-profile"));
    std::vector<AgentId> others;
    for (AgentId c : profile.candidates)
        if (c != star) others.push_back(c);

    for (std::size_t v = 0; v < voters.size(); ++v) {
        AgentId first;
        if (others.empty() || rng.bernoulli(p))
            first = star;
        else
            first = others[rng.uniform_u32(static_cast<std::uint32_t>(others.size()))];
        std::vector<AgentId> rest;
        for (AgentId c : profile.candidates)
            if (c != first) rest.push_back(c);
        rng.shuffle(rest);
        std::vector<AgentId> ranking;
        ranking.reserve(profile.candidates.size());
        ranking.push_back(first);
        for (AgentId c : rest) ranking.push_back(c);
        profile.rankings.push_back(std::move(ranking));
    }
    return profile;
}

double estimate_selection_probability(int f, int g, double p, int runs, std::uint64_t seed) {
    if (runs < 1) throw std::invalid_argument("runs must be at least 1");
    if (f < 1 || g < 1) throw std::invalid_argument("f and g must be at least 1");
    int hits = 0;
    for (int trial = 0; trial < runs; ++trial) {
        // each trial gets its own stream, so the estimate is order independent
        Rng rng(derive_seed(seed, "selection-trial", static_cast<std::uint64_t>(trial)));
        // the true best sits at a random id so the lowest-id tie-break has no bias
        std::uint32_t star_pos = rng.uniform_u32(static_cast<std::uint32_t>(f));
        std::vector<std::pair<AgentId, double>> candidates;
        for (int c = 0; c < f; ++c)
            candidates.emplace_back(static_cast<AgentId>(c + 1),
                                    c == static_cast<int>(star_pos) ? 1.0 : 0.5);
        std::vector<AgentId> voters;
        for (int v = 0; v < g; ++v) voters.push_back(static_cast<AgentId>(f + 1 + v));
        PreferenceProfile profile = noisy_profile(candidates, voters, p, rng.next_u64());
        VotingResult res = run_voting_round(profile);
        if (res.winner == static_cast<AgentId>(star_pos + 1)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(runs);
}

double selection_failure_bound(int g, double p) {
    if (p <= 0.5) throw std::domain_error("bound requires voter accuracy above 1/2");
    double d = p - 0.5;
    return std::exp(-2.0 * static_cast<double>(g) * d * d);
}

double task_success_rate(int completed, int assigned) {
    if (assigned < 1) throw std::domain_error("task success rate is undefined with nothing assigned");
    if (completed < 0 || completed > assigned)
        throw std::invalid_argument("completed must lie in [0, assigned]");
    return 100.0 * static_cast<double>(completed) / static_cast<double>(assigned);
}

}  // namespace trustsc
