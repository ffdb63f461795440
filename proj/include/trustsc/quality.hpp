#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trustsc/model.hpp"
#include "trustsc/rng.hpp"

namespace trustsc {

struct PreferenceProfile {
    std::vector<AgentId> candidates;            // the executors being graded
    std::vector<AgentId> voters;                // disjoint from candidates
    std::vector<std::vector<AgentId>> rankings; // one strict order per voter
};

struct VotingResult {
    AgentId winner = 0;
    // counts per depth: depth 0 = first preferences, deeper entries are the
    // runoff counts restricted to the surviving tied set
    std::vector<std::map<AgentId, int>> round_vote_counts;
};

// First-preference plurality. On a tie the tied set T survives and each
// voter's preference at the next depth counts if it lands in T, repeating
// until a strict maximum emerges; a tie that outlives all depths breaks to
// the lowest executor id.
VotingResult run_voting_round(const PreferenceProfile& profile);

// Supplies the per-round candidate/voter draw and the rankings. The default
// draw picks f candidates from the unevaluated pool and g voters from
// everyone else uniformly at random.
class ProfileSource {
public:
    virtual ~ProfileSource() = default;
    virtual void pick_round(const std::vector<AgentId>& pool, const std::vector<AgentId>& all,
                            int f, int g, Rng& rng, std::vector<AgentId>& candidates,
                            std::vector<AgentId>& voters) const;
    virtual PreferenceProfile make_profile(const std::vector<AgentId>& candidates,
                                           const std::vector<AgentId>& voters,
                                           Rng& rng) const = 0;
};

// Voters with no signal: uniformly random rankings.
class UniformProfileSource : public ProfileSource {
public:
    PreferenceProfile make_profile(const std::vector<AgentId>& candidates,
                                   const std::vector<AgentId>& voters, Rng& rng) const override;
};

// Voters that put the highest-latent-quality candidate first with
// probability `accuracy`, mirroring the noisy grading model.
class QualityProfileSource : public ProfileSource {
public:
    QualityProfileSource(std::map<AgentId, double> latent_quality, double accuracy)
        : quality_(std::move(latent_quality)), accuracy_(accuracy) {}
    PreferenceProfile make_profile(const std::vector<AgentId>& candidates,
                                   const std::vector<AgentId>& voters, Rng& rng) const override;

private:
    std::map<AgentId, double> quality_;
    double accuracy_;
};

struct SelectionRound {
    std::vector<AgentId> candidates;
    std::vector<AgentId> voters;
    VotingResult result;
};

struct SelectionResult {
    std::vector<AgentId> winners;  // one per round, in round order
    std::vector<SelectionRound> rounds;
    std::vector<std::string> warnings;
};

// Runs voting rounds until every executor has been evaluated: each round
// grades f candidates drawn from the unevaluated pool (all remaining ones in
// the final short round) and removes them, so |winners| = ceil(m / f).
// When fewer than g voters are available, g shrinks with a warning.
SelectionResult select_quality_executors(const std::vector<AgentId>& executor_ids, int f, int g,
                                         const ProfileSource& source, std::uint64_t seed);

// One noisy profile: each voter puts the strictly-best candidate first with
// probability p, otherwise a uniformly random other candidate; the rest of
// the ranking is a uniform permutation. Requires a unique quality maximum.
PreferenceProfile noisy_profile(const std::vector<std::pair<AgentId, double>>& candidates_with_quality,
                                const std::vector<AgentId>& voters, double p, std::uint64_t seed);

// Fraction of `runs` trials in which a voting round over a noisy profile
// picks the true best of f candidates.
double estimate_selection_probability(int f, int g, double p, int runs, std::uint64_t seed);

// Hoeffding bound exp(-2 g (p - 1/2)^2) on failing to select the true best;
// requires p > 1/2.
double selection_failure_bound(int g, double p);

// completed / assigned * 100; assigned must be positive.
double task_success_rate(int completed, int assigned);

}  // namespace trustsc
