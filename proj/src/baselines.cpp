#include "trustsc/baselines.hpp"

#include <algorithm>
#include <stdexcept>

#include "trustsc/rng.hpp"

namespace trustsc {

namespace {

std::vector<int> order_desc(const std::vector<Money>& v) {
    std::vector<int> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
    return idx;
}

std::vector<int> order_asc(const std::vector<Money>& v) {
    std::vector<int> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    return idx;
}

}  // namespace

BaselineOutcome mcafee(const SingleTypeMarket& market) {
    BaselineOutcome out;
    std::vector<int> buyers = order_desc(market.bids);
    std::vector<int> sellers = order_asc(market.asks);

    std::size_t k = 0;
    while (k < buyers.size() && k < sellers.size() &&
           market.bids[buyers[k]] >= market.asks[sellers[k]])
        ++k;
    if (k == 0) return out;

    bool have_next = k < buyers.size() && k < sellers.size();
    if (have_next) {
        double p0 = (static_cast<double>(market.bids[buyers[k]]) +
                     static_cast<double>(market.asks[sellers[k]])) /
                    2.0;
        if (static_cast<double>(market.asks[sellers[k - 1]]) <= p0 &&
            p0 <= static_cast<double>(market.bids[buyers[k - 1]])) {
            for (std::size_t i = 0; i < k; ++i)
                out.trades.push_back({buyers[i], sellers[i], p0, p0});
            return out;
        }
    }

    // reduction round: the k-th pair is dropped and sets the prices
    double buyer_price = static_cast<double>(market.bids[buyers[k - 1]]);
    double seller_price = static_cast<double>(market.asks[sellers[k - 1]]);
    for (std::size_t i = 0; i + 1 < k; ++i)
        out.trades.push_back({buyers[i], sellers[i], buyer_price, seller_price});
    return out;
}

BaselineOutcome posted_price(const SingleTypeMarket& market, Money price) {
    if (price < 0) throw std::invalid_argument("negative posted price");
    BaselineOutcome out;
    std::vector<int> buyers, sellers;
    for (std::size_t i = 0; i < market.bids.size(); ++i)
        if (market.bids[i] >= price) buyers.push_back(static_cast<int>(i));
    for (std::size_t i = 0; i < market.asks.size(); ++i)
        if (market.asks[i] <= price) sellers.push_back(static_cast<int>(i));
    std::size_t trades = std::min(buyers.size(), sellers.size());
    for (std::size_t i = 0; i < trades; ++i)
        out.trades.push_back({buyers[i], sellers[i], static_cast<double>(price),
                              static_cast<double>(price)});
    return out;
}

namespace {

struct HalfMarket {
    std::vector<int> buyers;   // indices into bids, ascending
    std::vector<int> sellers;  // indices into asks, ascending
};

Money half_equilibrium(const SingleTypeMarket& market, const HalfMarket& half, Money epsilon) {
    if (half.buyers.empty() && half.sellers.empty()) return 0;
    Money cap = 0;
    for (int b : half.buyers) cap = std::max(cap, market.bids[b]);
    Money best_price = 0;
    int best_min = -1;
    for (Money p = 0;; p += epsilon) {
        int d = 0, s = 0;
        for (int b : half.buyers)
            if (market.bids[b] >= p) ++d;
        for (int a : half.sellers)
            if (market.asks[a] <= p) ++s;
        if (std::min(d, s) > best_min) {
            best_min = std::min(d, s);
            best_price = p;
        }
        if (s >= d || p > cap + epsilon) break;
    }
    return best_price;
}

void trade_half(const SingleTypeMarket& market, const HalfMarket& half, Money p,
                BaselineOutcome& out) {
    std::vector<int> buyers, sellers;
    for (int b : half.buyers)
        if (market.bids[b] >= p) buyers.push_back(b);
    for (int a : half.sellers)
        if (market.asks[a] <= p) sellers.push_back(a);
    int d = static_cast<int>(buyers.size());
    int s = static_cast<int>(sellers.size());
    if (d > s) {
        std::vector<int> strict;
        for (int b : buyers)
            if (market.bids[b] > p) strict.push_back(b);
        if (static_cast<int>(strict.size()) > s) strict.resize(s);
        buyers = std::move(strict);
    } else if (d < s) {
        std::vector<int> strict;
        for (int a : sellers)
            if (market.asks[a] < p) strict.push_back(a);
        if (static_cast<int>(strict.size()) > d) strict.resize(d);
        sellers = std::move(strict);
    }
    std::size_t n = std::min(buyers.size(), sellers.size());
    for (std::size_t i = 0; i < n; ++i)
        out.trades.push_back({buyers[i], sellers[i], static_cast<double>(p),
                              static_cast<double>(p)});
}

}  // namespace

MudaOutcome muda_single(const SingleTypeMarket& market, Money epsilon, std::uint64_t seed) {
    if (epsilon < 1) throw std::invalid_argument("epsilon must be at least one minor unit");
    MudaOutcome out;
    HalfMarket left, right;
    for (std::size_t i = 0; i < market.bids.size(); ++i) {
        Rng rng(derive_seed(seed, "muda-buyer", i));
        (rng.bernoulli(0.5) ? left : right).buyers.push_back(static_cast<int>(i));
    }
    for (std::size_t i = 0; i < market.asks.size(); ++i) {
        Rng rng(derive_seed(seed, "muda-seller", i));
        (rng.bernoulli(0.5) ? left : right).sellers.push_back(static_cast<int>(i));
    }
    out.price_left = half_equilibrium(market, left, epsilon);
    out.price_right = half_equilibrium(market, right, epsilon);
    trade_half(market, left, out.price_right, out);
    trade_half(market, right, out.price_left, out);
    return out;
}

SingleTypeMarket flatten(const Scenario& s) {
    SingleTypeMarket m;
    for (const Task& t : s.tasks) m.bids.push_back(t.budget);
    for (const Executor& e : s.executors)
        for (const Offer& o : e.offers) m.asks.push_back(o.ask);
    return m;
}

}  // namespace trustsc
