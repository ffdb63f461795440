#pragma once

#include <cstdint>
#include <vector>

#include "trustsc/model.hpp"

namespace trustsc {

// Single-type commodity market: every entry is one unit. Index positions
// double as agent ids for queueing.
struct SingleTypeMarket {
    std::vector<Money> bids;  // buyer values
    std::vector<Money> asks;  // seller costs
};

struct BaselineTrade {
    int buyer = -1;        // index into bids
    int seller = -1;       // index into asks
    double buyer_pays = 0.0;
    double seller_gets = 0.0;  // differs from buyer_pays only in a reduction round
};

struct BaselineOutcome {
    std::vector<BaselineTrade> trades;
    double surplus() const {
        double s = 0.0;
        for (const BaselineTrade& t : trades) s += t.buyer_pays - t.seller_gets;
        return s;
    }
};

// Trade-reduction double auction: sort bids down and asks up, find the last
// profitable pair k, and price at the (k+1)-th midpoint when it clears both
// sides; otherwise drop the k-th pair and settle buyers at b_k, sellers at
// s_k (the surplus stays with the platform, never a deficit).
BaselineOutcome mcafee(const SingleTypeMarket& market);

// Everyone willing at the posted price trades, short side limits volume,
// queues in id order.
BaselineOutcome posted_price(const SingleTypeMarket& market, Money price);

struct MudaOutcome : BaselineOutcome {
    Money price_left = 0;
    Money price_right = 0;
};

// Split-market double auction on a single commodity: halve the market at
// random, price each half on its own grid, then trade each half at the
// opposite price with the same strict rationing as the task auction, minus
// task identities.
MudaOutcome muda_single(const SingleTypeMarket& market, Money epsilon, std::uint64_t seed);

// Adapter: one bid unit per task, one ask unit per offer.
SingleTypeMarket flatten(const Scenario& s);

}  // namespace trustsc
