#pragma once

// Exhaustive reference for the greedy allocator. Used by tests only; it does
// not share the sorted trade arrays or the greedy loop.

#include <cstddef>
#include <optional>
#include <vector>

#include "bbmr/allocator.hpp"

namespace bbmr {

inline constexpr std::size_t kOracleMaxBlocks = 64;

namespace detail {

struct OracleTrades {
    std::vector<Tier> tiers;
    std::vector<double> earn_sums;
    std::vector<double> pay_sums;
};

// Builds the plan for exactly m trades by repeated linear argmax/argmin over
// the unassigned blocks. nullopt when the blocks run out.
inline std::optional<OracleTrades> oracle_trades(const CandidateScores& s, const BudgetRatio& r, std::size_t m) {
    OracleTrades out{std::vector<Tier>(s.n, Tier::base), {}, {}};
    std::vector<char> used(s.n, 0);
    for (std::size_t j = 0; j < m; ++j) {
        double earn_sum = 0.0;
        double pay_sum = 0.0;
        for (long q = 0; q < r.a; ++q) {
            std::optional<std::size_t> best;
            for (std::size_t i = 0; i < s.n; ++i)
                if (!used[i] && (!best || s.earn(i) > s.earn(*best))) best = i;
            if (!best) return std::nullopt;
            used[*best] = 1;
            out.tiers[*best] = Tier::fine;
            earn_sum += s.earn(*best);
        }
        for (long q = 0; q < r.c; ++q) {
            std::optional<std::size_t> best;
            for (std::size_t i = 0; i < s.n; ++i)
                if (!used[i] && (!best || s.pay(i) < s.pay(*best))) best = i;
            if (!best) return std::nullopt;
            used[*best] = 1;
            out.tiers[*best] = Tier::coarse;
            pay_sum += s.pay(*best);
        }
        out.earn_sums.push_back(earn_sum);
        out.pay_sums.push_back(pay_sum);
    }
    return out;
}

} // namespace detail

/// Sweeps every trade count m in [0, min(block_max, N / (a + c))], keeps the
/// counts whose every trade clears `t` (the greedy's feasibility rule), and
/// returns the one with the largest predicted PSNR sum. Ties prefer larger m.
inline ScalePlan oracle_allocate(const CandidateScores& scores, const BudgetRatio& ratio, double t,
                                 std::optional<std::size_t> block_max = std::nullopt) {
    if (scores.n > kOracleMaxBlocks) fail(ErrorCode::invalid_argument, "oracle_allocate: N too large");
    const std::size_t per_trade = std::size_t(ratio.a + ratio.c);
    std::size_t cap = scores.n / per_trade;
    if (block_max) cap = std::min(cap, *block_max);

    ScalePlan best = uniform_plan(scores.n, {}, ratio);
    best.t = t;
    double best_sum = predicted_psnr_sum(scores, best);
    for (std::size_t m = 1; m <= cap; ++m) {
        auto trial = detail::oracle_trades(scores, ratio, m);
        if (!trial) continue;
        bool feasible = true;
        for (std::size_t j = 0; j < m; ++j)
            feasible = feasible && trial->earn_sums[j] >= trial->pay_sums[j] + t;
        if (!feasible) continue;
        ScalePlan plan = uniform_plan(scores.n, {}, ratio);
        plan.tiers = trial->tiers;
        plan.t = t;
        plan.trades = m;
        const double sum = predicted_psnr_sum(scores, plan);
        if (sum >= best_sum - 1e-9) {
            best = std::move(plan);
            best_sum = sum;
        }
    }
    return best;
}

} // namespace bbmr
