#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bbmr/error.hpp"
#include "bbmr/image.hpp"
#include "bbmr/metrics.hpp"
#include "bbmr/parallel.hpp"
#include "bbmr/resample.hpp"

namespace bbmr {

/// Fine, base and coarse downscaling factors, k1 < k2 < k3. k2 is the
/// overall rate the image is stored at.
struct FactorTriple {
    int k1 = 2;
    int k2 = 4;
    int k3 = 8;

    int operator[](std::size_t tier) const noexcept { return tier == 0 ? k1 : tier == 1 ? k2 : k3; }

    void validate(int block_w, int block_h) const {
        require(k1 >= 1 && k1 < k2 && k2 < k3, "factors must satisfy 1 <= k1 < k2 < k3");
        require(block_w % k3 == 0 && block_h % k3 == 0 && block_w % k2 == 0 && block_h % k2 == 0 &&
                    block_w % k1 == 0 && block_h % k1 == 0,
                "block dimensions must be divisible by every factor");
    }

    friend bool operator==(const FactorTriple&, const FactorTriple&) = default;
};

/// Scale tier of a block. The numeric value is also the on-disk plan code.
enum class Tier : std::uint8_t { fine = 0, base = 1, coarse = 2 };

inline int factor_of(const FactorTriple& f, Tier t) { return f[std::size_t(t)]; }

/// Blocks promoted (a) and demoted (c) per trade; minimal positive solution
/// of exact pixel conservation.
struct BudgetRatio {
    long a = 1;
    long c = 1;

    friend bool operator==(const BudgetRatio&, const BudgetRatio&) = default;
};

inline long lr_pixels(int block_w, int block_h, int k) {
    return long(block_w / k) * long(block_h / k);
}

/// Smallest (a, c) with a*p1 + c*p3 == (a + c)*p2, where p_s is the pixel
/// count of a block stored at k_s.
inline BudgetRatio solve_budget_ratio(const FactorTriple& factors, int block_h, int block_w) {
    factors.validate(block_w, block_h);
    const long p1 = lr_pixels(block_w, block_h, factors.k1);
    const long p2 = lr_pixels(block_w, block_h, factors.k2);
    const long p3 = lr_pixels(block_w, block_h, factors.k3);
    const long earn = p1 - p2;
    const long pay = p2 - p3;
    if (earn <= 0 || pay <= 0) fail(ErrorCode::invariant_violation, "no positive budget ratio exists");
    const long g = std::gcd(earn, pay);
    BudgetRatio r{pay / g, earn / g};
    if (r.a * p1 + r.c * p3 != (r.a + r.c) * p2)
        fail(ErrorCode::invariant_violation, "budget ratio does not conserve pixels");
    return r;
}

/// N x 3 matrix of reconstruction PSNRs, column s for factor k_{s+1}.
struct CandidateScores {
    std::size_t n = 0;
    std::vector<double> values;

    CandidateScores() = default;
    explicit CandidateScores(std::size_t blocks) : n(blocks), values(blocks * 3, kPsnrCap) {}

    double at(std::size_t block, std::size_t tier) const { return values[block * 3 + tier]; }
    double& at(std::size_t block, std::size_t tier) { return values[block * 3 + tier]; }
    double earn(std::size_t block) const { return at(block, 0) - at(block, 1); }
    double pay(std::size_t block) const { return at(block, 1) - at(block, 2); }
};

/// PSNR of each block's down/up round trip at every factor. `storage`
/// produces the low-resolution block; `reconstruct` upscales it back (a proxy
/// scaler may stand in here).
inline CandidateScores evaluate_candidates(std::span<const RasterImage> blocks, const FactorTriple& factors,
                                           const Scaler& storage, const Scaler& reconstruct) {
    CandidateScores scores(blocks.size());
    parallel_for(blocks.size(), [&](std::size_t i) {
        const auto& hr = blocks[i];
        for (std::size_t s = 0; s < 3; ++s) {
            const int k = factors[s];
            const auto sr = upscale(downscale(hr, k, storage), k, reconstruct);
            scores.at(i, s) = psnr(hr, sr, ChannelMode::luma).value;
        }
    });
    return scores;
}

inline CandidateScores evaluate_candidates(std::span<const RasterImage> blocks, const FactorTriple& factors,
                                           const Scaler& scaler) {
    return evaluate_candidates(blocks, factors, scaler, scaler);
}

struct TradeEntry {
    double value = 0.0;
    std::size_t block = 0;

    friend bool operator==(const TradeEntry&, const TradeEntry&) = default;
};

/// earn: promotion gains sorted descending; pay: demotion losses sorted
/// ascending. Ties go to the lower block index in both.
struct TradeArrays {
    std::vector<TradeEntry> earn;
    std::vector<TradeEntry> pay;
};

inline TradeArrays build_trade_arrays(const CandidateScores& scores) {
    TradeArrays t;
    t.earn.reserve(scores.n);
    t.pay.reserve(scores.n);
    for (std::size_t i = 0; i < scores.n; ++i) {
        t.earn.push_back({scores.earn(i), i});
        t.pay.push_back({scores.pay(i), i});
    }
    std::sort(t.earn.begin(), t.earn.end(), [](const TradeEntry& x, const TradeEntry& y) {
        return x.value != y.value ? x.value > y.value : x.block < y.block;
    });
    std::sort(t.pay.begin(), t.pay.end(), [](const TradeEntry& x, const TradeEntry& y) {
        return x.value != y.value ? x.value < y.value : x.block < y.block;
    });
    return t;
}

struct ScalePlan {
    std::vector<Tier> tiers;
    FactorTriple factors;
    BudgetRatio ratio;
    double t = 0.0;
    std::size_t trades = 0;

    std::size_t size() const noexcept { return tiers.size(); }
    std::size_t count(Tier tier) const { return std::size_t(std::count(tiers.begin(), tiers.end(), tier)); }

    long total_lr_pixels(int block_w, int block_h) const {
        long total = 0;
        for (auto tier : tiers) total += lr_pixels(block_w, block_h, factor_of(factors, tier));
        return total;
    }

    friend bool operator==(const ScalePlan&, const ScalePlan&) = default;
};

inline ScalePlan uniform_plan(std::size_t n, const FactorTriple& factors = {}, const BudgetRatio& ratio = {}) {
    ScalePlan plan;
    plan.tiers.assign(n, Tier::base);
    plan.factors = factors;
    plan.ratio = ratio;
    return plan;
}

inline std::size_t default_block_max(std::size_t n, const BudgetRatio& ratio) {
    return n / std::size_t(ratio.a + ratio.c);
}

/// Greedy trade loop. Trade m takes the next `a` unassigned blocks in earn
/// order, then the next `c` unassigned blocks in pay order, and commits iff
/// their earn sum is at least pay sum + t. The loop stops at the first trade
/// that fails, at `block_max` trades, or when too few blocks remain.
inline ScalePlan allocate(const TradeArrays& trades, const BudgetRatio& ratio, double t, std::size_t block_max,
                          std::size_t n) {
    require(ratio.a >= 1 && ratio.c >= 1, "budget ratio must be positive");
    require(trades.earn.size() == n && trades.pay.size() == n, "trade arrays must have length N");
    require(!std::isnan(t), "threshold must not be NaN");

    ScalePlan plan = uniform_plan(n, {}, ratio);
    plan.t = t;
    std::vector<char> taken(n, 0);
    std::size_t earn_pos = 0;
    std::size_t pay_pos = 0;
    std::vector<std::size_t> promote;
    std::vector<std::size_t> demote;

    for (std::size_t m = 0; m < block_max; ++m) {
        promote.clear();
        demote.clear();
        double earn_sum = 0.0;
        double pay_sum = 0.0;

        std::size_t e = earn_pos;
        for (; e < n && promote.size() < std::size_t(ratio.a); ++e) {
            const auto& entry = trades.earn[e];
            if (taken[entry.block]) continue;
            promote.push_back(entry.block);
            earn_sum += entry.value;
        }
        if (promote.size() < std::size_t(ratio.a)) break;
        for (auto b : promote) taken[b] = 1;

        std::size_t p = pay_pos;
        for (; p < n && demote.size() < std::size_t(ratio.c); ++p) {
            const auto& entry = trades.pay[p];
            if (taken[entry.block]) continue;
            demote.push_back(entry.block);
            pay_sum += entry.value;
        }
        const bool commit = demote.size() == std::size_t(ratio.c) && earn_sum >= pay_sum + t;
        if (!commit) {
            for (auto b : promote) taken[b] = 0;
            break;
        }
        for (auto b : demote) taken[b] = 1;
        for (auto b : promote) plan.tiers[b] = Tier::fine;
        for (auto b : demote) plan.tiers[b] = Tier::coarse;
        earn_pos = e;
        pay_pos = p;
        ++plan.trades;
    }
    return plan;
}

/// Scores -> plan in one step, with the default block_max when unset.
inline ScalePlan plan_blocks(const CandidateScores& scores, const FactorTriple& factors, int block_h, int block_w,
                             double t, std::optional<std::size_t> block_max = std::nullopt) {
    const auto ratio = solve_budget_ratio(factors, block_h, block_w);
    auto plan = allocate(build_trade_arrays(scores), ratio, t, block_max.value_or(default_block_max(scores.n, ratio)),
                         scores.n);
    plan.factors = factors;
    return plan;
}

/// Sum of the predicted PSNR of every block at its assigned tier.
inline double predicted_psnr_sum(const CandidateScores& scores, const ScalePlan& plan) {
    double total = 0.0;
    for (std::size_t i = 0; i < plan.size(); ++i) total += scores.at(i, std::size_t(plan.tiers[i]));
    return total;
}

} // namespace bbmr
