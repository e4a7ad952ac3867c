#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bbmr/allocator.hpp"
#include "bbmr/container.hpp"
#include "bbmr/metrics.hpp"
#include "bbmr/parallel.hpp"
#include "bbmr/pipeline.hpp"
#include "bbmr/reassembly.hpp"

namespace bbmr {

enum class BlockClass { simple, medium, hard };

/// Block difficulty cut-offs in dB. Simple is tested first.
struct TaxonomyThresholds {
    double simple_pay = 1.5;  // simple if P2 - P3 < simple_pay
    double hard_earn = 4.0;   // hard if P1 - P2 > hard_earn
};

inline BlockClass classify(const CandidateScores& s, std::size_t block, const TaxonomyThresholds& th = {}) {
    if (s.pay(block) < th.simple_pay) return BlockClass::simple;
    if (s.earn(block) > th.hard_earn) return BlockClass::hard;
    return BlockClass::medium;
}

struct Taxonomy {
    std::size_t simple = 0;
    std::size_t medium = 0;
    std::size_t hard = 0;

    std::size_t total() const { return simple + medium + hard; }
    Taxonomy& operator+=(const Taxonomy& o) {
        simple += o.simple;
        medium += o.medium;
        hard += o.hard;
        return *this;
    }
};

inline Taxonomy taxonomy(const CandidateScores& s, const TaxonomyThresholds& th = {}) {
    Taxonomy t;
    for (std::size_t i = 0; i < s.n; ++i) {
        switch (classify(s, i, th)) {
        case BlockClass::simple: ++t.simple; break;
        case BlockClass::medium: ++t.medium; break;
        case BlockClass::hard: ++t.hard; break;
        }
    }
    return t;
}

struct ProxyComparison {
    double plan_agreement = 0.0;  // fraction of blocks given the same tier
    double proxy_psnr = 0.0;      // final PSNR when allocating with the proxy
    double delta_db = 0.0;        // final-allocated PSNR minus proxy-allocated PSNR
    std::size_t proxy_trades = 0;
};

struct StageTimes {
    double score_ms = 0.0;
    double encode_ms = 0.0;
    double decode_ms = 0.0;
    double reconstruct_ms = 0.0;
    double total_ms = 0.0;
};

struct ImageRecord {
    std::string name;
    int width = 0;
    int height = 0;
    std::size_t n_blocks = 0;
    std::size_t trades = 0;
    double psnr_uniform = 0.0;
    double psnr_bbmr = 0.0;
    double psnr_bbmr_no_deblock = 0.0;
    double gain_db = 0.0;
    double seam_before = 1.0;
    double seam_after = 1.0;
    std::size_t container_bytes = 0;
    std::size_t uniform_container_bytes = 0;
    std::size_t payload_bytes = 0;
    std::size_t uniform_payload_bytes = 0;
    Taxonomy classes;
    std::optional<ProxyComparison> proxy;
    StageTimes times;
};

struct BenchOptions {
    bool compare_proxy = false;
    TaxonomyThresholds thresholds;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

} // namespace detail

/// Uniform-k2 and multi-scale round trips of one image, both through the
/// serialized container.
inline ImageRecord roundtrip_record(const RasterImage& image, const std::string& name, const PipelineConfig& cfg,
                                    const BenchOptions& options = {}) {
    using detail::Clock;
    const auto t_start = Clock::now();
    ImageRecord r;
    r.name = name;
    r.width = image.width();
    r.height = image.height();

    auto t0 = Clock::now();
    const auto enc = encode_image(image, cfg);
    r.times.score_ms = detail::ms_since(t0);
    t0 = Clock::now();
    const auto bytes = encode(enc.container);
    r.times.encode_ms = detail::ms_since(t0);
    t0 = Clock::now();
    const auto decoded = decode(bytes);
    r.times.decode_ms = detail::ms_since(t0);
    t0 = Clock::now();
    const auto rec = reconstruct(decoded, cfg);
    r.times.reconstruct_ms = detail::ms_since(t0);

    const auto uni = encode_uniform(image, cfg);
    const auto uni_bytes = encode(uni.container);
    const auto uni_rec = reconstruct(decode(uni_bytes), cfg);

    r.n_blocks = enc.grid.size();
    r.trades = enc.plan.trades;
    r.psnr_bbmr = psnr(image, rec.image).value;
    r.psnr_bbmr_no_deblock = psnr(image, rec.stitched).value;
    r.psnr_uniform = psnr(image, uni_rec.image).value;
    r.gain_db = r.psnr_bbmr - r.psnr_uniform;
    r.seam_before = seam_index(rec.stitched, enc.grid);
    r.seam_after = seam_index(rec.image, enc.grid);
    r.container_bytes = bytes.size();
    r.uniform_container_bytes = uni_bytes.size();
    r.payload_bytes = payload_size(enc.container.plan, enc.container.header);
    r.uniform_payload_bytes = payload_size(uni.container.plan, uni.container.header);
    r.classes = taxonomy(enc.scores, options.thresholds);

    if (options.compare_proxy) {
        PipelineConfig pc = cfg;
        pc.use_proxy = !cfg.use_proxy;
        const auto other = encode_image(image, pc);
        const auto other_psnr = psnr(image, reconstruct(other.container, cfg).image).value;
        const auto& final_enc = cfg.use_proxy ? other : enc;
        const auto& proxy_enc = cfg.use_proxy ? enc : other;
        ProxyComparison pcmp;
        std::size_t same = 0;
        for (std::size_t i = 0; i < final_enc.plan.size(); ++i) same += final_enc.plan.tiers[i] == proxy_enc.plan.tiers[i];
        pcmp.plan_agreement = double(same) / double(final_enc.plan.size());
        const double final_psnr = cfg.use_proxy ? other_psnr : r.psnr_bbmr;
        pcmp.proxy_psnr = cfg.use_proxy ? r.psnr_bbmr : other_psnr;
        pcmp.delta_db = final_psnr - pcmp.proxy_psnr;
        pcmp.proxy_trades = proxy_enc.plan.trades;
        r.proxy = pcmp;
    }
    r.times.total_ms = detail::ms_since(t_start);
    return r;
}

struct Aggregate {
    std::size_t images = 0;
    double mean_psnr_uniform = 0.0;
    double mean_psnr_bbmr = 0.0;
    double mean_gain_db = 0.0;
    double min_gain_db = 0.0;
    double mean_seam_before = 0.0;
    double mean_seam_after = 0.0;
    Taxonomy classes;
    double frac_simple = 0.0;
    double frac_medium = 0.0;
    double frac_hard = 0.0;
    std::optional<double> mean_plan_agreement;
    std::optional<double> mean_proxy_delta_db;
};

inline Aggregate aggregate(const std::vector<ImageRecord>& records) {
    Aggregate a;
    a.images = records.size();
    if (records.empty()) return a;
    a.min_gain_db = records.front().gain_db;
    double agree = 0.0;
    double delta = 0.0;
    std::size_t proxied = 0;
    for (const auto& r : records) {
        a.mean_psnr_uniform += r.psnr_uniform;
        a.mean_psnr_bbmr += r.psnr_bbmr;
        a.mean_gain_db += r.gain_db;
        a.min_gain_db = std::min(a.min_gain_db, r.gain_db);
        a.mean_seam_before += r.seam_before;
        a.mean_seam_after += r.seam_after;
        a.classes += r.classes;
        if (r.proxy) {
            agree += r.proxy->plan_agreement;
            delta += r.proxy->delta_db;
            ++proxied;
        }
    }
    const double n = double(records.size());
    a.mean_psnr_uniform /= n;
    a.mean_psnr_bbmr /= n;
    a.mean_gain_db /= n;
    a.mean_seam_before /= n;
    a.mean_seam_after /= n;
    const double blocks = double(a.classes.total());
    if (blocks > 0) {
        a.frac_simple = double(a.classes.simple) / blocks;
        a.frac_medium = double(a.classes.medium) / blocks;
        a.frac_hard = double(a.classes.hard) / blocks;
    }
    if (proxied) {
        a.mean_plan_agreement = agree / double(proxied);
        a.mean_proxy_delta_db = delta / double(proxied);
    }
    return a;
}

struct BenchReport {
    PipelineConfig config;
    BenchOptions options;
    std::vector<ImageRecord> records;
    Aggregate summary;
};

/// Runs every image, in parallel, keeping the input order in the report.
inline BenchReport run_bench(const std::vector<std::pair<std::string, RasterImage>>& images, const PipelineConfig& cfg,
                             const BenchOptions& options = {}) {
    BenchReport report{cfg, options, std::vector<ImageRecord>(images.size()), {}};
    parallel_for(images.size(), [&](std::size_t i) {
        report.records[i] = roundtrip_record(images[i].second, images[i].first, cfg, options);
    });
    report.summary = aggregate(report.records);
    return report;
}

} // namespace bbmr
