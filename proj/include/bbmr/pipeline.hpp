#pragma once

#include <optional>
#include <vector>

#include "bbmr/allocator.hpp"
#include "bbmr/container.hpp"
#include "bbmr/image.hpp"
#include "bbmr/parallel.hpp"
#include "bbmr/reassembly.hpp"
#include "bbmr/resample.hpp"

namespace bbmr {

struct PipelineConfig {
    FactorTriple factors{2, 4, 8};
    int block_w = 128;
    int block_h = 128;
    KernelName kernel = KernelName::bicubic;
    KernelName proxy = KernelName::bilinear;
    bool use_proxy = false;  // score candidates with the proxy upscaler
    double t = 0.5;          // dB margin a trade must clear
    std::optional<std::size_t> block_max;
    int deblock_radius = 2;
    bool deblock = true;
    SeamOptions seam;

    Scaler final_scaler() const { return {make_kernel(kernel), ScalerRole::final}; }
    Scaler proxy_scaler() const { return {make_kernel(proxy), ScalerRole::proxy}; }
    Scaler scoring_scaler() const { return use_proxy ? proxy_scaler() : final_scaler(); }

    void validate() const {
        factors.validate(block_w, block_h);
        require(block_w <= 0xFFFF && block_h <= 0xFFFF, "block dimensions exceed 16 bits");
        require(!std::isnan(t), "threshold must not be NaN");
        if (deblock) require(deblock_radius >= 1 && 2 * deblock_radius < std::min(block_w, block_h),
                             "deblock radius must satisfy 1 <= r and 2r < block size");
    }
};

struct EncodeResult {
    BlockGrid grid;
    CandidateScores scores;
    ScalePlan plan;
    Container container;
};

namespace detail {

inline std::vector<RasterImage> hr_blocks(const RasterImage& image, const BlockGrid& grid) {
    return extract_all(pad_reflect(image, grid.padded_w, grid.padded_h), grid);
}

inline Container build_container(const std::vector<RasterImage>& blocks, const BlockGrid& grid,
                                 const ScalePlan& plan, const Scaler& storage) {
    Container c;
    c.header = make_header(grid, plan.factors);
    c.plan = plan.tiers;
    c.blocks.resize(blocks.size());
    parallel_for(blocks.size(), [&](std::size_t i) {
        c.blocks[i] = downscale(blocks[i], factor_of(plan.factors, plan.tiers[i]), storage);
    });
    return c;
}

} // namespace detail

/// Partition, score, allocate and downscale one image.
inline EncodeResult encode_image(const RasterImage& image, const PipelineConfig& cfg) {
    cfg.validate();
    EncodeResult r;
    r.grid = partition(image, cfg.block_h, cfg.block_w, cfg.factors.k3);
    const auto blocks = detail::hr_blocks(image, r.grid);
    r.scores = evaluate_candidates(blocks, cfg.factors, cfg.final_scaler(), cfg.scoring_scaler());
    r.plan = plan_blocks(r.scores, cfg.factors, cfg.block_h, cfg.block_w, cfg.t, cfg.block_max);
    r.container = detail::build_container(blocks, r.grid, r.plan, cfg.final_scaler());
    return r;
}

/// Baseline: every block at k2, no scoring.
inline EncodeResult encode_uniform(const RasterImage& image, const PipelineConfig& cfg) {
    cfg.validate();
    EncodeResult r;
    r.grid = partition(image, cfg.block_h, cfg.block_w, cfg.factors.k3);
    const auto blocks = detail::hr_blocks(image, r.grid);
    r.plan = uniform_plan(r.grid.size(), cfg.factors, solve_budget_ratio(cfg.factors, cfg.block_h, cfg.block_w));
    r.plan.t = cfg.t;
    r.container = detail::build_container(blocks, r.grid, r.plan, cfg.final_scaler());
    return r;
}

struct Reconstruction {
    RasterImage image;     // final output at original dimensions
    RasterImage stitched;  // before deblocking, cropped to original dimensions
    BlockGrid grid;
};

/// Upscale every stored block, stitch, optionally deblock, crop.
inline Reconstruction reconstruct(const Container& c, const PipelineConfig& cfg) {
    const auto grid = grid_of(c.header);
    const Scaler scaler = cfg.final_scaler();
    std::vector<RasterImage> sr(c.blocks.size());
    parallel_for(c.blocks.size(), [&](std::size_t i) {
        sr[i] = upscale(c.blocks[i], factor_of(c.header.factors, c.plan[i]), scaler);
    });
    const auto canvas = stitch(sr, grid);
    Reconstruction out;
    out.grid = grid;
    out.stitched = crop(canvas.raster, grid.orig_w, grid.orig_h);
    if (cfg.deblock && grid.size() > 1)
        out.image = edge_replace(canvas, seam_filter(canvas, cfg.deblock_radius, cfg.seam));
    else
        out.image = out.stitched;
    return out;
}

} // namespace bbmr
