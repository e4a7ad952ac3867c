#pragma once

// JSON and CSV views of plans, containers and benchmark reports.

#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bbmr/allocator.hpp"
#include "bbmr/bench.hpp"
#include "bbmr/container.hpp"
#include "bbmr/resample.hpp"

namespace bbmr {

inline constexpr int kReportSchemaVersion = 1;

// Metric values are reported to 4 decimal places.
inline double round4(double v) { return std::round(v * 1e4) / 1e4; }

// +inf thresholds become null.
inline nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(round4(v)) : nlohmann::json(nullptr);
}

inline nlohmann::json config_json(const PipelineConfig& cfg) {
    return {
        {"factors", {cfg.factors.k1, cfg.factors.k2, cfg.factors.k3}},
        {"block", {{"w", cfg.block_w}, {"h", cfg.block_h}}},
        {"kernel", kernel_name(cfg.kernel)},
        {"proxy", kernel_name(cfg.proxy)},
        {"use_proxy", cfg.use_proxy},
        {"t_db", finite_or_null(cfg.t)},
        {"block_max", cfg.block_max ? nlohmann::json(*cfg.block_max) : nlohmann::json(nullptr)},
        {"deblock", cfg.deblock},
        {"deblock_radius", cfg.deblock_radius},
        {"deblock_gated", cfg.seam.gated},
    };
}

/// Per-block plan with optional candidate scores; scale codes are 1..3.
inline nlohmann::json plan_json(const ScalePlan& plan, const BlockGrid& grid, const CandidateScores* scores = nullptr) {
    nlohmann::json blocks = nlohmann::json::array();
    for (std::size_t i = 0; i < plan.size(); ++i) {
        nlohmann::json b{{"index", i},
                         {"row", grid.row_of(i)},
                         {"col", grid.col_of(i)},
                         {"scale", int(plan.tiers[i]) + 1},
                         {"k", factor_of(plan.factors, plan.tiers[i])}};
        if (scores)
            b["psnr_db"] = {round4(scores->at(i, 0)), round4(scores->at(i, 1)), round4(scores->at(i, 2))};
        blocks.push_back(std::move(b));
    }
    return {
        {"factors", {plan.factors.k1, plan.factors.k2, plan.factors.k3}},
        {"ratio", {{"a", plan.ratio.a}, {"c", plan.ratio.c}}},
        {"t_db", finite_or_null(plan.t)},
        {"trades", plan.trades},
        {"grid", {{"cols", grid.cols}, {"rows", grid.rows}, {"block_w", grid.block_w}, {"block_h", grid.block_h},
                  {"orig_w", grid.orig_w}, {"orig_h", grid.orig_h}}},
        {"counts", {{"k1", plan.count(Tier::fine)}, {"k2", plan.count(Tier::base)}, {"k3", plan.count(Tier::coarse)}}},
        {"blocks", std::move(blocks)},
    };
}

/// Header, histogram and CRC status of a raw container stream. Throws for
/// anything but a CRC mismatch, which is reported as "crc": "FAIL".
inline nlohmann::json inspect_json(std::span<const std::uint8_t> bytes) {
    const auto decoded = decode(bytes, {.verify_crc = false});
    const bool crc = crc_ok(bytes);
    const auto& h = decoded.header;
    std::map<std::string, std::size_t> hist{{"k1", 0}, {"k2", 0}, {"k3", 0}};
    for (auto t : decoded.plan) ++hist[t == Tier::fine ? "k1" : t == Tier::base ? "k2" : "k3"];
    return {
        {"version", h.version},
        {"flags", h.flags},
        {"orig_w", h.orig_w},
        {"orig_h", h.orig_h},
        {"block_w", h.block_w},
        {"block_h", h.block_h},
        {"factors", {h.factors.k1, h.factors.k2, h.factors.k3}},
        {"color", h.color == 0 ? "RGB8" : "unknown"},
        {"n_blocks", h.n_blocks},
        {"histogram", hist},
        {"payload_bytes", payload_size(decoded.plan, h)},
        {"total_bytes", bytes.size()},
        {"crc", crc ? "OK" : "FAIL"},
    };
}

inline nlohmann::json record_json(const ImageRecord& r) {
    nlohmann::json j{
        {"name", r.name},
        {"width", r.width},
        {"height", r.height},
        {"n_blocks", r.n_blocks},
        {"trades", r.trades},
        {"psnr_uniform_db", round4(r.psnr_uniform)},
        {"psnr_bbmr_db", round4(r.psnr_bbmr)},
        {"psnr_bbmr_no_deblock_db", round4(r.psnr_bbmr_no_deblock)},
        {"gain_db", round4(r.gain_db)},
        {"seam_index_before", round4(r.seam_before)},
        {"seam_index_after", round4(r.seam_after)},
        {"container_bytes", r.container_bytes},
        {"uniform_container_bytes", r.uniform_container_bytes},
        {"payload_bytes", r.payload_bytes},
        {"uniform_payload_bytes", r.uniform_payload_bytes},
        {"taxonomy", {{"simple", r.classes.simple}, {"medium", r.classes.medium}, {"hard", r.classes.hard}}},
    };
    if (r.proxy)
        j["proxy"] = {{"plan_agreement", round4(r.proxy->plan_agreement)},
                      {"psnr_proxy_alloc_db", round4(r.proxy->proxy_psnr)},
                      {"delta_db", round4(r.proxy->delta_db)},
                      {"trades", r.proxy->proxy_trades}};
    return j;
}

inline nlohmann::json times_json(const StageTimes& t) {
    return {{"score_ms", round4(t.score_ms)},   {"encode_ms", round4(t.encode_ms)},
            {"decode_ms", round4(t.decode_ms)}, {"reconstruct_ms", round4(t.reconstruct_ms)},
            {"total_ms", round4(t.total_ms)}};
}

/// Full report. Wall-clock data lives only under "timings"; everything else is
/// a deterministic function of config and inputs.
inline nlohmann::json report_json(const BenchReport& report, const std::string& generated_at = {}) {
    nlohmann::json images = nlohmann::json::array();
    nlohmann::json times = nlohmann::json::object();
    for (const auto& r : report.records) {
        images.push_back(record_json(r));
        times[r.name] = times_json(r.times);
    }
    const auto& a = report.summary;
    nlohmann::json agg{
        {"images", a.images},
        {"mean_psnr_uniform_db", round4(a.mean_psnr_uniform)},
        {"mean_psnr_bbmr_db", round4(a.mean_psnr_bbmr)},
        {"mean_gain_db", round4(a.mean_gain_db)},
        {"min_gain_db", round4(a.min_gain_db)},
        {"mean_seam_index_before", round4(a.mean_seam_before)},
        {"mean_seam_index_after", round4(a.mean_seam_after)},
        {"taxonomy",
         {{"simple", a.classes.simple},
          {"medium", a.classes.medium},
          {"hard", a.classes.hard},
          {"frac_simple", round4(a.frac_simple)},
          {"frac_medium", round4(a.frac_medium)},
          {"frac_hard", round4(a.frac_hard)}}},
    };
    if (a.mean_plan_agreement) agg["mean_plan_agreement"] = round4(*a.mean_plan_agreement);
    if (a.mean_proxy_delta_db) agg["mean_proxy_delta_db"] = round4(*a.mean_proxy_delta_db);
    return {
        {"schema", "bbmr-report"},
        {"schema_version", kReportSchemaVersion},
        {"config", config_json(report.config)},
        {"taxonomy_thresholds",
         {{"simple_pay_db", report.options.thresholds.simple_pay}, {"hard_earn_db", report.options.thresholds.hard_earn}}},
        {"images", std::move(images)},
        {"aggregate", std::move(agg)},
        {"timings", {{"generated_at", generated_at}, {"images", std::move(times)}}},
    };
}

/// One CSV row per image, columns taken from the JSON record.
inline std::string report_csv(const nlohmann::json& report) {
    std::ostringstream out;
    out << "name,width,height,n_blocks,trades,psnr_uniform_db,psnr_bbmr_db,psnr_bbmr_no_deblock_db,gain_db,"
           "seam_index_before,seam_index_after,container_bytes,uniform_container_bytes,simple,medium,hard,"
           "proxy_plan_agreement,proxy_delta_db\n";
    for (const auto& r : report.at("images")) {
        out << r.at("name").get<std::string>() << ',' << r.at("width") << ',' << r.at("height") << ','
            << r.at("n_blocks") << ',' << r.at("trades") << ',' << r.at("psnr_uniform_db") << ','
            << r.at("psnr_bbmr_db") << ',' << r.at("psnr_bbmr_no_deblock_db") << ',' << r.at("gain_db") << ','
            << r.at("seam_index_before") << ',' << r.at("seam_index_after") << ',' << r.at("container_bytes") << ','
            << r.at("uniform_container_bytes") << ',' << r.at("taxonomy").at("simple") << ','
            << r.at("taxonomy").at("medium") << ',' << r.at("taxonomy").at("hard") << ',';
        if (r.contains("proxy"))
            out << r.at("proxy").at("plan_agreement") << ',' << r.at("proxy").at("delta_db");
        else
            out << ',';
        out << '\n';
    }
    return out.str();
}

} // namespace bbmr
