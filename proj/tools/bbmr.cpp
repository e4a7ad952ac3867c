// bbmr: block-based multi-scale image rescaling from the command line.
//
// Exit codes:
//   0  success
//   1  internal error
//   2  I/O error (missing or unreadable input, unwritable output)
//   3  invalid arguments or configuration
//   4  container: bad magic
//   5  container: unsupported version
//   6  container: truncated
//   7  container: CRC mismatch
//   8  container: invariant violation
//   9  bench: no usable input images

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bbmr/bench.hpp"
#include "bbmr/container.hpp"
#include "bbmr/pipeline.hpp"
#include "bbmr/png_io.hpp"
#include "bbmr/report.hpp"
#include "bbmr/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int {
    kOk = 0,
    kInternal = 1,
    kIo = 2,
    kConfig = 3,
    kBadMagic = 4,
    kVersion = 5,
    kTruncated = 6,
    kCrc = 7,
    kInvariant = 8,
    kNoInput = 9,
};

int exit_code(bbmr::ErrorCode code) {
    switch (code) {
    case bbmr::ErrorCode::invalid_argument: return kConfig;
    case bbmr::ErrorCode::io: return kIo;
    case bbmr::ErrorCode::bad_magic: return kBadMagic;
    case bbmr::ErrorCode::unsupported_version: return kVersion;
    case bbmr::ErrorCode::truncated: return kTruncated;
    case bbmr::ErrorCode::crc_mismatch: return kCrc;
    case bbmr::ErrorCode::invariant_violation: return kInvariant;
    }
    return kInternal;
}

struct Options {
    std::string factors = "2,4,8";
    int block = 128;
    std::string kernel = "bicubic";
    std::string proxy = "bilinear";
    bool use_proxy = false;
    std::string t = "0.5";
    int block_max = -1;
    int deblock_radius = 2;
    bool no_deblock = false;
    bool ungated = false;
    double simple_pay = 1.5;
    double hard_earn = 4.0;
};

bbmr::FactorTriple parse_factors(const std::string& s) {
    std::vector<int> ks;
    std::stringstream in(s);
    for (std::string part; std::getline(in, part, ',');) {
        try {
            std::size_t used = 0;
            ks.push_back(std::stoi(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            bbmr::fail(bbmr::ErrorCode::invalid_argument, "--factors: not an integer list: " + s);
        }
    }
    bbmr::require(ks.size() == 3, "--factors needs exactly three values, e.g. 2,4,8");
    return {ks[0], ks[1], ks[2]};
}

double parse_threshold(const std::string& s) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    bbmr::fail(bbmr::ErrorCode::invalid_argument, "--t: not a number: " + s);
}

bbmr::PipelineConfig make_config(const Options& o) {
    bbmr::PipelineConfig cfg;
    cfg.factors = parse_factors(o.factors);
    cfg.block_w = cfg.block_h = o.block;
    cfg.kernel = bbmr::parse_kernel_name(o.kernel);
    cfg.proxy = bbmr::parse_kernel_name(o.proxy);
    cfg.use_proxy = o.use_proxy;
    cfg.t = parse_threshold(o.t);
    if (o.block_max >= 0) cfg.block_max = std::size_t(o.block_max);
    cfg.deblock = !o.no_deblock;
    cfg.deblock_radius = o.deblock_radius;
    cfg.seam.gated = !o.ungated;
    cfg.validate();
    return cfg;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bbmr::fail(bbmr::ErrorCode::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) bbmr::fail(bbmr::ErrorCode::io, "cannot write " + path.string());
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) bbmr::fail(bbmr::ErrorCode::io, "cannot write " + path.string());
}

void require_input(const fs::path& path) {
    if (!fs::exists(path)) bbmr::fail(bbmr::ErrorCode::io, "input not found: " + path.string());
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void add_pipeline_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--factors", o.factors, "Downscale factors k1,k2,k3 (k2 is the overall rate)")
        ->capture_default_str();
    cmd->add_option("--block", o.block, "Square block size in pixels")->capture_default_str();
    cmd->add_option("--kernel", o.kernel, "Storage/reconstruction kernel: bicubic|lanczos3|bilinear|box")
        ->capture_default_str();
    cmd->add_option("--proxy", o.proxy, "Proxy kernel used for scoring with --use-proxy")->capture_default_str();
    cmd->add_flag("--use-proxy", o.use_proxy, "Score candidate scales with the proxy kernel");
    cmd->add_option("--t", o.t, "Minimum dB margin per trade (number or inf)")->capture_default_str();
    cmd->add_option("--block-max", o.block_max, "Cap on trades (default N/(a+c))");
}

void add_deblock_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--deblock-radius", o.deblock_radius, "Half-width of the seam strips")->capture_default_str();
    cmd->add_flag("--no-deblock", o.no_deblock, "Skip seam filtering");
    cmd->add_flag("--ungated", o.ungated, "Filter every seam segment at full strength");
}

int run_downscale(const Options& o, const fs::path& input, fs::path output) {
    require_input(input);
    const auto cfg = make_config(o);
    const auto image = bbmr::read_png(input);
    const auto enc = bbmr::encode_image(image, cfg);
    const auto bytes = bbmr::encode(enc.container);
    if (output.empty()) output = fs::path(input).replace_extension(".bbmr");
    write_bytes(output, bytes);
    auto plan = bbmr::plan_json(enc.plan, enc.grid, &enc.scores);
    plan["container_bytes"] = bytes.size();
    write_text(output.string() + ".plan.json", plan.dump(2) + "\n");
    std::cout << output.string() << ": " << enc.grid.size() << " blocks, " << enc.plan.trades << " trades, "
              << bytes.size() << " bytes\n";
    return kOk;
}

int run_upscale(const Options& o, const fs::path& input, fs::path output) {
    require_input(input);
    const auto cfg = make_config(o);
    const auto container = bbmr::decode(read_bytes(input));
    const auto rec = bbmr::reconstruct(container, cfg);
    if (output.empty()) output = fs::path(input).replace_extension(".png");
    bbmr::write_png(output, rec.image);
    std::cout << output.string() << ": " << rec.image.width() << "x" << rec.image.height()
              << ", seam index " << bbmr::seam_index(rec.stitched, rec.grid) << " -> "
              << bbmr::seam_index(rec.image, rec.grid) << "\n";
    return kOk;
}

int run_roundtrip(const Options& o, const fs::path& input, const std::string& report_path, bool compare_proxy) {
    require_input(input);
    const auto cfg = make_config(o);
    bbmr::BenchOptions bo{compare_proxy, {o.simple_pay, o.hard_earn}};
    std::vector<std::pair<std::string, bbmr::RasterImage>> images;
    images.emplace_back(input.filename().string(), bbmr::read_png(input));
    const auto report = bbmr::run_bench(images, cfg, bo);
    const auto json = bbmr::report_json(report, utc_now());
    if (!report_path.empty()) write_text(report_path, json.dump(2) + "\n");
    std::cout << json.at("images").at(0).dump(2) << "\n";
    return kOk;
}

int run_bench(const Options& o, const fs::path& dir, const std::string& report_path, const std::string& csv_path,
              bool compare_proxy) {
    require_input(dir);
    if (!fs::is_directory(dir)) bbmr::fail(bbmr::ErrorCode::io, "not a directory: " + dir.string());
    const auto cfg = make_config(o);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    std::vector<std::pair<std::string, bbmr::RasterImage>> images;
    for (const auto& f : files) {
        try {
            images.emplace_back(f.filename().string(), bbmr::read_png(f));
        } catch (const bbmr::Error& e) {
            std::cerr << "warning: skipping " << f.string() << ": " << e.what() << "\n";
        }
    }
    if (images.empty()) {
        std::cerr << "error: no usable PNG images in " << dir.string() << "\n";
        return kNoInput;
    }
    bbmr::BenchOptions bo{compare_proxy, {o.simple_pay, o.hard_earn}};
    const auto report = bbmr::run_bench(images, cfg, bo);
    const auto json = bbmr::report_json(report, utc_now());
    if (!report_path.empty()) write_text(report_path, json.dump(2) + "\n");
    if (!csv_path.empty()) write_text(csv_path, bbmr::report_csv(json));
    std::cout << json.at("aggregate").dump(2) << "\n";
    return kOk;
}

int run_inspect(const fs::path& input, bool as_json) {
    require_input(input);
    const auto bytes = read_bytes(input);
    const auto info = bbmr::inspect_json(bytes);
    if (as_json) {
        std::cout << info.dump(2) << "\n";
    } else {
        std::cout << "version      " << info["version"] << "\n"
                  << "image        " << info["orig_w"] << "x" << info["orig_h"] << "\n"
                  << "block        " << info["block_w"] << "x" << info["block_h"] << "\n"
                  << "factors      " << info["factors"].dump() << "\n"
                  << "n_blocks     " << info["n_blocks"] << "\n"
                  << "histogram    k1=" << info["histogram"]["k1"] << " k2=" << info["histogram"]["k2"]
                  << " k3=" << info["histogram"]["k3"] << "\n"
                  << "payload      " << info["payload_bytes"] << " bytes\n"
                  << "total        " << info["total_bytes"] << " bytes\n"
                  << "crc          " << info["crc"].get<std::string>() << "\n";
    }
    return info["crc"] == "OK" ? kOk : kCrc;
}

int run_synth(const fs::path& dir, const std::string& kind, int count, int size, unsigned seed) {
    fs::create_directories(dir);
    for (int i = 0; i < count; ++i) {
        const auto s = std::uint32_t(seed + unsigned(i));
        bbmr::RasterImage img;
        if (kind == "heterogeneous")
            img = bbmr::synth::heterogeneous(size, size, s);
        else if (kind == "noise")
            img = bbmr::synth::noise(size, size, s);
        else if (kind == "flat")
            img = bbmr::synth::flat(size, size, 128, 128, 128);
        else if (kind == "gradient")
            img = bbmr::synth::gradient(size, size);
        else
            bbmr::fail(bbmr::ErrorCode::invalid_argument, "unknown synthetic kind: " + kind);
        char name[64];
        std::snprintf(name, sizeof name, "%s_%03d.png", kind.c_str(), i);
        bbmr::write_png(dir / name, img);
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block-based multi-scale image rescaling"};
    app.require_subcommand(1);
    Options o;
    std::string input;
    std::string output;
    std::string report;
    std::string csv;
    bool compare_proxy = false;
    bool as_json = false;

    auto* down = app.add_subcommand("downscale", "PNG -> .bbmr container (+ .plan.json sidecar)");
    down->add_option("input", input, "Input PNG")->required();
    down->add_option("-o,--output", output, "Output container path");
    add_pipeline_flags(down, o);

    auto* up = app.add_subcommand("upscale", ".bbmr container -> PNG");
    up->add_option("input", input, "Input container")->required();
    up->add_option("-o,--output", output, "Output PNG path");
    up->add_option("--kernel", o.kernel, "Reconstruction kernel")->capture_default_str();
    add_deblock_flags(up, o);

    auto* rt = app.add_subcommand("roundtrip", "Downscale and upscale in memory; print one report record");
    rt->add_option("input", input, "Input PNG")->required();
    rt->add_option("--report", report, "Write the JSON report here");
    rt->add_flag("--compare-proxy", compare_proxy, "Also allocate with the other scorer and compare");
    add_pipeline_flags(rt, o);
    add_deblock_flags(rt, o);

    auto* bench = app.add_subcommand("bench", "Round-trip every PNG in a directory");
    bench->add_option("dir", input, "Corpus directory")->required();
    bench->add_option("--report", report, "Write the JSON report here");
    bench->add_option("--csv", csv, "Write a CSV summary here");
    bench->add_flag("--compare-proxy", compare_proxy, "Also allocate with the other scorer and compare");
    bench->add_option("--simple-pay", o.simple_pay, "Simple-block cut-off on P2-P3 (dB)")->capture_default_str();
    bench->add_option("--hard-earn", o.hard_earn, "Hard-block cut-off on P1-P2 (dB)")->capture_default_str();
    add_pipeline_flags(bench, o);
    add_deblock_flags(bench, o);

    auto* inspect = app.add_subcommand("inspect", "Dump a container's header, plan histogram and CRC status");
    inspect->add_option("input", input, "Input container")->required();
    inspect->add_flag("--json", as_json, "Print JSON");

    std::string kind = "heterogeneous";
    int count = 1;
    int size = 512;
    unsigned seed = 1000;
    auto* synth = app.add_subcommand("synth", "Write deterministic synthetic test images");
    synth->add_option("dir", input, "Output directory")->required();
    synth->add_option("--kind", kind, "heterogeneous|noise|flat|gradient")->capture_default_str();
    synth->add_option("--count", count)->capture_default_str();
    synth->add_option("--size", size)->capture_default_str();
    synth->add_option("--seed", seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*down) return run_downscale(o, input, output);
        if (*up) return run_upscale(o, input, output);
        if (*rt) return run_roundtrip(o, input, report, compare_proxy);
        if (*bench) return run_bench(o, input, report, csv, compare_proxy);
        if (*inspect) return run_inspect(input, as_json);
        if (*synth) return run_synth(input, kind, count, size, seed);
    } catch (const bbmr::Error& e) {
        std::cerr << "error (" << bbmr::to_string(e.code()) << "): " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
