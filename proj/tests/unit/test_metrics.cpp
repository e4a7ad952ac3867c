#include <gtest/gtest.h>

#include <cmath>

#include "bbmr/metrics.hpp"
#include "bbmr/synthetic.hpp"

using namespace bbmr;

TEST(Psnr, IdenticalImagesHitTheCap) {
    const auto img = synth::noise(32, 32, 1);
    const auto p = psnr(img, img);
    EXPECT_EQ(p.value, kPsnrCap);
    EXPECT_EQ(p.mse, 0.0);
    EXPECT_EQ(p.channel_mode, ChannelMode::luma);
    EXPECT_EQ(psnr(img, img, ChannelMode::rgb).value, kPsnrCap);
}

TEST(Psnr, BlackVersusWhiteIsZero) {
    const auto black = synth::flat(16, 16, 0, 0, 0);
    const auto white = synth::flat(16, 16, 255, 255, 255);
    EXPECT_NEAR(psnr(black, white).value, 0.0, 1e-9);
    EXPECT_NEAR(psnr(black, white, ChannelMode::rgb).value, 0.0, 1e-9);
}

TEST(Psnr, UnitMse) {
    const auto a = synth::flat(16, 16, 100, 100, 100);
    const auto b = synth::flat(16, 16, 101, 101, 101);
    // 10 log10(255^2) = 48.1308...
    EXPECT_NEAR(psnr(a, b).value, 48.1308, 1e-4);
    EXPECT_NEAR(psnr(a, b).mse, 1.0, 1e-9);
}

TEST(Psnr, DimensionMismatch) {
    EXPECT_THROW(psnr(RasterImage(4, 4), RasterImage(4, 5)), Error);
}

TEST(Psnr, SymmetricAndMonotone) {
    synth::Rng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = synth::noise(24, 24, rng.next());
        auto b = a;
        auto c = a;
        for (std::size_t i = 0; i < a.bytes().size(); ++i) {
            const int d = int(rng.next() % 7);
            b.bytes()[i] = std::uint8_t(std::clamp(int(a.bytes()[i]) + d, 0, 255));
            c.bytes()[i] = std::uint8_t(std::clamp(int(a.bytes()[i]) + 2 * d, 0, 255));
        }
        EXPECT_DOUBLE_EQ(psnr(a, b).value, psnr(b, a).value);
        const double pb = psnr(a, b).value;
        const double pc = psnr(a, c).value;
        EXPECT_GE(pb, pc);
        EXPECT_LE(pb, kPsnrCap);
    }
}

TEST(Psnr, InvariantUnderSharedPermutation) {
    const auto a = synth::noise(16, 16, 21);
    const auto b = synth::noise(16, 16, 22);
    auto pa = a;
    auto pb = b;
    // Same pixel permutation (reverse order) applied to both images.
    for (int i = 0; i < 256; ++i)
        for (int c = 0; c < 3; ++c) {
            pa.at(i % 16, i / 16, c) = a.at(15 - i % 16, 15 - i / 16, c);
            pb.at(i % 16, i / 16, c) = b.at(15 - i % 16, 15 - i / 16, c);
        }
    EXPECT_NEAR(psnr(a, b).value, psnr(pa, pb).value, 1e-9);
}

TEST(PsnrBlockTable, PerfectReconstruction) {
    const auto img = synth::noise(64, 64, 3);
    const auto table = psnr_block_table(img, make_grid(64, 64, 32, 32), img);
    ASSERT_EQ(table.size(), 4u);
    for (double v : table) EXPECT_EQ(v, kPsnrCap);
}

TEST(PsnrBlockTable, OneCorruptedBlock) {
    const auto ref = synth::noise(64, 64, 4);
    const auto grid = make_grid(64, 64, 32, 32);
    auto rec = ref;
    for (int y = 32; y < 64; ++y)
        for (int x = 0; x < 32; ++x)
            for (int c = 0; c < 3; ++c) rec.at(x, y, c) = std::uint8_t(rec.at(x, y, c) ^ 0x10);
    const auto table = psnr_block_table(ref, grid, rec);
    ASSERT_EQ(table.size(), 4u);
    EXPECT_EQ(table[0], kPsnrCap);
    EXPECT_EQ(table[1], kPsnrCap);
    EXPECT_LT(table[2], kPsnrCap);
    EXPECT_EQ(table[3], kPsnrCap);
}

TEST(PsnrBlockTable, IgnoresPaddedMargin) {
    // 40x40 image on a 32-pixel grid: the padded margin differs but must not count.
    const auto ref = synth::noise(64, 64, 5);
    auto rec = ref;
    for (int y = 0; y < 64; ++y)
        for (int x = 40; x < 64; ++x) rec.at(x, y, 0) = std::uint8_t(~rec.at(x, y, 0));
    for (int y = 40; y < 64; ++y)
        for (int x = 0; x < 64; ++x) rec.at(x, y, 1) = std::uint8_t(~rec.at(x, y, 1));
    const auto grid = make_grid(40, 40, 32, 32);
    for (double v : psnr_block_table(ref, grid, rec)) EXPECT_EQ(v, kPsnrCap);
}
