#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "thermoscan/hog.hpp"

using namespace thermoscan;

namespace {

GrayImage horizontalRamp(int w, int h, int start = 0)
{
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y) = static_cast<std::uint8_t>(std::min(255, start + x));
    return img;
}

GrayImage transpose(const GrayImage& img)
{
    GrayImage out(img.height(), img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out.at(y, x) = img.at(x, y);
    return out;
}

HogParams randomParams(Rng& rng)
{
    HogParams p;
    p.cellSize = static_cast<int>(rng.uniformInt(2, 8));
    p.windowW = p.cellSize * static_cast<int>(rng.uniformInt(2, 8));
    p.windowH = p.cellSize * static_cast<int>(rng.uniformInt(2, 12));
    p.blockSize = static_cast<int>(rng.uniformInt(1, std::min(p.windowW, p.windowH) / p.cellSize));
    p.blockStride = static_cast<int>(rng.uniformInt(1, 3));
    p.numBins = static_cast<int>(rng.uniformInt(1, 12));
    return p;
}

}  // namespace

TEST_CASE("gradients: constant image has zero magnitude everywhere")
{
    const GradientField g = computeGradients(GrayImage(9, 7, 123));
    for (double m : g.magnitude)
        CHECK(m == 0.0);
}

TEST_CASE("gradients: ramp has unit horizontal gradient in the interior")
{
    const GrayImage ramp = horizontalRamp(20, 10, 5);
    const GradientField g = computeGradients(ramp);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 20; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * 20 + x;
            // One-sided differences at the left/right edge also give 1 on a ramp.
            CHECK(g.gx[i] == 1.0);
            CHECK(g.gy[i] == 0.0);
            CHECK(g.magnitude[i] == 1.0);
            CHECK(g.orientationDeg[i] == 0.0);
        }
}

TEST_CASE("gradients: orientation is folded into [0, 180)")
{
    Rng rng(40);
    const GradientField g = computeGradients(testing::randomImage(rng, 30, 30));
    for (std::size_t i = 0; i < g.magnitude.size(); ++i) {
        CHECK(g.orientationDeg[i] >= 0.0);
        CHECK(g.orientationDeg[i] < 180.0);
        CHECK(g.magnitude[i] == doctest::Approx(std::hypot(g.gx[i], g.gy[i])).epsilon(1e-12));
    }
    CHECK_THROWS_AS(computeGradients(GrayImage(2, 5)), ContractError);
}

TEST_CASE("gradients: transposing the image swaps gx and gy")
{
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const GrayImage img = testing::randomImage(rng, 13, 17);
        const GradientField a = computeGradients(img);
        const GradientField b = computeGradients(transpose(img));
        for (int y = 0; y < 17; ++y)
            for (int x = 0; x < 13; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * 13 + x;
                const std::size_t j = static_cast<std::size_t>(x) * 17 + y;
                REQUIRE(a.gx[i] == b.gy[j]);
                REQUIRE(a.gy[i] == b.gx[j]);
                REQUIRE(a.magnitude[i] == b.magnitude[j]);
            }
    }
}

TEST_CASE("gradients: interior angles match a direct arctangent")
{
    Rng rng(42);
    const GrayImage img = testing::randomImage(rng, 40, 40);
    const GradientField g = computeGradients(img);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * 40 + x;
            if (g.magnitude[i] == 0.0)
                continue;
            double deg = std::atan2(g.gy[i], g.gx[i]) * 180.0 / std::numbers::pi;
            if (deg < 0.0)
                deg += 180.0;
            if (deg >= 180.0)
                deg -= 180.0;
            REQUIRE(g.orientationDeg[i] == doctest::Approx(deg).epsilon(1e-12));
        }
}

TEST_CASE("hog: default length is 7 * 15 * 36")
{
    const HogParams p;
    CHECK(p.descriptorLength() == 3780);
    CHECK(hogFeatures(GrayImage(64, 128, 50)).size() == 3780);
}

TEST_CASE("hog: length formula holds for random valid geometry")
{
    Rng rng(43);
    for (int i = 0; i < 100; ++i) {
        const HogParams p = randomParams(rng);
        REQUIRE_NOTHROW(p.validate());
        const std::size_t blocksX = (p.windowW / p.cellSize - p.blockSize) / p.blockStride + 1;
        const std::size_t blocksY = (p.windowH / p.cellSize - p.blockSize) / p.blockStride + 1;
        const std::size_t expected = blocksX * blocksY * p.blockSize * p.blockSize * p.numBins;
        CHECK(p.descriptorLength() == expected);
        CHECK(hogFeatures(testing::randomImage(rng, p.windowW, p.windowH), p).size() == expected);
    }
}

TEST_CASE("hog: constant window gives an all-zero descriptor")
{
    for (double v : hogFeatures(GrayImage(64, 128, 200)))
        REQUIRE(v == 0.0);
}

TEST_CASE("hog: ramp cells vote only into bin 0 and blocks stay normalized")
{
    const GrayImage ramp = horizontalRamp(64, 128, 30);
    const HogParams p;
    const auto hist = cellHistograms(computeGradients(ramp), p);
    for (std::size_t c = 0; c < hist.size() / 9; ++c) {
        // 64 pixels of magnitude 1 per cell, all at 0 degrees
        CHECK(hist[c * 9] == 64.0);
        for (int b = 1; b < 9; ++b)
            CHECK(hist[c * 9 + b] == 0.0);
    }
    const auto d = hogFeatures(ramp, p);
    for (std::size_t b = 0; b < d.size(); b += 36) {
        double sq = 0.0;
        for (std::size_t k = 0; k < 36; ++k)
            sq += d[b + k] * d[b + k];
        CHECK(std::sqrt(sq) <= 1.0 + 1e-5);
        CHECK(std::sqrt(sq) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("hog: votes split linearly between neighbouring bin centres")
{
    // A vertical ramp gives 90 degrees everywhere; with 9 bins of 20 degrees, 90 sits
    // halfway between centres 80 (bin 4) and 100 (bin 5).
    const GrayImage vramp = transpose(horizontalRamp(16, 16, 0));
    HogParams p;
    p.windowW = p.windowH = 16;
    const auto hist = cellHistograms(computeGradients(vramp), p);
    for (std::size_t c = 0; c < hist.size() / 9; ++c) {
        CHECK(hist[c * 9 + 4] == 32.0);
        CHECK(hist[c * 9 + 5] == 32.0);
    }
}

TEST_CASE("hog: adding a constant does not change the descriptor")
{
    Rng rng(44);
    for (int i = 0; i < 50; ++i) {
        const GrayImage img = testing::randomImage(rng, 64, 128, 0, 200);
        const int offset = static_cast<int>(rng.uniformInt(1, 55));
        GrayImage brighter = img;
        for (auto& p : brighter.pixels())
            p = static_cast<std::uint8_t>(p + offset);
        REQUIRE(hogFeatures(img) == hogFeatures(brighter));
    }
}

TEST_CASE("hog: block norms stay within 1 + 1e-5 on random windows")
{
    Rng rng(45);
    const HogParams p;
    for (int i = 0; i < 100; ++i) {
        // Mix of noise and structured content.
        GrayImage img = testing::randomImage(rng, 64, 128, 0, i % 3 == 0 ? 255 : 20);
        if (i % 2 == 0) {
            const BoundingBox bright = testing::randomBox(rng, 40, 100, 30, 60);
            for (int y = bright.y; y < std::min(128, bright.bottom()); ++y)
                for (int x = bright.x; x < std::min(64, bright.right()); ++x)
                    img.at(x, y) = 240;
        }
        const auto d = hogFeatures(img, p);
        for (std::size_t b = 0; b < d.size(); b += p.blockLength()) {
            double sq = 0.0;
            for (int k = 0; k < p.blockLength(); ++k) {
                REQUIRE(d[b + k] >= 0.0);
                sq += d[b + k] * d[b + k];
            }
            REQUIRE(std::sqrt(sq) <= 1.0 + 1e-5);
        }
        CHECK(hogFeatures(img, p) == d);
    }
}

TEST_CASE("hog: L2-hys on blocks of four equal cells")
{
    // Four equal entries normalize to 0.5, clip to 0.2, and renormalize back to 0.5.
    const auto d = hogFeatures(horizontalRamp(64, 128, 30));
    for (std::size_t b = 0; b < d.size(); b += 36) {
        for (std::size_t c = 0; c < 4; ++c)
            CHECK(d[b + 9 * c] == doctest::Approx(0.5).epsilon(1e-9));
    }
}

TEST_CASE("hog: window size and geometry are checked")
{
    CHECK_THROWS_AS(hogFeatures(GrayImage(64, 127)), ContractError);
    HogParams bad;
    bad.windowW = 60;
    CHECK_THROWS_AS(bad.validate(), ContractError);
    bad = HogParams{};
    bad.blockSize = 9;
    CHECK_THROWS_AS(bad.validate(), ContractError);
    bad = HogParams{};
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(bad.validate(), ContractError);
}
