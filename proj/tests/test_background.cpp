#include <doctest.h>

#include "support.hpp"
#include "thermoscan/background.hpp"
#include "thermoscan/synth.hpp"

using namespace thermoscan;

TEST_CASE("subtract: identical input gives zero diff and empty mask")
{
    Rng rng(10);
    const GrayImage img = testing::randomImage(rng, 16, 9);
    const Subtraction s = subtract(img, BackgroundModel::fromImage(img));
    CHECK(s.diff == GrayImage(16, 9));
    CHECK(s.mask.count() == 0);
}

TEST_CASE("subtract: a difference of exactly tau is foreground")
{
    GrayImage bg(5, 5, 100);
    GrayImage in = bg;
    in.at(2, 3) = 100 + kDefaultTau;
    in.at(0, 0) = 100 + kDefaultTau - 1;
    const Subtraction s = subtract(in, BackgroundModel::fromImage(bg));
    CHECK(s.mask.count() == 1);
    CHECK(s.mask.at(2, 3));
    CHECK(s.diff.at(0, 0) == kDefaultTau - 1);
}

TEST_CASE("subtract: per-pixel mask definition, symmetry, invalid pixels")
{
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage a = testing::randomImage(rng, 12, 8);
        const GrayImage b = testing::randomImage(rng, 12, 8);
        BackgroundModel bm = BackgroundModel::fromImage(b);
        for (int i = 0; i < 20; ++i)
            bm.valid.set(static_cast<int>(rng.uniformInt(0, 11)), static_cast<int>(rng.uniformInt(0, 7)), false);
        const int tau = static_cast<int>(rng.uniformInt(0, 80));
        const Subtraction s = subtract(a, bm, tau);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 12; ++x) {
                const int d = std::abs(a.at(x, y) - b.at(x, y));
                if (bm.valid.at(x, y)) {
                    REQUIRE(s.diff.at(x, y) == d);
                    REQUIRE(s.mask.at(x, y) == (d >= tau));
                } else {
                    REQUIRE_FALSE(s.mask.at(x, y));
                }
            }
        CHECK(subtract(b, BackgroundModel::fromImage(a), tau).diff ==
              subtract(a, BackgroundModel::fromImage(b), tau).diff);
    }
}

TEST_CASE("subtract: size mismatch is a contract error")
{
    CHECK_THROWS_AS(subtract(GrayImage(3, 3), BackgroundModel::fromImage(GrayImage(3, 4))), ContractError);
}

TEST_CASE("subtract: a pasted blob yields exactly the blob support")
{
    SceneParams p;
    p.humansPerFrame = 1;
    const PanoramaScene scene = generateScene(21, p);
    const GrayImage bg = renderBackground(scene);
    const RenderedFrame f = renderFrame(scene, 0);
    REQUIRE(f.truthBoxes.size() == 1);
    const Subtraction s = subtract(f.frame, BackgroundModel::fromImage(bg), 1);
    // The oracle: pixels where the renderer changed the background.
    long long changed = 0;
    for (int y = 0; y < bg.height(); ++y)
        for (int x = 0; x < bg.width(); ++x) {
            const bool differs = f.frame.at(x, y) != bg.at(x, y);
            changed += differs;
            REQUIRE(s.mask.at(x, y) == differs);
            if (differs) {
                const BoundingBox& t = f.truthBoxes[0];
                REQUIRE(x >= t.x);
                REQUIRE(x < t.right());
                REQUIRE(y >= t.y);
                REQUIRE(y < t.bottom());
            }
        }
    CHECK(changed > 0);
    CHECK(s.mask.count() == changed);
}

TEST_CASE("fuse: mask and blend endpoints")
{
    Rng rng(12);
    const GrayImage orig = testing::randomImage(rng, 10, 6);
    const GrayImage diff = testing::randomImage(rng, 10, 6);
    CHECK(fuse(orig, diff, BinaryMask(10, 6, false)) == GrayImage(10, 6));
    CHECK(fuse(orig, diff, BinaryMask(10, 6, true)) == orig);
    CHECK(fuse(orig, diff, BinaryMask(10, 6, false), {FusionMode::Blend, 1.0}) == orig);
    CHECK(fuse(orig, diff, BinaryMask(10, 6, false), {FusionMode::Blend, 0.0}) == diff);
    const GrayImage half = fuse(GrayImage(1, 1, 11), GrayImage(1, 1, 20), BinaryMask(1, 1), {FusionMode::Blend, 0.5});
    CHECK(half.at(0, 0) == 16);  // round(15.5)
}

TEST_CASE("fuse: mask mode is zero exactly off the support")
{
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage orig = testing::randomImage(rng, 9, 7, 1, 255);
        BinaryMask m(9, 7);
        for (int y = 0; y < 7; ++y)
            for (int x = 0; x < 9; ++x)
                m.set(x, y, rng.uniform() < 0.4);
        const GrayImage out = fuse(orig, GrayImage(9, 7), m);
        for (int y = 0; y < 7; ++y)
            for (int x = 0; x < 9; ++x)
                REQUIRE(out.at(x, y) == (m.at(x, y) ? orig.at(x, y) : 0));
    }
}

TEST_CASE("mask rendering")
{
    BinaryMask m(2, 1);
    m.set(1, 0, true);
    CHECK(m.toImage() == GrayImage(2, 1, {0, 255}));
}
