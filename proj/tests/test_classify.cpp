#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "thermoscan/classify.hpp"

using namespace thermoscan;

namespace {

std::vector<LabeledSample> toySet(int sign = 1)
{
    return {{{2, 0}, sign}, {{3, 1}, sign}, {{-2, 0}, -sign}, {{-3, -1}, -sign}};
}

// Two overlapping Gaussian clouds in 5 dimensions.
std::vector<LabeledSample> noisySet(Rng& rng, int n)
{
    std::vector<LabeledSample> out;
    for (int i = 0; i < n; ++i) {
        const int label = i % 2 == 0 ? 1 : -1;
        HogDescriptor d(5);
        for (auto& v : d)
            v = rng.normal() + 0.8 * label;
        out.push_back({d, label});
    }
    return out;
}

HogParams smallHog()
{
    HogParams h;
    h.windowW = 16;
    h.windowH = 16;
    return h;
}

}  // namespace

TEST_CASE("train: toy set is classified perfectly")
{
    const auto samples = toySet();
    const LinearModel m = train(samples, {});
    for (const auto& s : samples)
        CHECK(s.label * score(m, s.descriptor) > 0.0);
}

TEST_CASE("train: identical inputs give bitwise identical models")
{
    Rng rng(50);
    const auto samples = noisySet(rng, 60);
    const TrainMeta meta{1e-3, 30, 9};
    const LinearModel a = train(samples, meta);
    const LinearModel b = train(samples, meta);
    CHECK(a == b);
    CHECK(encodeModel(a) == encodeModel(b));
    CHECK_FALSE(train(samples, {1e-3, 30, 10}) == a);
}

TEST_CASE("train: flipping the labels flips every decision")
{
    const LinearModel m = train(toySet(1), {});
    const LinearModel f = train(toySet(-1), {});
    for (const auto& s : toySet(1)) {
        CHECK(score(m, s.descriptor) * score(f, s.descriptor) < 0.0);
    }
    CHECK(m.weights[0] * f.weights[0] < 0.0);
}

TEST_CASE("train: objective trends down from the zero model")
{
    // Stochastic steps are not monotone epoch to epoch, so compare windows of epochs.
    Rng rng(51);
    for (const auto& samples : {toySet(), noisySet(rng, 200)}) {
        const TrainMeta meta{1e-2, 60, 3};
        std::vector<double> history;
        train(samples, meta, {}, [&](int, const LinearModel& m) { history.push_back(objective(m, samples, meta.lambda)); });
        REQUIRE(history.size() == 60);
        const auto mean = [&](std::size_t from, std::size_t to) {
            double s = 0.0;
            for (std::size_t e = from; e < to; ++e)
                s += history[e];
            return s / static_cast<double>(to - from);
        };
        LinearModel zero;
        zero.weights.assign(samples[0].descriptor.size(), 0.0);
        CHECK(mean(50, 60) < objective(zero, samples, meta.lambda));
        CHECK(mean(50, 60) <= mean(0, 10));
        CHECK(mean(50, 60) <= mean(20, 30) * 1.05);
    }
}

TEST_CASE("train: contract checks")
{
    CHECK_THROWS_AS(train(std::vector<LabeledSample>{}, {}), ContractError);
    CHECK_THROWS_AS(train(std::vector<LabeledSample>{{{1.0}, 1}, {{1.0, 2.0}, -1}}, {}), ContractError);
    CHECK_THROWS_AS(train(std::vector<LabeledSample>{{{1.0}, 1}, {{2.0}, 1}}, {}), ContractError);
    CHECK_THROWS_AS(train(std::vector<LabeledSample>{{{1.0}, 2}, {{2.0}, -1}}, {}), ContractError);
    CHECK_THROWS_AS(train(toySet(), {0.0, 10, 1}), ContractError);
    CHECK_THROWS_AS(train(toySet(), {1e-4, 0, 1}), ContractError);
}

TEST_CASE("score: degenerate model and positive scaling")
{
    LinearModel zero{std::vector<double>(3, 0.0), 0.5, {}, {}};
    CHECK(score(zero, std::vector<double>{1, -2, 3}) == 0.5);
    CHECK_THROWS_AS(score(zero, std::vector<double>{1, 2}), ContractError);

    Rng rng(52);
    LinearModel m{{0.3, -1.2, 2.0}, -0.4, {}, {}};
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> d{rng.normal(), rng.normal(), rng.normal()};
        const double c = rng.uniform(0.01, 100.0);
        LinearModel scaled = m;
        for (auto& w : scaled.weights)
            w *= c;
        scaled.bias *= c;
        CHECK(std::signbit(score(m, d)) == std::signbit(score(scaled, d)));
        // linear part
        const double a = rng.uniform(-5, 5);
        std::vector<double> ad = d;
        for (auto& v : ad)
            v *= a;
        CHECK(score(m, ad) - m.bias == doctest::Approx(a * (score(m, d) - m.bias)).epsilon(1e-9));
    }
}

TEST_CASE("codec: round trip is exact")
{
    Rng rng(53);
    LinearModel m;
    m.hogParams = smallHog();
    m.weights.resize(m.hogParams.descriptorLength());
    for (auto& w : m.weights)
        w = rng.normal() * 1e3;
    m.bias = -1.0 / 3.0;
    m.trainMeta = {2.5e-5, 17, 123456789012345ULL};
    CHECK(decodeModel(encodeModel(m)) == m);

    testing::TempDir dir("codec");
    writeModelFile(dir.file("m.tsvm"), m);
    CHECK(readModelFile(dir.file("m.tsvm")) == m);
}

TEST_CASE("codec: matches the committed golden file")
{
    LinearModel m;
    m.hogParams = smallHog();
    for (int i = 0; i < 36; ++i)
        m.weights.push_back((i - 17.5) / 8.0);
    m.weights[3] = -0.0;
    m.weights[10] = 1e-300;
    m.weights[20] = 123456.789;
    m.bias = -0.75;
    m.trainMeta = {0.01, 7, 0xDEADBEEFCAFE1234ULL};

    const auto golden = readFileBytes(THERMOSCAN_TEST_DATA "/golden_model.tsvm");
    CHECK(encodeModel(m) == golden);
    const LinearModel back = decodeModel(golden);
    CHECK(back == m);
    CHECK(std::signbit(back.weights[3]));
}

TEST_CASE("codec: malformed streams are rejected")
{
    LinearModel m;
    m.hogParams = smallHog();
    m.weights.assign(36, 1.0);
    const auto good = encodeModel(m);

    auto bad = good;
    bad[0] = 'X';
    CHECK_THROWS_AS(decodeModel(bad), ModelCodecError);

    bad = good;
    bad[4] = 2;
    CHECK_THROWS_AS(decodeModel(bad), ModelCodecError);

    bad = good;
    bad.pop_back();
    CHECK_THROWS_AS(decodeModel(bad), ModelCodecError);

    CHECK_THROWS_AS(decodeModel(std::vector<std::uint8_t>(good.begin(), good.begin() + 20)), ModelCodecError);

    LinearModel wrongLength = m;
    wrongLength.weights.assign(35, 1.0);
    CHECK_THROWS_AS(decodeModel(encodeModel(wrongLength)), ModelCodecError);

    LinearModel badGeometry = m;
    badGeometry.hogParams.cellSize = 0;
    CHECK_THROWS_AS(decodeModel(encodeModel(badGeometry)), ModelCodecError);
}
