#include <doctest.h>

#include <fstream>

#include "support.hpp"
#include "thermoscan/config.hpp"

using namespace thermoscan;

TEST_CASE("config: defaults equal the module defaults")
{
    const Config c;
    const DetectMode d;
    CHECK(c.detector().tau == kDefaultTau);
    CHECK(c.detector().rho == d.rho);
    CHECK(c.detector().theta == d.theta);
    CHECK(c.detector().stride == d.stride);
    CHECK(c.detector().scales == d.scales);
    CHECK(c.detector().nmsIou == d.nmsIou);
    CHECK(c.detector().fusion.mode == FusionMode::Mask);
    CHECK(c.detector().fusion.alpha == 0.5);
    CHECK_FALSE(c.detector().maxError.has_value());
    CHECK(c.training.hog == HogParams{});
    CHECK(c.training.meta == TrainMeta{});
    CHECK(c.training.hardNegativePasses == 0);

    // An empty file changes nothing, and the rendered defaults parse back to themselves.
    const std::string text = formatConfig(Config{});
    CHECK(formatConfig(parseConfig("")) == text);
    CHECK(formatConfig(parseConfig(text)) == text);
    CHECK(text.find("tau = 30\n") != std::string::npos);
    CHECK(text.find("scales = 1,1.2,1.44\n") != std::string::npos);
    CHECK(text.find("max_error = auto\n") != std::string::npos);
}

TEST_CASE("config: values, comments and whitespace")
{
    const Config c = parseConfig(
        "# detector\n"
        "tau=45\n"
        "  rho = 0.35   # inline comment\n"
        "\n"
        "scales = 1, 1.25\n"
        "fusion.mode = blend\n"
        "fusion.alpha = 0.25\n"
        "max_error = 1000\n"
        "hog.window_w = 32\n"
        "hog.window_h = 64\n"
        "svm.lambda = 0.001\n"
        "svm.epochs = 5\n"
        "svm.seed = 18446744073709551615\n"
        "resample = bilinear\n"
        "train.hard_negative_passes = 2\n");
    CHECK(c.detector().tau == 45);
    CHECK(c.detector().rho == 0.35);
    CHECK(c.detector().scales == std::vector<double>{1.0, 1.25});
    CHECK(c.detector().fusion.mode == FusionMode::Blend);
    CHECK(c.detector().fusion.alpha == 0.25);
    CHECK(c.detector().maxError == 1000.0);
    CHECK(c.detector().resample == Resample::Bilinear);
    CHECK(c.training.hog.windowW == 32);
    CHECK(c.training.hog.windowH == 64);
    CHECK(c.training.meta.lambda == 0.001);
    CHECK(c.training.meta.epochs == 5);
    CHECK(c.training.meta.seed == 18446744073709551615ULL);
    CHECK(c.training.hardNegativePasses == 2);
    // untouched keys keep their defaults
    CHECK(c.detector().stride == 8);
}

TEST_CASE("config: bad input is rejected with the source and line")
{
    const auto message = [](const std::string& text) {
        try {
            parseConfig(text, "my.conf");
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("tau = 30\nbogus = 1\n").find("my.conf:2") != std::string::npos);
    CHECK(message("bogus = 1\n").find("unknown key") != std::string::npos);
    CHECK(message("tau 30\n").find("key=value") != std::string::npos);
    CHECK(message("tau = 30\ntau = 31\n").find("duplicate") != std::string::npos);
    for (const char* bad : {"tau = 256", "tau = -1", "tau = 3.5", "rho = 1.01", "rho = nan", "stride = 0",
                            "scales = 1.2,1.44", "scales = 1,1", "nms_iou = -0.1", "fusion.mode = add",
                            "fusion.alpha = 2", "max_error = -3", "svm.lambda = 0", "svm.epochs = 0",
                            "svm.seed = -1", "hog.cell_size = 7", "hog.epsilon = 0", "resample = cubic",
                            "train.negatives_per_positive = 0", "theta = abc"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parseConfig(bad), ConfigError);
    }
}

TEST_CASE("config: single values go through the same checks")
{
    Config c;
    setConfigValue(c, "theta", "-2.5");
    CHECK(c.detector().theta == -2.5);
    CHECK_THROWS_AS(setConfigValue(c, "rho", "7"), ConfigError);
    CHECK_THROWS_AS(setConfigValue(c, "nope", "1"), ConfigError);
    // a failed update leaves the config untouched
    CHECK_THROWS_AS(setConfigValue(c, "hog.window_w", "60"), ConfigError);
    CHECK(c.training.hog.windowW == 64);
    setConfigValue(c, "max_error", "auto");
    CHECK_FALSE(c.detector().maxError.has_value());
}

TEST_CASE("config: file loading names the file")
{
    testing::TempDir dir("config");
    {
        std::ofstream(dir.file("ok.conf")) << "stride = 4\n";
        std::ofstream(dir.file("bad.conf")) << "stride = 4\nrho = 2\n";
    }
    CHECK(readConfigFile(dir.file("ok.conf")).detector().stride == 4);
    try {
        readConfigFile(dir.file("bad.conf"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.conf:2") != std::string::npos);
    }
    CHECK_THROWS_AS(readConfigFile(dir.file("missing.conf")), FormatError);
}
