#include "thermoscan/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

namespace thermoscan {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string formatDouble(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double toDouble(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError(key + ": not a number: '" + text + "'");
    return v;
}

long long toInteger(const std::string& key, const std::string& text)
{
    long long v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ConfigError(key + ": not an integer: '" + text + "'");
    return v;
}

std::uint64_t toSeed(const std::string& key, const std::string& text)
{
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ConfigError(key + ": not an unsigned integer: '" + text + "'");
    return v;
}

double inRange(const std::string& key, double v, double lo, double hi)
{
    if (!(v >= lo && v <= hi))
        throw ConfigError(key + ": " + formatDouble(v) + " outside [" + formatDouble(lo) + ", " + formatDouble(hi) + "]");
    return v;
}

int intInRange(const std::string& key, const std::string& text, long long lo, long long hi)
{
    const long long v = toInteger(key, text);
    if (v < lo || v > hi)
        throw ConfigError(key + ": " + text + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

double positive(const std::string& key, const std::string& text)
{
    const double v = toDouble(key, text);
    if (!(v > 0.0))
        throw ConfigError(key + ": must be positive, got " + text);
    return v;
}

std::vector<double> toScales(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(toDouble(key, trim(item)));
    if (out.empty() || out.front() != 1.0)
        throw ConfigError(key + ": ladder must start at 1.0");
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!(out[i] > out[i - 1]))
            throw ConfigError(key + ": ladder must be strictly increasing");
    }
    return out;
}

constexpr int kMaxDim = 1 << 16;

struct Key {
    const char* name;
    std::function<void(Config&, const std::string&)> set;
    std::function<std::string(const Config&)> get;
};

const std::vector<Key>& keys()
{
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        const auto det = [](Config& c) -> DetectMode& { return c.training.detector; };
        k.push_back({"tau", [=](Config& c, const std::string& v) { det(c).tau = intInRange("tau", v, 0, 255); },
                     [](const Config& c) { return std::to_string(c.detector().tau); }});
        k.push_back({"rho", [=](Config& c, const std::string& v) { det(c).rho = inRange("rho", toDouble("rho", v), 0, 1); },
                     [](const Config& c) { return formatDouble(c.detector().rho); }});
        k.push_back({"theta", [=](Config& c, const std::string& v) { det(c).theta = toDouble("theta", v); },
                     [](const Config& c) { return formatDouble(c.detector().theta); }});
        k.push_back({"stride", [=](Config& c, const std::string& v) { det(c).stride = intInRange("stride", v, 1, kMaxDim); },
                     [](const Config& c) { return std::to_string(c.detector().stride); }});
        k.push_back({"scales", [=](Config& c, const std::string& v) { det(c).scales = toScales("scales", v); },
                     [](const Config& c) {
                         std::string s;
                         for (double v : c.detector().scales)
                             s += (s.empty() ? "" : ",") + formatDouble(v);
                         return s;
                     }});
        k.push_back({"nms_iou",
                     [=](Config& c, const std::string& v) { det(c).nmsIou = inRange("nms_iou", toDouble("nms_iou", v), 0, 1); },
                     [](const Config& c) { return formatDouble(c.detector().nmsIou); }});
        k.push_back({"resample",
                     [=](Config& c, const std::string& v) {
                         if (v == "nearest")
                             det(c).resample = Resample::Nearest;
                         else if (v == "bilinear")
                             det(c).resample = Resample::Bilinear;
                         else
                             throw ConfigError("resample: expected nearest or bilinear, got '" + v + "'");
                     },
                     [](const Config& c) {
                         return std::string(c.detector().resample == Resample::Nearest ? "nearest" : "bilinear");
                     }});
        k.push_back({"fusion.mode",
                     [=](Config& c, const std::string& v) {
                         if (v == "mask")
                             det(c).fusion.mode = FusionMode::Mask;
                         else if (v == "blend")
                             det(c).fusion.mode = FusionMode::Blend;
                         else
                             throw ConfigError("fusion.mode: expected mask or blend, got '" + v + "'");
                     },
                     [](const Config& c) {
                         return std::string(c.detector().fusion.mode == FusionMode::Mask ? "mask" : "blend");
                     }});
        k.push_back({"fusion.alpha",
                     [=](Config& c, const std::string& v) {
                         det(c).fusion.alpha = inRange("fusion.alpha", toDouble("fusion.alpha", v), 0, 1);
                     },
                     [](const Config& c) { return formatDouble(c.detector().fusion.alpha); }});
        k.push_back({"max_error",
                     [=](Config& c, const std::string& v) {
                         if (v == "auto") {
                             det(c).maxError.reset();
                             return;
                         }
                         const double e = toDouble("max_error", v);
                         if (!(e >= 0.0))
                             throw ConfigError("max_error: must be nonnegative or 'auto', got " + v);
                         det(c).maxError = e;
                     },
                     [](const Config& c) {
                         return c.detector().maxError ? formatDouble(*c.detector().maxError) : std::string("auto");
                     }});

        const auto hogInt = [&k](const char* name, int HogParams::*field) {
            k.push_back({name, [=](Config& c, const std::string& v) { c.training.hog.*field = intInRange(name, v, 1, kMaxDim); },
                         [=](const Config& c) { return std::to_string(c.training.hog.*field); }});
        };
        hogInt("hog.window_w", &HogParams::windowW);
        hogInt("hog.window_h", &HogParams::windowH);
        hogInt("hog.cell_size", &HogParams::cellSize);
        hogInt("hog.block_size", &HogParams::blockSize);
        hogInt("hog.block_stride", &HogParams::blockStride);
        hogInt("hog.bins", &HogParams::numBins);
        k.push_back({"hog.epsilon", [](Config& c, const std::string& v) { c.training.hog.epsilon = positive("hog.epsilon", v); },
                     [](const Config& c) { return formatDouble(c.training.hog.epsilon); }});

        k.push_back({"svm.lambda", [](Config& c, const std::string& v) { c.training.meta.lambda = positive("svm.lambda", v); },
                     [](const Config& c) { return formatDouble(c.training.meta.lambda); }});
        k.push_back({"svm.epochs",
                     [](Config& c, const std::string& v) { c.training.meta.epochs = intInRange("svm.epochs", v, 1, 1000000); },
                     [](const Config& c) { return std::to_string(c.training.meta.epochs); }});
        k.push_back({"svm.seed", [](Config& c, const std::string& v) { c.training.meta.seed = toSeed("svm.seed", v); },
                     [](const Config& c) { return std::to_string(c.training.meta.seed); }});

        k.push_back({"train.negatives_per_positive",
                     [](Config& c, const std::string& v) {
                         c.training.negativesPerPositive = intInRange("train.negatives_per_positive", v, 1, 10000);
                     },
                     [](const Config& c) { return std::to_string(c.training.negativesPerPositive); }});
        k.push_back({"train.negative_max_iou",
                     [](Config& c, const std::string& v) {
                         c.training.negativeMaxIou =
                             inRange("train.negative_max_iou", toDouble("train.negative_max_iou", v), 0, 1);
                     },
                     [](const Config& c) { return formatDouble(c.training.negativeMaxIou); }});
        k.push_back({"train.sample_seed",
                     [](Config& c, const std::string& v) { c.training.sampleSeed = toSeed("train.sample_seed", v); },
                     [](const Config& c) { return std::to_string(c.training.sampleSeed); }});
        k.push_back({"train.hard_negative_passes",
                     [](Config& c, const std::string& v) {
                         c.training.hardNegativePasses = intInRange("train.hard_negative_passes", v, 0, 100);
                     },
                     [](const Config& c) { return std::to_string(c.training.hardNegativePasses); }});
        k.push_back({"train.hard_negative_max_iou",
                     [](Config& c, const std::string& v) {
                         c.training.hardNegativeMaxIou =
                             inRange("train.hard_negative_max_iou", toDouble("train.hard_negative_max_iou", v), 0, 1);
                     },
                     [](const Config& c) { return formatDouble(c.training.hardNegativeMaxIou); }});
        return k;
    }();
    return table;
}

const Key& findKey(const std::string& name)
{
    for (const auto& k : keys()) {
        if (name == k.name)
            return k;
    }
    throw ConfigError("unknown key '" + name + "'");
}

void checkWhole(const Config& c)
{
    try {
        c.training.hog.validate();
    } catch (const ContractError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

void setConfigValue(Config& config, const std::string& key, const std::string& value)
{
    Config next = config;
    findKey(key).set(next, trim(value));
    checkWhole(next);
    config = std::move(next);
}

Config parseConfig(const std::string& text, const std::string& source, Config base)
{
    std::istringstream in(text);
    std::string line;
    std::set<std::string> seen;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::string where = source + ":" + std::to_string(lineNo) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + "expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (!seen.insert(key).second)
            throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            findKey(key).set(base, trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    try {
        checkWhole(base);
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return base;
}

Config readConfigFile(const std::string& path)
{
    const auto bytes = readFileBytes(path);
    return parseConfig(std::string(bytes.begin(), bytes.end()), path);
}

std::string formatConfig(const Config& config)
{
    std::string out;
    for (const auto& k : keys())
        out += std::string(k.name) + " = " + k.get(config) + "\n";
    return out;
}

}  // namespace thermoscan
