#include "thermoscan/classify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "thermoscan/random.hpp"

namespace thermoscan {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

}  // namespace

double score(const LinearModel& model, std::span<const double> descriptor)
{
    if (descriptor.size() != model.weights.size())
        throw ContractError("score: descriptor length " + std::to_string(descriptor.size()) +
                            " does not match model length " + std::to_string(model.weights.size()));
    return dot(model.weights, descriptor) + model.bias;
}

double objective(const LinearModel& model, std::span<const LabeledSample> samples, double lambda)
{
    const double reg = 0.5 * lambda * dot(model.weights, model.weights);
    double loss = 0.0;
    for (const auto& s : samples)
        loss += std::max(0.0, 1.0 - s.label * score(model, s.descriptor));
    return reg + (samples.empty() ? 0.0 : loss / static_cast<double>(samples.size()));
}

LinearModel train(std::span<const LabeledSample> samples, const TrainMeta& meta, const HogParams& hog,
                  const EpochObserver& onEpoch)
{
    if (!(meta.lambda > 0.0))
        throw ContractError("train: lambda must be positive");
    if (meta.epochs <= 0)
        throw ContractError("train: epochs must be positive");
    if (samples.empty())
        throw ContractError("train: no samples");
    const std::size_t dim = samples.front().descriptor.size();
    bool havePos = false, haveNeg = false;
    for (const auto& s : samples) {
        if (s.descriptor.size() != dim)
            throw ContractError("train: inconsistent descriptor lengths (" + std::to_string(s.descriptor.size()) +
                                " vs " + std::to_string(dim) + ")");
        if (s.label == 1)
            havePos = true;
        else if (s.label == -1)
            haveNeg = true;
        else
            throw ContractError("train: labels must be +1 or -1");
    }
    if (!havePos || !haveNeg)
        throw ContractError("train: need at least one sample of each label");

    LinearModel model{std::vector<double>(dim, 0.0), 0.0, hog, meta};
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(meta.seed);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < meta.epochs; ++epoch) {
        rng.shuffle(order);
        for (const std::size_t idx : order) {
            ++t;
            const auto& s = samples[idx];
            const double eta = 1.0 / (meta.lambda * static_cast<double>(t));
            const bool violated = s.label * (dot(model.weights, s.descriptor) + model.bias) < 1.0;
            const double shrink = 1.0 - eta * meta.lambda;
            for (double& w : model.weights)
                w *= shrink;
            if (violated) {
                const double step = eta * s.label;
                for (std::size_t i = 0; i < dim; ++i)
                    model.weights[i] += step * s.descriptor[i];
                model.bias += step;
            }
            // Pegasos projection: the optimum satisfies |w| <= 1/sqrt(lambda).
            const double sq = dot(model.weights, model.weights);
            if (sq * meta.lambda > 1.0) {
                const double f = 1.0 / std::sqrt(sq * meta.lambda);
                for (double& w : model.weights)
                    w *= f;
            }
        }
        if (onEpoch)
            onEpoch(epoch, model);
    }
    return model;
}

// ---- codec ----

namespace {

class Writer {
public:
    void bytes(const char* s, std::size_t n) { out.insert(out.end(), s, s + n); }
    void u8(std::uint8_t v) { out.push_back(v); }
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i)
            out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i)
            out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    std::vector<std::uint8_t> out;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    void need(std::size_t n) const
    {
        if (in_.size() - pos_ < n)
            throw ModelCodecError("model: truncated stream at byte " + std::to_string(pos_));
    }
    std::uint8_t u8()
    {
        need(1);
        return in_[pos_++];
    }
    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::uint64_t u64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::size_t remaining() const { return in_.size() - pos_; }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encodeModel(const LinearModel& model)
{
    Writer w;
    w.bytes("TSVM", 4);
    w.u8(kModelFormatVersion);
    const HogParams& h = model.hogParams;
    w.i32(h.windowW);
    w.i32(h.windowH);
    w.i32(h.cellSize);
    w.i32(h.blockSize);
    w.i32(h.blockStride);
    w.i32(h.numBins);
    w.f64(h.epsilon);
    w.f64(model.trainMeta.lambda);
    w.i32(model.trainMeta.epochs);
    w.u64(model.trainMeta.seed);
    w.f64(model.bias);
    w.u32(static_cast<std::uint32_t>(model.weights.size()));
    for (double v : model.weights)
        w.f64(v);
    return std::move(w.out);
}

LinearModel decodeModel(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 4 || !std::equal(bytes.begin(), bytes.begin() + 4, "TSVM"))
        throw ModelCodecError("model: bad magic, expected TSVM");
    Reader r(bytes.subspan(4));
    const std::uint8_t version = r.u8();
    if (version != kModelFormatVersion)
        throw ModelCodecError("model: unsupported format version " + std::to_string(version));
    LinearModel m;
    m.hogParams.windowW = r.i32();
    m.hogParams.windowH = r.i32();
    m.hogParams.cellSize = r.i32();
    m.hogParams.blockSize = r.i32();
    m.hogParams.blockStride = r.i32();
    m.hogParams.numBins = r.i32();
    m.hogParams.epsilon = r.f64();
    m.trainMeta.lambda = r.f64();
    m.trainMeta.epochs = r.i32();
    m.trainMeta.seed = r.u64();
    m.bias = r.f64();
    const std::uint32_t n = r.u32();
    if (r.remaining() != static_cast<std::size_t>(n) * 8)
        throw ModelCodecError("model: weight count " + std::to_string(n) + " inconsistent with stream length");
    try {
        m.hogParams.validate();
    } catch (const ContractError& e) {
        throw ModelCodecError(std::string("model: ") + e.what());
    }
    if (n != m.hogParams.descriptorLength())
        throw ModelCodecError("model: weight count " + std::to_string(n) + " does not match HOG descriptor length " +
                              std::to_string(m.hogParams.descriptorLength()));
    m.weights.resize(n);
    for (auto& v : m.weights)
        v = r.f64();
    return m;
}

LinearModel readModelFile(const std::string& path)
{
    const auto bytes = readFileBytes(path);
    try {
        return decodeModel(bytes);
    } catch (const ModelCodecError& e) {
        throw ModelCodecError(path + ": " + e.what());
    }
}

void writeModelFile(const std::string& path, const LinearModel& model)
{
    writeFileAtomic(path, encodeModel(model));
}

}  // namespace thermoscan
