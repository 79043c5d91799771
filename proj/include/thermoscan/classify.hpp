#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "thermoscan/hog.hpp"

namespace thermoscan {

struct TrainMeta {
    double lambda = 1e-4;
    int epochs = 100;
    std::uint64_t seed = 42;
    friend bool operator==(const TrainMeta&, const TrainMeta&) = default;
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    HogParams hogParams;
    TrainMeta trainMeta;

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct LabeledSample {
    HogDescriptor descriptor;
    int label = 1;  // +1 or -1
};

/// Called after each epoch with (epoch index, model so far).
using EpochObserver = std::function<void(int, const LinearModel&)>;

/// Pegasos-style primal sub-gradient descent on lambda/2 |w|^2 + mean hinge loss.
/// Step 1/(lambda t), per-epoch shuffle from `meta.seed`, unregularized bias.
/// The returned model carries `hog` so detection uses the same geometry.
LinearModel train(std::span<const LabeledSample> samples, const TrainMeta& meta, const HogParams& hog = {},
                  const EpochObserver& onEpoch = {});

/// lambda/2 |w|^2 + mean hinge loss over `samples`.
double objective(const LinearModel& model, std::span<const LabeledSample> samples, double lambda);

/// w . d + b
double score(const LinearModel& model, std::span<const double> descriptor);


// ---- model file ----
//
// Little-endian layout:
//   "TSVM" | u8 version(=1)
//   i32 windowW, windowH, cellSize, blockSize, blockStride, numBins | f64 epsilon
//   f64 lambda | i32 epochs | u64 seed
//   f64 bias | u32 n | f64 weights[n]

inline constexpr std::uint8_t kModelFormatVersion = 1;

class ModelCodecError : public FormatError {
public:
    using FormatError::FormatError;
};

std::vector<std::uint8_t> encodeModel(const LinearModel& model);
LinearModel decodeModel(std::span<const std::uint8_t> bytes);

LinearModel readModelFile(const std::string& path);
void writeModelFile(const std::string& path, const LinearModel& model);

}  // namespace thermoscan
