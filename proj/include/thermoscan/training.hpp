#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "thermoscan/classify.hpp"
#include "thermoscan/detect.hpp"

namespace thermoscan {

struct TrainingOptions {
    HogParams hog;
    TrainMeta meta;
    int negativesPerPositive = 5;
    double negativeMaxIou = 0.2;
    std::uint64_t sampleSeed = 42;
    /// Extra rounds that add false positives of the current model as negatives and retrain.
    /// Off by default. A mined window is negative when its IoU with every truth box is below
    /// hardNegativeMaxIou, i.e. it would be scored as a false positive.
    int hardNegativePasses = 0;
    double hardNegativeMaxIou = 0.5;
    /// Detector settings used for fused samples and hard-negative mining.
    DetectMode detector;
};

/// Smallest HOG-aspect window around `truth`, centred and moved inside the image; nullopt if none fits.
std::optional<BoundingBox> positiveWindow(const BoundingBox& truth, const HogParams& hog, int imgW, int imgH);

/// Positives are windows around each truth box; negatives are random ladder-scale windows with
/// IoU < negativeMaxIou against every truth box. When a background is given, the fused image of
/// each frame contributes a second copy of the positives plus negatives drawn from windows that
/// pass the foreground gate, so one model serves raw and fused inputs alike. An anchor makes the
/// fused copy use the re-registered background.
std::vector<LabeledSample> buildTrainingSet(const FrameSequence& frames,
                                            const std::vector<std::vector<BoundingBox>>& truthPerFrame,
                                            const TrainingOptions& options, const BackgroundModel* bg = nullptr,
                                            const ReferenceAnchor* anchor = nullptr);

/// buildTrainingSet + train, plus the optional hard-negative rounds.
LinearModel trainDetector(const FrameSequence& frames, const std::vector<std::vector<BoundingBox>>& truthPerFrame,
                          const TrainingOptions& options, const BackgroundModel* bg = nullptr,
                          const ReferenceAnchor* anchor = nullptr);

}  // namespace thermoscan
