#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thermoscan/adaptive.hpp"
#include "thermoscan/background.hpp"
#include "thermoscan/classify.hpp"
#include "thermoscan/hog.hpp"

namespace thermoscan {

struct Detection {
    BoundingBox box;
    double score = 0.0;
    friend bool operator==(const Detection&, const Detection&) = default;
};

using PredictionMask = BinaryMask;

enum class Mode {
    HogOnly,        // raw frame, every window scored
    HogBsStatic,    // fixed background: subtract, fuse, gate
    HogAbsDynamic,  // background re-registered on the anchor each frame, then as above
};

std::string modeName(Mode mode);
/// Accepts "hog", "bs", "abs".
Mode parseMode(const std::string& text);

/// Pipeline selection plus every detector knob.
struct DetectMode {
    Mode mode = Mode::HogOnly;
    double rho = 0.2;     // minimum foreground fraction for a window to be scored
    double theta = 0.0;   // score threshold
    double nmsIou = 0.45;
    std::vector<double> scales{1.0, 1.2, 1.44};
    int stride = 8;
    int tau = kDefaultTau;
    FusionParams fusion;
    Resample resample = Resample::Nearest;
    std::optional<double> maxError;  // defaults to defaultMaxError(anchor, tau)

    void validate() const;
};

struct DetectStats {
    long long windowsConsidered = 0;
    long long windowsScored = 0;
    double seconds = 0.0;
};

/// All windows that passed the gate with their raw scores, before thresholding and NMS.
struct ScoredWindows {
    std::vector<Detection> windows;
    DetectStats stats;
    std::optional<DifferenceVector> shift;
};

struct DetectResult {
    std::vector<Detection> detections;
    DetectStats stats;
    std::optional<DifferenceVector> shift;
};

/// Every window position for every scale, scale-major then row-major.
std::vector<BoundingBox> windowGrid(int imgW, int imgH, const HogParams& params, int stride,
                                    const std::vector<double>& scales);

/// Keeps windows whose foreground fraction is >= rho. Order is preserved.
std::vector<BoundingBox> gateWindows(const std::vector<BoundingBox>& windows, const ForegroundMask& mask, double rho);

std::vector<BoundingBox> candidateWindows(int imgW, int imgH, const HogParams& params, int stride,
                                          const std::vector<double>& scales, const ForegroundMask* mask, double rho);

/// Crops `box` and resamples it to the HOG window before extraction.
HogDescriptor windowDescriptor(const GrayImage& img, const BoundingBox& box, const HogParams& params,
                               Resample resample = Resample::Nearest);

/// Everything in detect() except thresholding and NMS.
ScoredWindows scoreWindows(const GrayImage& frame, const LinearModel& model, const DetectMode& mode,
                           const BackgroundModel* bg = nullptr, const ReferenceAnchor* anchor = nullptr);

/// Threshold at theta (inclusive) then NMS.
std::vector<Detection> finalizeDetections(const std::vector<Detection>& scored, double theta, double nmsIou);

DetectResult detect(const GrayImage& frame, const LinearModel& model, const DetectMode& mode,
                    const BackgroundModel* bg = nullptr, const ReferenceAnchor* anchor = nullptr);

/// Greedy suppression in descending score order (ties by row-major box position).
std::vector<Detection> nms(std::vector<Detection> dets, double iouThresh);

PredictionMask predictionMask(const std::vector<Detection>& dets, int w, int h);

/// Elementwise product with the binary mask.
GrayImage applyMask(const GrayImage& frame, const PredictionMask& mask);

/// Canonical detection order: descending score, then y, x, h, w.
bool detectionBefore(const Detection& a, const Detection& b);

}  // namespace thermoscan
