#include "thermoscan/training.hpp"

#include <algorithm>
#include <cmath>

#include "thermoscan/random.hpp"

namespace thermoscan {

namespace {

// Fraction of the window a truth box may fill along each axis.
constexpr double kFillW = 0.85;
constexpr double kFillH = 0.9;
constexpr int kNegativeTries = 200;

bool clearOfTruth(const BoundingBox& w, const std::vector<BoundingBox>& truths, double maxIou)
{
    return std::all_of(truths.begin(), truths.end(), [&](const BoundingBox& t) { return iou(w, t) < maxIou; });
}

GrayImage fusedFrame(const GrayImage& frame, const BackgroundModel& bg, const ReferenceAnchor* anchor,
                     const DetectMode& det, ForegroundMask& maskOut)
{
    const BackgroundModel* active = &bg;
    std::optional<BackgroundModel> shifted;
    if (anchor) {
        const double limit = det.maxError ? *det.maxError : defaultMaxError(*anchor, det.tau);
        shifted = adaptBackground(frame, *anchor, bg, limit).model;
        active = &*shifted;
    }
    Subtraction sub = subtract(frame, *active, det.tau);
    maskOut = sub.mask;
    return fuse(frame, sub.diff, sub.mask, det.fusion);
}

}  // namespace

std::optional<BoundingBox> positiveWindow(const BoundingBox& truth, const HogParams& hog, int imgW, int imgH)
{
    const double s = std::max({1.0, truth.w / (hog.windowW * kFillW), truth.h / (hog.windowH * kFillH)});
    const int w = static_cast<int>(std::lround(hog.windowW * s));
    const int h = static_cast<int>(std::lround(hog.windowH * s));
    if (w > imgW || h > imgH)
        return std::nullopt;
    int x = truth.x + truth.w / 2 - w / 2;
    int y = truth.y + truth.h / 2 - h / 2;
    x = std::clamp(x, 0, imgW - w);
    y = std::clamp(y, 0, imgH - h);
    return BoundingBox{x, y, w, h};
}

std::vector<LabeledSample> buildTrainingSet(const FrameSequence& frames,
                                            const std::vector<std::vector<BoundingBox>>& truthPerFrame,
                                            const TrainingOptions& options, const BackgroundModel* bg,
                                            const ReferenceAnchor* anchor)
{
    if (truthPerFrame.size() != frames.size())
        throw ContractError("buildTrainingSet: truth list does not match frame count");
    options.hog.validate();
    options.detector.validate();
    const HogParams& hog = options.hog;
    const Resample resample = options.detector.resample;
    const int w = frames.width();
    const int h = frames.height();

    Rng rng(options.sampleSeed);
    std::vector<LabeledSample> samples;
    const auto add = [&](const GrayImage& img, const BoundingBox& box, int label) {
        samples.push_back({windowDescriptor(img, box, hog, resample), label});
    };

    for (std::size_t f = 0; f < frames.size(); ++f) {
        const GrayImage& frame = frames.frame(f);
        const auto& truths = truthPerFrame[f];
        std::vector<BoundingBox> positives;
        for (const auto& t : truths) {
            if (const auto win = positiveWindow(t, hog, w, h))
                positives.push_back(*win);
        }
        const int wanted = options.negativesPerPositive * std::max<int>(1, static_cast<int>(positives.size()));

        for (const auto& p : positives)
            add(frame, p, +1);
        int made = 0;
        for (int attempt = 0; attempt < kNegativeTries * wanted && made < wanted; ++attempt) {
            const double s = options.detector.scales[rng.uniformInt(0, static_cast<long long>(options.detector.scales.size()) - 1)];
            const int ww = static_cast<int>(std::lround(hog.windowW * s));
            const int wh = static_cast<int>(std::lround(hog.windowH * s));
            if (ww > w || wh > h)
                continue;
            const BoundingBox box{static_cast<int>(rng.uniformInt(0, w - ww)), static_cast<int>(rng.uniformInt(0, h - wh)),
                                  ww, wh};
            if (!clearOfTruth(box, truths, options.negativeMaxIou))
                continue;
            add(frame, box, -1);
            ++made;
        }

        if (!bg)
            continue;
        ForegroundMask mask;
        const GrayImage fused = fusedFrame(frame, *bg, anchor, options.detector, mask);
        for (const auto& p : positives)
            add(fused, p, +1);
        auto gated = gateWindows(windowGrid(w, h, hog, options.detector.stride, options.detector.scales), mask,
                                 options.detector.rho);
        std::erase_if(gated, [&](const BoundingBox& b) { return !clearOfTruth(b, truths, options.negativeMaxIou); });
        rng.shuffle(gated);
        for (int k = 0; k < wanted && k < static_cast<int>(gated.size()); ++k)
            add(fused, gated[k], -1);
    }
    return samples;
}

LinearModel trainDetector(const FrameSequence& frames, const std::vector<std::vector<BoundingBox>>& truthPerFrame,
                          const TrainingOptions& options, const BackgroundModel* bg, const ReferenceAnchor* anchor)
{
    std::vector<LabeledSample> samples = buildTrainingSet(frames, truthPerFrame, options, bg, anchor);
    LinearModel model = train(samples, options.meta, options.hog);
    for (int pass = 0; pass < options.hardNegativePasses; ++pass) {
        std::size_t added = 0;
        const auto mine = [&](const GrayImage& img, const std::vector<Detection>& scored, std::size_t f) {
            for (const auto& d : finalizeDetections(scored, 0.0, options.detector.nmsIou)) {
                if (!clearOfTruth(d.box, truthPerFrame[f], options.hardNegativeMaxIou))
                    continue;
                samples.push_back({windowDescriptor(img, d.box, options.hog, options.detector.resample), -1});
                ++added;
            }
        };
        DetectMode raw = options.detector;
        raw.mode = Mode::HogOnly;
        for (std::size_t f = 0; f < frames.size(); ++f) {
            const GrayImage& frame = frames.frame(f);
            mine(frame, scoreWindows(frame, model, raw).windows, f);
            if (!bg)
                continue;
            ForegroundMask mask;
            const GrayImage fused = fusedFrame(frame, *bg, anchor, options.detector, mask);
            std::vector<Detection> scored;
            for (const auto& box : gateWindows(windowGrid(frames.width(), frames.height(), options.hog,
                                                          options.detector.stride, options.detector.scales),
                                               mask, options.detector.rho))
                scored.push_back({box, score(model, windowDescriptor(fused, box, options.hog, options.detector.resample))});
            mine(fused, scored, f);
        }
        if (added == 0)
            break;
        model = train(samples, options.meta, options.hog);
    }
    return model;
}

}  // namespace thermoscan
