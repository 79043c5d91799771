#include "thermoscan/detect.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace thermoscan {

std::string modeName(Mode mode)
{
    switch (mode) {
    case Mode::HogOnly:
        return "hog";
    case Mode::HogBsStatic:
        return "bs";
    case Mode::HogAbsDynamic:
        return "abs";
    }
    return "?";
}

Mode parseMode(const std::string& text)
{
    if (text == "hog")
        return Mode::HogOnly;
    if (text == "bs")
        return Mode::HogBsStatic;
    if (text == "abs")
        return Mode::HogAbsDynamic;
    throw ContractError("unknown mode \"" + text + "\", expected hog, bs or abs");
}

void DetectMode::validate() const
{
    if (!(rho >= 0.0 && rho <= 1.0))
        throw ContractError("rho must be in [0, 1]");
    if (!(nmsIou >= 0.0 && nmsIou <= 1.0))
        throw ContractError("NMS IoU must be in [0, 1]");
    if (stride < 1)
        throw ContractError("stride must be >= 1");
    if (scales.empty() || scales.front() != 1.0)
        throw ContractError("scale ladder must start at 1.0");
    for (std::size_t i = 1; i < scales.size(); ++i) {
        if (!(scales[i] > scales[i - 1]))
            throw ContractError("scale ladder must be strictly increasing");
    }
    if (tau < 0 || tau > 255)
        throw ContractError("tau must be in [0, 255]");
    if (!(fusion.alpha >= 0.0 && fusion.alpha <= 1.0))
        throw ContractError("fusion alpha must be in [0, 1]");
    if (maxError && !(*maxError >= 0.0))
        throw ContractError("maxError must be nonnegative");
}

std::vector<BoundingBox> windowGrid(int imgW, int imgH, const HogParams& params, int stride,
                                    const std::vector<double>& scales)
{
    if (stride < 1)
        throw ContractError("windowGrid: stride must be >= 1");
    std::vector<BoundingBox> out;
    for (const double s : scales) {
        const int ww = static_cast<int>(std::lround(params.windowW * s));
        const int wh = static_cast<int>(std::lround(params.windowH * s));
        if (ww > imgW || wh > imgH)
            continue;
        const double step = stride * s;
        for (int j = 0;; ++j) {
            const int y = static_cast<int>(std::lround(j * step));
            if (y + wh > imgH)
                break;
            for (int i = 0;; ++i) {
                const int x = static_cast<int>(std::lround(i * step));
                if (x + ww > imgW)
                    break;
                out.push_back({x, y, ww, wh});
            }
        }
    }
    return out;
}

namespace {

/// Summed-area table with a zero first row/column.
class Integral {
public:
    explicit Integral(const ForegroundMask& mask) : w_(mask.width() + 1), sums_(static_cast<std::size_t>(w_) * (mask.height() + 1), 0)
    {
        for (int y = 0; y < mask.height(); ++y) {
            long long rowSum = 0;
            for (int x = 0; x < mask.width(); ++x) {
                rowSum += mask.at(x, y) ? 1 : 0;
                sums_[idx(x + 1, y + 1)] = sums_[idx(x + 1, y)] + rowSum;
            }
        }
    }

    long long sum(const BoundingBox& b) const
    {
        return sums_[idx(b.right(), b.bottom())] - sums_[idx(b.x, b.bottom())] - sums_[idx(b.right(), b.y)] +
               sums_[idx(b.x, b.y)];
    }

private:
    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * w_ + x; }
    int w_;
    std::vector<long long> sums_;
};

}  // namespace

std::vector<BoundingBox> gateWindows(const std::vector<BoundingBox>& windows, const ForegroundMask& mask, double rho)
{
    const Integral integral(mask);
    std::vector<BoundingBox> out;
    for (const auto& b : windows) {
        if (!b.insideImage(mask.width(), mask.height()))
            throw ContractError("gateWindows: window " + formatBox(b) + " outside mask");
        if (static_cast<double>(integral.sum(b)) >= rho * static_cast<double>(b.area()))
            out.push_back(b);
    }
    return out;
}

std::vector<BoundingBox> candidateWindows(int imgW, int imgH, const HogParams& params, int stride,
                                          const std::vector<double>& scales, const ForegroundMask* mask, double rho)
{
    auto grid = windowGrid(imgW, imgH, params, stride, scales);
    if (!mask)
        return grid;
    if (mask->width() != imgW || mask->height() != imgH)
        throw ContractError("candidateWindows: mask dimensions differ from image");
    return gateWindows(grid, *mask, rho);
}

HogDescriptor windowDescriptor(const GrayImage& img, const BoundingBox& box, const HogParams& params, Resample resample)
{
    GrayImage patch = crop(img, box);
    if (box.w != params.windowW || box.h != params.windowH)
        patch = resize(patch, params.windowW, params.windowH, resample);
    return hogFeatures(patch, params);
}

ScoredWindows scoreWindows(const GrayImage& frame, const LinearModel& model, const DetectMode& mode,
                           const BackgroundModel* bg, const ReferenceAnchor* anchor)
{
    mode.validate();
    if (mode.mode != Mode::HogOnly && !bg)
        throw ContractError("mode " + modeName(mode.mode) + " requires a background");
    if (mode.mode == Mode::HogAbsDynamic && !anchor)
        throw ContractError("mode abs requires an anchor");

    ScoredWindows out;
    const auto grid = windowGrid(frame.width(), frame.height(), model.hogParams, mode.stride, mode.scales);
    out.stats.windowsConsidered = static_cast<long long>(grid.size());

    const GrayImage* source = &frame;
    GrayImage fused;
    std::vector<BoundingBox> kept;
    if (mode.mode == Mode::HogOnly) {
        kept = grid;
    } else {
        const BackgroundModel* activeBg = bg;
        std::optional<BackgroundModel> shifted;
        if (mode.mode == Mode::HogAbsDynamic) {
            const double limit = mode.maxError ? *mode.maxError : defaultMaxError(*anchor, mode.tau);
            Adaptation a = adaptBackground(frame, *anchor, *bg, limit);
            out.shift = a.vector;
            shifted = std::move(a.model);
            activeBg = &*shifted;
        }
        const Subtraction sub = subtract(frame, *activeBg, mode.tau);
        fused = fuse(frame, sub.diff, sub.mask, mode.fusion);
        source = &fused;
        kept = gateWindows(grid, sub.mask, mode.rho);
    }

    out.windows.reserve(kept.size());
    for (const auto& box : kept)
        out.windows.push_back({box, score(model, windowDescriptor(*source, box, model.hogParams, mode.resample))});
    out.stats.windowsScored = static_cast<long long>(kept.size());
    return out;
}

std::vector<Detection> finalizeDetections(const std::vector<Detection>& scored, double theta, double nmsIou)
{
    std::vector<Detection> above;
    for (const auto& d : scored) {
        if (d.score >= theta)
            above.push_back(d);
    }
    return nms(std::move(above), nmsIou);
}

DetectResult detect(const GrayImage& frame, const LinearModel& model, const DetectMode& mode,
                    const BackgroundModel* bg, const ReferenceAnchor* anchor)
{
    const auto start = std::chrono::steady_clock::now();
    ScoredWindows scored = scoreWindows(frame, model, mode, bg, anchor);
    DetectResult result{finalizeDetections(scored.windows, mode.theta, mode.nmsIou), scored.stats, scored.shift};
    result.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

bool detectionBefore(const Detection& a, const Detection& b)
{
    if (a.score != b.score)
        return a.score > b.score;
    if (a.box.y != b.box.y)
        return a.box.y < b.box.y;
    if (a.box.x != b.box.x)
        return a.box.x < b.box.x;
    if (a.box.h != b.box.h)
        return a.box.h < b.box.h;
    return a.box.w < b.box.w;
}

std::vector<Detection> nms(std::vector<Detection> dets, double iouThresh)
{
    std::sort(dets.begin(), dets.end(), detectionBefore);
    std::vector<Detection> kept;
    for (const auto& d : dets) {
        const bool suppressed =
            std::any_of(kept.begin(), kept.end(), [&](const Detection& k) { return iou(d.box, k.box) >= iouThresh; });
        if (!suppressed)
            kept.push_back(d);
    }
    return kept;
}

PredictionMask predictionMask(const std::vector<Detection>& dets, int w, int h)
{
    PredictionMask mask(w, h);
    for (const auto& d : dets) {
        if (!d.box.valid() || !d.box.insideImage(w, h))
            throw ContractError("predictionMask: box " + formatBox(d.box) + " outside " + std::to_string(w) + "x" +
                                std::to_string(h));
        for (int y = d.box.y; y < d.box.bottom(); ++y)
            for (int x = d.box.x; x < d.box.right(); ++x)
                mask.set(x, y, true);
    }
    return mask;
}

GrayImage applyMask(const GrayImage& frame, const PredictionMask& mask)
{
    if (!mask.sameSize(frame))
        throw ContractError("applyMask: dimension mismatch");
    GrayImage out(frame.width(), frame.height());
    for (int y = 0; y < frame.height(); ++y)
        for (int x = 0; x < frame.width(); ++x)
            out.at(x, y) = mask.at(x, y) ? frame.at(x, y) : 0;
    return out;
}

}  // namespace thermoscan
