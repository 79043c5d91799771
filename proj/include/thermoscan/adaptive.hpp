#pragma once

#include <string>

#include "thermoscan/background.hpp"
#include "thermoscan/imaging.hpp"

namespace thermoscan {

/// A static, high-contrast landmark and the fixed search region around it.
///
/// The landmark template is cut from the initial frame; objectPos is its top-left
/// relative to the region origin. Camera motion is measured as the displacement of
/// the best template match inside the same region in later frames.
struct ReferenceAnchor {
    BoundingBox region;
    GrayImage templ;
    Point objectPos;
    int frameWidth = 0;
    int frameHeight = 0;

    long long templatePixels() const { return templ.empty() ? 0 : static_cast<long long>(templ.width()) * templ.height(); }
};

/// Landmark displacement between the initial and current frame.
struct DifferenceVector {
    int dx = 0;
    int dy = 0;
    double magnitude = 0.0;
    double angleDeg = 0.0;  // (-180, 180], 0 for the zero vector

    friend bool operator==(const DifferenceVector&, const DifferenceVector&) = default;
};

struct MatchResult {
    Point foundPos;      // relative to region origin
    double minError = 0.0;  // sum of squared differences
};

/// Placement tolerance (pixels per axis) for the object being centered in its region.
inline constexpr int kCenterTolerance = 1;

ReferenceAnchor initAnchor(const GrayImage& initialFrame, const BoundingBox& region, const BoundingBox& objectBox);

/// Dense SSD scan of every template placement in the region.
/// Ties go to the smallest displacement from objectPos, then row-major order.
MatchResult locateObject(const GrayImage& frame, const ReferenceAnchor& anchor);

DifferenceVector differenceVector(Point initial, Point found);
DifferenceVector differenceVector(int dx, int dy);

/// Raised when a shift leaves no overlap; carries the fully-invalid model.
class BackgroundShiftError : public Error {
public:
    BackgroundShiftError(const std::string& what, BackgroundModel model) : Error(what), model_(std::move(model)) {}
    const BackgroundModel& model() const { return model_; }

private:
    BackgroundModel model_;
};

/// result(p) = bg(p - d) where p - d is in bounds, invalid (and 0) elsewhere.
BackgroundModel shiftBackground(const BackgroundModel& bg, const DifferenceVector& d);

class AnchorLostError : public Error {
public:
    AnchorLostError(const std::string& what, double bestError) : Error(what), bestError_(bestError) {}
    double bestError() const { return bestError_; }

private:
    double bestError_;
};

struct Adaptation {
    BackgroundModel model;
    DifferenceVector vector;
    MatchResult match;
};

/// 4 * template pixels * tau^2: mean per-pixel error above twice the foreground threshold is rejected.
double defaultMaxError(const ReferenceAnchor& anchor, int tau = kDefaultTau);

/// locateObject -> differenceVector -> shiftBackground, always from the initial background.
/// Throws AnchorLostError when the best match error exceeds maxError.
Adaptation adaptBackground(const GrayImage& frame, const ReferenceAnchor& anchor, const BackgroundModel& initialBg,
                           double maxError);

// ---- anchor spec file: "region=x,y,w,h" and "object=x,y,w,h" lines ----

struct AnchorSpec {
    BoundingBox region;
    BoundingBox object;
    friend bool operator==(const AnchorSpec&, const AnchorSpec&) = default;
};

std::string formatAnchorSpec(const AnchorSpec& spec);
AnchorSpec parseAnchorSpec(const std::string& text);
AnchorSpec readAnchorSpec(const std::string& path);

}  // namespace thermoscan
