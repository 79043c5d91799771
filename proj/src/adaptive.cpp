#include "thermoscan/adaptive.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>

namespace thermoscan {

ReferenceAnchor initAnchor(const GrayImage& initialFrame, const BoundingBox& region, const BoundingBox& objectBox)
{
    if (!region.valid() || !region.insideImage(initialFrame.width(), initialFrame.height()))
        throw ContractError("anchor region " + formatBox(region) + " is not inside the frame");
    if (!objectBox.valid() || !region.contains(objectBox))
        throw ContractError("anchor object " + formatBox(objectBox) + " is not inside region " + formatBox(region));
    if (objectBox.w >= region.w || objectBox.h >= region.h)
        throw ContractError("anchor object " + formatBox(objectBox) + " must be strictly smaller than region " +
                            formatBox(region));
    const Point pos{objectBox.x - region.x, objectBox.y - region.y};
    const Point centered{(region.w - objectBox.w) / 2, (region.h - objectBox.h) / 2};
    if (std::abs(pos.x - centered.x) > kCenterTolerance || std::abs(pos.y - centered.y) > kCenterTolerance)
        throw ContractError("anchor object " + formatBox(objectBox) + " is not centered in region " +
                            formatBox(region));
    return ReferenceAnchor{region, crop(initialFrame, objectBox), pos, initialFrame.width(), initialFrame.height()};
}

MatchResult locateObject(const GrayImage& frame, const ReferenceAnchor& anchor)
{
    if (frame.width() != anchor.frameWidth || frame.height() != anchor.frameHeight)
        throw ContractError("locateObject: frame is " + std::to_string(frame.width()) + "x" +
                            std::to_string(frame.height()) + " but anchor was built on " +
                            std::to_string(anchor.frameWidth) + "x" + std::to_string(anchor.frameHeight));
    const GrayImage& t = anchor.templ;
    const int spanX = anchor.region.w - t.width();
    const int spanY = anchor.region.h - t.height();

    long long bestErr = std::numeric_limits<long long>::max();
    long long bestDist = 0;
    Point best;
    for (int oy = 0; oy <= spanY; ++oy) {
        for (int ox = 0; ox <= spanX; ++ox) {
            long long err = 0;
            for (int y = 0; y < t.height() && err <= bestErr; ++y) {
                const auto frow = frame.row(anchor.region.y + oy + y).subspan(anchor.region.x + ox, t.width());
                const auto trow = t.row(y);
                for (int x = 0; x < t.width(); ++x) {
                    const long long d = static_cast<int>(frow[x]) - static_cast<int>(trow[x]);
                    err += d * d;
                }
            }
            const long long ddx = ox - anchor.objectPos.x;
            const long long ddy = oy - anchor.objectPos.y;
            const long long dist = ddx * ddx + ddy * ddy;
            // Row-major scan order means the first candidate wins remaining ties.
            if (err < bestErr || (err == bestErr && dist < bestDist)) {
                bestErr = err;
                bestDist = dist;
                best = {ox, oy};
            }
        }
    }
    return MatchResult{best, static_cast<double>(bestErr)};
}

DifferenceVector differenceVector(int dx, int dy)
{
    DifferenceVector d{dx, dy, std::hypot(static_cast<double>(dx), static_cast<double>(dy)), 0.0};
    if (dx != 0 || dy != 0) {
        d.angleDeg = std::atan2(static_cast<double>(dy), static_cast<double>(dx)) * 180.0 / std::numbers::pi;
        if (d.angleDeg <= -180.0)
            d.angleDeg += 360.0;
    }
    return d;
}

DifferenceVector differenceVector(Point initial, Point found)
{
    return differenceVector(found.x - initial.x, found.y - initial.y);
}

BackgroundModel shiftBackground(const BackgroundModel& bg, const DifferenceVector& d)
{
    const int w = bg.width();
    const int h = bg.height();
    BackgroundModel out{GrayImage(w, h), BinaryMask(w, h)};
    if (std::abs(d.dx) >= w || std::abs(d.dy) >= h)
        throw BackgroundShiftError("shiftBackground: shift (" + std::to_string(d.dx) + "," + std::to_string(d.dy) +
                                       ") leaves no overlap with a " + std::to_string(w) + "x" + std::to_string(h) +
                                       " background",
                                   std::move(out));
    for (int y = 0; y < h; ++y) {
        const int sy = y - d.dy;
        if (sy < 0 || sy >= h)
            continue;
        for (int x = 0; x < w; ++x) {
            const int sx = x - d.dx;
            if (sx < 0 || sx >= w || !bg.valid.at(sx, sy))
                continue;
            out.reference.at(x, y) = bg.reference.at(sx, sy);
            out.valid.set(x, y, true);
        }
    }
    return out;
}

double defaultMaxError(const ReferenceAnchor& anchor, int tau)
{
    return 4.0 * static_cast<double>(anchor.templatePixels()) * tau * tau;
}

Adaptation adaptBackground(const GrayImage& frame, const ReferenceAnchor& anchor, const BackgroundModel& initialBg,
                           double maxError)
{
    if (!frame.sameSize(initialBg.reference))
        throw ContractError("adaptBackground: frame and background dimensions differ");
    const MatchResult match = locateObject(frame, anchor);
    if (match.minError > maxError) {
        std::ostringstream msg;
        msg << "anchor lost: best match error " << match.minError << " exceeds limit " << maxError;
        throw AnchorLostError(msg.str(), match.minError);
    }
    const DifferenceVector vec = differenceVector(anchor.objectPos, match.foundPos);
    return Adaptation{shiftBackground(initialBg, vec), vec, match};
}

std::string formatAnchorSpec(const AnchorSpec& spec)
{
    return "region=" + formatBox(spec.region) + "\nobject=" + formatBox(spec.object) + "\n";
}

AnchorSpec parseAnchorSpec(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    bool haveRegion = false, haveObject = false;
    AnchorSpec spec;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("anchor spec line " + std::to_string(lineNo) + ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "region") {
            spec.region = parseBox(value);
            haveRegion = true;
        } else if (key == "object") {
            spec.object = parseBox(value);
            haveObject = true;
        } else {
            throw FormatError("anchor spec line " + std::to_string(lineNo) + ": unknown key \"" + key + "\"");
        }
    }
    if (!haveRegion || !haveObject)
        throw FormatError("anchor spec: both region and object are required");
    return spec;
}

AnchorSpec readAnchorSpec(const std::string& path)
{
    const auto bytes = readFileBytes(path);
    try {
        return parseAnchorSpec(std::string(bytes.begin(), bytes.end()));
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace thermoscan
