#include "thermoscan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "thermoscan/random.hpp"
#include "thermoscan/records.hpp"

namespace thermoscan {

namespace {

constexpr std::uint8_t kLandmarkIntensity = 255;
constexpr int kLandmarkContrast = 80;
constexpr int kPanoramaPad = 16;
constexpr int kPlacementTries = 400;

std::uint64_t noiseStream(std::size_t t) { return 1000 + t; }
constexpr std::uint64_t kBackgroundNoiseStream = 999;
constexpr std::uint64_t kValueNoiseStream = 1;
constexpr std::uint64_t kDistractorStream = 2;
constexpr std::uint64_t kHumanStream = 3;

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

GrayImage valueNoise(int w, int h, int cell, int lo, int hi, Rng& rng)
{
    const int gx = w / cell + 2;
    const int gy = h / cell + 2;
    std::vector<double> lattice(static_cast<std::size_t>(gx) * gy);
    for (auto& v : lattice)
        v = rng.uniform(lo, hi);
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const int j = y / cell;
        const double fy = smooth(static_cast<double>(y % cell) / cell);
        for (int x = 0; x < w; ++x) {
            const int i = x / cell;
            const double fx = smooth(static_cast<double>(x % cell) / cell);
            const auto L = [&](int a, int b) { return lattice[static_cast<std::size_t>(b) * gx + a]; };
            const double top = L(i, j) * (1 - fx) + L(i + 1, j) * fx;
            const double bot = L(i, j + 1) * (1 - fx) + L(i + 1, j + 1) * fx;
            out.at(x, y) = static_cast<std::uint8_t>(std::lround(top * (1 - fy) + bot * fy));
        }
    }
    return out;
}

/// Adds a body's Gaussian-profile intensity into `acc` (a w*h double raster), with the body
/// centre expressed in the raster's coordinates.
void addBody(std::vector<double>& acc, int w, int h, const WarmBody& body)
{
    const BoundingBox b = body.box();
    for (int y = std::max(0, b.y); y < std::min(h, b.bottom()); ++y) {
        const double ny = static_cast<double>(y - body.cy) / body.ay;
        for (int x = std::max(0, b.x); x < std::min(w, b.right()); ++x) {
            const double nx = static_cast<double>(x - body.cx) / body.ax;
            const double r2 = nx * nx + ny * ny;
            if (r2 <= 1.0)
                acc[static_cast<std::size_t>(y) * w + x] += body.peak * std::exp(-2.0 * r2);
        }
    }
}

std::uint8_t toPixel(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

BoundingBox inflate(const BoundingBox& b, int m) { return {b.x - m, b.y - m, b.w + 2 * m, b.h + 2 * m}; }

bool overlaps(const BoundingBox& a, const BoundingBox& b) { return intersectionArea(a, b) > 0; }

GrayImage viewportCrop(const PanoramaScene& scene, std::size_t t)
{
    return crop(scene.panorama, {scene.offsets[t].x, scene.offsets[t].y, scene.viewportW, scene.viewportH});
}

long long ssdAt(const GrayImage& frame, const GrayImage& templ, int x0, int y0)
{
    long long err = 0;
    for (int y = 0; y < templ.height(); ++y)
        for (int x = 0; x < templ.width(); ++x) {
            const long long d = static_cast<int>(frame.at(x0 + x, y0 + y)) - static_cast<int>(templ.at(x, y));
            err += d * d;
        }
    return err;
}

}  // namespace

PanoramaScene generateScene(std::uint64_t seed, const SceneParams& p)
{
    if (p.pan.empty() || p.pan.front() != Point{0, 0})
        throw ContractError("scene: pan schedule must be non-empty and start at (0,0)");
    if (p.viewportW < 16 || p.viewportH < 16)
        throw ContractError("scene: viewport too small");
    if (p.noiseCell < 32)
        throw ContractError("scene: value-noise cell must be >= 32 px");
    if (p.backgroundLo < 0 || p.backgroundHi > kLandmarkIntensity - kLandmarkContrast || p.backgroundLo > p.backgroundHi)
        throw ContractError("scene: background range must lie in [0, " +
                            std::to_string(kLandmarkIntensity - kLandmarkContrast) + "]");
    if (p.noiseSigma < 0.0 || p.humansPerFrame < 0 || p.distractors < 0)
        throw ContractError("scene: negative noise, human or distractor count");
    if (p.humanAxMin < 1 || p.humanAxMin > p.humanAxMax || p.humanAyMin < 1 || p.humanAyMin > p.humanAyMax ||
        p.humanPeakMin > p.humanPeakMax)
        throw ContractError("scene: bad human size or peak range");

    int minX = 0, maxX = 0, minY = 0, maxY = 0;
    for (const auto& o : p.pan) {
        minX = std::min(minX, o.x);
        maxX = std::max(maxX, o.x);
        minY = std::min(minY, o.y);
        maxY = std::max(maxY, o.y);
    }
    const int spanX = maxX - minX;
    const int spanY = maxY - minY;
    const int panAbsX = std::max(-minX, maxX);
    const int panAbsY = std::max(-minY, maxY);
    const int margin = p.anchorMargin > 0 ? p.anchorMargin : std::max(panAbsX, panAbsY) + 2;

    PanoramaScene scene;
    scene.seed = seed;
    scene.noiseSigma = p.noiseSigma;
    scene.viewportW = p.viewportW;
    scene.viewportH = p.viewportH;
    const int panoW = std::max(2 * p.viewportW, p.viewportW + spanX + 2 * kPanoramaPad);
    const int panoH = p.viewportH + spanY + 2 * kPanoramaPad;
    const Point origin{(panoW - p.viewportW - spanX) / 2 - minX, kPanoramaPad - minY};
    for (const auto& o : p.pan)
        scene.offsets.push_back({origin.x + o.x, origin.y + o.y});

    Rng noiseRng(mixSeed(seed, kValueNoiseStream));
    scene.panorama = valueNoise(panoW, panoH, p.noiseCell, p.backgroundLo, p.backgroundHi, noiseRng);

    // Anchor: landmark near the top-left of the frame-0 viewport, region centred on it.
    const BoundingBox object{margin + 8, margin + 8, p.landmarkW, p.landmarkH};
    const BoundingBox region = inflate(object, margin);
    if (!region.insideImage(p.viewportW, p.viewportH))
        throw ContractError("scene: anchor region " + formatBox(region) + " does not fit the viewport");
    for (std::size_t t = 0; t < p.pan.size(); ++t) {
        const BoundingBox seen{object.x - p.pan[t].x, object.y - p.pan[t].y, object.w, object.h};
        if (!region.contains(seen) || !seen.insideImage(p.viewportW, p.viewportH))
            throw ContractError("scene: landmark leaves the anchor region at frame " + std::to_string(t));
    }
    scene.anchor = {region, object};
    scene.anchorObject = {origin.x + object.x, origin.y + object.y, object.w, object.h};

    // Panorama area the anchor region sweeps; static objects stay clear of it.
    const BoundingBox regionSweep =
        inflate(BoundingBox{origin.x + region.x + minX, origin.y + region.y + minY, region.w + spanX, region.h + spanY}, 4);

    Rng distractorRng(mixSeed(seed, kDistractorStream));
    std::vector<double> acc(scene.panorama.pixels().begin(), scene.panorama.pixels().end());
    for (int k = 0; k < p.distractors; ++k) {
        for (int attempt = 0; attempt < kPlacementTries; ++attempt) {
            WarmBody d;
            d.ax = static_cast<int>(distractorRng.uniformInt(10, 34));
            d.ay = static_cast<int>(distractorRng.uniformInt(22, 60));
            d.peak = distractorRng.uniform(70.0, 120.0);
            const int x0 = origin.x + minX, x1 = origin.x + maxX + p.viewportW - 1;
            const int y0 = origin.y + minY, y1 = origin.y + maxY + p.viewportH - 1;
            if (x1 - x0 <= 2 * d.ax || y1 - y0 <= 2 * d.ay)
                continue;
            d.cx = static_cast<int>(distractorRng.uniformInt(x0 + d.ax, x1 - d.ax));
            d.cy = static_cast<int>(distractorRng.uniformInt(y0 + d.ay, y1 - d.ay));
            if (overlaps(d.box(), regionSweep))
                continue;
            const bool clash = std::any_of(scene.distractors.begin(), scene.distractors.end(),
                                           [&](const WarmBody& o) { return overlaps(inflate(o.box(), 6), d.box()); });
            if (clash)
                continue;
            scene.distractors.push_back(d);
            addBody(acc, panoW, panoH, d);
            break;
        }
    }
    for (std::size_t i = 0; i < acc.size(); ++i)
        scene.panorama.pixels()[i] = toPixel(acc[i]);
    for (int y = scene.anchorObject.y; y < scene.anchorObject.bottom(); ++y)
        for (int x = scene.anchorObject.x; x < scene.anchorObject.right(); ++x)
            scene.panorama.at(x, y) = kLandmarkIntensity;

    // The landmark must be the unambiguous SSD minimum in its region, with margin over the noise floor.
    {
        const GrayImage frame0 = viewportCrop(scene, 0);
        const GrayImage templ = crop(frame0, object);
        long long best = std::numeric_limits<long long>::max();
        long long second = std::numeric_limits<long long>::max();
        for (int y = region.y; y + templ.height() <= region.bottom(); ++y) {
            for (int x = region.x; x + templ.width() <= region.right(); ++x) {
                const long long e = ssdAt(frame0, templ, x, y);
                if (e < best) {
                    second = best;
                    best = e;
                } else if (e < second) {
                    second = e;
                }
            }
        }
        // Noise on frame and template adds about the same to every placement; what can flip the
        // argmin is the spread of the gap, roughly 2 * sqrt(2 * gap) * sigma.
        const double n = static_cast<double>(templ.width()) * templ.height();
        const double gap = static_cast<double>(second - best);
        const double spread = 2.0 * std::sqrt(2.0 * gap) * p.noiseSigma;
        if (gap < 10.0 * n || gap < 8.0 * spread)
            throw ContractError("scene: landmark is not a distinct SSD minimum (gap " + std::to_string(second - best) +
                                " for a " + std::to_string(templ.width()) + "x" + std::to_string(templ.height()) +
                                " template)");
    }

    // Humans, per frame, in viewport coordinates. They avoid the frame edges exposed by panning,
    // the anchor region, static objects and each other.
    Rng humanRng(mixSeed(seed, kHumanStream));
    const int edgeX = panAbsX + 4;
    const int edgeY = panAbsY + 4;
    for (std::size_t t = 0; t < p.pan.size(); ++t) {
        std::vector<BoundingBox> blocked{inflate(region, 4)};
        for (const auto& d : scene.distractors) {
            const BoundingBox b = d.box();
            blocked.push_back(inflate({b.x - scene.offsets[t].x, b.y - scene.offsets[t].y, b.w, b.h}, 4));
        }
        for (int k = 0; k < p.humansPerFrame; ++k) {
            for (int attempt = 0; attempt < kPlacementTries; ++attempt) {
                WarmBody h;
                h.frame = static_cast<int>(t);
                h.ax = static_cast<int>(humanRng.uniformInt(p.humanAxMin, p.humanAxMax));
                h.ay = static_cast<int>(humanRng.uniformInt(p.humanAyMin, p.humanAyMax));
                h.peak = humanRng.uniform(p.humanPeakMin, p.humanPeakMax);
                const int xLo = edgeX + h.ax, xHi = p.viewportW - 1 - edgeX - h.ax;
                const int yLo = edgeY + h.ay, yHi = p.viewportH - 1 - edgeY - h.ay;
                if (xLo > xHi || yLo > yHi)
                    break;
                h.cx = static_cast<int>(humanRng.uniformInt(xLo, xHi));
                h.cy = static_cast<int>(humanRng.uniformInt(yLo, yHi));
                const BoundingBox hb = h.box();
                if (std::any_of(blocked.begin(), blocked.end(), [&](const BoundingBox& b) { return overlaps(b, hb); }))
                    continue;
                scene.humans.push_back(h);
                blocked.push_back(inflate(hb, 8));
                break;
            }
        }
    }
    return scene;
}

RenderedFrame renderFrame(const PanoramaScene& scene, std::size_t t)
{
    if (t >= scene.frameCount())
        throw ContractError("renderFrame: frame " + std::to_string(t) + " out of range (" +
                            std::to_string(scene.frameCount()) + " frames)");
    const GrayImage base = viewportCrop(scene, t);
    const int w = scene.viewportW;
    const int h = scene.viewportH;
    std::vector<double> acc(base.pixels().begin(), base.pixels().end());
    RenderedFrame out;
    for (const auto& body : scene.humans) {
        if (body.frame != static_cast<int>(t))
            continue;
        addBody(acc, w, h, body);
        out.truthBoxes.push_back(body.box());
    }
    if (scene.noiseSigma > 0.0) {
        Rng rng(mixSeed(scene.seed, noiseStream(t)));
        for (double& v : acc)
            v += scene.noiseSigma * rng.normal();
    }
    out.frame = GrayImage(w, h);
    for (std::size_t i = 0; i < acc.size(); ++i)
        out.frame.pixels()[i] = toPixel(acc[i]);
    out.trueShift = {scene.offsets[0].x - scene.offsets[t].x, scene.offsets[0].y - scene.offsets[t].y};
    return out;
}

GrayImage renderBackground(const PanoramaScene& scene)
{
    GrayImage bg = viewportCrop(scene, 0);
    if (scene.noiseSigma > 0.0) {
        Rng rng(mixSeed(scene.seed, kBackgroundNoiseStream));
        for (auto& px : bg.pixels())
            px = toPixel(px + scene.noiseSigma * rng.normal());
    }
    return bg;
}

std::vector<Point> parsePanSpec(const std::string& spec, int frames)
{
    if (frames < 1)
        throw ContractError("pan: frame count must be positive");
    std::vector<Point> out(static_cast<std::size_t>(frames), Point{0, 0});
    if (spec.empty() || spec == "none")
        return out;
    if (spec.rfind("lin:", 0) == 0) {
        const auto f = splitCsvLine(spec.substr(4));
        if (f.size() != 3)
            throw FormatError("pan: expected lin:X,Y,K, got \"" + spec + "\"");
        int x = 0, y = 0, k = 0;
        try {
            x = std::stoi(f[0]);
            y = std::stoi(f[1]);
            k = std::stoi(f[2]);
        } catch (const std::exception&) {
            throw FormatError("pan: bad number in \"" + spec + "\"");
        }
        if (k < 2)
            throw FormatError("pan: linear pan needs K >= 2");
        for (int i = 0; i < frames; ++i) {
            const int step = std::min(i, k - 1);
            out[i] = {static_cast<int>(std::lround(static_cast<double>(step) * x / (k - 1))),
                      static_cast<int>(std::lround(static_cast<double>(step) * y / (k - 1)))};
        }
        return out;
    }
    std::vector<Point> deltas;
    for (const auto& item : splitCsvLine(spec)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw FormatError("pan: expected dx:dy, got \"" + item + "\"");
        try {
            std::size_t ux = 0, uy = 0;
            const std::string sx = item.substr(0, colon), sy = item.substr(colon + 1);
            Point d{std::stoi(sx, &ux), std::stoi(sy, &uy)};
            if (ux != sx.size() || uy != sy.size())
                throw FormatError("");
            deltas.push_back(d);
        } catch (const std::exception&) {
            throw FormatError("pan: bad delta \"" + item + "\"");
        }
    }
    for (int i = 1; i < frames; ++i) {
        const Point d = deltas[static_cast<std::size_t>(i - 1) % deltas.size()];
        out[i] = {out[i - 1].x + d.x, out[i - 1].y + d.y};
    }
    return out;
}

void exportScene(const PanoramaScene& scene, const std::string& dir)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw FormatError(dir + ": cannot create directory: " + ec.message());
    const fs::path root(dir);
    TruthTable truth;
    std::vector<ShiftRecord> shifts;
    for (std::size_t t = 0; t < scene.frameCount(); ++t) {
        const RenderedFrame r = renderFrame(scene, t);
        const std::string id = frameId(t);
        writePgmFile((root / ("frame_" + id + ".pgm")).string(), r.frame);
        if (!r.truthBoxes.empty())
            truth[id] = r.truthBoxes;
        shifts.push_back({id, r.trueShift});
    }
    writeFileAtomic((root / "truth.csv").string(), formatTruthCsv(truth));
    writeFileAtomic((root / "shifts.csv").string(), formatShiftsCsv(shifts));
    writeFileAtomic((root / "anchor.txt").string(), formatAnchorSpec(scene.anchor));
    writePgmFile((root / "background.pgm").string(), renderBackground(scene));
}

}  // namespace thermoscan
