#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thermoscan/adaptive.hpp"
#include "thermoscan/imaging.hpp"

namespace thermoscan {

/// Warm ellipse with a Gaussian intensity profile, added on top of the background.
struct WarmBody {
    int frame = -1;  // -1 for static scene objects baked into the panorama
    int cx = 0;      // centre; viewport coordinates for humans, panorama coordinates for static objects
    int cy = 0;
    int ax = 1;      // semi-axes
    int ay = 1;
    double peak = 0.0;

    /// Tight box of the elliptical support.
    BoundingBox box() const { return {cx - ax, cy - ay, 2 * ax + 1, 2 * ay + 1}; }
};

struct SceneParams {
    int viewportW = 320;
    int viewportH = 240;
    /// Camera offset of each frame relative to frame 0; its size is the frame count and pan[0] must be (0,0).
    std::vector<Point> pan{Point{0, 0}};
    int humansPerFrame = 1;
    double noiseSigma = 0.0;
    /// Static warm objects (machinery, lamps) baked into the background.
    int distractors = 0;

    int landmarkW = 20;
    int landmarkH = 14;
    /// Region margin around the landmark; 0 means max pan + 2.
    int anchorMargin = 0;

    int noiseCell = 40;  // value-noise lattice spacing, >= 32
    int backgroundLo = 60;
    int backgroundHi = 170;

    int humanAxMin = 22, humanAxMax = 25;
    int humanAyMin = 52, humanAyMax = 55;
    double humanPeakMin = 90.0, humanPeakMax = 120.0;
};

struct PanoramaScene {
    GrayImage panorama;
    int viewportW = 0;
    int viewportH = 0;
    std::vector<Point> offsets;  // absolute viewport top-left in the panorama, per frame
    std::vector<WarmBody> humans;
    std::vector<WarmBody> distractors;
    BoundingBox anchorObject;  // panorama coordinates
    AnchorSpec anchor;         // viewport coordinates, valid for frame 0
    double noiseSigma = 0.0;
    std::uint64_t seed = 0;

    std::size_t frameCount() const { return offsets.size(); }
};

struct RenderedFrame {
    GrayImage frame;
    std::vector<BoundingBox> truthBoxes;
    Point trueShift;  // landmark displacement in image coordinates: offset[0] - offset[t]
};

/// Throws ContractError when the parameters cannot produce a valid scene.
PanoramaScene generateScene(std::uint64_t seed, const SceneParams& params);

RenderedFrame renderFrame(const PanoramaScene& scene, std::size_t t);

/// Frame 0 without humans, with its own noise stream.
GrayImage renderBackground(const PanoramaScene& scene);

/// "dx:dy,dx:dy,..." per-frame camera deltas (cycled), or "lin:X,Y,K" for a linear pan to (X,Y)
/// over K frames, held afterwards. Returns `frames` offsets relative to frame 0.
std::vector<Point> parsePanSpec(const std::string& spec, int frames);

/// Writes frame_%04d.pgm, truth.csv, shifts.csv, anchor.txt and background.pgm.
void exportScene(const PanoramaScene& scene, const std::string& dir);

}  // namespace thermoscan
