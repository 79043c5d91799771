#include "thermoscan/hog.hpp"

#include <cmath>
#include <numbers>

namespace thermoscan {

void HogParams::validate() const
{
    if (windowW <= 0 || windowH <= 0 || cellSize <= 0 || blockSize <= 0 || numBins <= 0)
        throw ContractError("HogParams: sizes must be positive");
    if (windowW % cellSize != 0 || windowH % cellSize != 0)
        throw ContractError("HogParams: window must be a multiple of the cell size");
    if (blockSize * cellSize > std::min(windowW, windowH))
        throw ContractError("HogParams: block larger than window");
    if (blockStride < 1)
        throw ContractError("HogParams: blockStride must be >= 1");
    if (!(epsilon > 0.0))
        throw ContractError("HogParams: epsilon must be positive");
}

namespace {

double foldedAngle(double gx, double gy)
{
    if (gx == 0.0 && gy == 0.0)
        return 0.0;
    double deg = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
    if (deg < 0.0)
        deg += 180.0;
    if (deg >= 180.0)
        deg -= 180.0;
    return deg;
}

// Interior gradients are (integer difference) / 2 with differences in [-255, 255], so their
// folded angles can be tabulated once; the table holds exactly what foldedAngle returns.
constexpr int kDiffRange = 255;
constexpr int kDiffSpan = 2 * kDiffRange + 1;

const std::vector<double>& interiorAngles()
{
    static const std::vector<double> table = [] {
        std::vector<double> t(static_cast<std::size_t>(kDiffSpan) * kDiffSpan);
        for (int dy = -kDiffRange; dy <= kDiffRange; ++dy)
            for (int dx = -kDiffRange; dx <= kDiffRange; ++dx)
                t[static_cast<std::size_t>(dy + kDiffRange) * kDiffSpan + (dx + kDiffRange)] =
                    foldedAngle(0.5 * dx, 0.5 * dy);
        return t;
    }();
    return table;
}

}  // namespace

GradientField computeGradients(const GrayImage& img)
{
    const int w = img.width();
    const int h = img.height();
    if (w < 3 || h < 3)
        throw ContractError("computeGradients: image must be at least 3x3");
    GradientField g{w, h, {}, {}, {}, {}};
    const std::size_t n = static_cast<std::size_t>(w) * h;
    g.magnitude.resize(n);
    g.orientationDeg.resize(n);
    g.gx.resize(n);
    g.gy.resize(n);
    const auto& angles = interiorAngles();
    const std::uint8_t* px = img.pixels().data();
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = px + static_cast<std::size_t>(y) * w;
        const std::uint8_t* up = px + static_cast<std::size_t>(y == 0 ? 0 : y - 1) * w;
        const std::uint8_t* down = px + static_cast<std::size_t>(y == h - 1 ? h - 1 : y + 1) * w;
        const bool rowBorder = (y == 0 || y == h - 1);
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const int dy = down[x] - up[x];
            if (!rowBorder && x > 0 && x < w - 1) {
                const int dx = row[x + 1] - row[x - 1];
                const double gx = 0.5 * dx;
                const double gy = 0.5 * dy;
                g.gx[i] = gx;
                g.gy[i] = gy;
                g.magnitude[i] = std::sqrt(gx * gx + gy * gy);
                g.orientationDeg[i] =
                    angles[static_cast<std::size_t>(dy + kDiffRange) * kDiffSpan + (dx + kDiffRange)];
                continue;
            }
            // One-sided difference on the border, central difference elsewhere.
            const double gx = x == 0 ? row[1] - row[0] : x == w - 1 ? row[w - 1] - row[w - 2] : 0.5 * (row[x + 1] - row[x - 1]);
            const double gy = rowBorder ? static_cast<double>(dy) : 0.5 * dy;
            g.gx[i] = gx;
            g.gy[i] = gy;
            g.magnitude[i] = std::sqrt(gx * gx + gy * gy);
            g.orientationDeg[i] = foldedAngle(gx, gy);
        }
    }
    return g;
}

std::vector<double> cellHistograms(const GradientField& grad, const HogParams& params)
{
    const int cx = grad.width / params.cellSize;
    const int cy = grad.height / params.cellSize;
    const int bins = params.numBins;
    const double binWidth = 180.0 / bins;
    std::vector<double> hist(static_cast<std::size_t>(cx) * cy * bins, 0.0);
    for (int y = 0; y < cy * params.cellSize; ++y) {
        const int cellRow = y / params.cellSize;
        for (int x = 0; x < cx * params.cellSize; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * grad.width + x;
            const double mag = grad.magnitude[i];
            if (mag == 0.0)
                continue;
            // Bin b is centred on b * binWidth; votes split between the two nearest centres.
            const double pos = grad.orientationDeg[i] / binWidth;
            int b0 = static_cast<int>(std::floor(pos));
            const double frac = pos - b0;
            b0 %= bins;
            const int b1 = (b0 + 1) % bins;
            double* cell = &hist[(static_cast<std::size_t>(cellRow) * cx + x / params.cellSize) * bins];
            cell[b0] += mag * (1.0 - frac);
            cell[b1] += mag * frac;
        }
    }
    return hist;
}

namespace {

void l2Normalize(std::span<double> v, double eps)
{
    double sq = 0.0;
    for (double x : v)
        sq += x * x;
    const double inv = 1.0 / std::sqrt(sq + eps * eps);
    for (double& x : v)
        x *= inv;
}

}  // namespace

HogDescriptor hogFeatures(const GrayImage& window, const HogParams& params)
{
    params.validate();
    if (window.width() != params.windowW || window.height() != params.windowH)
        throw ContractError("hogFeatures: window is " + std::to_string(window.width()) + "x" +
                            std::to_string(window.height()) + ", expected " + std::to_string(params.windowW) + "x" +
                            std::to_string(params.windowH));
    const auto hist = cellHistograms(computeGradients(window), params);
    const int cx = params.cellsX();
    const int bins = params.numBins;
    const int blockLen = params.blockLength();

    HogDescriptor out(params.descriptorLength());
    std::size_t offset = 0;
    for (int by = 0; by < params.blocksY(); ++by) {
        for (int bx = 0; bx < params.blocksX(); ++bx) {
            std::span<double> block(out.data() + offset, blockLen);
            std::size_t k = 0;
            for (int j = 0; j < params.blockSize; ++j) {
                for (int i = 0; i < params.blockSize; ++i) {
                    const int cellX = bx * params.blockStride + i;
                    const int cellY = by * params.blockStride + j;
                    const double* cell = &hist[(static_cast<std::size_t>(cellY) * cx + cellX) * bins];
                    for (int b = 0; b < bins; ++b)
                        block[k++] = cell[b];
                }
            }
            l2Normalize(block, params.epsilon);
            for (double& v : block)
                v = std::min(v, kHogClip);
            l2Normalize(block, params.epsilon);
            offset += blockLen;
        }
    }
    return out;
}

}  // namespace thermoscan
