#pragma once

#include <vector>

#include "thermoscan/imaging.hpp"

namespace thermoscan {

/// Window geometry and histogram layout. Defaults are the usual pedestrian configuration.
struct HogParams {
    int windowW = 64;
    int windowH = 128;
    int cellSize = 8;
    int blockSize = 2;    // cells per block side
    int blockStride = 1;  // cells
    int numBins = 9;      // unsigned, over [0, 180)
    double epsilon = 1e-5;

    int cellsX() const { return windowW / cellSize; }
    int cellsY() const { return windowH / cellSize; }
    int blocksX() const { return (cellsX() - blockSize) / blockStride + 1; }
    int blocksY() const { return (cellsY() - blockSize) / blockStride + 1; }
    int blockLength() const { return blockSize * blockSize * numBins; }
    std::size_t descriptorLength() const
    {
        return static_cast<std::size_t>(blocksX()) * blocksY() * blockLength();
    }

    /// Throws ContractError if the geometry is inconsistent.
    void validate() const;

    friend bool operator==(const HogParams&, const HogParams&) = default;
};

/// L2-hys clipping threshold applied between the two normalizations.
inline constexpr double kHogClip = 0.2;

struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> magnitude;
    std::vector<double> orientationDeg;  // [0, 180)
    std::vector<double> gx;
    std::vector<double> gy;
};

/// Central differences (I[x+1] - I[x-1]) / 2, one-sided at the border.
GradientField computeGradients(const GrayImage& img);

/// Flat descriptor: blocks row-major, cells row-major within a block, bins ascending within a cell.
using HogDescriptor = std::vector<double>;

/// Per-cell orientation histograms (cells row-major, bins ascending), before block normalization.
std::vector<double> cellHistograms(const GradientField& grad, const HogParams& params);

HogDescriptor hogFeatures(const GrayImage& window, const HogParams& params = {});

}  // namespace thermoscan
