#include "thermoscan/background.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace thermoscan {

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height), bits_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill ? 1 : 0)
{
    if (width <= 0 || height <= 0)
        throw ContractError("BinaryMask: dimensions must be positive");
}

long long BinaryMask::count() const
{
    return std::accumulate(bits_.begin(), bits_.end(), 0LL);
}

GrayImage BinaryMask::toImage() const
{
    std::vector<std::uint8_t> px(bits_.size());
    std::transform(bits_.begin(), bits_.end(), px.begin(), [](std::uint8_t b) -> std::uint8_t { return b ? 255 : 0; });
    return GrayImage(width_, height_, std::move(px));
}

BackgroundModel BackgroundModel::fromImage(GrayImage reference)
{
    BinaryMask valid(reference.width(), reference.height(), true);
    return BackgroundModel{std::move(reference), std::move(valid)};
}

Subtraction subtract(const GrayImage& input, const BackgroundModel& bg, int tau)
{
    if (!input.sameSize(bg.reference) || !bg.valid.sameSize(bg.reference))
        throw ContractError("subtract: input is " + std::to_string(input.width()) + "x" +
                            std::to_string(input.height()) + " but background is " +
                            std::to_string(bg.width()) + "x" + std::to_string(bg.height()));
    if (tau < 0 || tau > 255)
        throw ContractError("subtract: tau must be in [0, 255]");
    Subtraction out{GrayImage(input.width(), input.height()), ForegroundMask(input.width(), input.height())};
    for (int y = 0; y < input.height(); ++y) {
        for (int x = 0; x < input.width(); ++x) {
            if (!bg.valid.at(x, y))
                continue;
            const int d = std::abs(static_cast<int>(input.at(x, y)) - static_cast<int>(bg.reference.at(x, y)));
            out.diff.at(x, y) = static_cast<std::uint8_t>(d);
            if (d >= tau)
                out.mask.set(x, y, true);
        }
    }
    return out;
}

GrayImage fuse(const GrayImage& original, const GrayImage& diff, const ForegroundMask& mask, const FusionParams& params)
{
    if (!original.sameSize(diff) || !mask.sameSize(original))
        throw ContractError("fuse: dimension mismatch");
    if (!(params.alpha >= 0.0 && params.alpha <= 1.0))
        throw ContractError("fuse: alpha must be in [0, 1]");
    GrayImage out(original.width(), original.height());
    for (int y = 0; y < original.height(); ++y) {
        for (int x = 0; x < original.width(); ++x) {
            if (params.mode == FusionMode::Mask) {
                out.at(x, y) = mask.at(x, y) ? original.at(x, y) : 0;
            } else {
                const double v = params.alpha * original.at(x, y) + (1.0 - params.alpha) * diff.at(x, y);
                out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return out;
}

}  // namespace thermoscan
