#pragma once

#include <cstdint>
#include <vector>

#include "thermoscan/imaging.hpp"

namespace thermoscan {

/// Binary row-major mask (1 = set). Used for foreground, validity and prediction masks.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);

    int width() const { return width_; }
    int height() const { return height_; }
    bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
    bool sameSize(const GrayImage& img) const { return width_ == img.width() && height_ == img.height(); }
    long long count() const;

    /// {0, 255} rendering for debugging output.
    GrayImage toImage() const;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

using ForegroundMask = BinaryMask;

/// Reference background plus per-pixel validity (0 where the value is unknown, e.g. after shifting).
struct BackgroundModel {
    GrayImage reference;
    BinaryMask valid;

    /// Fresh model: every pixel valid.
    static BackgroundModel fromImage(GrayImage reference);

    int width() const { return reference.width(); }
    int height() const { return reference.height(); }

    friend bool operator==(const BackgroundModel&, const BackgroundModel&) = default;
};

struct Subtraction {
    GrayImage diff;
    ForegroundMask mask;
};

inline constexpr int kDefaultTau = 30;

/// |input - reference| on valid pixels (0 elsewhere); mask = valid && diff >= tau.
Subtraction subtract(const GrayImage& input, const BackgroundModel& bg, int tau = kDefaultTau);

enum class FusionMode { Mask, Blend };

struct FusionParams {
    FusionMode mode = FusionMode::Mask;
    double alpha = 0.5;
};

/// Mask: original on foreground, 0 elsewhere. Blend: round(alpha*original + (1-alpha)*diff).
GrayImage fuse(const GrayImage& original, const GrayImage& diff, const ForegroundMask& mask,
               const FusionParams& params = {});

}  // namespace thermoscan
