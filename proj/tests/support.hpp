#pragma once

#include <filesystem>
#include <string>

#include "thermoscan/imaging.hpp"
#include "thermoscan/random.hpp"

namespace testing {

inline thermoscan::GrayImage randomImage(thermoscan::Rng& rng, int w, int h, int lo = 0, int hi = 255)
{
    thermoscan::GrayImage img(w, h);
    for (auto& p : img.pixels())
        p = static_cast<std::uint8_t>(rng.uniformInt(lo, hi));
    return img;
}

inline thermoscan::BoundingBox randomBox(thermoscan::Rng& rng, int maxX, int maxY, int maxW, int maxH)
{
    return {static_cast<int>(rng.uniformInt(0, maxX)), static_cast<int>(rng.uniformInt(0, maxY)),
            static_cast<int>(rng.uniformInt(1, maxW)), static_cast<int>(rng.uniformInt(1, maxH))};
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& name)
        : path_(std::filesystem::temp_directory_path() / ("thermoscan_" + name))
    {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testing
