#pragma once

#include <map>
#include <string>
#include <vector>

#include "thermoscan/detect.hpp"
#include "thermoscan/imaging.hpp"

namespace thermoscan {

/// Ground-truth boxes keyed by frame id. Frames without boxes may be absent.
using TruthTable = std::map<std::string, std::vector<BoundingBox>>;

/// "frame_id,x,y,w,h" with header.
std::string formatTruthCsv(const TruthTable& truth);
TruthTable parseTruthCsv(const std::string& text);
TruthTable readTruthCsv(const std::string& path);

struct ShiftRecord {
    std::string frameId;
    Point shift;
};
/// "frame_id,dx,dy" with header.
std::string formatShiftsCsv(const std::vector<ShiftRecord>& shifts);
std::vector<ShiftRecord> parseShiftsCsv(const std::string& text);

inline constexpr const char* kDetectionsHeader = "frame_id,x,y,w,h,score";
/// One "frame_id,x,y,w,h,score" row per detection, score with 6 decimals. No header.
std::string formatDetectionRows(const std::string& frameId, const std::vector<Detection>& dets);

/// Splits a CSV line on commas (no quoting).
std::vector<std::string> splitCsvLine(const std::string& line);

}  // namespace thermoscan
