#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thermoscan/detect.hpp"
#include "thermoscan/records.hpp"

namespace thermoscan {

struct MatchCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;

    MatchCounts& operator+=(const MatchCounts& o)
    {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

inline constexpr double kMatchIou = 0.5;

/// Greedy one-to-one matching: detections in canonical order each claim the unmatched
/// truth with the highest IoU (lowest index on ties) if that IoU reaches iouThresh.
MatchCounts matchDetections(const std::vector<Detection>& dets, const std::vector<BoundingBox>& truths,
                            double iouThresh = kMatchIou);

struct PrecisionRecall {
    double precision = 1.0;
    double recall = 1.0;
};

/// Empty denominators give 1.0.
PrecisionRecall precisionRecall(const MatchCounts& c);

/// Highest theta whose detections reach full recall over all frames. Lowering theta only
/// appends lower-scored windows, which can neither displace kept detections in NMS nor steal
/// earlier matches, so recall is monotone and the search is a bisection over observed scores.
/// Returns nullopt when full recall is unreachable (or there is nothing to score).
std::optional<double> tuneTheta(const std::vector<std::vector<Detection>>& scoredPerFrame,
                                const std::vector<std::vector<BoundingBox>>& truthPerFrame, double nmsIou,
                                double matchIou = kMatchIou);

struct BenchSequence {
    const FrameSequence* frames = nullptr;
    TruthTable truth;
    const BackgroundModel* background = nullptr;
    const ReferenceAnchor* anchor = nullptr;
};

struct BenchOptions {
    bool autoTheta = true;  // otherwise each mode's own theta is used
    double matchIou = kMatchIou;
};

struct BenchRow {
    std::string name;
    Mode mode = Mode::HogOnly;
    double execSeconds = 0.0;
    double precision = 1.0;
    double recall = 1.0;
    long long windowsConsidered = 0;
    long long windowsScored = 0;
    MatchCounts counts;
    double theta = 0.0;
    bool fullRecallReachable = true;
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

/// Runs every mode over every frame. Counts are aggregated over the sequence before dividing.
/// With autoTheta, an untimed calibration pass picks theta, then a timed pass produces the row.
BenchReport benchmark(const BenchSequence& seq, const LinearModel& model, const std::vector<DetectMode>& modes,
                      const BenchOptions& options = {});

inline constexpr const char* kReportHeader = "mode,exec_time_s,precision,recall,windows_considered,windows_scored";

/// The report's numeric fields, formatted once; both renderings use these strings.
std::vector<std::string> reportFields(const BenchRow& row);
std::string renderReportCsv(const BenchReport& report);
std::string renderReportTable(const BenchReport& report);

}  // namespace thermoscan
