#include "thermoscan/eval.hpp"

#include <algorithm>
#include <cstdio>

namespace thermoscan {

MatchCounts matchDetections(const std::vector<Detection>& dets, const std::vector<BoundingBox>& truths,
                            double iouThresh)
{
    if (!(iouThresh >= 0.0 && iouThresh <= 1.0))
        throw ContractError("matchDetections: IoU threshold must be in [0, 1]");
    std::vector<Detection> ordered = dets;
    std::stable_sort(ordered.begin(), ordered.end(), detectionBefore);
    std::vector<bool> taken(truths.size(), false);
    MatchCounts c;
    for (const auto& d : ordered) {
        int best = -1;
        double bestIou = -1.0;
        for (std::size_t i = 0; i < truths.size(); ++i) {
            if (taken[i])
                continue;
            const double v = iou(d.box, truths[i]);
            if (v > bestIou) {
                bestIou = v;
                best = static_cast<int>(i);
            }
        }
        if (best >= 0 && bestIou >= iouThresh) {
            taken[best] = true;
            ++c.tp;
        } else {
            ++c.fp;
        }
    }
    c.fn = static_cast<long long>(std::count(taken.begin(), taken.end(), false));
    return c;
}

PrecisionRecall precisionRecall(const MatchCounts& c)
{
    PrecisionRecall pr;
    if (c.tp + c.fp > 0)
        pr.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0)
        pr.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return pr;
}

namespace {

long long missedAt(double theta, const std::vector<std::vector<Detection>>& scored,
                   const std::vector<std::vector<BoundingBox>>& truths, double nmsIou, double matchIou)
{
    long long fn = 0;
    for (std::size_t f = 0; f < scored.size(); ++f)
        fn += matchDetections(finalizeDetections(scored[f], theta, nmsIou), truths[f], matchIou).fn;
    return fn;
}

}  // namespace

std::optional<double> tuneTheta(const std::vector<std::vector<Detection>>& scoredPerFrame,
                                const std::vector<std::vector<BoundingBox>>& truthPerFrame, double nmsIou,
                                double matchIou)
{
    if (scoredPerFrame.size() != truthPerFrame.size())
        throw ContractError("tuneTheta: frame count mismatch");
    std::vector<double> scores;
    for (const auto& frame : scoredPerFrame)
        for (const auto& d : frame)
            scores.push_back(d.score);
    if (scores.empty())
        return std::nullopt;
    std::sort(scores.begin(), scores.end(), std::greater<>());
    scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

    if (missedAt(scores.back(), scoredPerFrame, truthPerFrame, nmsIou, matchIou) > 0)
        return std::nullopt;
    // scores[lo] misses something (or lo == -1), scores[hi] reaches full recall.
    std::ptrdiff_t lo = -1;
    std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(scores.size()) - 1;
    while (hi - lo > 1) {
        const std::ptrdiff_t mid = lo + (hi - lo) / 2;
        if (missedAt(scores[mid], scoredPerFrame, truthPerFrame, nmsIou, matchIou) == 0)
            hi = mid;
        else
            lo = mid;
    }
    return scores[hi];
}

namespace {

// Runs fn, prefixing any library error with the frame it happened on.
template <typename Fn>
auto inFrame(const FrameSequence& frames, std::size_t f, Fn&& fn)
{
    const std::string where = "frame " + frames.id(f) + ": ";
    try {
        return fn();
    } catch (const AnchorLostError& e) {
        throw AnchorLostError(where + e.what(), e.bestError());
    } catch (const ContractError& e) {
        throw ContractError(where + e.what());
    }
}

}  // namespace

BenchReport benchmark(const BenchSequence& seq, const LinearModel& model, const std::vector<DetectMode>& modes,
                      const BenchOptions& options)
{
    if (!seq.frames)
        throw ContractError("benchmark: no frames");
    const FrameSequence& frames = *seq.frames;
    std::vector<std::vector<BoundingBox>> truths(frames.size());
    for (std::size_t f = 0; f < frames.size(); ++f) {
        const auto it = seq.truth.find(frames.id(f));
        if (it != seq.truth.end())
            truths[f] = it->second;
    }
    // Every truth id must name a frame in the sequence.
    for (const auto& [id, boxes] : seq.truth) {
        if (std::find(frames.ids().begin(), frames.ids().end(), id) == frames.ids().end())
            throw ContractError("benchmark: truth refers to unknown frame " + id);
    }

    BenchReport report;
    for (const DetectMode& base : modes) {
        if (base.mode != Mode::HogOnly && !seq.background)
            throw ContractError("benchmark: mode " + modeName(base.mode) + " needs a background");
        if (base.mode == Mode::HogAbsDynamic && !seq.anchor)
            throw ContractError("benchmark: mode abs needs an anchor");

        DetectMode mode = base;
        BenchRow row;
        row.name = modeName(mode.mode);
        row.mode = mode.mode;
        if (options.autoTheta) {
            std::vector<std::vector<Detection>> scored;
            scored.reserve(frames.size());
            for (std::size_t f = 0; f < frames.size(); ++f)
                scored.push_back(inFrame(frames, f, [&] {
                    return scoreWindows(frames.frame(f), model, mode, seq.background, seq.anchor).windows;
                }));
            const auto theta = tuneTheta(scored, truths, mode.nmsIou, options.matchIou);
            row.fullRecallReachable = theta.has_value();
            if (theta) {
                mode.theta = *theta;
            } else {
                // Unreachable: keep every scored window so recall is as high as it can be.
                double lowest = 0.0;
                for (const auto& fr : scored)
                    for (const auto& d : fr)
                        lowest = std::min(lowest, d.score);
                mode.theta = lowest;
            }
        }
        row.theta = mode.theta;
        for (std::size_t f = 0; f < frames.size(); ++f) {
            const DetectResult r =
                inFrame(frames, f, [&] { return detect(frames.frame(f), model, mode, seq.background, seq.anchor); });
            row.execSeconds += r.stats.seconds;
            row.windowsConsidered += r.stats.windowsConsidered;
            row.windowsScored += r.stats.windowsScored;
            row.counts += matchDetections(r.detections, truths[f], options.matchIou);
        }
        const PrecisionRecall pr = precisionRecall(row.counts);
        row.precision = pr.precision;
        row.recall = pr.recall;
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<std::string> reportFields(const BenchRow& row)
{
    char buf[64];
    std::vector<std::string> f{row.name};
    std::snprintf(buf, sizeof buf, "%.6f", row.execSeconds);
    f.emplace_back(buf);
    std::snprintf(buf, sizeof buf, "%.6f", row.precision);
    f.emplace_back(buf);
    std::snprintf(buf, sizeof buf, "%.6f", row.recall);
    f.emplace_back(buf);
    f.push_back(std::to_string(row.windowsConsidered));
    f.push_back(std::to_string(row.windowsScored));
    return f;
}

std::string renderReportCsv(const BenchReport& report)
{
    std::string out = std::string(kReportHeader) + "\n";
    for (const auto& row : report.rows) {
        const auto f = reportFields(row);
        for (std::size_t i = 0; i < f.size(); ++i)
            out += (i ? "," : "") + f[i];
        out += "\n";
    }
    return out;
}

std::string renderReportTable(const BenchReport& report)
{
    const std::vector<std::string> header{"Mode",      "Execution Time (in Seconds)", "Precision", "Recall",
                                          "Windows Considered", "Windows Scored"};
    std::vector<std::vector<std::string>> cells{header};
    for (const auto& row : report.rows)
        cells.push_back(reportFields(row));
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& r : cells)
        for (std::size_t i = 0; i < r.size(); ++i)
            width[i] = std::max(width[i], r[i].size());

    std::string out;
    const auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            out += (i ? " | " : "");
            // Text left-aligned, numbers right-aligned.
            const std::string pad(width[i] - r[i].size(), ' ');
            out += (i == 0 || &r == &cells.front()) ? r[i] + pad : pad + r[i];
        }
        out += "\n";
    };
    line(cells.front());
    std::string rule;
    for (std::size_t i = 0; i < width.size(); ++i)
        rule += (i ? "-+-" : "") + std::string(width[i], '-');
    out += rule + "\n";
    for (std::size_t r = 1; r < cells.size(); ++r)
        line(cells[r]);
    return out;
}

}  // namespace thermoscan
