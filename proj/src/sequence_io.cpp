#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

#include "thermoscan/imaging.hpp"
#include "thermoscan/records.hpp"

namespace fs = std::filesystem;

namespace thermoscan {

FrameSequence::FrameSequence(std::vector<GrayImage> frames, std::vector<std::string> ids)
    : frames_(std::move(frames)), ids_(std::move(ids))
{
    if (frames_.empty())
        throw ContractError("FrameSequence: no frames");
    if (ids_.size() != frames_.size())
        throw ContractError("FrameSequence: id count does not match frame count");
    for (std::size_t i = 1; i < frames_.size(); ++i) {
        if (!frames_[i].sameSize(frames_[0]))
            throw ContractError("FrameSequence: frame " + ids_[i] + " has different dimensions");
    }
}

namespace {

std::vector<std::string> defaultIds(std::size_t n)
{
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i)
        ids.push_back(frameId(i));
    return ids;
}

}  // namespace

FrameSequence::FrameSequence(std::vector<GrayImage> frames)
    : frames_(std::move(frames))
{
    if (frames_.empty())
        throw ContractError("FrameSequence: no frames");
    ids_ = defaultIds(frames_.size());
    for (std::size_t i = 1; i < frames_.size(); ++i) {
        if (!frames_[i].sameSize(frames_[0]))
            throw ContractError("FrameSequence: frame " + ids_[i] + " has different dimensions");
    }
}

std::string frameId(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04zu", index);
    return buf;
}

FrameSequence loadSequence(const std::string& dir)
{
    if (!fs::is_directory(dir))
        throw FormatError(dir + ": not a directory");
    static const std::regex pattern(R"(frame_(\d+)\.pgm)");
    struct Entry {
        unsigned long long index;
        std::string id;
        fs::path path;
    };
    std::vector<Entry> entries;
    for (const auto& item : fs::directory_iterator(dir)) {
        if (!item.is_regular_file())
            continue;
        const std::string name = item.path().filename().string();
        std::smatch m;
        if (std::regex_match(name, m, pattern))
            entries.push_back({std::stoull(m[1].str()), m[1].str(), item.path()});
    }
    if (entries.empty())
        throw FormatError(dir + ": no frame_<n>.pgm files");
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
    std::vector<GrayImage> frames;
    std::vector<std::string> ids;
    for (const auto& e : entries) {
        frames.push_back(readPgmFile(e.path.string()));
        ids.push_back(e.id);
        if (!frames.back().sameSize(frames.front()))
            throw FormatError(e.path.string() + ": dimensions differ from the first frame");
    }
    return FrameSequence(std::move(frames), std::move(ids));
}

std::vector<std::uint8_t> readFileBytes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError(path + ": cannot open for reading");
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void writeFileAtomic(const std::string& path, std::span<const std::uint8_t> bytes)
{
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw FormatError(path + ": cannot open for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw FormatError(path + ": write failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec)
        throw FormatError(path + ": rename failed: " + ec.message());
}

void writeFileAtomic(const std::string& path, const std::string& text)
{
    writeFileAtomic(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace thermoscan

// ---- CSV records ----

namespace thermoscan {

std::vector<std::string> splitCsvLine(const std::string& line)
{
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return fields;
}

namespace {

int parseInt(const std::string& field, const std::string& where)
{
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(field, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != field.size())
        throw FormatError(where + ": bad integer \"" + field + "\"");
    return v;
}

template <typename RowFn>
void forEachRow(const std::string& text, const std::string& header, const std::string& what, RowFn&& fn)
{
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    bool sawHeader = false;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (!sawHeader) {
            if (line != header)
                throw FormatError(what + ": expected header \"" + header + "\"");
            sawHeader = true;
            continue;
        }
        fn(splitCsvLine(line), what + " line " + std::to_string(lineNo));
    }
    if (!sawHeader)
        throw FormatError(what + ": empty file");
}

}  // namespace

std::string formatTruthCsv(const TruthTable& truth)
{
    std::string out = "frame_id,x,y,w,h\n";
    for (const auto& [id, boxes] : truth)
        for (const auto& b : boxes)
            out += id + "," + formatBox(b) + "\n";
    return out;
}

TruthTable parseTruthCsv(const std::string& text)
{
    TruthTable truth;
    forEachRow(text, "frame_id,x,y,w,h", "truth csv", [&](const std::vector<std::string>& f, const std::string& where) {
        if (f.size() != 5)
            throw FormatError(where + ": expected 5 fields");
        BoundingBox b{parseInt(f[1], where), parseInt(f[2], where), parseInt(f[3], where), parseInt(f[4], where)};
        if (!b.valid())
            throw FormatError(where + ": box must have positive size");
        truth[f[0]].push_back(b);
    });
    return truth;
}

TruthTable readTruthCsv(const std::string& path)
{
    const auto bytes = readFileBytes(path);
    try {
        return parseTruthCsv(std::string(bytes.begin(), bytes.end()));
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

std::string formatShiftsCsv(const std::vector<ShiftRecord>& shifts)
{
    std::string out = "frame_id,dx,dy\n";
    for (const auto& s : shifts)
        out += s.frameId + "," + std::to_string(s.shift.x) + "," + std::to_string(s.shift.y) + "\n";
    return out;
}

std::vector<ShiftRecord> parseShiftsCsv(const std::string& text)
{
    std::vector<ShiftRecord> out;
    forEachRow(text, "frame_id,dx,dy", "shifts csv", [&](const std::vector<std::string>& f, const std::string& where) {
        if (f.size() != 3)
            throw FormatError(where + ": expected 3 fields");
        out.push_back({f[0], {parseInt(f[1], where), parseInt(f[2], where)}});
    });
    return out;
}

std::string formatDetectionRows(const std::string& frameId, const std::vector<Detection>& dets)
{
    std::string out;
    char buf[64];
    for (const auto& d : dets) {
        std::snprintf(buf, sizeof buf, "%.6f", d.score);
        out += frameId + "," + formatBox(d.box) + "," + buf + "\n";
    }
    return out;
}

}  // namespace thermoscan
