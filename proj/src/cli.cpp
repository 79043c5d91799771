#include "thermoscan/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>

#include "thermoscan/config.hpp"
#include "thermoscan/eval.hpp"
#include "thermoscan/synth.hpp"
#include "thermoscan/training.hpp"

namespace thermoscan {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flags that override a config key. Values go through the config parser so the
// range checks are the same as for a file.
struct Override {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr Override kDetectOverrides[] = {
    {"--tau", "tau", "Foreground threshold on |frame - background|"},
    {"--rho", "rho", "Minimum foreground fraction for a window to be scored"},
    {"--theta", "theta", "Score threshold"},
    {"--stride", "stride", "Window stride in pixels at scale 1"},
    {"--scales", "scales", "Scale ladder, e.g. 1,1.2,1.44"},
    {"--nms-iou", "nms_iou", "NMS overlap threshold"},
    {"--fusion", "fusion.mode", "mask or blend"},
    {"--alpha", "fusion.alpha", "Blend weight for fusion mode blend"},
    {"--max-error", "max_error", "Anchor SSD limit, or auto"},
};

constexpr Override kTrainOverrides[] = {
    {"--lambda", "svm.lambda", "SVM regularization"},
    {"--epochs", "svm.epochs", "SVM epochs"},
    {"--svm-seed", "svm.seed", "SVM shuffle seed"},
    {"--hard-negatives", "train.hard_negative_passes", "Hard-negative mining rounds"},
};

struct ConfigFlags {
    std::string configPath;
    std::vector<std::string> sets;
    std::vector<std::pair<const Override*, std::string>> values;

    void attach(CLI::App& cmd, std::span<const Override> overrides)
    {
        cmd.add_option("--config", configPath, "key=value config file (default: $THERMOSCAN_CONFIG)");
        cmd.add_option("--set", sets, "Override any config key, KEY=VALUE (repeatable)");
        values.reserve(values.size() + overrides.size());
        for (const auto& o : overrides) {
            values.emplace_back(&o, std::string());
            cmd.add_option(o.flag, values.back().second, o.help);
        }
    }

    // defaults < config file < --set < individual flags
    Config resolve(const CLI::App& cmd) const
    {
        Config config;
        std::string path = configPath;
        if (path.empty()) {
            if (const char* env = std::getenv(kConfigEnvVar))
                path = env;
        }
        if (!path.empty())
            config = readConfigFile(path);
        // A bad value on the command line is a usage error, not a data error.
        const auto apply = [&](const std::string& flag, const std::string& key, const std::string& value) {
            try {
                setConfigValue(config, key, value);
            } catch (const ConfigError& e) {
                throw UsageError(flag + ": " + e.what());
            }
        };
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw UsageError("--set expects KEY=VALUE, got '" + s + "'");
            apply("--set", s.substr(0, eq), s.substr(eq + 1));
        }
        for (const auto& [o, value] : values) {
            if (cmd.count(o->flag) > 0)
                apply(o->flag, o->key, value);
        }
        return config;
    }
};

std::vector<std::vector<BoundingBox>> truthPerFrame(const FrameSequence& seq, const TruthTable& truth,
                                                    const std::string& truthPath)
{
    std::vector<std::vector<BoundingBox>> out(seq.size());
    for (const auto& [id, boxes] : truth) {
        const auto it = std::find(seq.ids().begin(), seq.ids().end(), id);
        if (it == seq.ids().end())
            throw FormatError(truthPath + ": frame " + id + " is not in the sequence");
        out[static_cast<std::size_t>(it - seq.ids().begin())] = boxes;
    }
    return out;
}

void ensureDir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw FormatError(dir + ": cannot create directory: " + ec.message());
}

// Background and anchor inputs shared by train, detect and bench.
struct SceneInputs {
    std::string bgPath;
    std::string anchorPath;
    std::optional<BackgroundModel> bg;
    std::optional<ReferenceAnchor> anchor;

    void attach(CLI::App& cmd)
    {
        cmd.add_option("--bg", bgPath, "Background frame (PGM)");
        cmd.add_option("--anchor", anchorPath, "Anchor spec file; needs --bg");
    }

    void load(const FrameSequence& seq)
    {
        if (!anchorPath.empty() && bgPath.empty())
            throw UsageError("--anchor requires --bg");
        if (bgPath.empty())
            return;
        const GrayImage img = readPgmFile(bgPath);
        if (img.width() != seq.width() || img.height() != seq.height())
            throw ContractError(bgPath + ": background is " + std::to_string(img.width()) + "x" +
                                std::to_string(img.height()) + ", frames are " + std::to_string(seq.width()) + "x" +
                                std::to_string(seq.height()));
        bg = BackgroundModel::fromImage(img);
        if (anchorPath.empty())
            return;
        const AnchorSpec spec = readAnchorSpec(anchorPath);
        try {
            anchor = initAnchor(img, spec.region, spec.object);
        } catch (const ContractError& e) {
            throw ContractError(anchorPath + ": " + e.what());
        }
    }

    void require(Mode mode) const
    {
        if (mode != Mode::HogOnly && bgPath.empty())
            throw UsageError("mode " + modeName(mode) + " requires --bg");
        if (mode == Mode::HogAbsDynamic && anchorPath.empty())
            throw UsageError("mode abs requires --anchor");
    }
};

Mode modeFlag(const std::string& text)
{
    try {
        return parseMode(text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

int cmdSynth(std::uint64_t seed, const std::string& outDir, int frames, const std::string& pan, int humans,
             double noise, int distractors, std::ostream& out)
{
    SceneParams params;
    params.pan = parsePanSpec(pan, frames);
    params.humansPerFrame = humans;
    params.noiseSigma = noise;
    params.distractors = distractors;
    const PanoramaScene scene = generateScene(seed, params);
    exportScene(scene, outDir);
    out << "wrote " << scene.frameCount() << " frames to " << outDir << "\n";
    return kExitOk;
}

int cmdBgInit(const std::string& seqDir, const std::string& region, const std::string& object,
              const std::string& outPath, std::ostream& out)
{
    const FrameSequence seq = loadSequence(seqDir);
    AnchorSpec spec{parseBox(region), parseBox(object)};
    try {
        initAnchor(seq.frame(0), spec.region, spec.object);
    } catch (const ContractError& e) {
        throw ContractError(seqDir + " frame " + seq.id(0) + ": " + e.what());
    }
    writeFileAtomic(outPath, formatAnchorSpec(spec));
    out << "wrote anchor " << outPath << "\n";
    return kExitOk;
}

int cmdTrain(const std::string& seqDir, const std::string& truthPath, const std::string& outPath,
             const Config& config, SceneInputs& scene, std::ostream& out)
{
    const FrameSequence seq = loadSequence(seqDir);
    const auto truth = truthPerFrame(seq, readTruthCsv(truthPath), truthPath);
    scene.load(seq);
    const LinearModel model = trainDetector(seq, truth, config.training, scene.bg ? &*scene.bg : nullptr,
                                            scene.anchor ? &*scene.anchor : nullptr);
    writeModelFile(outPath, model);
    out << "wrote model " << outPath << " (" << model.weights.size() << " weights)\n";
    return kExitOk;
}

int cmdDetect(const std::string& seqDir, const std::string& modelPath, Mode mode, const std::string& outDir,
              const Config& config, SceneInputs& scene, std::ostream& out)
{
    scene.require(mode);
    const FrameSequence seq = loadSequence(seqDir);
    const LinearModel model = readModelFile(modelPath);
    scene.load(seq);
    DetectMode det = config.detector();
    det.mode = mode;
    ensureDir(outDir);
    const fs::path root(outDir);

    std::string all = std::string(kDetectionsHeader) + "\n";
    std::vector<ShiftRecord> shifts;
    std::size_t total = 0;
    for (std::size_t f = 0; f < seq.size(); ++f) {
        const std::string& id = seq.id(f);
        DetectResult r;
        try {
            r = detect(seq.frame(f), model, det, scene.bg ? &*scene.bg : nullptr, scene.anchor ? &*scene.anchor : nullptr);
        } catch (const AnchorLostError& e) {
            throw AnchorLostError(seqDir + " frame " + id + ": " + e.what(), e.bestError());
        }
        const std::string rows = formatDetectionRows(id, r.detections);
        all += rows;
        total += r.detections.size();
        writeFileAtomic((root / ("boxes_" + id + ".csv")).string(), std::string(kDetectionsHeader) + "\n" + rows);
        const PredictionMask mask = predictionMask(r.detections, seq.width(), seq.height());
        writePgmFile((root / ("masked_" + id + ".pgm")).string(), applyMask(seq.frame(f), mask));
        if (r.shift)
            shifts.push_back({id, Point{r.shift->dx, r.shift->dy}});
    }
    writeFileAtomic((root / "detections.csv").string(), all);
    if (mode == Mode::HogAbsDynamic)
        writeFileAtomic((root / "shifts.csv").string(), formatShiftsCsv(shifts));
    out << modeName(mode) << ": " << total << " detections over " << seq.size() << " frames, written to " << outDir
        << "\n";
    return kExitOk;
}

int cmdBench(const std::string& seqDir, const std::string& truthPath, const std::string& modelPath,
             const std::string& modesText, const std::string& outPath, bool fixedTheta, const Config& config,
             SceneInputs& scene, std::ostream& out)
{
    std::vector<DetectMode> modes;
    for (const auto& name : splitCsvLine(modesText)) {
        DetectMode m = config.detector();
        m.mode = modeFlag(name);
        scene.require(m.mode);
        modes.push_back(m);
    }
    if (modes.empty())
        throw UsageError("--modes is empty");
    const FrameSequence seq = loadSequence(seqDir);
    const TruthTable truth = readTruthCsv(truthPath);
    truthPerFrame(seq, truth, truthPath);
    const LinearModel model = readModelFile(modelPath);
    scene.load(seq);
    BenchOptions options;
    options.autoTheta = !fixedTheta;
    const BenchReport report =
        benchmark({&seq, truth, scene.bg ? &*scene.bg : nullptr, scene.anchor ? &*scene.anchor : nullptr}, model, modes,
                  options);
    if (!outPath.empty())
        writeFileAtomic(outPath, renderReportCsv(report));
    out << renderReportTable(report);
    for (const auto& row : report.rows) {
        if (!row.fullRecallReachable)
            out << "note: " << row.name << " cannot reach full recall at any threshold\n";
    }
    return kExitOk;
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Thermal surveillance human detection toolkit", args.empty() ? "thermoscan" : args.front()};
    app.require_subcommand(1);

    // synth
    std::uint64_t seed = 0;
    std::string synthOut, pan = "none";
    int frames = 50, humans = 1, distractors = 0;
    double noise = 0.0;
    auto* synth = app.add_subcommand("synth", "Render a synthetic panning-camera sequence with ground truth");
    synth->add_option("--seed", seed, "Scene seed")->required();
    synth->add_option("--out", synthOut, "Output directory")->required();
    synth->add_option("--frames", frames, "Frame count")->check(CLI::Range(1, 100000));
    synth->add_option("--pan", pan, "none, dx:dy,... per-frame deltas, or lin:X,Y,K");
    synth->add_option("--humans", humans, "Humans per frame")->check(CLI::Range(0, 64));
    synth->add_option("--noise", noise, "Gaussian noise sigma")->check(CLI::Range(0.0, 128.0));
    synth->add_option("--distractors", distractors, "Static warm objects in the background")->check(CLI::Range(0, 64));

    // bg-init
    std::string bgSeq, region, object, anchorOut;
    auto* bgInit = app.add_subcommand("bg-init", "Validate and write an anchor spec for a sequence");
    bgInit->add_option("--seq", bgSeq, "Sequence directory")->required();
    bgInit->add_option("--region", region, "Selected region x,y,w,h")->required();
    bgInit->add_option("--object", object, "Landmark box x,y,w,h, centred in the region")->required();
    bgInit->add_option("--out", anchorOut, "Anchor spec file to write")->required();

    // train
    std::string trainSeq, trainTruth, modelOut;
    ConfigFlags trainFlags;
    SceneInputs trainScene;
    auto* train = app.add_subcommand("train", "Train the linear SVM on a labelled sequence");
    train->add_option("--seq", trainSeq, "Sequence directory")->required();
    train->add_option("--truth", trainTruth, "truth.csv")->required();
    train->add_option("--out", modelOut, "Model file to write")->required();
    trainScene.attach(*train);
    trainFlags.attach(*train, kTrainOverrides);

    // detect
    std::string detSeq, detModel, detMode, detOut;
    ConfigFlags detFlags;
    SceneInputs detScene;
    auto* detectCmd = app.add_subcommand("detect", "Detect humans in every frame");
    detectCmd->add_option("--seq", detSeq, "Sequence directory")->required();
    detectCmd->add_option("--model", detModel, "Model file")->required();
    detectCmd->add_option("--mode", detMode, "hog | bs | abs")->required();
    detectCmd->add_option("--out", detOut, "Output directory")->required();
    detScene.attach(*detectCmd);
    detFlags.attach(*detectCmd, kDetectOverrides);

    // bench
    std::string benchSeq, benchTruth, benchModel, benchModes = "hog,bs,abs", benchOut;
    ConfigFlags benchFlags;
    SceneInputs benchScene;
    auto* bench = app.add_subcommand("bench", "Benchmark detection modes against ground truth");
    bench->add_option("--seq", benchSeq, "Sequence directory")->required();
    bench->add_option("--truth", benchTruth, "truth.csv")->required();
    bench->add_option("--model", benchModel, "Model file")->required();
    bench->add_option("--modes", benchModes, "Comma-separated modes (default hog,bs,abs)");
    bench->add_option("--out", benchOut, "Report CSV to write");
    bool noAutoTheta = false;
    bench->add_flag("--no-auto-theta", noAutoTheta, "Use the configured theta instead of tuning it per mode");
    benchScene.attach(*bench);
    benchFlags.attach(*bench, kDetectOverrides);

    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    if (argv.empty())
        argv.push_back("thermoscan");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\nRun with --help for usage.\n";
        return kExitUsage;
    }

    try {
        if (*synth)
            return cmdSynth(seed, synthOut, frames, pan, humans, noise, distractors, out);
        if (*bgInit)
            return cmdBgInit(bgSeq, region, object, anchorOut, out);
        if (*train)
            return cmdTrain(trainSeq, trainTruth, modelOut, trainFlags.resolve(*train), trainScene, out);
        if (*detectCmd)
            return cmdDetect(detSeq, detModel, modeFlag(detMode), detOut, detFlags.resolve(*detectCmd), detScene, out);
        if (*bench)
            return cmdBench(benchSeq, benchTruth, benchModel, benchModes, benchOut, noAutoTheta || bench->count("--theta") > 0,
                            benchFlags.resolve(*bench), benchScene, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\nRun with --help for usage.\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace thermoscan
