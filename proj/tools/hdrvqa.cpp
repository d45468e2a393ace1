#include "hdrvqa/config.hpp"
#include "hdrvqa/errors.hpp"
#include "hdrvqa/eval.hpp"
#include "hdrvqa/features.hpp"
#include "hdrvqa/sweep.hpp"
#include "hdrvqa/svr.hpp"
#include "hdrvqa/util.hpp"
#include "hdrvqa/video_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace hdrvqa;

namespace {

// Registers every schema knob as a --key option on the subcommand; values
// land in `flags` and are applied on top of file/env configuration.
void add_knob_options(CLI::App *cmd, std::map<std::string, std::string> &flags) {
    for (const KnobSpec &k : config_schema()) {
        std::string desc = k.description + " [default: " + k.default_value + "]";
        cmd->add_option_function<std::string>(
            "--" + k.key, [&flags, key = k.key](const std::string &v) { flags[key] = v; },
            desc);
    }
}

RunConfig build_config(const std::string &config_path,
                       const std::map<std::string, std::string> &flags) {
    RunConfig cfg;
    if (!config_path.empty())
        cfg.apply_file(config_path);
    cfg.apply_env();
    for (const auto &[k, v] : flags)
        cfg.set(k, v);
    return cfg;
}

std::vector<std::pair<std::string, std::string>> list_videos(const std::string &input) {
    std::vector<std::pair<std::string, std::string>> out; // (path, id)
    if (fs::is_directory(input)) {
        for (const auto &e : fs::directory_iterator(input)) {
            if (!e.is_regular_file())
                continue;
            std::string ext = e.path().extension().string();
            if (ext == ".y4m" || ext == ".yuv" || ext == ".raw")
                out.emplace_back(e.path().string(), e.path().stem().string());
        }
        std::sort(out.begin(), out.end());
        if (out.empty())
            throw DataError("no .y4m/.yuv/.raw files under " + input);
    } else {
        out.emplace_back(input, fs::path(input).stem().string());
    }
    return out;
}

void print_warnings(const std::vector<std::string> &warnings, const std::string &prefix) {
    for (const auto &w : warnings)
        std::cerr << "warning: " << prefix << w << "\n";
}

int cmd_extract(const std::string &config_path, const std::map<std::string, std::string> &flags,
                const std::string &input, const std::string &out_path) {
    RunConfig cfg = build_config(config_path, flags);
    FeatureConfig fcfg = cfg.feature_config();
    OpenParams params = cfg.open_params();

    std::vector<FeatureVector> rows;
    for (const auto &[path, id] : list_videos(input)) {
        VideoSource src = open_video(path, params);
        ExtractResult res = extract_video(src, fcfg, id);
        print_warnings(res.warnings, id + ": ");
        rows.push_back(std::move(res.features));
        std::cerr << id << ": " << src.frame_count << " frames -> " << kVideoFeatureCount
                  << " features\n";
    }
    write_features_csv(out_path, rows);
    return 0;
}

struct JoinedData {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    std::vector<std::string> contents;
};

JoinedData join_features_scores(const std::vector<FeatureVector> &features,
                                const std::vector<ScoreRecord> &scores) {
    std::map<std::string, const FeatureVector *> by_id;
    for (const auto &f : features) {
        if (f.layout_version != kLayoutVersion)
            throw DataError("feature layout_version " + f.layout_version +
                            " does not match this build (" + kLayoutVersion + ")");
        by_id[f.video_id] = &f;
    }
    JoinedData d;
    for (const ScoreRecord &s : scores) {
        auto it = by_id.find(s.video_id);
        if (it == by_id.end())
            throw DataError("no features for video " + s.video_id);
        d.x.emplace_back(it->second->values.begin(), it->second->values.end());
        d.y.push_back(s.mos);
        d.contents.push_back(s.content_id);
    }
    return d;
}

int cmd_train(const std::string &config_path, const std::map<std::string, std::string> &flags,
              const std::string &features_path, const std::string &scores_path,
              const std::string &out_path) {
    RunConfig cfg = build_config(config_path, flags);
    auto features = read_features_csv(features_path);
    auto scores = read_scores_csv(scores_path);
    JoinedData d = join_features_scores(features, scores);

    SvrParams params = cfg.svr_params();
    if (cfg.svr_c_is_auto()) {
        std::string note;
        params.c = cross_validate_c(d.x, d.y, d.contents,
                                    std::span<const double>(kDefaultCGrid, 7), params, &note);
        if (!note.empty())
            std::cerr << "warning: " << note << "\n";
        std::cerr << "cross-validated C = " << params.c << "\n";
    }
    SvrModel model = train_svr(d.x, d.y, params, kLayoutVersion);
    save_model(model, out_path);
    std::cerr << "model written to " << out_path << "\n";
    return 0;
}

int cmd_predict(const std::string &model_path, const std::string &features_path,
                const std::string &out_path) {
    SvrModel model = load_model(model_path);
    auto features = read_features_csv(features_path);
    std::ofstream f(out_path);
    if (!f)
        throw DataError("cannot create " + out_path);
    f << "video_id,prediction\n";
    for (const FeatureVector &fv : features) {
        double p = predict(model, fv.values, fv.layout_version);
        f << fv.video_id << "," << p << "\n";
    }
    if (!f)
        throw DataError("write failure on " + out_path);
    return 0;
}

int cmd_evaluate(const std::string &config_path, const std::map<std::string, std::string> &flags,
                 const std::string &features_path, const std::string &scores_path,
                 const std::string &out_path) {
    RunConfig cfg = build_config(config_path, flags);
    auto features = read_features_csv(features_path);
    auto scores = read_scores_csv(scores_path);

    ProtocolOptions opt;
    opt.n_splits = cfg.get_int("splits");
    opt.seed = cfg.seed();
    opt.svr = cfg.svr_params();
    opt.tune_c = cfg.svr_c_is_auto();
    opt.jobs = cfg.jobs();
    EvalReport report = run_protocol(features, scores, opt);
    write_report_json(out_path, report);
    std::cout << "median SROCC " << report.median_srocc << " (" << report.std_srocc << "), "
              << "median LCC " << report.median_lcc << " (" << report.std_lcc << "), "
              << "median RMSE " << report.median_rmse << " (" << report.std_rmse << ")\n";
    return 0;
}

int cmd_compare(const std::string &path_a, const std::string &path_b, double alpha) {
    EvalReport a = read_report_json(path_a);
    EvalReport b = read_report_json(path_b);
    std::vector<double> sa, sb;
    for (const auto &m : a.per_split)
        sa.push_back(m.srocc);
    for (const auto &m : b.per_split)
        sb.push_back(m.srocc);
    int verdict = welch_ttest(sa, sb, alpha, true);
    std::cout << verdict << "\n";
    std::cerr << path_a << " mean SROCC " << mean_of(sa) << " vs " << path_b << " mean SROCC "
              << mean_of(sb) << " -> "
              << (verdict == 1 ? "first superior" : verdict == -1 ? "first inferior"
                                                                  : "indistinguishable")
              << " at alpha " << alpha << "\n";
    return 0;
}

int cmd_sweep(const std::string &config_path, const std::map<std::string, std::string> &flags,
              const std::string &param, const std::string &values_csv, const std::string &input,
              const std::string &scores_path, const std::string &cache_dir,
              const std::string &out_path) {
    RunConfig cfg = build_config(config_path, flags);
    FeatureConfig fcfg = cfg.feature_config();
    OpenParams params = cfg.open_params();

    std::vector<double> values;
    std::stringstream ss(values_csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        values.push_back(std::stod(tok));

    std::vector<SweepVideo> videos;
    for (const auto &[path, id] : list_videos(input))
        videos.push_back({path, id, params});
    auto scores = read_scores_csv(scores_path);

    ProtocolOptions opt;
    opt.n_splits = cfg.get_int("splits");
    opt.seed = cfg.seed();
    opt.svr = cfg.svr_params();
    opt.tune_c = cfg.svr_c_is_auto();
    opt.jobs = cfg.jobs();

    auto rows = sweep_parameter(param, values, videos, scores, fcfg, opt, cache_dir);
    write_sweep_csv(out_path, param, rows);
    for (const SweepRow &r : rows)
        std::cout << param << "=" << r.label << ": median SROCC " << r.report.median_srocc
                  << ", LCC " << r.report.median_lcc << ", RMSE " << r.report.median_rmse
                  << "\n";
    return 0;
}

int cmd_bench(const std::string &config_path, const std::map<std::string, std::string> &flags,
              int frames) {
    RunConfig cfg = build_config(config_path, flags);
    FeatureConfig fcfg = cfg.feature_config();
    fcfg.jobs = 1; // per-worker throughput
    int width = cfg.is_set("width") ? cfg.get_int("width") : 3840;
    int height = cfg.is_set("height") ? cfg.get_int("height") : 2160;

    std::string path = (fs::temp_directory_path() / "hdrvqa_bench.y4m").string();
    {
        Y4mWriter writer(path, width, height, 10);
        std::mt19937_64 rng(17);
        std::uniform_int_distribution<int> dist(64, 940);
        size_t luma = static_cast<size_t>(width) * height;
        std::vector<uint16_t> y(luma), cb(luma / 4), cr(luma / 4);
        for (int f = 0; f < frames; ++f) {
            for (auto &v : y)
                v = static_cast<uint16_t>(dist(rng));
            for (auto &v : cb)
                v = static_cast<uint16_t>(dist(rng));
            for (auto &v : cr)
                v = static_cast<uint16_t>(dist(rng));
            writer.write_frame(y, cb, cr);
        }
    }

    VideoSource src = open_video(path);
    auto t0 = std::chrono::steady_clock::now();
    ExtractResult res = extract_video(src, fcfg, "bench");
    auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();
    double fps = frames / secs;
    std::cout << width << "x" << height << ": " << frames << " frames in " << secs << " s = "
              << fps << " frames/s per worker\n";
    fs::remove(path);
    (void)res;
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"No-reference HDR video quality: feature extraction, SVR, and evaluation"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key=value config file (lowest precedence)");

    std::map<std::string, std::string> flags;

    // extract
    auto *extract = app.add_subcommand("extract", "compute feature vectors from videos");
    std::string ex_input, ex_sidecar, ex_out;
    extract->add_option("--input", ex_input, "video file or directory")->required();
    extract->add_option("--sidecar", ex_sidecar, "sidecar/config file for raw input");
    extract->add_option("--out", ex_out, "output features CSV")->required();
    add_knob_options(extract, flags);

    // train
    auto *train = app.add_subcommand("train", "fit the linear SVR on features and scores");
    std::string tr_features, tr_scores, tr_out;
    train->add_option("--features", tr_features, "features CSV")->required();
    train->add_option("--scores", tr_scores, "scores CSV (video_id,content_id,mos)")->required();
    train->add_option("--out", tr_out, "output model file")->required();
    add_knob_options(train, flags);

    // predict
    auto *predict_cmd = app.add_subcommand("predict", "apply a trained model to features");
    std::string pr_model, pr_features, pr_out;
    predict_cmd->add_option("--model", pr_model, "model file")->required();
    predict_cmd->add_option("--features", pr_features, "features CSV")->required();
    predict_cmd->add_option("--out", pr_out, "output predictions CSV")->required();

    // evaluate
    auto *evaluate = app.add_subcommand("evaluate", "run the content-separated split protocol");
    std::string ev_features, ev_scores, ev_out;
    evaluate->add_option("--features", ev_features, "features CSV")->required();
    evaluate->add_option("--scores", ev_scores, "scores CSV")->required();
    evaluate->add_option("--out", ev_out, "output report JSON")->required();
    add_knob_options(evaluate, flags);

    // compare
    auto *compare = app.add_subcommand("compare", "Welch's t-test between two reports");
    std::vector<std::string> cp_reports;
    double cp_alpha = 0.05;
    compare->add_option("--reports", cp_reports, "two report JSON files")
        ->expected(2)
        ->required();
    compare->add_option("--alpha", cp_alpha, "significance level [default: 0.05]");

    // sweep
    auto *sweep_cmd = app.add_subcommand("sweep", "parameter sweep with cached features");
    std::string sw_param, sw_values, sw_input, sw_scores, sw_cache, sw_out, sw_sidecar;
    sweep_cmd->add_option("--param", sw_param, "delta or window")->required();
    sweep_cmd->add_option("--values", sw_values, "comma-separated values (window 0 = Global)")
        ->required();
    sweep_cmd->add_option("--input", sw_input, "video file or directory")->required();
    sweep_cmd->add_option("--sidecar", sw_sidecar, "sidecar/config file for raw input");
    sweep_cmd->add_option("--scores", sw_scores, "scores CSV")->required();
    sweep_cmd->add_option("--cache", sw_cache, "feature cache directory")->required();
    sweep_cmd->add_option("--out", sw_out, "output table CSV")->required();
    add_knob_options(sweep_cmd, flags);

    // bench (frame geometry comes from the width/height knobs; default 4K)
    auto *bench = app.add_subcommand("bench", "single-worker feature extraction throughput");
    int bn_frames = 6;
    bench->add_option("--frames", bn_frames, "frames to extract [default: 6]");
    add_knob_options(bench, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        verify_layout();
        if (extract->parsed()) {
            std::string conf = !ex_sidecar.empty() ? ex_sidecar : config_path;
            return cmd_extract(conf, flags, ex_input, ex_out);
        }
        if (train->parsed())
            return cmd_train(config_path, flags, tr_features, tr_scores, tr_out);
        if (predict_cmd->parsed())
            return cmd_predict(pr_model, pr_features, pr_out);
        if (evaluate->parsed())
            return cmd_evaluate(config_path, flags, ev_features, ev_scores, ev_out);
        if (compare->parsed())
            return cmd_compare(cp_reports[0], cp_reports[1], cp_alpha);
        if (sweep_cmd->parsed()) {
            std::string conf = !sw_sidecar.empty() ? sw_sidecar : config_path;
            return cmd_sweep(conf, flags, sw_param, sw_values, sw_input, sw_scores, sw_cache,
                             sw_out);
        }
        if (bench->parsed())
            return cmd_bench(config_path, flags, bn_frames);
    } catch (const DataError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception &e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
