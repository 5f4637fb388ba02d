#include <CLI11.hpp>
#include <iostream>
#include <stdexcept>
#include <string>

#include "commands.hpp"
#include "sct/config.hpp"
#include "sct/errors.hpp"
#include "sct/metrics.hpp"
#include "sct/parallel.hpp"

namespace {

struct GlobalOptions {
    std::string config_path;
    std::string preset;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool single_thread = false;
};

sct::RunConfig resolve_config(const GlobalOptions& g) {
    sct::RunConfig cfg;
    if (!g.preset.empty()) cfg.apply_preset(g.preset);
    if (!g.config_path.empty()) cfg = sct::load_config_file(g.config_path, cfg);
    if (g.seed_set) cfg.seed = g.seed;
    if (g.single_thread) cfg.threads = 1;
    else if (g.threads > 0) cfg.threads = g.threads;
    if (cfg.threads > 0) sct::set_num_threads(cfg.threads);
    return cfg;
}

void add_global_options(CLI::App* cmd, GlobalOptions& g) {
    cmd->add_option("--config", g.config_path, "flat key-value configuration file");
    cmd->add_option("--preset", g.preset, "named defaults: ci | paper")
        ->check(CLI::IsMember({"ci", "paper"}));
    cmd->add_option("--seed", g.seed, "master seed override")
        ->each([&g](const std::string&) { g.seed_set = true; });
    cmd->add_option("--threads", g.threads, "worker threads (0 = hardware)");
    cmd->add_flag("--single-thread", g.single_thread, "pin all work to one thread");
}

sct::PatchSpec parse_patch(const std::string& text) {
    // row,col,height,width[,label]
    sct::PatchSpec patch;
    std::string rest = text;
    std::vector<std::string> parts;
    std::size_t pos;
    while ((pos = rest.find(',')) != std::string::npos) {
        parts.push_back(rest.substr(0, pos));
        rest = rest.substr(pos + 1);
    }
    parts.push_back(rest);
    if (parts.size() < 4) throw CLI::ValidationError("--patch needs row,col,height,width[,label]");
    patch.row = std::stoi(parts[0]);
    patch.col = std::stoi(parts[1]);
    patch.height = std::stoi(parts[2]);
    patch.width = std::stoi(parts[3]);
    patch.label = parts.size() > 4 ? parts[4] : "patch" + parts[0] + "_" + parts[1];
    return patch;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse-view spectral CT toolkit"};
    app.require_subcommand(1);

    GlobalOptions g;
    sctk::GenDataOptions gen_opt;
    sctk::ReconstructOptions rec_opt;
    sctk::TrainOptions train_opt;
    sctk::EvaluateOptions eval_opt;
    sctk::BenchOptions bench_opt;
    std::vector<std::string> patch_texts;

    CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic spectral dataset");
    add_global_options(gen, g);
    gen->add_option("--out", gen_opt.out_dir, "output directory (default: run.out_dir)");

    CLI::App* rec = app.add_subcommand("reconstruct", "reconstruct one sinogram volume");
    add_global_options(rec, g);
    rec->add_option("--method", rec_opt.method, "fbp | art-tv | tnv | dsir")->required();
    rec->add_option("--input", rec_opt.input_path, "sinogram volume (.sctv)")->required();
    rec->add_option("--output", rec_opt.output_path, "output image volume (.sctv)")->required();
    rec->add_option("--model", rec_opt.model_path, "network checkpoint (dsir only)");
    rec->add_option("--dump-pgm", rec_opt.pgm_dir, "write per-channel PGM previews here");

    CLI::App* train = app.add_subcommand("train", "train the network on a generated dataset");
    add_global_options(train, g);
    train->add_option("--manifest", train_opt.manifest_path, "dataset manifest")->required();
    train->add_option("--checkpoint", train_opt.checkpoint_path, "output checkpoint")->required();
    train->add_option("--loss-csv", train_opt.loss_csv_path, "per-epoch loss CSV");

    CLI::App* eval = app.add_subcommand("evaluate", "run methods over a test set and score them");
    add_global_options(eval, g);
    eval->add_option("--methods", eval_opt.methods, "subset of fbp,art-tv,tnv,dsir")
        ->required()
        ->delimiter(',');
    eval->add_option("--manifest", eval_opt.manifest_path, "test manifest")->required();
    eval->add_option("--model", eval_opt.model_path, "network checkpoint for dsir");
    eval->add_option("--out", eval_opt.out_dir, "output directory for CSV reports")->required();
    eval->add_option("--patch", patch_texts, "spectral-profile patch row,col,h,w[,label]");
    eval->add_flag("--noise-protocol", eval_opt.noise_protocol,
                   "channel-noise robustness sweep (sigma 0.5/1.0/1.5)");
    eval->add_flag("--auto-lambda", eval_opt.auto_lambda,
                   "pick tnv.lambda by a 5-point grid on the first slice");

    CLI::App* bench = app.add_subcommand("bench", "single-thread timing comparison");
    add_global_options(bench, g);
    bench->add_option("--out", bench_opt.out_csv, "timing CSV path (default bench.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        const sct::RunConfig cfg = resolve_config(g);
        for (const auto& text : patch_texts) eval_opt.patches.push_back(parse_patch(text));
        if (gen->parsed()) return sctk::cmd_gen_data(cfg, gen_opt);
        if (rec->parsed()) return sctk::cmd_reconstruct(cfg, rec_opt);
        if (train->parsed()) return sctk::cmd_train(cfg, train_opt);
        if (eval->parsed()) return sctk::cmd_evaluate(cfg, eval_opt);
        if (bench->parsed()) return sctk::cmd_bench(cfg, bench_opt);
    } catch (const sct::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const sct::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
