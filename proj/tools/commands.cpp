#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>

#include "sct/art_tv.hpp"
#include "sct/dsir.hpp"
#include "sct/errors.hpp"
#include "sct/fbp.hpp"
#include "sct/metrics.hpp"
#include "sct/parallel.hpp"
#include "sct/phantom.hpp"
#include "sct/projector.hpp"
#include "sct/rng.hpp"
#include "sct/tnv.hpp"
#include "sct/unet.hpp"
#include "sct/volume_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace sct;

namespace sctk {

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void write_meta(const std::string& path, const RunConfig& cfg,
                const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot write " + path);
    os << "# run metadata\n";
    for (const auto& [k, v] : extra) os << k << " = " << v << "\n";
    os << "config_hash = " << cfg.full_hash() << "\n";
    os << "geometry_hash = " << cfg.geometry_hash() << "\n";
    os << "# config echo\n" << cfg.serialize();
}

NoiseConfig noise_from_config(const RunConfig& cfg, std::uint64_t slice_seed) {
    NoiseConfig noise;
    if (cfg.noise_mode == "none") {
        noise.mode = NoiseMode::None;
    } else if (cfg.noise_mode == "gaussian") {
        noise.mode = NoiseMode::GaussianSinogram;
    } else if (cfg.noise_mode == "poisson") {
        noise.mode = NoiseMode::PoissonCounts;
    } else {
        throw std::invalid_argument("unknown noise mode: " + cfg.noise_mode);
    }
    noise.sigma = cfg.noise_sigma;
    noise.incident_counts = cfg.incident_counts;
    noise.seed = mix_seed(slice_seed, 0x7015eu);
    const EnergyGrid grid = cfg.energy_grid();
    for (double keV : cfg.noise_target_kev)
        noise.target_channels.push_back(nearest_channel(grid, keV));
    return noise;
}

UNetConfig network_config(const RunConfig& cfg) {
    UNetConfig net;
    net.channels = cfg.single_channel ? 1 : cfg.num_channels;
    net.levels = cfg.levels;
    net.base_filters = cfg.base_filters;
    net.dropout_rate = cfg.dropout_rate;
    net.input_size = cfg.image_size;
    net.residual = cfg.residual;
    return net;
}

struct ManifestRecord {
    int slice = 0;
    std::uint64_t seed = 0;
    std::uint64_t scene_hash = 0;
    std::string phantom, sino_dense, sino_sparse, fbp_sparse, target_art74;
};

std::vector<ManifestRecord> read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open manifest " + path);
    std::vector<ManifestRecord> records;
    const fs::path base = fs::path(path).parent_path();
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw io_error("bad manifest line in " + path);
        ManifestRecord r;
        r.slice = j.at("slice").get<int>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.scene_hash = j.at("scene_hash").get<std::uint64_t>();
        r.phantom = (base / j.at("phantom").get<std::string>()).string();
        r.sino_dense = (base / j.at("sino_dense").get<std::string>()).string();
        r.sino_sparse = (base / j.at("sino_sparse").get<std::string>()).string();
        r.fbp_sparse = (base / j.at("fbp_sparse").get<std::string>()).string();
        if (j.contains("target_art74"))
            r.target_art74 = (base / j.at("target_art74").get<std::string>()).string();
        records.push_back(std::move(r));
    }
    return records;
}

void check_hash(const VolumeHeader& header, const RunConfig& cfg, const std::string& what) {
    if (header.config_hash != cfg.geometry_hash())
        throw std::invalid_argument(what + ": geometry hash mismatch (volume " +
                                    std::to_string(header.config_hash) + " vs config " +
                                    std::to_string(cfg.geometry_hash()) + ")");
}

TnvConfig tnv_config(const RunConfig& cfg) {
    TnvConfig t;
    t.lambda = cfg.tnv_lambda;
    t.iters = cfg.tnv_iters;
    t.step_product_margin = cfg.tnv_step_margin;
    return t;
}

SpectralSinogram load_sparse_sinogram(const std::string& path, const RunConfig& cfg,
                                      ScanGeometry& geo_out) {
    VolumeHeader header;
    SpectralSinogram sino = read_volume_sinogram(path, &header);
    check_hash(header, cfg, path);
    if (sino.views == cfg.num_views_dense) {
        geo_out = cfg.dense_geometry();
    } else if (sino.views == cfg.num_views_sparse) {
        geo_out = cfg.sparse_geometry();
    } else {
        throw std::invalid_argument(path + ": view count matches neither dense nor sparse");
    }
    sino.angles_rad = geo_out.angles_rad;
    return sino;
}

} // namespace

int cmd_gen_data(const RunConfig& cfg, const GenDataOptions& opt) {
    const std::string out_dir = opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
    fs::create_directories(out_dir);

    const EnergyGrid grid = cfg.energy_grid();
    const ScanGeometry dense = cfg.dense_geometry();
    const ScanGeometry sparse = cfg.sparse_geometry();
    const auto materials = build_material_library(cfg.material_count, cfg.material_seed);
    const std::uint64_t geo_hash = cfg.geometry_hash();

    SceneConfig scene_cfg;
    scene_cfg.min_shapes = cfg.min_shapes;
    scene_cfg.max_shapes = cfg.max_shapes;
    scene_cfg.num_materials = cfg.material_count;
    if (cfg.force_metal) scene_cfg.force_material_id = 0; // aluminum-like entry

    std::vector<std::string> manifest_lines(cfg.count);
    parallel_for(0, static_cast<std::size_t>(cfg.count), [&](std::size_t i) {
        const std::uint64_t slice_seed = mix_seed(cfg.seed, 0xda7au, i);
        const PhantomScene scene = sample_scene(slice_seed, scene_cfg);
        const SpectralImage phantom = rasterize(scene, dense, grid, materials);
        const SpectralSinogram sino_dense =
            simulate_scan(phantom, dense, noise_from_config(cfg, slice_seed));
        const SpectralSinogram sino_sparse = subsample_views(sino_dense, cfg.num_views_sparse);
        const SpectralImage fbp_sparse = fbp_reconstruct(sino_sparse, sparse);

        char stem[32];
        std::snprintf(stem, sizeof stem, "slice%05zu", i);
        const std::string phantom_file = std::string(stem) + "_phantom.sctv";
        const std::string dense_file = std::string(stem) + "_sino74.sctv";
        const std::string sparse_file = std::string(stem) + "_sino9.sctv";
        const std::string fbp_file = std::string(stem) + "_fbp9.sctv";
        write_volume((fs::path(out_dir) / phantom_file).string(), phantom, geo_hash);
        write_volume((fs::path(out_dir) / dense_file).string(), sino_dense, geo_hash);
        write_volume((fs::path(out_dir) / sparse_file).string(), sino_sparse, geo_hash);
        write_volume((fs::path(out_dir) / fbp_file).string(), fbp_sparse, geo_hash);

        std::uint64_t scene_hash = 0;
        for (const auto& s : scene.shapes)
            scene_hash = mix_seed(scene_hash, static_cast<std::uint64_t>(s.material_id),
                                  static_cast<std::uint64_t>(s.kind),
                                  static_cast<std::uint64_t>(s.half_x * 1e6));

        json j{{"slice", static_cast<int>(i)},
               {"seed", slice_seed},
               {"scene_hash", scene_hash},
               {"phantom", phantom_file},
               {"sino_dense", dense_file},
               {"sino_sparse", sparse_file},
               {"fbp_sparse", fbp_file}};
        if (cfg.art74_target) {
            const std::string target_file = std::string(stem) + "_art74.sctv";
            const SpectralImage target = art_tv_reconstruct(sino_dense, dense, cfg.art_config());
            write_volume((fs::path(out_dir) / target_file).string(), target, geo_hash);
            j["target_art74"] = target_file;
        }
        manifest_lines[i] = j.dump();
    });

    std::ofstream manifest((fs::path(out_dir) / "manifest.jsonl").string());
    if (!manifest) throw io_error("cannot write manifest in " + out_dir);
    for (const auto& line : manifest_lines) manifest << line << "\n";
    manifest.close();
    write_meta((fs::path(out_dir) / "dataset.meta").string(), cfg);
    std::cout << "gen-data: wrote " << cfg.count << " slices to " << out_dir << "\n";
    return 0;
}

int cmd_reconstruct(const RunConfig& cfg, const ReconstructOptions& opt) {
    ScanGeometry geo;
    const SpectralSinogram sino = load_sparse_sinogram(opt.input_path, cfg, geo);

    SpectralImage rec;
    const double t0 = now_ms();
    if (opt.method == "fbp") {
        rec = fbp_reconstruct(sino, geo);
    } else if (opt.method == "art-tv") {
        rec = art_tv_reconstruct(sino, geo, cfg.art_config());
    } else if (opt.method == "tnv") {
        rec = tnv_reconstruct(sino, geo, tnv_config(cfg));
    } else if (opt.method == "dsir") {
        if (opt.model_path.empty())
            throw std::invalid_argument("dsir reconstruction requires --model");
        const UNetModel model = load_checkpoint(opt.model_path);
        rec = dsir_reconstruct(sino, geo, model, {cfg.max_attenuation});
    } else {
        throw std::invalid_argument("unknown method: " + opt.method);
    }
    const double elapsed = now_ms() - t0;

    write_volume(opt.output_path, rec, cfg.geometry_hash());
    write_meta(opt.output_path + ".meta", cfg,
               {{"method", opt.method},
                {"input", opt.input_path},
                {"timing_ms", std::to_string(elapsed)}});
    if (!opt.pgm_dir.empty()) {
        fs::create_directories(opt.pgm_dir);
        for (int s = 0; s < rec.channels; ++s) {
            char name[32];
            std::snprintf(name, sizeof name, "channel%03d.pgm", s);
            write_pgm((fs::path(opt.pgm_dir) / name).string(), rec.channel(s), rec.height,
                      rec.width, cfg.max_attenuation);
        }
    }
    std::cout << "reconstruct: " << opt.method << " -> " << opt.output_path << " ("
              << elapsed << " ms)\n";
    return 0;
}

int cmd_train(const RunConfig& cfg, const TrainOptions& opt) {
    const auto records = read_manifest(opt.manifest_path);
    if (records.empty()) throw std::invalid_argument("train: empty manifest");

    const ScaleReference ref{cfg.max_attenuation};
    std::vector<TrainPair> pairs;
    pairs.reserve(records.size());
    for (const auto& r : records) {
        VolumeHeader header;
        const SpectralImage input = read_volume_image(r.fbp_sparse, cfg.pixel_size_cm, &header);
        check_hash(header, cfg, r.fbp_sparse);
        const std::string target_path =
            cfg.art74_target && !r.target_art74.empty() ? r.target_art74 : r.phantom;
        const SpectralImage target = read_volume_image(target_path, cfg.pixel_size_cm);
        TrainPair p;
        p.input = image_to_tensor(scale_to_unit(input, ref));
        p.target = image_to_tensor(scale_to_unit(target, ref));
        pairs.push_back(std::move(p));
    }

    // Single-channel mode trains on individual channel images.
    if (cfg.single_channel) {
        std::vector<TrainPair> expanded;
        expanded.reserve(pairs.size() * cfg.num_channels);
        for (const auto& p : pairs) {
            for (int s = 0; s < p.input.ch; ++s) {
                TrainPair q;
                q.input = Tensor(1, p.input.h, p.input.w);
                q.target = Tensor(1, p.target.h, p.target.w);
                std::copy(p.input.v.begin() + s * p.input.plane_size(),
                          p.input.v.begin() + (s + 1) * p.input.plane_size(),
                          q.input.v.begin());
                std::copy(p.target.v.begin() + s * p.target.plane_size(),
                          p.target.v.begin() + (s + 1) * p.target.plane_size(),
                          q.target.v.begin());
                expanded.push_back(std::move(q));
            }
        }
        pairs = std::move(expanded);
    }

    // Deterministic shuffled split.
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng split_rng(mix_seed(cfg.seed, 0x59117u));
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[split_rng.uniform_index(i)]);
    const std::size_t val_count = std::min(
        pairs.size() - 1, static_cast<std::size_t>(std::ceil(pairs.size() * cfg.val_fraction)));
    std::vector<TrainPair> train_set, val_set;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < order.size() - val_count ? train_set : val_set).push_back(pairs[order[i]]);

    UNetModel model = build_unet(network_config(cfg), mix_seed(cfg.seed, 0x0de1u));
    OptimizerState optstate;
    optstate.base_lr = cfg.learning_rate;
    optstate.lr_decay = cfg.lr_decay;

    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch_size;
    tc.seed = mix_seed(cfg.seed, 0x7121u);
    tc.augment.noise_sigma = cfg.augment_sigma;

    const double t0 = now_ms();
    const TrainReport report = train_unet(model, optstate, train_set, val_set, tc);
    const double elapsed = now_ms() - t0;

    save_checkpoint(opt.checkpoint_path, model);
    const std::string csv_path =
        opt.loss_csv_path.empty() ? opt.checkpoint_path + ".loss.csv" : opt.loss_csv_path;
    std::ofstream csv(csv_path);
    if (!csv) throw io_error("cannot write " + csv_path);
    csv << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < report.train_loss.size(); ++e)
        csv << e << "," << report.train_loss[e] << "," << report.val_loss[e] << "\n";
    write_meta(opt.checkpoint_path + ".meta", cfg,
               {{"train_slices", std::to_string(train_set.size())},
                {"val_slices", std::to_string(val_set.size())},
                {"timing_ms", std::to_string(elapsed)}});
    std::cout << "train: " << report.train_loss.size() << " epochs, final train loss "
              << report.train_loss.back() << ", val loss " << report.val_loss.back() << " -> "
              << opt.checkpoint_path << "\n";
    return 0;
}

namespace {

SpectralImage reconstruct_by_name(const std::string& method, const SpectralSinogram& sino,
                                  const ScanGeometry& geo, const RunConfig& cfg,
                                  const UNetModel* model) {
    if (method == "fbp") return fbp_reconstruct(sino, geo);
    if (method == "art-tv") return art_tv_reconstruct(sino, geo, cfg.art_config());
    if (method == "tnv") return tnv_reconstruct(sino, geo, tnv_config(cfg));
    if (method == "dsir") {
        if (!model) throw std::invalid_argument("dsir evaluation requires --model");
        return dsir_reconstruct(sino, geo, *model, {cfg.max_attenuation});
    }
    throw std::invalid_argument("unknown method: " + method);
}

} // namespace

int cmd_evaluate(const RunConfig& cfg, const EvaluateOptions& opt) {
    const auto records = read_manifest(opt.manifest_path);
    if (records.empty()) throw std::invalid_argument("evaluate: empty manifest");
    fs::create_directories(opt.out_dir);

    std::optional<UNetModel> model;
    std::vector<std::string> methods = opt.methods;
    if (std::find(methods.begin(), methods.end(), "dsir") != methods.end()) {
        if (opt.model_path.empty()) {
            std::cerr << "evaluate: warning: no --model given, skipping dsir\n";
            methods.erase(std::remove(methods.begin(), methods.end(), std::string("dsir")),
                          methods.end());
        } else {
            model = load_checkpoint(opt.model_path);
        }
    }
    if (methods.empty()) throw std::invalid_argument("evaluate: no runnable methods left");

    RunConfig run_cfg = cfg;
    const ScanGeometry sparse = cfg.sparse_geometry();
    const SsimConfig ssim_cfg{8, 0.01, 0.03, cfg.max_attenuation};

    // Five-point lambda grid on one validation slice (the manifest head).
    if (opt.auto_lambda &&
        std::find(methods.begin(), methods.end(), "tnv") != methods.end()) {
        ScanGeometry geo;
        const SpectralSinogram sino = load_sparse_sinogram(records.front().sino_sparse, cfg, geo);
        const SpectralImage truth =
            read_volume_image(records.front().phantom, cfg.pixel_size_cm);
        double best_lambda = cfg.tnv_lambda, best_ssim = -1.0;
        for (double lambda : {1e-3, 3.16e-3, 1e-2, 3.16e-2, 1e-1}) {
            RunConfig trial = cfg;
            trial.tnv_lambda = lambda;
            const SpectralImage rec = tnv_reconstruct(sino, geo, tnv_config(trial));
            const double score = ssim(rec, truth, ssim_cfg).scalar;
            if (score > best_ssim) {
                best_ssim = score;
                best_lambda = lambda;
            }
        }
        run_cfg.tnv_lambda = best_lambda;
        std::cout << "evaluate: auto lambda = " << best_lambda << " (validation SSIM "
                  << best_ssim << ")\n";
    }

    std::ofstream per_slice((fs::path(opt.out_dir) / "metrics.csv").string());
    per_slice << "slice,method,views,tv,ssim,mae\n";
    std::ofstream per_channel((fs::path(opt.out_dir) / "metrics_per_channel.csv").string());
    per_channel << "slice,method,views,channel,tv,ssim,mae\n";
    std::ofstream profiles((fs::path(opt.out_dir) / "profiles.csv").string());
    profiles << "slice,method,patch,channel,mean,std\n";

    struct Accumulator {
        double tv = 0.0, ssim = 0.0, mae = 0.0;
        int count = 0;
    };
    std::map<std::string, Accumulator> summary;

    for (const auto& record : records) {
        VolumeHeader truth_header;
        const SpectralImage truth =
            read_volume_image(record.phantom, cfg.pixel_size_cm, &truth_header);
        check_hash(truth_header, cfg, record.phantom);
        ScanGeometry geo;
        const SpectralSinogram sino = load_sparse_sinogram(record.sino_sparse, cfg, geo);

        for (const auto& method : methods) {
            const SpectralImage rec = reconstruct_by_name(
                method, sino, geo, run_cfg, model ? &*model : nullptr);
            const MetricValue tv = image_tv(rec);
            const MetricValue ss = ssim(rec, truth, ssim_cfg);
            const MetricValue er = mae(rec, truth);
            per_slice << record.slice << "," << method << "," << geo.num_views << ","
                      << tv.scalar << "," << ss.scalar << "," << er.scalar << "\n";
            for (int s = 0; s < rec.channels; ++s)
                per_channel << record.slice << "," << method << "," << geo.num_views << "," << s
                            << "," << tv.per_channel[s] << "," << ss.per_channel[s] << ","
                            << er.per_channel[s] << "\n";
            for (const auto& patch : opt.patches) {
                const SpectralProfile prof = spectral_profile(rec, patch);
                for (int s = 0; s < rec.channels; ++s)
                    profiles << record.slice << "," << method << "," << patch.label << "," << s
                             << "," << prof.mean[s] << "," << prof.std[s] << "\n";
            }
            auto& acc = summary[method];
            acc.tv += tv.scalar;
            acc.ssim += ss.scalar;
            acc.mae += er.scalar;
            ++acc.count;
        }
    }

    std::ofstream summary_csv((fs::path(opt.out_dir) / "summary.csv").string());
    summary_csv << "method,views,tv,ssim,mae\n";
    for (const auto& [method, acc] : summary) {
        summary_csv << method << "," << sparse.num_views << "," << acc.tv / acc.count << ","
                    << acc.ssim / acc.count << "," << acc.mae / acc.count << "\n";
        std::cout << "evaluate: " << method << " mean tv=" << acc.tv / acc.count
                  << " ssim=" << acc.ssim / acc.count << " mae=" << acc.mae / acc.count << "\n";
    }

    if (opt.noise_protocol) {
        const EnergyGrid grid = cfg.energy_grid();
        const std::vector<int> channels = {nearest_channel(grid, 42.0),
                                           nearest_channel(grid, 76.2)};
        std::ofstream noise_csv((fs::path(opt.out_dir) / "noise_robustness.csv").string());
        noise_csv << "sigma,slice,method,channel,affected,ssim,measured_sigma\n";
        for (double sigma : {0.5, 1.0, 1.5}) {
            for (const auto& record : records) {
                VolumeHeader header;
                SpectralSinogram dense_sino = read_volume_sinogram(record.sino_dense, &header);
                check_hash(header, cfg, record.sino_dense);
                const ScanGeometry dense = cfg.dense_geometry();
                dense_sino.angles_rad = dense.angles_rad;
                NoiseConfig noise;
                noise.mode = NoiseMode::GaussianSinogram;
                noise.sigma = sigma;
                noise.seed = mix_seed(cfg.seed, record.seed,
                                      static_cast<std::uint64_t>(sigma * 1000));
                noise.target_channels = channels;
                // Inject into the dense data, then subsample, mirroring the
                // acquisition-order protocol.
                SpectralSinogram noisy = dense_sino;
                for (int ch : channels)
                    for (int v = 0; v < noisy.views; ++v)
                        for (int b = 0; b < noisy.bins; ++b) {
                            Rng rng(mix_seed(noise.seed, ch, v, b));
                            noisy.at(ch, v, b) += sigma * rng.normal();
                        }
                const SpectralSinogram noisy_sparse =
                    subsample_views(noisy, cfg.num_views_sparse);

                // Measured injected std per affected channel (plumbing gate).
                std::map<int, double> measured;
                for (int ch : channels) {
                    double m2 = 0.0;
                    const std::size_t count = noisy.channel(ch).size();
                    for (std::size_t i = 0; i < count; ++i) {
                        const double d = noisy.channel(ch)[i] - dense_sino.channel(ch)[i];
                        m2 += d * d;
                    }
                    measured[ch] = std::sqrt(m2 / count);
                }

                const SpectralImage truth =
                    read_volume_image(record.phantom, cfg.pixel_size_cm);
                for (const std::string method : {"dsir", "tnv"}) {
                    if (std::find(methods.begin(), methods.end(), method) == methods.end())
                        continue;
                    const SpectralImage rec = reconstruct_by_name(
                        method, noisy_sparse, sparse, run_cfg, model ? &*model : nullptr);
                    const MetricValue ss = ssim(rec, truth, ssim_cfg);
                    for (int s = 0; s < rec.channels; ++s) {
                        const bool affected =
                            std::find(channels.begin(), channels.end(), s) != channels.end();
                        noise_csv << sigma << "," << record.slice << "," << method << "," << s
                                  << "," << (affected ? 1 : 0) << "," << ss.per_channel[s] << ","
                                  << (affected ? measured[s] : 0.0) << "\n";
                    }
                }
            }
        }
    }

    write_meta((fs::path(opt.out_dir) / "evaluate.meta").string(), run_cfg);
    return 0;
}

int cmd_bench(const RunConfig& cfg, const BenchOptions& opt) {
    const EnergyGrid grid = cfg.energy_grid();
    const ScanGeometry dense = cfg.dense_geometry();
    const ScanGeometry sparse = cfg.sparse_geometry();
    const auto materials = build_material_library(cfg.material_count, cfg.material_seed);
    SceneConfig scene_cfg;
    scene_cfg.num_materials = cfg.material_count;
    const SpectralImage phantom =
        rasterize(sample_scene(mix_seed(cfg.seed, 0xbe7cu), scene_cfg), dense, grid, materials);
    const SpectralSinogram sino_sparse =
        subsample_views(simulate_scan(phantom, dense, {}), cfg.num_views_sparse);

    SpectralSinogram sino_one(1, sino_sparse.views, sino_sparse.bins);
    sino_one.angles_rad = sino_sparse.angles_rad;
    std::copy(sino_sparse.channel(0).begin(), sino_sparse.channel(0).end(),
              sino_one.channel(0).begin());

    UNetConfig joint_cfg = network_config(cfg);
    joint_cfg.channels = cfg.num_channels;
    UNetConfig single_cfg = joint_cfg;
    single_cfg.channels = 1;
    const UNetModel joint_model = build_unet(joint_cfg, 1);
    const UNetModel single_model = build_unet(single_cfg, 1);
    const ScaleReference ref{cfg.max_attenuation};

    Tensor joint_input(cfg.num_channels, cfg.image_size, cfg.image_size);
    Tensor single_input(1, cfg.image_size, cfg.image_size);
    {
        Rng rng(3);
        for (double& v : joint_input.v) v = rng.uniform(0.0, 1.0);
        for (double& v : single_input.v) v = rng.uniform(0.0, 1.0);
    }

    auto median_ms = [&](auto&& fn) {
        std::vector<double> times;
        fn(); // warm-up
        for (int rep = 0; rep < std::max(5, cfg.bench_reps); ++rep) {
            const double t0 = now_ms();
            fn();
            times.push_back(now_ms() - t0);
        }
        std::sort(times.begin(), times.end());
        return times[times.size() / 2];
    };

    struct Row {
        std::string method;
        int channels;
        double ms;
        bool measured;
    };
    std::vector<Row> rows;
    const int s_count = cfg.num_channels;

    const double fbp1 = median_ms([&] { fbp_reconstruct(sino_one, sparse); });
    const double fbp_s = median_ms([&] { fbp_reconstruct(sino_sparse, sparse); });
    const double art1 = median_ms([&] { art_tv_reconstruct(sino_one, sparse, cfg.art_config()); });
    rows.push_back({"fbp", 1, fbp1, true});
    rows.push_back({"fbp", s_count, fbp_s, true});
    rows.push_back({"art-tv", 1, art1, true});
    rows.push_back({"art-tv", s_count, art1 * s_count, false});
    const double cnn_s = median_ms([&] { unet_forward(joint_model, joint_input, false); });
    const double cnn_sc1 = median_ms([&] { unet_forward(single_model, single_input, false); });
    rows.push_back({"cnn", s_count, cnn_s, true});
    rows.push_back({"cnn_sc", 1, cnn_sc1, true});
    rows.push_back({"cnn_sc", s_count, cnn_sc1 * s_count, false});
    const double dsir_s =
        median_ms([&] { dsir_reconstruct(sino_sparse, sparse, joint_model, ref); });
    rows.push_back({"dsir", s_count, dsir_s, true});

    std::ofstream csv(opt.out_csv.empty() ? "bench.csv" : opt.out_csv);
    if (!csv) throw io_error("cannot write bench csv");
    csv << "method,channels,median_ms,measured\n";
    for (const auto& row : rows)
        csv << row.method << "," << row.channels << "," << row.ms << ","
            << (row.measured ? 1 : 0) << "\n";
    const double ratio = cnn_s / (s_count * cnn_sc1);
    csv << "joint_over_channelwise_ratio," << s_count << "," << ratio << ",1\n";

    std::cout << "bench: fbp(1ch) " << fbp1 << " ms, art-tv(1ch) " << art1 << " ms, cnn("
              << s_count << "ch) " << cnn_s << " ms, cnn_sc(1ch) " << cnn_sc1
              << " ms, joint/channelwise ratio " << ratio << "\n";
    return 0;
}

} // namespace sctk
