#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sct/config.hpp"
#include "sct/metrics.hpp"

namespace sctk {

struct GenDataOptions {
    std::string out_dir;
};

struct ReconstructOptions {
    std::string method; // fbp | art-tv | tnv | dsir
    std::string input_path;
    std::string output_path;
    std::string model_path; // required for dsir
    std::string pgm_dir;    // optional per-channel dumps
};

struct TrainOptions {
    std::string manifest_path;
    std::string checkpoint_path;
    std::string loss_csv_path;
};

struct EvaluateOptions {
    std::vector<std::string> methods;
    std::string manifest_path;
    std::string model_path;
    std::string out_dir;
    std::vector<sct::PatchSpec> patches;
    bool noise_protocol = false;
    bool auto_lambda = false;
};

struct BenchOptions {
    std::string out_csv;
};

int cmd_gen_data(const sct::RunConfig& cfg, const GenDataOptions& opt);
int cmd_reconstruct(const sct::RunConfig& cfg, const ReconstructOptions& opt);
int cmd_train(const sct::RunConfig& cfg, const TrainOptions& opt);
int cmd_evaluate(const sct::RunConfig& cfg, const EvaluateOptions& opt);
int cmd_bench(const sct::RunConfig& cfg, const BenchOptions& opt);

} // namespace sctk
