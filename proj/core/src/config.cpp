#include "sct/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sct/errors.hpp"
#include "sct/phantom.hpp"

namespace sct {

EnergyGrid RunConfig::energy_grid() const {
    return EnergyGrid::uniform(num_channels, min_kev, max_kev);
}

ScanGeometry RunConfig::dense_geometry() const {
    ScanGeometry g = ScanGeometry::parallel(image_size, num_views_dense, pixel_size_cm);
    g.detector_spacing = detector_spacing;
    return g;
}

ScanGeometry RunConfig::sparse_geometry() const {
    return subsample_geometry(dense_geometry(), num_views_sparse);
}

ArtTvConfig RunConfig::art_config() const {
    ArtTvConfig c;
    c.outer_iters = art_outer_iters;
    c.tv_iters = art_tv_iters;
    c.art_relaxation = art_relaxation;
    c.relaxation_decay = art_relaxation_decay;
    c.tv_step_ratio = art_tv_step_ratio;
    c.nonneg = art_nonneg;
    return c;
}

void RunConfig::apply_preset(const std::string& name) {
    if (name == "ci") {
        image_size = 64;
        num_channels = 8;
        base_filters = 8;
    } else if (name == "paper") {
        image_size = 96;
        num_channels = 32;
        base_filters = 64;
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: bad boolean '" + v + "'");
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::vector<double> parse_double_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::string format_double_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out;
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "geometry.image_size") image_size = std::stoi(value);
    else if (key == "geometry.num_views_dense") num_views_dense = std::stoi(value);
    else if (key == "geometry.num_views_sparse") num_views_sparse = std::stoi(value);
    else if (key == "geometry.pixel_size_cm") pixel_size_cm = std::stod(value);
    else if (key == "geometry.detector_spacing") detector_spacing = std::stod(value);
    else if (key == "energy.num_channels") num_channels = std::stoi(value);
    else if (key == "energy.min_kev") min_kev = std::stod(value);
    else if (key == "energy.max_kev") max_kev = std::stod(value);
    else if (key == "scale.max_attenuation") max_attenuation = std::stod(value);
    else if (key == "phantom.min_shapes") min_shapes = std::stoi(value);
    else if (key == "phantom.max_shapes") max_shapes = std::stoi(value);
    else if (key == "phantom.material_count") material_count = std::stoi(value);
    else if (key == "phantom.material_seed") material_seed = std::stoull(value);
    else if (key == "data.count") count = std::stoi(value);
    else if (key == "data.art74_target") art74_target = parse_bool(value);
    else if (key == "data.force_metal") force_metal = parse_bool(value);
    else if (key == "noise.mode") noise_mode = value;
    else if (key == "noise.sigma") noise_sigma = std::stod(value);
    else if (key == "noise.incident_counts") incident_counts = std::stod(value);
    else if (key == "noise.target_kev") noise_target_kev = parse_double_list(value);
    else if (key == "art.outer_iters") art_outer_iters = std::stoi(value);
    else if (key == "art.tv_iters") art_tv_iters = std::stoi(value);
    else if (key == "art.relaxation") art_relaxation = std::stod(value);
    else if (key == "art.relaxation_decay") art_relaxation_decay = std::stod(value);
    else if (key == "art.tv_step_ratio") art_tv_step_ratio = std::stod(value);
    else if (key == "art.nonneg") art_nonneg = parse_bool(value);
    else if (key == "tnv.lambda") tnv_lambda = std::stod(value);
    else if (key == "tnv.iters") tnv_iters = std::stoi(value);
    else if (key == "tnv.step_margin") tnv_step_margin = std::stod(value);
    else if (key == "network.base_filters") base_filters = std::stoi(value);
    else if (key == "network.levels") levels = std::stoi(value);
    else if (key == "network.dropout") dropout_rate = std::stod(value);
    else if (key == "network.residual") residual = parse_bool(value);
    else if (key == "network.single_channel") single_channel = parse_bool(value);
    else if (key == "train.epochs") epochs = std::stoi(value);
    else if (key == "train.batch_size") batch_size = std::stoi(value);
    else if (key == "train.augment_sigma") augment_sigma = std::stod(value);
    else if (key == "train.val_fraction") val_fraction = std::stod(value);
    else if (key == "train.learning_rate") learning_rate = std::stod(value);
    else if (key == "train.lr_decay") lr_decay = std::stod(value);
    else if (key == "run.seed") seed = std::stoull(value);
    else if (key == "run.threads") threads = std::stoi(value);
    else if (key == "run.out_dir") out_dir = value;
    else if (key == "bench.reps") bench_reps = std::stoi(value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::items() const {
    using P = std::pair<std::string, std::string>;
    return {
        P{"art.nonneg", art_nonneg ? "true" : "false"},
        P{"art.outer_iters", std::to_string(art_outer_iters)},
        P{"art.relaxation", format_double(art_relaxation)},
        P{"art.relaxation_decay", format_double(art_relaxation_decay)},
        P{"art.tv_iters", std::to_string(art_tv_iters)},
        P{"art.tv_step_ratio", format_double(art_tv_step_ratio)},
        P{"bench.reps", std::to_string(bench_reps)},
        P{"data.art74_target", art74_target ? "true" : "false"},
        P{"data.count", std::to_string(count)},
        P{"data.force_metal", force_metal ? "true" : "false"},
        P{"energy.max_kev", format_double(max_kev)},
        P{"energy.min_kev", format_double(min_kev)},
        P{"energy.num_channels", std::to_string(num_channels)},
        P{"geometry.detector_spacing", format_double(detector_spacing)},
        P{"geometry.image_size", std::to_string(image_size)},
        P{"geometry.num_views_dense", std::to_string(num_views_dense)},
        P{"geometry.num_views_sparse", std::to_string(num_views_sparse)},
        P{"geometry.pixel_size_cm", format_double(pixel_size_cm)},
        P{"network.base_filters", std::to_string(base_filters)},
        P{"network.dropout", format_double(dropout_rate)},
        P{"network.levels", std::to_string(levels)},
        P{"network.residual", residual ? "true" : "false"},
        P{"network.single_channel", single_channel ? "true" : "false"},
        P{"noise.incident_counts", format_double(incident_counts)},
        P{"noise.mode", noise_mode},
        P{"noise.sigma", format_double(noise_sigma)},
        P{"noise.target_kev", format_double_list(noise_target_kev)},
        P{"phantom.material_count", std::to_string(material_count)},
        P{"phantom.material_seed", std::to_string(material_seed)},
        P{"phantom.max_shapes", std::to_string(max_shapes)},
        P{"phantom.min_shapes", std::to_string(min_shapes)},
        P{"run.out_dir", out_dir},
        P{"run.seed", std::to_string(seed)},
        P{"run.threads", std::to_string(threads)},
        P{"scale.max_attenuation", format_double(max_attenuation)},
        P{"tnv.iters", std::to_string(tnv_iters)},
        P{"tnv.lambda", format_double(tnv_lambda)},
        P{"tnv.step_margin", format_double(tnv_step_margin)},
        P{"train.augment_sigma", format_double(augment_sigma)},
        P{"train.batch_size", std::to_string(batch_size)},
        P{"train.epochs", std::to_string(epochs)},
        P{"train.learning_rate", format_double(learning_rate)},
        P{"train.lr_decay", format_double(lr_decay)},
        P{"train.val_fraction", format_double(val_fraction)},
    };
}

std::string RunConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : items()) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t RunConfig::geometry_hash() const {
    std::string s;
    for (const auto& [k, v] : items())
        if (k.rfind("geometry.", 0) == 0 || k.rfind("energy.", 0) == 0 ||
            k == "scale.max_attenuation")
            s += k + "=" + v + ";";
    return fnv1a_hash(s);
}

std::uint64_t RunConfig::full_hash() const { return fnv1a_hash(serialize()); }

RunConfig parse_config_text(const std::string& text, const RunConfig& base) {
    RunConfig cfg = base;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: missing '=' on line " +
                                        std::to_string(line_no));
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path, const RunConfig& base) {
    std::ifstream is(path);
    if (!is) throw io_error("config: cannot open " + path);
    std::stringstream buffer;
    buffer << is.rdbuf();
    return parse_config_text(buffer.str(), base);
}

} // namespace sct
